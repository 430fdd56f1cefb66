#include "whcn/adam.hpp"

#include <cmath>

#include "whcn/errors.hpp"

namespace whcn {

void adam_step(Matrix& params, const Matrix& grads, AdamState& state) {
    if (!params.same_shape(grads))
        throw ShapeMismatch("adam_step: params vs grads");
    if (!params.same_shape(state.first_moment) || !params.same_shape(state.second_moment))
        throw ShapeMismatch("adam_step: params vs state moments");

    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);

    auto& m = state.first_moment.data();
    auto& v = state.second_moment.data();
    auto& p = params.data();
    const auto& g = grads.data();
    for (std::size_t k = 0; k < p.size(); ++k) {
        m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g[k];
        v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g[k] * g[k];
        const double mhat = m[k] / bc1;
        const double vhat = v[k] / bc2;
        p[k] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    }
}

}  // namespace whcn
