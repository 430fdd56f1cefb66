#include "whcn/finite_diff.hpp"

#include <cmath>

#include "whcn/errors.hpp"

namespace whcn {

Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f,
                        const Matrix& x, double h) {
    if (!(h > 0.0)) throw NonFiniteEvaluation("finite_diff_grad: h must be > 0");
    Matrix grad(x.rows(), x.cols());
    Matrix probe = x;
    for (std::size_t k = 0; k < probe.size(); ++k) {
        const double orig = probe.data()[k];
        probe.data()[k] = orig + h;
        const double fp = f(probe);
        probe.data()[k] = orig - h;
        const double fm = f(probe);
        probe.data()[k] = orig;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw NonFiniteEvaluation("finite_diff_grad: probe at index " +
                                      std::to_string(k));
        grad.data()[k] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

}  // namespace whcn
