#pragma once

#include <cstdint>

#include "whcn/matrix.hpp"

namespace whcn {

// One Adam-tracked parameter tensor: moment estimates plus hyperparameters.
struct AdamState {
    Matrix first_moment;
    Matrix second_moment;
    std::int64_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double learning_rate = 0.003;

    AdamState() = default;
    AdamState(std::size_t rows, std::size_t cols, double lr = 0.003)
        : first_moment(rows, cols), second_moment(rows, cols), learning_rate(lr) {}
};

// Standard bias-corrected Adam update, applied in place. Throws ShapeMismatch
// if params/grads/state shapes disagree. Deterministic: identical inputs give
// bit-identical outputs.
void adam_step(Matrix& params, const Matrix& grads, AdamState& state);

}  // namespace whcn
