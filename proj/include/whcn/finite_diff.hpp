#pragma once

#include <functional>

#include "whcn/matrix.hpp"

namespace whcn {

// Central-difference gradient of a scalar function of a matrix:
// g_k = (f(x + h e_k) - f(x - h e_k)) / (2h). Throws NonFiniteEvaluation if
// any probe returns NaN/Inf. Test oracle for every analytic gradient.
Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f,
                        const Matrix& x, double h);

}  // namespace whcn
