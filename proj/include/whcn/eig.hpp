#pragma once

#include <vector>

#include "whcn/matrix.hpp"

namespace whcn {

struct EigResult {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column k pairs with values[k]
};

// Symmetric eigendecomposition by cyclic Jacobi rotations. Input must be
// square and symmetric within 1e-9 (max entry asymmetry); throws NotSquare /
// NotSymmetric otherwise. Converges to off-diagonal norm <= 1e-12 relative to
// the input scale.
EigResult sym_eig(const Matrix& m);

}  // namespace whcn
