#pragma once

#include "whcn/cloud.hpp"
#include "whcn/exec.hpp"
#include "whcn/matrix.hpp"
#include "whcn/point_graph.hpp"

namespace whcn {

// Per-point geometric features from the eigenvalues l1 >= l2 >= l3 >= 0 of
// the neighborhood covariance (the point itself plus its graph neighbors):
//   linearity  = (l1 - l2) / l1
//   planarity  = (l2 - l3) / l1
//   scattering = l3 / l1
//   verticality = 1 - |<n, z>|, n = unit eigenvector of l3
// Degenerate neighborhoods (l1 <= 1e-12) get all four features 0.
// Columns: linearity, planarity, scattering, verticality; all in [0, 1].
Matrix geometric_features(const std::vector<Vec3>& points, const PointGraph& graph,
                          Exec exec = Exec::Parallel);

}  // namespace whcn
