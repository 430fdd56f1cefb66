#pragma once

#include "whcn/cloud.hpp"
#include "whcn/cut_pursuit.hpp"
#include "whcn/matrix.hpp"

namespace whcn {

inline constexpr int kDescriptorDim = 16;

// Fixed 16-dim descriptor per superpoint, all components translation
// invariant:
//   [0..3]   mean of the four geometric features
//   [4..7]   population std of the four geometric features
//   [8..10]  mean color
//   [11..13] bounding-box extents
//   [14]     mean height above the cloud's minimum z
//   [15]     log point count / log total points
Matrix superpoint_descriptors(const LabeledCloud& cloud, const Matrix& geom_features,
                              const SuperpointPartition& partition);

// Column-wise z-score over a stack of descriptor rows; columns with
// near-zero spread are left centered but unscaled. Returns (mean, std) used.
struct ColumnStats {
    std::vector<double> mean;
    std::vector<double> std;
};
ColumnStats column_stats(const std::vector<const Matrix*>& blocks);
void standardize_columns(Matrix& m, const ColumnStats& stats);

}  // namespace whcn
