#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "whcn/matrix.hpp"
#include "whcn/point_graph.hpp"

namespace whcn {

struct PartitionEnergyParams {
    double rho = 0.03;  // boundary-edge penalty; larger means fewer regions
};

// A partition of the points into connected superpoints. Region ids are dense
// in [0, N), numbered by first point occurrence; region_means row r is the
// feature mean over the points of region r.
struct SuperpointPartition {
    std::vector<int> assignment;
    int n_superpoints = 0;
    Matrix region_means;  // N x d
};

// Builds a normalized partition (dense ids + means) from a raw assignment.
SuperpointPartition make_partition(const std::vector<int>& raw_assignment,
                                   const Matrix& features);

// Sum of squared deviations from region means plus rho times the number of
// graph edges whose endpoints lie in different regions. The means are
// recomputed from the assignment, i.e. the optimal piecewise-constant fit.
double partition_energy(const Matrix& features, const PointGraph& graph,
                        const SuperpointPartition& partition,
                        const PartitionEnergyParams& params);

struct CutPursuitResult {
    SuperpointPartition partition;
    // energy after initialization and after every accepted split
    std::vector<double> energy_trace;
};

// Greedy top-down minimizer: repeatedly 2-splits regions via the max-flow
// binary subproblem, refines sides into connected components, and accepts
// only strictly energy-decreasing splits. Halts early once max_superpoints
// is reached.
CutPursuitResult l0_cut_pursuit(const Matrix& features, const PointGraph& graph,
                                const PartitionEnergyParams& params,
                                std::optional<int> max_superpoints = std::nullopt);

// Visits every set partition of {0..n-1} as a block-id vector (restricted
// growth strings); returns the number visited (the Bell number).
std::uint64_t for_each_set_partition(
    int n, const std::function<void(const std::vector<int>&)>& visit);

struct BruteForceResult {
    SuperpointPartition partition;
    double energy = 0.0;
    std::uint64_t raw_partitions = 0;  // Bell(n) candidates before refinement
};

// Exact minimizer over all set partitions refined to graph-connected parts.
// Throws TooLarge for n > 9.
BruteForceResult brute_force_partition(const Matrix& features, const PointGraph& graph,
                                       const PartitionEnergyParams& params);

}  // namespace whcn
