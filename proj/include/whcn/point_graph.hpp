#pragma once

#include <utility>
#include <vector>

#include "whcn/cloud.hpp"
#include "whcn/exec.hpp"

namespace whcn {

// Undirected k-NN graph over points: the directed k-nearest relation under
// Euclidean distance, symmetrized by union. Distance ties break toward the
// lower point index.
struct PointGraph {
    std::size_t n = 0;
    int k = 0;
    std::vector<std::pair<int, int>> edges;  // i < j, sorted, no duplicates

    // Neighbor lists (ascending), built from edges.
    std::vector<std::vector<int>> adjacency() const;
};

// Throws TooFewPoints (n < 2) or InvalidK (k outside [1, n-1]).
PointGraph knn_graph(const std::vector<Vec3>& points, int k, Exec exec = Exec::Parallel);

// Connected components; returns component id per vertex, ids dense from 0 in
// order of first appearance.
std::vector<int> connected_components(const PointGraph& graph, int* out_count = nullptr);

}  // namespace whcn
