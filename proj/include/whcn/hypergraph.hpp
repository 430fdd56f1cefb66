#pragma once

#include <string>
#include <utility>
#include <vector>

#include "whcn/matrix.hpp"
#include "whcn/seed_select.hpp"

namespace whcn {

// Hypergraph over superpoint vertices: one class hyperedge per category with
// at least two seeds, plus one descriptor-space k-NN hyperedge per vertex so
// unlabeled vertices stay reachable. Immutable after construction except for
// the weights, which the network re-learns each layer.
struct Hypergraph {
    enum class EdgeType { Class, Knn };
    struct EdgeKind {
        EdgeType type = EdgeType::Class;
        int id = 0;  // category for Class, center vertex for Knn
        bool operator==(const EdgeKind&) const = default;
    };

    int n_vertices = 0;
    std::vector<std::vector<int>> members;  // per edge, ascending vertex ids
    std::vector<double> weights;            // diagonal of W, all > 0
    std::vector<EdgeKind> kinds;
    std::vector<std::pair<int, int>> labeled_vertices;  // (vertex, category)
    std::vector<std::string> warnings;  // e.g. dropped single-seed categories

    std::size_t n_edges() const { return members.size(); }
    Matrix incidence() const;  // dense N x E 0/1
    // per-vertex incident edge ids, ascending
    std::vector<std::vector<int>> vertex_edges() const;
};

// Throws NoSeeds on an empty seed set, InvalidConfig for k_h < 1 or N < 2.
Hypergraph build_hypergraph(const SeedSet& seeds, const Matrix& descriptors, int k_h);

// d(v) = sum_e w(e) h(v,e)
std::vector<double> vertex_degrees(const Hypergraph& hg);
// b(e) = sum_v h(v,e)
std::vector<double> hyperedge_degrees(const Hypergraph& hg);

// Normalized Laplacian I - D^{-1/2} H W B^{-1} H^T D^{-1/2}, with the
// pseudo-inverse convention: zero-degree vertices keep their identity row.
// Exactly symmetric by construction.
Matrix hypergraph_laplacian(const Hypergraph& hg);

// Debug dump: vertex count line, then `kind id weight members...` per edge.
void save_hypergraph(const Hypergraph& hg, const std::string& path);

}  // namespace whcn
