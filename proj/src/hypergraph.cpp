#include "whcn/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "whcn/errors.hpp"
#include "whcn/textio.hpp"

namespace whcn {

Matrix Hypergraph::incidence() const {
    Matrix h(n_vertices, n_edges());
    for (std::size_t e = 0; e < members.size(); ++e)
        for (int v : members[e]) h(v, e) = 1.0;
    return h;
}

std::vector<std::vector<int>> Hypergraph::vertex_edges() const {
    std::vector<std::vector<int>> ve(n_vertices);
    for (std::size_t e = 0; e < members.size(); ++e)
        for (int v : members[e]) ve[v].push_back(static_cast<int>(e));
    return ve;
}

Hypergraph build_hypergraph(const SeedSet& seeds, const Matrix& descriptors, int k_h) {
    if (seeds.entries.empty()) throw NoSeeds("build_hypergraph: " + seeds.scene_id);
    const int n = static_cast<int>(descriptors.rows());
    if (n < 2) throw InvalidConfig("build_hypergraph: need at least 2 vertices");
    if (k_h < 1) throw InvalidConfig("build_hypergraph: k_h must be >= 1");

    Hypergraph hg;
    hg.n_vertices = n;

    std::map<int, std::vector<int>> by_category;
    for (const Seed& s : seeds.entries) {
        if (s.superpoint < 0 || s.superpoint >= n)
            throw ShapeMismatch("build_hypergraph: seed superpoint out of range");
        by_category[s.category].push_back(s.superpoint);
        hg.labeled_vertices.emplace_back(s.superpoint, s.category);
    }
    std::sort(hg.labeled_vertices.begin(), hg.labeled_vertices.end());

    for (auto& [cat, verts] : by_category) {
        if (verts.size() < 2) {
            hg.warnings.push_back("category " + std::to_string(cat) +
                                  " has a single seed; class hyperedge dropped");
            continue;
        }
        std::sort(verts.begin(), verts.end());
        hg.members.push_back(verts);
        hg.kinds.push_back({Hypergraph::EdgeType::Class, cat});
        hg.weights.push_back(1.0);
    }

    // descriptor-space k-NN hyperedges, one per vertex
    const int kk = std::min(k_h, n - 1);
    const std::size_t d = descriptors.cols();
    for (int v = 0; v < n; ++v) {
        std::vector<std::pair<double, int>> cand;
        cand.reserve(n - 1);
        for (int u = 0; u < n; ++u) {
            if (u == v) continue;
            double d2 = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double diff = descriptors(v, k) - descriptors(u, k);
                d2 += diff * diff;
            }
            cand.emplace_back(d2, u);
        }
        std::partial_sort(cand.begin(), cand.begin() + kk, cand.end());
        std::vector<int> edge{v};
        for (int t = 0; t < kk; ++t) edge.push_back(cand[t].second);
        std::sort(edge.begin(), edge.end());
        hg.members.push_back(std::move(edge));
        hg.kinds.push_back({Hypergraph::EdgeType::Knn, v});
        hg.weights.push_back(1.0);
    }
    return hg;
}

std::vector<double> vertex_degrees(const Hypergraph& hg) {
    std::vector<double> deg(hg.n_vertices, 0.0);
    for (std::size_t e = 0; e < hg.members.size(); ++e)
        for (int v : hg.members[e]) deg[v] += hg.weights[e];
    return deg;
}

std::vector<double> hyperedge_degrees(const Hypergraph& hg) {
    std::vector<double> deg(hg.n_edges());
    for (std::size_t e = 0; e < hg.members.size(); ++e)
        deg[e] = static_cast<double>(hg.members[e].size());
    return deg;
}

Matrix hypergraph_laplacian(const Hypergraph& hg) {
    const int n = hg.n_vertices;
    const std::vector<double> d = vertex_degrees(hg);
    std::vector<double> s(n);
    for (int v = 0; v < n; ++v) s[v] = d[v] > 0.0 ? 1.0 / std::sqrt(d[v]) : 0.0;

    // accumulate the upper triangle of D^{-1/2} H W B^{-1} H^T D^{-1/2}
    Matrix lap(n, n);
    for (std::size_t e = 0; e < hg.members.size(); ++e) {
        const auto& mem = hg.members[e];
        const double scale = hg.weights[e] / static_cast<double>(mem.size());
        for (std::size_t a = 0; a < mem.size(); ++a)
            for (std::size_t b = a; b < mem.size(); ++b)
                lap(mem[a], mem[b]) += scale * s[mem[a]] * s[mem[b]];
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = (i == j ? 1.0 : 0.0) - lap(i, j);
            lap(i, j) = v;
            lap(j, i) = v;
        }
    }
    return lap;
}

void save_hypergraph(const Hypergraph& hg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_hypergraph: cannot open " + path);
    out << hg.n_vertices << '\n';
    for (std::size_t e = 0; e < hg.members.size(); ++e) {
        out << (hg.kinds[e].type == Hypergraph::EdgeType::Class ? "class" : "knn") << ' '
            << hg.kinds[e].id << ' ' << format_double(hg.weights[e]);
        for (int v : hg.members[e]) out << ' ' << v;
        out << '\n';
    }
    if (!out) throw IoError("save_hypergraph: write failed for " + path);
}

}  // namespace whcn
