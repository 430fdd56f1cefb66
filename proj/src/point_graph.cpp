#include "whcn/point_graph.hpp"

#include <algorithm>
#include <queue>

#include "whcn/errors.hpp"

namespace whcn {

std::vector<std::vector<int>> PointGraph::adjacency() const {
    std::vector<std::vector<int>> adj(n);
    for (auto [i, j] : edges) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
}

namespace {

double dist2(const Vec3& a, const Vec3& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

// k nearest of point i by (distance, index); writes exactly k neighbors.
void nearest_of(const std::vector<Vec3>& pts, int i, int k, std::vector<int>& out) {
    const int n = static_cast<int>(pts.size());
    std::vector<std::pair<double, int>> cand;
    cand.reserve(n - 1);
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        cand.emplace_back(dist2(pts[i], pts[j]), j);
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    out.resize(k);
    for (int t = 0; t < k; ++t) out[t] = cand[t].second;
}

}  // namespace

PointGraph knn_graph(const std::vector<Vec3>& points, int k, Exec exec) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw TooFewPoints("knn_graph: need at least 2 points, got " +
                                  std::to_string(n));
    if (k < 1 || k > n - 1)
        throw InvalidK("knn_graph: k=" + std::to_string(k) + " outside [1, " +
                       std::to_string(n - 1) + "]");

    std::vector<std::vector<int>> nn(n);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) nearest_of(points, i, k, nn[i]);
    } else {
        for (int i = 0; i < n; ++i) nearest_of(points, i, k, nn[i]);
    }

    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(n) * k);
    for (int i = 0; i < n; ++i)
        for (int j : nn[i]) edges.emplace_back(std::min(i, j), std::max(i, j));
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    PointGraph g;
    g.n = static_cast<std::size_t>(n);
    g.k = k;
    g.edges = std::move(edges);
    return g;
}

std::vector<int> connected_components(const PointGraph& graph, int* out_count) {
    const auto adj = graph.adjacency();
    std::vector<int> comp(graph.n, -1);
    int next = 0;
    for (std::size_t s = 0; s < graph.n; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = next;
        std::queue<int> q;
        q.push(static_cast<int>(s));
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[u]) {
                if (comp[v] < 0) {
                    comp[v] = next;
                    q.push(v);
                }
            }
        }
        ++next;
    }
    if (out_count) *out_count = next;
    return comp;
}

}  // namespace whcn
