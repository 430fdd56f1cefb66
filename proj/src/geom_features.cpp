#include "whcn/geom_features.hpp"

#include <cmath>

#include "whcn/eig.hpp"
#include "whcn/errors.hpp"

namespace whcn {

namespace {

void features_of(const std::vector<Vec3>& pts, const std::vector<std::vector<int>>& adj,
                 int i, Matrix& out) {
    // neighborhood: the point itself plus its neighbors, fixed ascending order
    double mean[3] = {0, 0, 0};
    const auto& nb = adj[i];
    const double m = static_cast<double>(nb.size() + 1);
    for (int ax = 0; ax < 3; ++ax) mean[ax] = pts[i][ax];
    for (int j : nb)
        for (int ax = 0; ax < 3; ++ax) mean[ax] += pts[j][ax];
    for (int ax = 0; ax < 3; ++ax) mean[ax] /= m;

    Matrix cov(3, 3);
    auto accumulate = [&](const Vec3& p) {
        double d[3] = {p[0] - mean[0], p[1] - mean[1], p[2] - mean[2]};
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) cov(a, b) += d[a] * d[b];
    };
    accumulate(pts[i]);
    for (int j : nb) accumulate(pts[j]);
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            cov(a, b) /= m;
            cov(b, a) = cov(a, b);
        }

    EigResult eig = sym_eig(cov);  // ascending
    const double l1 = std::max(0.0, eig.values[2]);
    const double l2 = std::max(0.0, eig.values[1]);
    const double l3 = std::max(0.0, eig.values[0]);

    if (l1 <= 1e-12) {
        for (int c = 0; c < 4; ++c) out(i, c) = 0.0;
        return;
    }
    out(i, 0) = (l1 - l2) / l1;
    out(i, 1) = (l2 - l3) / l1;
    out(i, 2) = l3 / l1;
    // eigenvector of the smallest eigenvalue is column 0
    out(i, 3) = 1.0 - std::abs(eig.vectors(2, 0));
}

}  // namespace

Matrix geometric_features(const std::vector<Vec3>& points, const PointGraph& graph,
                          Exec exec) {
    if (points.size() != graph.n)
        throw ShapeMismatch("geometric_features: graph built over different point count");
    const int n = static_cast<int>(points.size());
    const auto adj = graph.adjacency();
    Matrix out(points.size(), 4);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) features_of(points, adj, i, out);
    } else {
        for (int i = 0; i < n; ++i) features_of(points, adj, i, out);
    }
    return out;
}

}  // namespace whcn
