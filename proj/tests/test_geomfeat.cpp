#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "whcn/errors.hpp"
#include "whcn/geom_features.hpp"
#include "whcn/point_graph.hpp"
#include "whcn/rng.hpp"

using namespace whcn;

TEST_CASE("knn_graph on 3 collinear points") {
    std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {3, 0, 0}};
    PointGraph g = knn_graph(pts, 1);
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0] == std::pair<int, int>(0, 1));
    CHECK(g.edges[1] == std::pair<int, int>(1, 2));
}

TEST_CASE("knn_graph saturates to the complete graph at k = n-1") {
    Rng rng(3);
    std::vector<Vec3> pts(7);
    for (auto& p : pts) p = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
    PointGraph g = knn_graph(pts, 6);
    CHECK(g.edges.size() == 7 * 6 / 2);
}

TEST_CASE("knn_graph edge bound and validation") {
    Rng rng(5);
    std::vector<Vec3> pts(40);
    for (auto& p : pts) p = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
    PointGraph g = knn_graph(pts, 4);
    CHECK(g.edges.size() <= 40 * 4);
    for (auto [i, j] : g.edges) CHECK(i < j);

    CHECK_THROWS_AS(knn_graph({{0, 0, 0}}, 1), TooFewPoints);
    CHECK_THROWS_AS(knn_graph(pts, 0), InvalidK);
    CHECK_THROWS_AS(knn_graph(pts, 40), InvalidK);
}

TEST_CASE("knn_graph serial and parallel agree exactly") {
    Rng rng(7);
    std::vector<Vec3> pts(300);
    for (auto& p : pts) p = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
    PointGraph gs = knn_graph(pts, 8, Exec::Serial);
    PointGraph gp = knn_graph(pts, 8, Exec::Parallel);
    CHECK(gs.edges == gp.edges);
}

TEST_CASE("points on a line are linear") {
    std::vector<Vec3> pts;
    Rng rng(11);
    for (int i = 0; i < 60; ++i) {
        double t = 0.05 * i;
        pts.push_back({t, 2.0 * t, -t});
    }
    PointGraph g = knn_graph(pts, 6);
    Matrix f = geometric_features(pts, g);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(f(i, 0) >= 0.99);
        CHECK(f(i, 1) <= 0.01);
        CHECK(f(i, 2) <= 0.01);
    }
}

TEST_CASE("points on a horizontal plane are planar with vertical normal") {
    // regular grid: interior 8-neighborhoods have exactly isotropic rank-2
    // covariance, the limit where planarity -> 1
    const int side = 20;
    std::vector<Vec3> pts;
    for (int gy = 0; gy < side; ++gy)
        for (int gx = 0; gx < side; ++gx)
            pts.push_back({0.1 * gx, 0.1 * gy, 0.7});
    PointGraph g = knn_graph(pts, 8);
    Matrix f = geometric_features(pts, g);
    for (int gy = 0; gy < side; ++gy) {
        for (int gx = 0; gx < side; ++gx) {
            const std::size_t i = static_cast<std::size_t>(gy) * side + gx;
            CHECK(f(i, 3) <= 0.01);  // normal stays vertical everywhere
            // boundary ties leak asymmetric neighbors up to two rings in
            const bool deep = gx >= 3 && gx <= side - 4 && gy >= 3 && gy <= side - 4;
            if (deep) CHECK(f(i, 1) >= 0.99);
        }
    }

    // complete graph: every neighborhood is the whole (symmetric) grid
    PointGraph full = knn_graph(pts, side * side - 1);
    Matrix ff = geometric_features(pts, full);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(ff(i, 1) >= 0.99);
        CHECK(ff(i, 3) <= 0.01);
    }
}

// Threshold 0.40 frozen from a 10-seed Monte-Carlo run of this exact
// computation (per-seed mean scattering landed in [0.427, 0.462]).
TEST_CASE("isotropic Gaussian ball has high mean scattering") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(mix_seed(seed, 41));
        std::vector<Vec3> pts(500);
        for (auto& p : pts)
            p = {rng.normal(0, 0.3), rng.normal(0, 0.3), rng.normal(0, 0.3)};
        PointGraph g = knn_graph(pts, 20);
        Matrix f = geometric_features(pts, g);
        double mean_scat = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) mean_scat += f(i, 2);
        mean_scat /= static_cast<double>(pts.size());
        CHECK(mean_scat >= 0.40);
    }
}

TEST_CASE("feature ratios sum to one and sit in [0,1]") {
    Rng rng(17);
    std::vector<Vec3> pts(300);
    for (auto& p : pts)
        p = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.1, 0.1)};
    PointGraph g = knn_graph(pts, 10);
    Matrix f = geometric_features(pts, g);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (int c = 0; c < 4; ++c) {
            CHECK(f(i, c) >= -1e-9);
            CHECK(f(i, c) <= 1.0 + 1e-9);
        }
        CHECK(std::abs(f(i, 0) + f(i, 1) + f(i, 2) - 1.0) <= 1e-9);
    }
}

TEST_CASE("features are invariant to translation and point permutation") {
    Rng rng(19);
    std::vector<Vec3> pts(120);
    for (auto& p : pts)
        p = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    PointGraph g = knn_graph(pts, 5);
    Matrix f0 = geometric_features(pts, g);

    std::vector<Vec3> moved = pts;
    for (auto& p : moved) {
        p[0] += 10.0;
        p[1] -= 3.0;
        p[2] += 0.5;
    }
    Matrix f1 = geometric_features(moved, g);
    for (std::size_t k = 0; k < f0.size(); ++k)
        CHECK(std::abs(f0.data()[k] - f1.data()[k]) <= 1e-7);

    // permute points; remap the graph edges accordingly
    std::vector<int> perm(pts.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    std::reverse(perm.begin(), perm.end());
    std::vector<Vec3> shuffled(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) shuffled[perm[i]] = pts[i];
    PointGraph gp;
    gp.n = g.n;
    gp.k = g.k;
    for (auto [i, j] : g.edges) {
        int a = perm[i], b = perm[j];
        gp.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(gp.edges.begin(), gp.edges.end());
    Matrix f2 = geometric_features(shuffled, gp);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (int c = 0; c < 4; ++c)
            CHECK(std::abs(f0(i, c) - f2(perm[i], c)) <= 1e-9);
}

TEST_CASE("verticality is invariant to rotation about z") {
    Rng rng(23);
    std::vector<Vec3> pts(150);
    for (auto& p : pts)
        p = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.2, 0.2)};
    PointGraph g = knn_graph(pts, 6);
    Matrix f0 = geometric_features(pts, g);

    const double th = 1.1;
    std::vector<Vec3> rot(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        rot[i] = {std::cos(th) * pts[i][0] - std::sin(th) * pts[i][1],
                  std::sin(th) * pts[i][0] + std::cos(th) * pts[i][1], pts[i][2]};
    }
    // rotation preserves distances, so the same graph applies
    Matrix f1 = geometric_features(rot, g);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(std::abs(f0(i, 3) - f1(i, 3)) <= 1e-6);
}

TEST_CASE("geometric_features serial and parallel are bitwise identical") {
    Rng rng(29);
    std::vector<Vec3> pts(400);
    for (auto& p : pts)
        p = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    PointGraph g = knn_graph(pts, 10);
    Matrix fs = geometric_features(pts, g, Exec::Serial);
    Matrix fp = geometric_features(pts, g, Exec::Parallel);
    CHECK(fs == fp);
}
