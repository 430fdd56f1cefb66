#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "whcn/cut_pursuit.hpp"
#include "whcn/errors.hpp"
#include "whcn/max_flow.hpp"
#include "whcn/rng.hpp"

using namespace whcn;

namespace {

PointGraph graph_from_edges(std::size_t n, std::vector<std::pair<int, int>> edges) {
    PointGraph g;
    g.n = n;
    g.k = 1;
    std::sort(edges.begin(), edges.end());
    g.edges = std::move(edges);
    return g;
}

// random connected instance: spanning tree plus extra edges, uniform features
void random_instance(int n, int d, Rng& rng, Matrix& features, PointGraph& graph) {
    features = Matrix(n, d);
    for (auto& v : features.data()) v = rng.uniform(0.0, 1.0);
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < n; ++v) {
        int u = static_cast<int>(rng.uniform_index(v));
        edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    const int extra = n / 2;
    for (int e = 0; e < extra; ++e) {
        int u = static_cast<int>(rng.uniform_index(n));
        int v = static_cast<int>(rng.uniform_index(n));
        if (u == v) continue;
        edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    graph = graph_from_edges(n, std::move(edges));
}

void check_partition_valid(const SuperpointPartition& part, const Matrix& features,
                           const PointGraph& graph) {
    const int n_sp = part.n_superpoints;
    std::vector<int> counts(n_sp, 0);
    for (int a : part.assignment) {
        REQUIRE(a >= 0);
        REQUIRE(a < n_sp);
        counts[a] += 1;
    }
    for (int r = 0; r < n_sp; ++r) CHECK(counts[r] >= 1);

    // means match a fresh computation
    const std::size_t d = features.cols();
    Matrix sums(n_sp, d);
    for (std::size_t i = 0; i < part.assignment.size(); ++i)
        for (std::size_t k = 0; k < d; ++k)
            sums(part.assignment[i], k) += features(i, k);
    for (int r = 0; r < n_sp; ++r)
        for (std::size_t k = 0; k < d; ++k)
            CHECK(std::abs(sums(r, k) / counts[r] - part.region_means(r, k)) <= 1e-9);

    // every region is connected in the point graph
    auto adj = graph.adjacency();
    for (int r = 0; r < n_sp; ++r) {
        std::vector<int> members;
        for (std::size_t i = 0; i < part.assignment.size(); ++i)
            if (part.assignment[i] == r) members.push_back(static_cast<int>(i));
        std::set<int> seen{members[0]};
        std::vector<int> stack{members[0]};
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[u])
                if (part.assignment[v] == r && !seen.count(v)) {
                    seen.insert(v);
                    stack.push_back(v);
                }
        }
        CHECK(seen.size() == members.size());
    }
}

}  // namespace

TEST_CASE("max flow on a classic small network") {
    MaxFlowGraph g(4);
    // 0 = source, 3 = sink
    g.add_edge(0, 1, 3);
    g.add_edge(0, 2, 2);
    g.add_edge(1, 2, 1);
    g.add_edge(1, 3, 2);
    g.add_edge(2, 3, 3);
    CHECK(g.max_flow(0, 3) == doctest::Approx(5.0));
    CHECK(g.source_side(0));
    CHECK(!g.source_side(3));
}

TEST_CASE("partition_energy closed forms") {
    // 4-node path, scalar features 0,0,1,1
    Matrix f(4, 1);
    f(2, 0) = 1;
    f(3, 0) = 1;
    PointGraph g = graph_from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
    PartitionEnergyParams rho01{0.1};

    SuperpointPartition split = make_partition({0, 0, 1, 1}, f);
    CHECK(partition_energy(f, g, split, rho01) == doctest::Approx(0.1).epsilon(1e-12));

    SuperpointPartition singletons = make_partition({0, 1, 2, 3}, f);
    CHECK(partition_energy(f, g, singletons, rho01) ==
          doctest::Approx(0.1 * 3).epsilon(1e-12));

    SuperpointPartition merged = make_partition({0, 0, 0, 0}, f);
    // fidelity of (0,0,1,1) around mean 0.5 is 4 * 0.25
    CHECK(partition_energy(f, g, merged, rho01) == doctest::Approx(1.0).epsilon(1e-12));

    Matrix wrong(3, 1);
    CHECK_THROWS_AS(partition_energy(wrong, g, merged, rho01), ShapeMismatch);
}

TEST_CASE("brute force two-node split threshold") {
    Matrix f(2, 1);
    f(1, 0) = 1.0;
    PointGraph g = graph_from_edges(2, {{0, 1}});

    BruteForceResult merged = brute_force_partition(f, g, {0.6});
    CHECK(merged.partition.n_superpoints == 1);
    CHECK(merged.energy == doctest::Approx(0.5).epsilon(1e-12));

    BruteForceResult split = brute_force_partition(f, g, {0.4});
    CHECK(split.partition.n_superpoints == 2);
    CHECK(split.energy == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("brute force enumerates Bell(4) raw partitions") {
    Matrix f(4, 1);
    PointGraph g = graph_from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
    BruteForceResult r = brute_force_partition(f, g, {0.1});
    CHECK(r.raw_partitions == 15);

    std::uint64_t bell5 = for_each_set_partition(5, [](const std::vector<int>&) {});
    CHECK(bell5 == 52);
}

TEST_CASE("brute force rejects n > 9") {
    Matrix f(10, 1);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < 10; ++i) edges.emplace_back(i, i + 1);
    PointGraph g = graph_from_edges(10, std::move(edges));
    CHECK_THROWS_AS(brute_force_partition(f, g, {0.1}), TooLarge);
}

TEST_CASE("two feature clusters over a bridge split exactly in two") {
    // 8 nodes: clique-ish cluster {0..3} near 0, cluster {4..7} near 1,
    // one bridge edge 3-4
    Matrix f(8, 1);
    const double eps[8] = {0.00, 0.01, -0.01, 0.005, 1.00, 0.99, 1.01, 1.005};
    for (int i = 0; i < 8; ++i) f(i, 0) = eps[i];
    PointGraph g = graph_from_edges(
        8, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}, {4, 6}, {5, 6}, {5, 7}, {6, 7}});
    PartitionEnergyParams params{0.05};

    CutPursuitResult greedy = l0_cut_pursuit(f, g, params);
    CHECK(greedy.partition.n_superpoints == 2);
    for (int i = 0; i < 4; ++i) CHECK(greedy.partition.assignment[i] == greedy.partition.assignment[0]);
    for (int i = 4; i < 8; ++i) CHECK(greedy.partition.assignment[i] == greedy.partition.assignment[4]);
    CHECK(greedy.partition.assignment[0] != greedy.partition.assignment[4]);

    // the greedy answer is the global optimum here
    BruteForceResult oracle = brute_force_partition(f, g, params);
    CHECK(oracle.partition.n_superpoints == 2);
    CHECK(greedy.energy_trace.back() == doctest::Approx(oracle.energy).epsilon(1e-9));
}

TEST_CASE("huge rho collapses to a single superpoint") {
    Rng rng(3);
    Matrix f;
    PointGraph g;
    random_instance(12, 2, rng, f, g);
    const double rho = 10.0 * 1.0 * 12;  // 10 * range^2 * n
    CutPursuitResult r = l0_cut_pursuit(f, g, {rho});
    CHECK(r.partition.n_superpoints == 1);
}

TEST_CASE("rho zero yields singletons at zero energy") {
    Matrix f(6, 1);
    for (int i = 0; i < 6; ++i) f(i, 0) = 0.1 * i;  // distinct features
    PointGraph g = graph_from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
    CutPursuitResult r = l0_cut_pursuit(f, g, {0.0});
    CHECK(r.partition.n_superpoints == 6);
    CHECK(r.energy_trace.back() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("max_superpoints halts the splitting") {
    // 4 feature plateaus along a path; every profitable split is binary
    Matrix f(16, 1);
    for (int i = 0; i < 16; ++i) f(i, 0) = static_cast<double>(i / 4) + 0.001 * i;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < 16; ++i) edges.emplace_back(i, i + 1);
    PointGraph g = graph_from_edges(16, std::move(edges));
    PartitionEnergyParams params{0.05};

    CHECK(l0_cut_pursuit(f, g, params).partition.n_superpoints == 4);
    CHECK(l0_cut_pursuit(f, g, params, 2).partition.n_superpoints == 2);
    CHECK(l0_cut_pursuit(f, g, params, 3).partition.n_superpoints == 3);
    CHECK(l0_cut_pursuit(f, g, params, 4).partition.n_superpoints == 4);
}

TEST_CASE("greedy energy trace is monotone and ends at the partition energy") {
    Rng rng(21);
    for (int it = 0; it < 10; ++it) {
        Matrix f;
        PointGraph g;
        random_instance(30, 2, rng, f, g);
        PartitionEnergyParams params{0.05};
        CutPursuitResult r = l0_cut_pursuit(f, g, params);
        for (std::size_t k = 1; k < r.energy_trace.size(); ++k)
            CHECK(r.energy_trace[k] < r.energy_trace[k - 1]);
        CHECK(partition_energy(f, g, r.partition, params) ==
              doctest::Approx(r.energy_trace.back()).epsilon(1e-9));
        check_partition_valid(r.partition, f, g);
    }
}

TEST_CASE("oracle never loses to the greedy on 25 random instances") {
    Rng rng(33);
    for (int it = 0; it < 25; ++it) {
        Matrix f;
        PointGraph g;
        random_instance(6, 2, rng, f, g);
        PartitionEnergyParams params{0.1};
        BruteForceResult oracle = brute_force_partition(f, g, params);
        CutPursuitResult greedy = l0_cut_pursuit(f, g, params);
        CHECK(oracle.energy <= greedy.energy_trace.back() + 1e-9);
    }
}

TEST_CASE("increasing rho never increases the superpoint count") {
    Rng rng(41);
    for (int inst = 0; inst < 3; ++inst) {
        Matrix f;
        PointGraph g;
        random_instance(35, 2, rng, f, g);
        int prev = std::numeric_limits<int>::max();
        for (double rho : {0.0, 0.005, 0.02, 0.1, 0.5, 2.0, 10.0}) {
            CutPursuitResult r = l0_cut_pursuit(f, g, {rho});
            CHECK(r.partition.n_superpoints <= prev);
            prev = r.partition.n_superpoints;
        }
    }
}
