#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "whcn/eig.hpp"
#include "whcn/errors.hpp"
#include "whcn/hypergraph.hpp"
#include "whcn/rng.hpp"

using namespace whcn;

namespace {

// hand-built 3-vertex hypergraph with incidence [[1,0],[1,1],[0,1]]
Hypergraph tiny_hypergraph(double w0 = 1.0, double w1 = 1.0) {
    Hypergraph hg;
    hg.n_vertices = 3;
    hg.members = {{0, 1}, {1, 2}};
    hg.weights = {w0, w1};
    hg.kinds = {{Hypergraph::EdgeType::Class, 0}, {Hypergraph::EdgeType::Class, 1}};
    return hg;
}

SeedSet seeds_of(std::vector<Seed> entries) {
    SeedSet s;
    s.scene_id = "t";
    s.entries = std::move(entries);
    return s;
}

}  // namespace

TEST_CASE("build_hypergraph composes class and knn hyperedges") {
    Rng rng(51);
    Matrix desc(10, 4);
    for (auto& v : desc.data()) v = rng.uniform(-1, 1);
    SeedSet seeds = seeds_of({{0, 0, 1.0}, {1, 0, 0.9}, {2, 1, 0.8}, {3, 1, 0.7}});

    Hypergraph hg = build_hypergraph(seeds, desc, 3);
    CHECK(hg.n_vertices == 10);
    CHECK(hg.n_edges() == 2 + 10);
    CHECK(hg.warnings.empty());

    // class hyperedges match the seeds exactly
    CHECK(hg.members[0] == std::vector<int>{0, 1});
    CHECK(hg.kinds[0] == Hypergraph::EdgeKind{Hypergraph::EdgeType::Class, 0});
    CHECK(hg.members[1] == std::vector<int>{2, 3});

    for (std::size_t e = 2; e < hg.n_edges(); ++e) {
        CHECK(hg.members[e].size() == 4);  // center + 3 neighbors
        CHECK(hg.kinds[e].type == Hypergraph::EdgeType::Knn);
        const int center = hg.kinds[e].id;
        CHECK(std::count(hg.members[e].begin(), hg.members[e].end(), center) == 1);
    }
    for (double w : hg.weights) CHECK(w == 1.0);
    CHECK(hg.labeled_vertices.size() == 4);
}

TEST_CASE("single-seed categories are dropped with a warning naming them") {
    Rng rng(53);
    Matrix desc(6, 3);
    for (auto& v : desc.data()) v = rng.uniform(-1, 1);
    SeedSet seeds = seeds_of({{0, 0, 1.0}, {1, 0, 0.9}, {4, 2, 0.8}});

    Hypergraph hg = build_hypergraph(seeds, desc, 2);
    REQUIRE(hg.warnings.size() == 1);
    CHECK(hg.warnings[0].find("category 2") != std::string::npos);
    for (const auto& kind : hg.kinds)
        if (kind.type == Hypergraph::EdgeType::Class) CHECK(kind.id == 0);
}

TEST_CASE("build_hypergraph rejects an empty seed set") {
    Matrix desc(4, 2);
    CHECK_THROWS_AS(build_hypergraph(seeds_of({}), desc, 2), NoSeeds);
}

TEST_CASE("vertex degrees follow the weighted incidence sum") {
    Hypergraph hg = tiny_hypergraph(1.0, 1.0);
    CHECK(vertex_degrees(hg) == std::vector<double>{1.0, 2.0, 1.0});
    Hypergraph hg2 = tiny_hypergraph(2.0, 1.0);
    CHECK(vertex_degrees(hg2) == std::vector<double>{2.0, 3.0, 1.0});
}

TEST_CASE("hyperedge degrees are member counts") {
    Hypergraph hg = tiny_hypergraph();
    CHECK(hyperedge_degrees(hg) == std::vector<double>{2.0, 2.0});

    Rng rng(57);
    Matrix desc(12, 3);
    for (auto& v : desc.data()) v = rng.uniform(-1, 1);
    SeedSet seeds = seeds_of({{0, 0, 1.0}, {1, 0, 0.9}});
    Hypergraph knn = build_hypergraph(seeds, desc, 5);
    for (std::size_t e = 0; e < knn.n_edges(); ++e)
        if (knn.kinds[e].type == Hypergraph::EdgeType::Knn)
            CHECK(hyperedge_degrees(knn)[e] == 6.0);
}

TEST_CASE("degree vectors match the naive incidence oracle") {
    Rng rng(59);
    for (int it = 0; it < 25; ++it) {
        Hypergraph hg = testutil::random_hypergraph(rng, 2, 30);
        Matrix h = hg.incidence();
        auto d = vertex_degrees(hg);
        auto b = hyperedge_degrees(hg);
        for (int v = 0; v < hg.n_vertices; ++v) {
            double expect = 0.0;
            for (std::size_t e = 0; e < hg.n_edges(); ++e)
                expect += hg.weights[e] * h(v, e);
            CHECK(std::abs(d[v] - expect) <= 1e-12);
        }
        for (std::size_t e = 0; e < hg.n_edges(); ++e) {
            double expect = 0.0;
            for (int v = 0; v < hg.n_vertices; ++v) expect += h(v, e);
            CHECK(b[e] == expect);
        }
    }
}

TEST_CASE("laplacian of a single pair hyperedge") {
    Hypergraph hg;
    hg.n_vertices = 2;
    hg.members = {{0, 1}};
    hg.weights = {1.0};
    hg.kinds = {{Hypergraph::EdgeType::Class, 0}};

    Matrix lap = hypergraph_laplacian(hg);
    CHECK(lap(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lap(0, 1) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(lap(1, 0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(lap(1, 1) == doctest::Approx(0.5).epsilon(1e-12));

    EigResult eig = sym_eig(lap);
    CHECK(eig.values[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("laplacian is symmetric PSD with spectrum in [0, 2] and the degree null vector") {
    Rng rng(61);
    for (int it = 0; it < 30; ++it) {
        Hypergraph hg = testutil::random_hypergraph(rng, 2, 40);
        Matrix lap = hypergraph_laplacian(hg);
        for (int i = 0; i < hg.n_vertices; ++i)
            for (int j = 0; j < hg.n_vertices; ++j)
                CHECK(std::abs(lap(i, j) - lap(j, i)) <= 1e-12);

        EigResult eig = sym_eig(lap);
        CHECK(eig.values.front() >= -1e-8);
        CHECK(eig.values.back() <= 2.0 + 1e-8);

        // k-NN edges cover every vertex, so all degrees are positive here
        auto d = vertex_degrees(hg);
        double norm = 0.0;
        for (int i = 0; i < hg.n_vertices; ++i) {
            double row = 0.0;
            for (int j = 0; j < hg.n_vertices; ++j)
                row += lap(i, j) * std::sqrt(d[j]);
            norm += row * row;
        }
        CHECK(std::sqrt(norm) <= 1e-10);
    }
}

TEST_CASE("zero-degree vertices keep identity rows") {
    Hypergraph hg;
    hg.n_vertices = 3;
    hg.members = {{0, 1}};  // vertex 2 isolated
    hg.weights = {2.0};
    hg.kinds = {{Hypergraph::EdgeType::Class, 0}};
    Matrix lap = hypergraph_laplacian(hg);
    CHECK(lap(2, 2) == 1.0);
    CHECK(lap(2, 0) == 0.0);
    CHECK(lap(2, 1) == 0.0);
    CHECK(lap(0, 2) == 0.0);
}

TEST_CASE("removing a hyperedge never increases a vertex degree") {
    Rng rng(67);
    for (int it = 0; it < 10; ++it) {
        Hypergraph hg = testutil::random_hypergraph(rng, 3, 25);
        auto before = vertex_degrees(hg);
        Hypergraph smaller = hg;
        const std::size_t drop = rng.uniform_index(hg.n_edges());
        smaller.members.erase(smaller.members.begin() + drop);
        smaller.weights.erase(smaller.weights.begin() + drop);
        smaller.kinds.erase(smaller.kinds.begin() + drop);
        auto after = vertex_degrees(smaller);
        for (int v = 0; v < hg.n_vertices; ++v) CHECK(after[v] <= before[v] + 1e-15);
    }
}

TEST_CASE("class-only incidence has at most C columns") {
    Rng rng(71);
    Matrix desc(15, 4);
    for (auto& v : desc.data()) v = rng.uniform(-1, 1);
    SeedSet seeds = seeds_of({{0, 0, 1}, {1, 0, 1}, {2, 1, 1}, {3, 1, 1}, {5, 2, 1}});
    Hypergraph hg = build_hypergraph(seeds, desc, 3);

    int class_edges = 0;
    for (const auto& kind : hg.kinds)
        if (kind.type == Hypergraph::EdgeType::Class) ++class_edges;
    CHECK(class_edges == 2);  // category 2 dropped (single seed)
    CHECK(class_edges <= 3);

    // class hyperedge membership equals the seeds of that category
    CHECK(hg.members[0] == std::vector<int>{0, 1});
    CHECK(hg.members[1] == std::vector<int>{2, 3});
}

TEST_CASE("hypergraph dump writes kind, weight, members per line") {
    Hypergraph hg = tiny_hypergraph(1.5, 0.5);
    save_hypergraph(hg, "./hg_test.txt");
    std::ifstream in("./hg_test.txt");
    std::string line;
    std::getline(in, line);
    CHECK(line == "3");
    std::getline(in, line);
    CHECK(line == "class 0 1.5 0 1");
    std::getline(in, line);
    CHECK(line == "class 1 0.5 1 2");
    std::remove("./hg_test.txt");
}
