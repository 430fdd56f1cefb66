#pragma once

// Shared generators for randomized tests and the acceptance suite.

#include <algorithm>
#include <set>
#include <vector>

#include "whcn/hypergraph.hpp"
#include "whcn/matrix.hpp"
#include "whcn/rng.hpp"
#include "whcn/seed_select.hpp"

namespace whcn::testutil {

// Random descriptors + seeds -> hypergraph with mixed class/k-NN hyperedges
// and random positive weights. Uses the real constructor.
inline Hypergraph random_hypergraph(Rng& rng, int n_min = 2, int n_max = 50) {
    const int n = n_min + static_cast<int>(rng.uniform_index(n_max - n_min + 1));
    const int d = 3 + static_cast<int>(rng.uniform_index(6));
    const int n_cat = 2 + static_cast<int>(rng.uniform_index(4));
    Matrix desc(n, d);
    for (auto& v : desc.data()) v = rng.uniform(-1.0, 1.0);

    const int n_seeds = std::max(2, (2 * n) / 5);
    std::vector<int> verts(n);
    for (int i = 0; i < n; ++i) verts[i] = i;
    // deterministic Fisher-Yates prefix
    for (int i = 0; i < n_seeds; ++i)
        std::swap(verts[i], verts[i + rng.uniform_index(n - i)]);

    SeedSet seeds;
    seeds.scene_id = "random";
    for (int i = 0; i < n_seeds; ++i)
        seeds.entries.push_back({verts[i], static_cast<int>(rng.uniform_index(n_cat)),
                                 rng.uniform(0.0, 1.0)});
    std::sort(seeds.entries.begin(), seeds.entries.end(),
              [](const Seed& a, const Seed& b) { return a.superpoint < b.superpoint; });

    const int k_h = 1 + static_cast<int>(rng.uniform_index(std::min(5, n - 1)));
    Hypergraph hg = build_hypergraph(seeds, desc, k_h);
    for (auto& w : hg.weights) w = rng.uniform(0.1, 3.0);
    return hg;
}

}  // namespace whcn::testutil
