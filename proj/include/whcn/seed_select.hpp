#pragma once

#include <set>
#include <string>
#include <vector>

#include "whcn/matrix.hpp"

namespace whcn {

struct Seed {
    int superpoint = 0;
    int category = 0;
    double score = 0.0;

    bool operator==(const Seed&) const = default;
};

// High-confidence (superpoint, category) pairs for one scene, sorted by
// superpoint index. Categories always come from that scene's label set.
struct SeedSet {
    std::string scene_id;
    std::vector<Seed> entries;

    bool operator==(const SeedSet&) const = default;
};

// Masked argmax per superpoint (columns restricted to scene_labels, ties to
// the lower category), then the top ceil(fraction * N) superpoints by that
// activation, score ties broken toward the lower superpoint index.
SeedSet select_seeds(const Matrix& cam, const std::set<int>& scene_labels,
                     double fraction, const std::string& scene_id = "scene");

// One line per seed: `scene_id superpoint_id category score`.
void save_seed_sets(const std::vector<SeedSet>& sets, const std::string& path);
std::vector<SeedSet> load_seed_sets(const std::string& path);

}  // namespace whcn
