#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace whcn {

using Vec3 = std::array<double, 3>;

// A synthetic scene. gt_labels are kept for evaluation only; training code
// must consume nothing beyond scene_labels.
struct LabeledCloud {
    std::vector<Vec3> points;                 // meters
    std::vector<Vec3> colors;                 // rgb in [0, 1]
    std::vector<int> gt_labels;               // category index in [0, C)
    std::set<int> scene_labels;               // distinct gt labels
    std::vector<std::string> category_names;  // size C

    std::size_t size() const { return points.size(); }
    int category_count() const { return static_cast<int>(category_names.size()); }

    bool operator==(const LabeledCloud&) const = default;
};

enum class PrimitiveKind { Plane, Box, Cluster };

struct PrimitiveSpec {
    PrimitiveKind kind = PrimitiveKind::Plane;
    Vec3 center{0, 0, 0};
    Vec3 extent{1, 1, 1};  // plane/box: side lengths; cluster: per-axis sigma
    int normal_axis = 2;   // planes only: 2 = horizontal, 0/1 = vertical wall
    int category = 0;
    double noise_sigma = 0.0;  // meters, isotropic Gaussian jitter
    Vec3 base_color{0.5, 0.5, 0.5};
    double weight = 1.0;  // share of points_per_scene
};

struct SceneConfig {
    std::uint64_t rng_seed = 0;
    int points_per_scene = 0;
    std::vector<PrimitiveSpec> mix;
    std::vector<std::string> category_names;
};

// Deterministic function of the config (including rng_seed). Throws
// InvalidConfig on zero points, an empty mix, or fewer points than primitives.
LabeledCloud generate_scene(const SceneConfig& config);

// One indoor-style scene: floor and walls dominate the point budget, a few
// box/cluster objects share the rest. n_categories in [1, 6].
SceneConfig random_room_config(std::uint64_t seed, int points_per_scene, int n_categories);

std::set<int> derive_scene_labels(const LabeledCloud& cloud);

// WHCN-CLOUD v1 text format:
//   WHCN-CLOUD v1 <n_points> <n_categories>
//   <category names, whitespace separated>
//   x y z r g b label        (one line per point, shortest-roundtrip decimals)
void save_cloud(const LabeledCloud& cloud, const std::string& path);
LabeledCloud load_cloud(const std::string& path);

}  // namespace whcn
