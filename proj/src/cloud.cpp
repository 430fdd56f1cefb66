#include "whcn/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "whcn/errors.hpp"
#include "whcn/rng.hpp"
#include "whcn/textio.hpp"

namespace whcn {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Largest-remainder allocation of n points over the primitive weights, with
// every primitive getting at least one point.
std::vector<int> allocate_points(const SceneConfig& config) {
    const int n = config.points_per_scene;
    const std::size_t m = config.mix.size();
    double total = 0.0;
    for (const auto& p : config.mix) total += p.weight;

    std::vector<int> alloc(m, 1);
    int remaining = n - static_cast<int>(m);
    std::vector<double> exact(m), frac(m);
    int assigned = 0;
    for (std::size_t i = 0; i < m; ++i) {
        exact[i] = static_cast<double>(remaining) * config.mix[i].weight / total;
        alloc[i] += static_cast<int>(exact[i]);
        assigned += static_cast<int>(exact[i]);
        frac[i] = exact[i] - std::floor(exact[i]);
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (int k = 0; k < remaining - assigned; ++k) alloc[order[k % m]] += 1;
    return alloc;
}

void sample_primitive(const PrimitiveSpec& p, int count, Rng& rng, LabeledCloud& out) {
    for (int i = 0; i < count; ++i) {
        Vec3 pt{0, 0, 0};
        switch (p.kind) {
            case PrimitiveKind::Plane: {
                for (int ax = 0; ax < 3; ++ax) {
                    if (ax == p.normal_axis)
                        pt[ax] = p.center[ax];
                    else
                        pt[ax] = p.center[ax] + rng.uniform(-0.5, 0.5) * p.extent[ax];
                }
                break;
            }
            case PrimitiveKind::Box: {
                // pick a face weighted by area, then sample it uniformly
                const double ax_ = p.extent[0], ay = p.extent[1], az = p.extent[2];
                const double areas[3] = {ay * az, ax_ * az, ax_ * ay};
                const double atot = 2.0 * (areas[0] + areas[1] + areas[2]);
                double pick = rng.uniform01() * atot;
                int face_axis = 0;
                double side = 1.0;
                double acc = 0.0;
                for (int ax = 0; ax < 3 && pick >= acc; ++ax) {
                    for (int s = 0; s < 2; ++s) {
                        acc += areas[ax];
                        if (pick < acc) {
                            face_axis = ax;
                            side = s == 0 ? -0.5 : 0.5;
                            break;
                        }
                    }
                }
                for (int ax = 0; ax < 3; ++ax) {
                    if (ax == face_axis)
                        pt[ax] = p.center[ax] + side * p.extent[ax];
                    else
                        pt[ax] = p.center[ax] + rng.uniform(-0.5, 0.5) * p.extent[ax];
                }
                break;
            }
            case PrimitiveKind::Cluster: {
                for (int ax = 0; ax < 3; ++ax)
                    pt[ax] = p.center[ax] + rng.normal(0.0, p.extent[ax]);
                break;
            }
        }
        if (p.noise_sigma > 0.0)
            for (int ax = 0; ax < 3; ++ax) pt[ax] += rng.normal(0.0, p.noise_sigma);

        Vec3 col;
        for (int ch = 0; ch < 3; ++ch)
            col[ch] = clamp01(p.base_color[ch] + rng.uniform(-0.05, 0.05));

        out.points.push_back(pt);
        out.colors.push_back(col);
        out.gt_labels.push_back(p.category);
    }
}

}  // namespace

LabeledCloud generate_scene(const SceneConfig& config) {
    if (config.points_per_scene <= 0)
        throw InvalidConfig("generate_scene: points_per_scene must be > 0");
    if (config.mix.empty()) throw InvalidConfig("generate_scene: empty primitive mix");
    if (static_cast<std::size_t>(config.points_per_scene) < config.mix.size())
        throw InvalidConfig("generate_scene: fewer points than primitives");
    for (const auto& p : config.mix) {
        if (!(p.weight > 0.0)) throw InvalidConfig("generate_scene: non-positive weight");
        if (p.category < 0 ||
            p.category >= static_cast<int>(config.category_names.size()))
            throw InvalidConfig("generate_scene: primitive category out of range");
    }

    LabeledCloud cloud;
    cloud.category_names = config.category_names;
    cloud.points.reserve(config.points_per_scene);

    Rng rng(config.rng_seed);
    const std::vector<int> alloc = allocate_points(config);
    for (std::size_t i = 0; i < config.mix.size(); ++i)
        sample_primitive(config.mix[i], alloc[i], rng, cloud);

    cloud.scene_labels = derive_scene_labels(cloud);
    return cloud;
}

std::set<int> derive_scene_labels(const LabeledCloud& cloud) {
    return {cloud.gt_labels.begin(), cloud.gt_labels.end()};
}

SceneConfig random_room_config(std::uint64_t seed, int points_per_scene, int n_categories) {
    static const char* kNames[6] = {"floor", "wall", "crate", "shelf", "plant", "clutter"};
    static const Vec3 kColors[6] = {{0.45, 0.45, 0.45}, {0.80, 0.75, 0.60},
                                    {0.55, 0.35, 0.20}, {0.30, 0.30, 0.38},
                                    {0.20, 0.60, 0.25}, {0.70, 0.20, 0.20}};
    if (n_categories < 1 || n_categories > 6)
        throw InvalidConfig("random_room_config: n_categories must be in [1, 6]");

    SceneConfig cfg;
    cfg.rng_seed = seed;
    cfg.points_per_scene = points_per_scene;
    cfg.category_names.assign(kNames, kNames + n_categories);

    Rng rng(mix_seed(seed, 0xc0f1));
    const double room = 4.0;

    // floor and walls dominate the point budget when present, but neither is
    // in every scene; the scene classifier needs negatives for each category
    if (n_categories == 1 || rng.uniform01() < 0.8) {
        PrimitiveSpec floor;
        floor.kind = PrimitiveKind::Plane;
        floor.center = {0, 0, 0};
        floor.extent = {room, room, 0};
        floor.normal_axis = 2;
        floor.category = 0;
        floor.noise_sigma = 0.01;
        floor.base_color = kColors[0];
        floor.weight = 8.0;
        cfg.mix.push_back(floor);
    }

    if (n_categories >= 2 && rng.uniform01() < 0.75) {
        const int n_walls = 1 + static_cast<int>(rng.uniform_index(3));  // 1..3
        for (int w = 0; w < n_walls; ++w) {
            PrimitiveSpec wall;
            wall.kind = PrimitiveKind::Plane;
            wall.normal_axis = (w % 2 == 0) ? 0 : 1;
            const double offset = (w < 2) ? -room / 2 : room / 2;
            wall.center = {wall.normal_axis == 0 ? offset : 0.0,
                           wall.normal_axis == 1 ? offset : 0.0, 1.1};
            wall.extent = {wall.normal_axis == 0 ? 0.0 : room,
                           wall.normal_axis == 1 ? 0.0 : room, 2.2};
            wall.category = 1;
            wall.noise_sigma = 0.01;
            wall.base_color = kColors[1];
            wall.weight = 6.0 / n_walls;
            cfg.mix.push_back(wall);
        }
    }

    // object categories appear with probability 0.6 each, 1-2 instances
    for (int cat = 2; cat < n_categories; ++cat) {
        if (rng.uniform01() > 0.6) continue;
        const int instances = 1 + static_cast<int>(rng.uniform_index(2));
        for (int k = 0; k < instances; ++k) {
            PrimitiveSpec obj;
            obj.category = cat;
            obj.base_color = kColors[cat];
            obj.noise_sigma = 0.008;
            obj.weight = 1.0;
            const double px = rng.uniform(-room / 2 + 0.5, room / 2 - 0.5);
            const double py = rng.uniform(-room / 2 + 0.5, room / 2 - 0.5);
            if (cat == 2 || cat == 3) {
                obj.kind = PrimitiveKind::Box;
                const double sx = rng.uniform(0.45, 0.6);
                const double sy = rng.uniform(0.45, 0.6);
                const double sz = cat == 2 ? rng.uniform(0.35, 0.5) : rng.uniform(1.1, 1.4);
                obj.center = {px, py, sz / 2};
                obj.extent = {sx, sy, sz};
            } else {
                obj.kind = PrimitiveKind::Cluster;
                const double r = rng.uniform(0.10, 0.16);
                obj.center = {px, py, cat == 4 ? rng.uniform(0.6, 0.9) : rng.uniform(0.2, 0.35)};
                obj.extent = {r, r, r};
            }
            cfg.mix.push_back(obj);
        }
    }

    if (cfg.mix.empty()) {  // every draw missed; fall back to a bare floor
        PrimitiveSpec floor;
        floor.kind = PrimitiveKind::Plane;
        floor.extent = {room, room, 0};
        floor.noise_sigma = 0.01;
        floor.base_color = kColors[0];
        floor.weight = 8.0;
        cfg.mix.push_back(floor);
    }
    return cfg;
}

void save_cloud(const LabeledCloud& cloud, const std::string& path) {
    if (cloud.size() == 0) throw EmptyCloud("save_cloud: nothing to save");
    if (cloud.colors.size() != cloud.size() || cloud.gt_labels.size() != cloud.size())
        throw ShapeMismatch("save_cloud: field lengths differ");
    for (const auto& name : cloud.category_names)
        if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
            throw IoError("save_cloud: category name not a single token: '" + name + "'");

    std::ofstream out(path);
    if (!out) throw IoError("save_cloud: cannot open " + path);
    out << "WHCN-CLOUD v1 " << cloud.size() << ' ' << cloud.category_names.size() << '\n';
    for (std::size_t c = 0; c < cloud.category_names.size(); ++c)
        out << (c ? " " : "") << cloud.category_names[c];
    out << '\n';
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        out << format_double(cloud.points[i][0]) << ' ' << format_double(cloud.points[i][1])
            << ' ' << format_double(cloud.points[i][2]) << ' '
            << format_double(cloud.colors[i][0]) << ' ' << format_double(cloud.colors[i][1])
            << ' ' << format_double(cloud.colors[i][2]) << ' ' << cloud.gt_labels[i]
            << '\n';
    }
    if (!out) throw IoError("save_cloud: write failed for " + path);
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
}

}  // namespace

LabeledCloud load_cloud(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_cloud: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw EmptyCloud("load_cloud: empty file " + path);
    auto head = split_ws(line);
    if (head.size() != 4 || head[0] != "WHCN-CLOUD" || head[1] != "v1")
        throw ParseError(1, "expected 'WHCN-CLOUD v1 <n> <C>' header");
    auto n_opt = parse_int(head[2]);
    auto c_opt = parse_int(head[3]);
    if (!n_opt || *n_opt < 0) throw ParseError(1, "bad point count '" + head[2] + "'");
    if (!c_opt || *c_opt < 0) throw ParseError(1, "bad category count '" + head[3] + "'");
    const std::size_t n = static_cast<std::size_t>(*n_opt);
    const int n_cat = static_cast<int>(*c_opt);

    LabeledCloud cloud;
    if (!std::getline(in, line)) {
        if (n == 0) throw EmptyCloud("load_cloud: zero data lines in " + path);
        throw ParseError(2, "missing category name line");
    }
    cloud.category_names = split_ws(line);
    if (static_cast<int>(cloud.category_names.size()) != n_cat)
        throw ParseError(2, "expected " + std::to_string(n_cat) + " category names, got " +
                                std::to_string(cloud.category_names.size()));

    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        auto toks = split_ws(line);
        if (toks.empty()) continue;  // tolerate blank lines
        if (cloud.size() >= n)
            throw ParseError(line_no, "more data lines than the declared " +
                                          std::to_string(n) + " points");
        if (toks.size() != 7)
            throw ParseError(line_no, "expected 7 fields, got " + std::to_string(toks.size()));
        Vec3 pt, col;
        for (int k = 0; k < 3; ++k) {
            auto v = parse_double(toks[k]);
            if (!v) throw ParseError(line_no, "bad coordinate token '" + toks[k] + "'");
            pt[k] = *v;
        }
        for (int k = 0; k < 3; ++k) {
            auto v = parse_double(toks[3 + k]);
            if (!v) throw ParseError(line_no, "bad color token '" + toks[3 + k] + "'");
            if (*v < -1e-9 || *v > 1.0 + 1e-9)
                throw ParseError(line_no, "color out of [0,1]: '" + toks[3 + k] + "'");
            col[k] = *v;
        }
        auto lab = parse_int(toks[6]);
        if (!lab) throw ParseError(line_no, "bad label token '" + toks[6] + "'");
        if (*lab < 0 || *lab >= n_cat)
            throw ParseError(line_no, "label out of range: '" + toks[6] + "'");
        cloud.points.push_back(pt);
        cloud.colors.push_back(col);
        cloud.gt_labels.push_back(static_cast<int>(*lab));
    }
    if (cloud.size() == 0) throw EmptyCloud("load_cloud: zero data lines in " + path);
    if (cloud.size() != n)
        throw ParseError(line_no, "declared " + std::to_string(n) + " points but found " +
                                      std::to_string(cloud.size()));
    cloud.scene_labels = derive_scene_labels(cloud);
    return cloud;
}

}  // namespace whcn
