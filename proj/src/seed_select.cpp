#include "whcn/seed_select.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "whcn/errors.hpp"
#include "whcn/textio.hpp"

namespace whcn {

SeedSet select_seeds(const Matrix& cam, const std::set<int>& scene_labels,
                     double fraction, const std::string& scene_id) {
    if (scene_labels.empty()) throw EmptySceneLabels("select_seeds: " + scene_id);
    if (!(fraction > 0.0) || fraction > 1.0)
        throw InvalidConfig("select_seeds: fraction must be in (0, 1]");
    const std::size_t n = cam.rows();
    for (int c : scene_labels)
        if (c < 0 || static_cast<std::size_t>(c) >= cam.cols())
            throw ShapeMismatch("select_seeds: scene label outside CAM columns");

    struct Ranked {
        int superpoint;
        int category;
        double score;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        int best_cat = -1;
        double best = 0.0;
        for (int c : scene_labels) {  // ascending, so ties keep the lower category
            if (best_cat < 0 || cam(k, c) > best) {
                best_cat = c;
                best = cam(k, c);
            }
        }
        ranked.push_back({static_cast<int>(k), best_cat, best});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.superpoint < b.superpoint;
    });

    // guard against fp noise in fraction * N landing just above an integer
    std::size_t keep = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(n) - 1e-9));
    keep = std::min(keep, n);

    SeedSet out;
    out.scene_id = scene_id;
    for (std::size_t i = 0; i < keep; ++i)
        out.entries.push_back({ranked[i].superpoint, ranked[i].category, ranked[i].score});
    std::sort(out.entries.begin(), out.entries.end(),
              [](const Seed& a, const Seed& b) { return a.superpoint < b.superpoint; });
    return out;
}

void save_seed_sets(const std::vector<SeedSet>& sets, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_seed_sets: cannot open " + path);
    for (const auto& set : sets)
        for (const auto& seed : set.entries)
            out << set.scene_id << ' ' << seed.superpoint << ' ' << seed.category << ' '
                << format_double(seed.score) << '\n';
    if (!out) throw IoError("save_seed_sets: write failed for " + path);
}

std::vector<SeedSet> load_seed_sets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_seed_sets: cannot open " + path);
    std::vector<SeedSet> sets;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string id, sp, cat, score;
        if (!(ss >> id)) continue;  // blank line
        if (!(ss >> sp >> cat >> score))
            throw ParseError(line_no, "expected 'scene_id superpoint category score'");
        auto sp_v = parse_int(sp);
        auto cat_v = parse_int(cat);
        auto score_v = parse_double(score);
        if (!sp_v) throw ParseError(line_no, "bad superpoint token '" + sp + "'");
        if (!cat_v) throw ParseError(line_no, "bad category token '" + cat + "'");
        if (!score_v) throw ParseError(line_no, "bad score token '" + score + "'");
        if (sets.empty() || sets.back().scene_id != id) {
            sets.emplace_back();
            sets.back().scene_id = id;
        }
        sets.back().entries.push_back({static_cast<int>(*sp_v), static_cast<int>(*cat_v),
                                       *score_v});
    }
    return sets;
}

}  // namespace whcn
