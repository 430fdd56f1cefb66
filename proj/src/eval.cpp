#include "whcn/eval.hpp"

#include <fstream>

#include <json.hpp>

#include "whcn/errors.hpp"
#include "whcn/textio.hpp"

namespace whcn {

MiouResult evaluate_miou(const std::vector<int>& predicted, const std::vector<int>& gt,
                         int n_categories) {
    if (predicted.size() != gt.size())
        throw LengthMismatch("evaluate_miou: " + std::to_string(predicted.size()) +
                             " predictions vs " + std::to_string(gt.size()) + " labels");
    std::vector<long long> inter(n_categories, 0), uni(n_categories, 0);
    for (std::size_t i = 0; i < gt.size(); ++i) {
        const int g = gt[i], p = predicted[i];
        if (g < 0 || g >= n_categories)
            throw LengthMismatch("evaluate_miou: gt label out of range");
        const bool p_valid = p >= 0 && p < n_categories;
        if (p_valid && p == g) {
            inter[g] += 1;
            uni[g] += 1;
        } else {
            uni[g] += 1;
            if (p_valid) uni[p] += 1;
        }
    }
    MiouResult out;
    out.per_category.resize(n_categories);
    double sum = 0.0;
    int present = 0;
    for (int c = 0; c < n_categories; ++c) {
        if (uni[c] == 0) continue;  // absent from both pred and gt
        out.per_category[c] = static_cast<double>(inter[c]) / static_cast<double>(uni[c]);
        sum += *out.per_category[c];
        present += 1;
    }
    out.miou = present > 0 ? sum / present : 0.0;
    return out;
}

void emit_report(const EvalReport& report, const std::string& path) {
    nlohmann::ordered_json doc;
    doc["format"] = report.format;
    nlohmann::ordered_json cfg;
    for (const auto& [k, v] : report.config_echo) cfg[k] = v;
    doc["config"] = cfg;
    doc["categories"] = report.categories;
    nlohmann::ordered_json iou;
    for (std::size_t c = 0; c < report.categories.size(); ++c) {
        if (c < report.per_category_iou.size() && report.per_category_iou[c])
            iou[report.categories[c]] = *report.per_category_iou[c];
        else
            iou[report.categories[c]] = nullptr;
    }
    doc["per_category_iou"] = iou;
    doc["miou"] = report.miou;
    doc["seed_baseline_miou"] = report.seed_baseline_miou;
    nlohmann::ordered_json scenes = nlohmann::ordered_json::array();
    for (const auto& s : report.scenes) {
        nlohmann::ordered_json js;
        js["id"] = s.id;
        js["points"] = s.points;
        js["superpoints"] = s.superpoints;
        js["seeds"] = s.seeds;
        js["seed_coverage"] = s.seed_coverage;
        scenes.push_back(js);
    }
    doc["scenes"] = scenes;

    std::ofstream out(path);
    if (!out) throw IoError("emit_report: cannot open " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("emit_report: write failed for " + path);

    std::ofstream side(path + ".timings.txt");
    if (!side) throw IoError("emit_report: cannot open " + path + ".timings.txt");
    for (const auto& t : report.timings)
        side << t.stage << ' ' << format_double(t.ms) << '\n';
}

EvalReport parse_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("parse_report: cannot open " + path);
    nlohmann::ordered_json doc;  // ordered so config echo keeps document order
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(1, std::string("parse_report: ") + e.what());
    }

    EvalReport r;
    r.format = doc.at("format").get<std::string>();
    for (auto& [k, v] : doc.at("config").items())
        r.config_echo.emplace_back(k, v.get<std::string>());
    r.categories = doc.at("categories").get<std::vector<std::string>>();
    r.per_category_iou.resize(r.categories.size());
    for (std::size_t c = 0; c < r.categories.size(); ++c) {
        const auto& v = doc.at("per_category_iou").at(r.categories[c]);
        if (!v.is_null()) r.per_category_iou[c] = v.get<double>();
    }
    r.miou = doc.at("miou").get<double>();
    r.seed_baseline_miou = doc.at("seed_baseline_miou").get<double>();
    for (const auto& js : doc.at("scenes")) {
        SceneSummary s;
        s.id = js.at("id").get<std::string>();
        s.points = js.at("points").get<int>();
        s.superpoints = js.at("superpoints").get<int>();
        s.seeds = js.at("seeds").get<int>();
        s.seed_coverage = js.at("seed_coverage").get<double>();
        r.scenes.push_back(s);
    }

    std::ifstream side(path + ".timings.txt");
    if (side) {
        std::string stage, ms;
        while (side >> stage >> ms) {
            auto v = parse_double(ms);
            if (v) r.timings.push_back({stage, *v});
        }
    }
    return r;
}

}  // namespace whcn
