#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace whcn {

// Per-category intersection-over-union. Categories absent from both pred and
// gt are excluded (nullopt); categories present in gt but never predicted
// score 0. Prediction values >= n_categories mean "unlabeled" and never
// intersect anything (they still spoil the union of their gt category).
struct MiouResult {
    std::vector<std::optional<double>> per_category;
    double miou = 0.0;
};

MiouResult evaluate_miou(const std::vector<int>& predicted, const std::vector<int>& gt,
                         int n_categories);

struct SceneSummary {
    std::string id;
    int points = 0;
    int superpoints = 0;
    int seeds = 0;
    double seed_coverage = 0.0;

    bool operator==(const SceneSummary&) const = default;
};

struct StageTiming {
    std::string stage;
    double ms = 0.0;

    bool operator==(const StageTiming&) const = default;
};

struct EvalReport {
    std::string format = "WHCN-REPORT v1";
    std::vector<std::pair<std::string, std::string>> config_echo;  // stable order
    std::vector<std::string> categories;
    std::vector<std::optional<double>> per_category_iou;
    double miou = 0.0;
    double seed_baseline_miou = 0.0;
    std::vector<SceneSummary> scenes;
    std::vector<StageTiming> timings;  // wall clock; lives in the sidecar file

    bool operator==(const EvalReport&) const = default;
};

// Writes a deterministic JSON document at `path` (stable key order, no
// volatile values) plus a `<path>.timings.txt` sidecar with the wall-clock
// stage times. Same-config runs produce byte-identical main documents.
void emit_report(const EvalReport& report, const std::string& path);

// Reads the document and, when present, the timing sidecar.
EvalReport parse_report(const std::string& path);

}  // namespace whcn
