#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "whcn/cloud.hpp"
#include "whcn/cut_pursuit.hpp"
#include "whcn/eval.hpp"
#include "whcn/hypergraph.hpp"
#include "whcn/seed_select.hpp"
#include "whcn/whcn_model.hpp"

namespace whcn {

// Flat key=value configuration; every knob of the pipeline. Unknown keys are
// rejected so typos cannot silently fall back to defaults.
struct PipelineConfig {
    std::uint64_t rng_seed = 7;
    int scene_count = 6;
    int points_per_scene = 1500;
    int category_count = 6;
    int knn_k = 10;               // point-graph K
    double rho = 0.03;            // cut-pursuit regularization strength
    int superpoint_target = 0;    // 0 = min(64, points/16)
    double seed_fraction = 0.4;
    int hyperedge_knn = 5;        // k_h
    int hidden_dim = 32;
    int epochs = 500;
    double learning_rate = 0.003;
    double dropout = 0.5;
    double mu = 1.0;
    int classifier_epochs = 500;
    bool use_superpoints = true;  // off: each subsampled point is a vertex
    bool use_whcn = true;         // off: expanded seed labels only
    bool use_attention = true;    // off: every hyperedge weight forced to 1
    int pointwise_subsample = 400;

    bool operator==(const PipelineConfig&) const = default;
};

PipelineConfig parse_config_file(const std::string& path);
PipelineConfig parse_config_text(const std::string& text, const std::string& origin);
// `key=value` override; throws InvalidConfig for unknown keys or bad values.
void apply_config_override(PipelineConfig& config, const std::string& key,
                           const std::string& value);
// Stable key order; echoed into reports and used by the CLI to save configs.
std::vector<std::pair<std::string, std::string>> config_echo(const PipelineConfig& config);
void save_config(const PipelineConfig& config, const std::string& path);

// Per-scene intermediates, captured so the CLI stage commands can dump them.
struct SceneArtifacts {
    std::string id;
    LabeledCloud cloud;
    Matrix geom;  // working-point features, n x 4
    SuperpointPartition partition;  // over the working points
    std::vector<int> expansion;     // full-cloud point -> vertex id
    Matrix descriptors;             // standardized
    SeedSet seeds;
    Hypergraph hypergraph;
    WhcnModel model;  // trained (when use_whcn)
    std::vector<double> loss_trace;
    std::vector<int> point_labels;  // final per-point pseudo labels
};

struct PipelineRun {
    EvalReport report;
    std::vector<SceneArtifacts> scenes;
};

enum class PipelineStage {
    Synth,
    Features,
    Partition,
    Descriptors,
    Classifier,
    Seeds,
    Hypergraph,
    Train,
    Expand,
    Evaluate,
};

// The whole chain: synth -> features -> partition -> descriptors ->
// classifier/CAM -> seeds -> hypergraph -> train -> expand -> mIoU.
// Deterministic function of the config. Stage failures are rethrown with the
// stage name attached. `stop_after` truncates the run for stage commands.
PipelineRun run_pipeline(const PipelineConfig& config, bool keep_artifacts = false,
                         PipelineStage stop_after = PipelineStage::Evaluate);

struct AblationRow {
    std::string name;
    double mean_miou = 0.0;
    std::vector<double> per_seed_miou;
};

// Table-style component study over `n_seeds` suite seeds: seeds-only,
// pointwise (no superpoints), attention off, and the full pipeline.
std::vector<AblationRow> run_ablation(const PipelineConfig& base, int n_seeds);
void save_ablation(const std::vector<AblationRow>& rows, const std::string& path);

}  // namespace whcn
