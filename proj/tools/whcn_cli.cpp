// Command-line front end: stage-by-stage execution, full runs, and the
// component ablation study. Every command derives its inputs from the
// config deterministically, so stage outputs always agree with `run-all`.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "whcn/cloud.hpp"
#include "whcn/errors.hpp"
#include "whcn/eval.hpp"
#include "whcn/hypergraph.hpp"
#include "whcn/pipeline.hpp"
#include "whcn/seed_select.hpp"
#include "whcn/textio.hpp"
#include "whcn/whcn_model.hpp"

namespace fs = std::filesystem;
using namespace whcn;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string workdir = "out";
    std::vector<std::string> overrides;
    std::optional<long long> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("-c,--config", opts.config_path, "config file (key = value lines)");
    cmd->add_option("-w,--workdir", opts.workdir, "output directory");
    cmd->add_option("--set", opts.overrides, "override a config key, e.g. --set rho=0.05")
        ->take_all();
    cmd->add_option("--seed", opts.seed, "override rng_seed");
}

PipelineConfig effective_config(const CommonOpts& opts) {
    PipelineConfig cfg;
    if (!opts.config_path.empty()) cfg = parse_config_file(opts.config_path);
    for (const std::string& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig("--set expects key=value, got '" + kv + "'");
        apply_config_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opts.seed) cfg.rng_seed = static_cast<std::uint64_t>(*opts.seed);
    return cfg;
}

fs::path ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string());
    return dir;
}

void write_clouds(const PipelineRun& run, const fs::path& workdir) {
    const fs::path dir = ensure_dir(workdir / "scenes");
    for (const auto& s : run.scenes)
        save_cloud(s.cloud, (dir / (s.id + ".cloud")).string());
}

void write_features(const PipelineRun& run, const fs::path& workdir) {
    const fs::path dir = ensure_dir(workdir / "features");
    for (const auto& s : run.scenes) {
        std::ofstream out(dir / (s.id + ".feat"));
        if (!out) throw IoError("cannot open feature file for " + s.id);
        out << "WHCN-FEAT v1 " << s.geom.rows() << '\n';
        for (std::size_t i = 0; i < s.geom.rows(); ++i) {
            for (std::size_t c = 0; c < 4; ++c)
                out << (c ? " " : "") << format_double(s.geom(i, c));
            out << '\n';
        }
    }
}

void write_partitions(const PipelineRun& run, const fs::path& workdir) {
    const fs::path dir = ensure_dir(workdir / "partitions");
    for (const auto& s : run.scenes) {
        std::ofstream out(dir / (s.id + ".part"));
        if (!out) throw IoError("cannot open partition file for " + s.id);
        out << "WHCN-PART v1 " << s.expansion.size() << ' ' << s.partition.n_superpoints
            << '\n';
        for (int v : s.expansion) out << v << '\n';
    }
}

void write_seeds(const PipelineRun& run, const fs::path& workdir) {
    std::vector<SeedSet> sets;
    for (const auto& s : run.scenes) sets.push_back(s.seeds);
    save_seed_sets(sets, (workdir / "seeds.txt").string());
}

void write_hypergraphs(const PipelineRun& run, const fs::path& workdir) {
    const fs::path dir = ensure_dir(workdir / "hypergraphs");
    for (const auto& s : run.scenes) {
        save_hypergraph(s.hypergraph, (dir / (s.id + ".hg")).string());
        for (const auto& warning : s.hypergraph.warnings)
            std::cerr << s.id << ": " << warning << '\n';
    }
}

void write_models(const PipelineRun& run, const fs::path& workdir) {
    const fs::path dir = ensure_dir(workdir / "models");
    for (const auto& s : run.scenes) {
        if (s.model.layers.empty()) continue;  // degenerate one-superpoint scene
        save_whcn_model(s.model, (dir / (s.id + ".model")).string());
        save_loss_trace(s.loss_trace, (dir / (s.id + ".loss.csv")).string());
    }
}

void print_timings(const EvalReport& report) {
    for (const auto& t : report.timings)
        std::cout << "  " << t.stage << ": " << format_double(t.ms) << " ms\n";
}

void print_report_summary(const EvalReport& report) {
    std::cout << "mIoU: " << format_double(report.miou)
              << "  (seed baseline: " << format_double(report.seed_baseline_miou)
              << ")\n";
    for (std::size_t c = 0; c < report.categories.size(); ++c) {
        std::cout << "  " << report.categories[c] << ": ";
        if (report.per_category_iou[c])
            std::cout << format_double(*report.per_category_iou[c]);
        else
            std::cout << "absent";
        std::cout << '\n';
    }
}

int run_command(const CommonOpts& opts, PipelineStage stop,
                const std::function<void(const PipelineRun&, const fs::path&)>& writer) {
    const PipelineConfig cfg = effective_config(opts);
    const fs::path workdir = ensure_dir(opts.workdir);
    PipelineRun run = run_pipeline(cfg, /*keep_artifacts=*/true, stop);
    save_config(cfg, (workdir / "config.txt").string());
    writer(run, workdir);
    print_timings(run.report);
    return 0;
}

int cmd_evaluate(const CommonOpts& opts) {
    const PipelineConfig cfg = effective_config(opts);
    if (!cfg.use_whcn)
        throw InvalidConfig("evaluate: use_whcn=false has no trained models; use run-all");
    const fs::path workdir = ensure_dir(opts.workdir);
    PipelineRun run = run_pipeline(cfg, true, PipelineStage::Hypergraph);

    std::vector<int> pred, gt, base_pred;
    for (auto& s : run.scenes) {
        std::vector<int> base_vertex(s.partition.n_superpoints,
                                     std::numeric_limits<int>::max());
        for (const Seed& seed : s.seeds.entries) base_vertex[seed.superpoint] = seed.category;

        std::vector<int> vertex_labels = base_vertex;
        if (s.partition.n_superpoints >= 2) {  // degenerate scenes keep seed labels
            const fs::path model_path = workdir / "models" / (s.id + ".model");
            if (!fs::exists(model_path))
                throw IoError("evaluate: missing checkpoint " + model_path.string() +
                              " (run `train` first)");
            const WhcnModel model = load_whcn_model(model_path.string());
            const VertexLabeling labeling =
                forward(model, s.descriptors, s.hypergraph, false);
            vertex_labels = labeling.labels;
        }
        for (std::size_t i = 0; i < s.cloud.size(); ++i) {
            pred.push_back(vertex_labels[s.expansion[i]]);
            base_pred.push_back(base_vertex[s.expansion[i]]);
            gt.push_back(s.cloud.gt_labels[i]);
        }
    }
    EvalReport report = run.report;
    const MiouResult main = evaluate_miou(pred, gt, cfg.category_count);
    report.per_category_iou = main.per_category;
    report.miou = main.miou;
    report.seed_baseline_miou = evaluate_miou(base_pred, gt, cfg.category_count).miou;
    for (const auto& s : run.scenes) {
        SceneSummary summary;
        summary.id = s.id;
        summary.points = static_cast<int>(s.cloud.size());
        summary.superpoints = s.partition.n_superpoints;
        summary.seeds = static_cast<int>(s.seeds.entries.size());
        summary.seed_coverage =
            static_cast<double>(summary.seeds) / summary.superpoints;
        report.scenes.push_back(summary);
    }
    emit_report(report, (workdir / "report.json").string());
    print_report_summary(report);
    return 0;
}

int cmd_run_all(const CommonOpts& opts) {
    const PipelineConfig cfg = effective_config(opts);
    const fs::path workdir = ensure_dir(opts.workdir);
    PipelineRun run = run_pipeline(cfg, true);
    save_config(cfg, (workdir / "config.txt").string());
    write_clouds(run, workdir);
    write_seeds(run, workdir);
    if (cfg.use_whcn) write_models(run, workdir);
    emit_report(run.report, (workdir / "report.json").string());
    print_timings(run.report);
    print_report_summary(run.report);
    return 0;
}

int cmd_ablate(const CommonOpts& opts, int suite_seeds) {
    const PipelineConfig cfg = effective_config(opts);
    const fs::path workdir = ensure_dir(opts.workdir);
    const auto rows = run_ablation(cfg, suite_seeds);
    save_ablation(rows, (workdir / "ablation.json").string());
    std::cout << "component study over " << suite_seeds << " suite seeds\n";
    for (const auto& row : rows)
        std::cout << "  " << row.name << ": mean mIoU " << format_double(row.mean_miou)
                  << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weakly supervised point-cloud pseudo-labeling pipeline"};
    app.require_subcommand(1);

    CommonOpts opts;
    int suite_seeds = 10;

    auto* synth = app.add_subcommand("synth", "generate the synthetic scene suite");
    auto* features = app.add_subcommand("features", "point graphs and geometric features");
    auto* partition = app.add_subcommand("partition", "cut-pursuit superpoints");
    auto* seeds = app.add_subcommand("seeds", "CAM-based superpoint seed labels");
    auto* hypergraph = app.add_subcommand("hypergraph", "class + k-NN hypergraphs");
    auto* train = app.add_subcommand("train", "train the propagation network per scene");
    auto* evaluate = app.add_subcommand("evaluate", "score stored checkpoints into a report");
    auto* run_all = app.add_subcommand("run-all", "full pipeline plus report");
    auto* ablate = app.add_subcommand("ablate", "component study over several suite seeds");
    for (auto* cmd : {synth, features, partition, seeds, hypergraph, train, evaluate,
                      run_all, ablate})
        add_common(cmd, opts);
    ablate->add_option("--suite-seeds", suite_seeds, "number of suite seeds")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed())
            return run_command(opts, PipelineStage::Synth,
                               [](const PipelineRun& r, const fs::path& w) {
                                   write_clouds(r, w);
                                   std::cout << r.scenes.size() << " scenes written\n";
                               });
        if (features->parsed())
            return run_command(opts, PipelineStage::Features, write_features);
        if (partition->parsed())
            return run_command(opts, PipelineStage::Partition,
                               [](const PipelineRun& r, const fs::path& w) {
                                   write_partitions(r, w);
                                   for (const auto& s : r.scenes)
                                       std::cout << s.id << ": "
                                                 << s.partition.n_superpoints
                                                 << " superpoints\n";
                               });
        if (seeds->parsed()) return run_command(opts, PipelineStage::Seeds, write_seeds);
        if (hypergraph->parsed())
            return run_command(opts, PipelineStage::Hypergraph, write_hypergraphs);
        if (train->parsed()) {
            if (!effective_config(opts).use_whcn)
                throw InvalidConfig("train: use_whcn=false trains nothing");
            return run_command(opts, PipelineStage::Train, write_models);
        }
        if (evaluate->parsed()) return cmd_evaluate(opts);
        if (run_all->parsed()) return cmd_run_all(opts);
        if (ablate->parsed()) return cmd_ablate(opts, suite_seeds);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
