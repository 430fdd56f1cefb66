#include "whcn/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "whcn/descriptors.hpp"
#include "whcn/errors.hpp"
#include "whcn/geom_features.hpp"
#include "whcn/point_graph.hpp"
#include "whcn/rng.hpp"
#include "whcn/scene_classifier.hpp"
#include "whcn/textio.hpp"

namespace whcn {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double need_double(const std::string& key, const std::string& value) {
    auto v = parse_double(value);
    if (!v) throw InvalidConfig(key + ": not a number: '" + value + "'");
    return *v;
}

std::int64_t need_int(const std::string& key, const std::string& value) {
    auto v = parse_int(value);
    if (!v) throw InvalidConfig(key + ": not an integer: '" + value + "'");
    return *v;
}

bool need_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw InvalidConfig(key + ": expected true/false, got '" + value + "'");
}

}  // namespace

void apply_config_override(PipelineConfig& c, const std::string& key,
                           const std::string& value) {
    auto int_in = [&](std::int64_t lo, std::int64_t hi) {
        const auto v = need_int(key, value);
        if (v < lo || v > hi)
            throw InvalidConfig(key + ": " + value + " outside [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]");
        return static_cast<int>(v);
    };
    if (key == "rng_seed") {
        c.rng_seed = static_cast<std::uint64_t>(need_int(key, value));
    } else if (key == "scene_count") {
        c.scene_count = int_in(1, 100000);
    } else if (key == "points_per_scene") {
        c.points_per_scene = int_in(16, 10000000);
    } else if (key == "category_count") {
        c.category_count = int_in(2, 6);
    } else if (key == "knn_k") {
        c.knn_k = int_in(1, 1000);
    } else if (key == "rho") {
        const double v = need_double(key, value);
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidConfig("rho: must be finite and >= 0");
        c.rho = v;
    } else if (key == "superpoint_target") {
        c.superpoint_target = int_in(0, 1000000);
    } else if (key == "seed_fraction") {
        const double v = need_double(key, value);
        if (!(v > 0.0) || v > 1.0) throw InvalidConfig("seed_fraction: must be in (0, 1]");
        c.seed_fraction = v;
    } else if (key == "hyperedge_knn") {
        c.hyperedge_knn = int_in(1, 1000);
    } else if (key == "hidden_dim") {
        c.hidden_dim = int_in(1, 4096);
    } else if (key == "epochs") {
        c.epochs = int_in(1, 1000000);
    } else if (key == "learning_rate") {
        const double v = need_double(key, value);
        if (!(v > 0.0)) throw InvalidConfig("learning_rate: must be > 0");
        c.learning_rate = v;
    } else if (key == "dropout") {
        const double v = need_double(key, value);
        if (v < 0.0 || v >= 1.0) throw InvalidConfig("dropout: must be in [0, 1)");
        c.dropout = v;
    } else if (key == "mu") {
        const double v = need_double(key, value);
        if (!(v > 0.0)) throw InvalidConfig("mu: must be > 0");
        c.mu = v;
    } else if (key == "classifier_epochs") {
        c.classifier_epochs = int_in(1, 1000000);
    } else if (key == "use_superpoints") {
        c.use_superpoints = need_bool(key, value);
    } else if (key == "use_whcn") {
        c.use_whcn = need_bool(key, value);
    } else if (key == "use_attention") {
        c.use_attention = need_bool(key, value);
    } else if (key == "pointwise_subsample") {
        c.pointwise_subsample = int_in(8, 1000000);
    } else {
        throw InvalidConfig("unknown config key '" + key + "'");
    }
}

PipelineConfig parse_config_text(const std::string& text, const std::string& origin) {
    PipelineConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(line_no, origin + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError(line_no, origin + ": empty key or value");
        try {
            apply_config_override(config, key, value);
        } catch (const InvalidConfig& e) {
            throw ParseError(line_no, origin + ": " + e.what());
        }
    }
    return config;
}

PipelineConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("parse_config_file: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::vector<std::pair<std::string, std::string>> config_echo(const PipelineConfig& c) {
    auto b = [](bool v) { return v ? std::string("true") : std::string("false"); };
    return {
        {"rng_seed", std::to_string(c.rng_seed)},
        {"scene_count", std::to_string(c.scene_count)},
        {"points_per_scene", std::to_string(c.points_per_scene)},
        {"category_count", std::to_string(c.category_count)},
        {"knn_k", std::to_string(c.knn_k)},
        {"rho", format_double(c.rho)},
        {"superpoint_target", std::to_string(c.superpoint_target)},
        {"seed_fraction", format_double(c.seed_fraction)},
        {"hyperedge_knn", std::to_string(c.hyperedge_knn)},
        {"hidden_dim", std::to_string(c.hidden_dim)},
        {"epochs", std::to_string(c.epochs)},
        {"learning_rate", format_double(c.learning_rate)},
        {"dropout", format_double(c.dropout)},
        {"mu", format_double(c.mu)},
        {"classifier_epochs", std::to_string(c.classifier_epochs)},
        {"use_superpoints", b(c.use_superpoints)},
        {"use_whcn", b(c.use_whcn)},
        {"use_attention", b(c.use_attention)},
        {"pointwise_subsample", std::to_string(c.pointwise_subsample)},
    };
}

void save_config(const PipelineConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_config: cannot open " + path);
    for (const auto& [k, v] : config_echo(config)) out << k << " = " << v << '\n';
    if (!out) throw IoError("save_config: write failed for " + path);
}

namespace {

// runs fn(scene) for every scene, in parallel, and rethrows the
// lowest-indexed failure afterwards (throwing out of an omp region aborts)
template <typename Fn>
void for_each_scene(int n, Fn&& fn) {
    std::vector<std::string> errors(n);
    std::vector<char> failed(n, 0);
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < n; ++s) {
        try {
            fn(s);
        } catch (const std::exception& e) {
            failed[s] = 1;
            errors[s] = e.what();
        }
    }
    for (int s = 0; s < n; ++s)
        if (failed[s]) throw Error(errors[s]);
}

constexpr int kUnlabeled = std::numeric_limits<int>::max();

std::string scene_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "scene_%03d", index);
    return buf;
}

std::vector<int> seed_only_vertex_labels(const SeedSet& seeds, int n_vertices) {
    std::vector<int> labels(n_vertices, kUnlabeled);
    for (const Seed& s : seeds.entries) labels[s.superpoint] = s.category;
    return labels;
}

}  // namespace

PipelineRun run_pipeline(const PipelineConfig& config, bool keep_artifacts,
                         PipelineStage stop_after) {
    PipelineRun run;
    EvalReport& report = run.report;
    report.config_echo = config_echo(config);
    const auto wants = [&](PipelineStage st) { return stop_after >= st; };

    const int n_scenes = config.scene_count;
    const int n_cat = config.category_count;
    std::vector<SceneArtifacts> sc(n_scenes);

    // per-scene working state (the subsampled cloud in pointwise mode)
    std::vector<LabeledCloud> work_cloud(n_scenes);
    std::vector<PointGraph> work_graph(n_scenes);
    std::vector<Matrix> work_geom(n_scenes);
    std::vector<std::vector<int>> expansion(n_scenes);  // full point -> vertex
    std::vector<std::vector<int>> vertex_labels(n_scenes);

    auto stage = [&](const char* name, auto&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn();
        } catch (const std::exception& e) {
            throw Error(std::string("stage ") + name + ": " + e.what());
        }
        const auto t1 = std::chrono::steady_clock::now();
        report.timings.push_back(
            {name, std::chrono::duration<double, std::milli>(t1 - t0).count()});
    };

    if (wants(PipelineStage::Synth)) stage("synth", [&] {
        for (int s = 0; s < n_scenes; ++s) {
            sc[s].id = scene_name(s);
            SceneConfig scene_cfg = random_room_config(
                mix_seed(config.rng_seed, 1000 + static_cast<std::uint64_t>(s)),
                config.points_per_scene, n_cat);
            sc[s].cloud = generate_scene(scene_cfg);
        }
        report.categories = sc[0].cloud.category_names;
    });

    if (wants(PipelineStage::Features)) stage("features", [&] {
        for_each_scene(n_scenes, [&](int s) {
            if (config.use_superpoints) {
                work_cloud[s] = sc[s].cloud;
            } else {
                // evenly strided subsample; every working point is a vertex
                const int n = static_cast<int>(sc[s].cloud.size());
                const int m = std::min(config.pointwise_subsample, n);
                work_cloud[s].category_names = sc[s].cloud.category_names;
                for (int j = 0; j < m; ++j) {
                    const int i = static_cast<int>(
                        (static_cast<long long>(j) * n) / m);
                    work_cloud[s].points.push_back(sc[s].cloud.points[i]);
                    work_cloud[s].colors.push_back(sc[s].cloud.colors[i]);
                    work_cloud[s].gt_labels.push_back(sc[s].cloud.gt_labels[i]);
                }
                work_cloud[s].scene_labels = sc[s].cloud.scene_labels;
            }
            const int k = std::min<int>(config.knn_k,
                                        static_cast<int>(work_cloud[s].size()) - 1);
            work_graph[s] = knn_graph(work_cloud[s].points, k);
            work_geom[s] = geometric_features(work_cloud[s].points, work_graph[s]);
            sc[s].geom = work_geom[s];
        });
    });

    if (wants(PipelineStage::Partition)) stage("partition", [&] {
        for_each_scene(n_scenes, [&](int s) {
            if (config.use_superpoints) {
                const int target = config.superpoint_target > 0
                                       ? config.superpoint_target
                                       : std::min(64, config.points_per_scene / 16);
                CutPursuitResult r = l0_cut_pursuit(work_geom[s], work_graph[s],
                                                    {config.rho}, target);
                sc[s].partition = std::move(r.partition);
                expansion[s] = sc[s].partition.assignment;
                sc[s].expansion = expansion[s];
            } else {
                std::vector<int> singleton(work_cloud[s].size());
                for (std::size_t j = 0; j < singleton.size(); ++j)
                    singleton[j] = static_cast<int>(j);
                sc[s].partition = make_partition(singleton, work_geom[s]);
                // each full point maps to its nearest working point
                expansion[s].resize(sc[s].cloud.size());
                const auto& wp = work_cloud[s].points;
                for (std::size_t i = 0; i < sc[s].cloud.size(); ++i) {
                    const Vec3& p = sc[s].cloud.points[i];
                    int best = 0;
                    double best_d2 = std::numeric_limits<double>::infinity();
                    for (std::size_t j = 0; j < wp.size(); ++j) {
                        const double dx = p[0] - wp[j][0], dy = p[1] - wp[j][1],
                                     dz = p[2] - wp[j][2];
                        const double d2 = dx * dx + dy * dy + dz * dz;
                        if (d2 < best_d2) {
                            best_d2 = d2;
                            best = static_cast<int>(j);
                        }
                    }
                    expansion[s][i] = best;
                }
            }
            sc[s].expansion = expansion[s];
        });
    });

    if (wants(PipelineStage::Descriptors)) stage("descriptors", [&] {
        for_each_scene(n_scenes, [&](int s) {
            sc[s].descriptors =
                superpoint_descriptors(work_cloud[s], work_geom[s], sc[s].partition);
        });
        std::vector<const Matrix*> blocks;
        for (int s = 0; s < n_scenes; ++s) blocks.push_back(&sc[s].descriptors);
        const ColumnStats stats = column_stats(blocks);
        for (int s = 0; s < n_scenes; ++s)
            standardize_columns(sc[s].descriptors, stats);
    });

    SceneClassifier classifier;
    if (wants(PipelineStage::Classifier)) stage("classifier", [&] {
        std::vector<SceneSample> corpus;
        for (int s = 0; s < n_scenes; ++s)
            corpus.push_back({sc[s].descriptors, sc[s].cloud.scene_labels});
        classifier = train_scene_classifier(corpus, n_cat, config.classifier_epochs,
                                            config.learning_rate);
    });

    if (wants(PipelineStage::Seeds)) stage("seeds", [&] {
        for_each_scene(n_scenes, [&](int s) {
            Matrix cam = class_activation_map(classifier, sc[s].descriptors);
            sc[s].seeds = select_seeds(cam, sc[s].cloud.scene_labels,
                                       config.seed_fraction, sc[s].id);
        });
    });

    if (wants(PipelineStage::Hypergraph)) stage("hypergraph", [&] {
        for_each_scene(n_scenes, [&](int s) {
            // a homogeneous scene can legitimately collapse to one superpoint;
            // it is labeled straight from its seed, no hypergraph needed
            if (sc[s].partition.n_superpoints < 2) return;
            sc[s].hypergraph =
                build_hypergraph(sc[s].seeds, sc[s].descriptors, config.hyperedge_knn);
        });
    });

    if (wants(PipelineStage::Train)) stage("train", [&] {
        for_each_scene(n_scenes, [&](int s) {
            const int n_vertices = sc[s].partition.n_superpoints;
            if (!config.use_whcn || n_vertices < 2) {
                vertex_labels[s] = seed_only_vertex_labels(sc[s].seeds, n_vertices);
                return;
            }
            WhcnConfig wc;
            wc.hidden_dim = config.hidden_dim;
            wc.dropout_rate = config.dropout;
            wc.mu = config.mu;
            wc.rng_seed = mix_seed(config.rng_seed, 7000 + static_cast<std::uint64_t>(s));
            wc.use_attention = config.use_attention;
            WhcnModel model = make_whcn_model(kDescriptorDim, n_cat, wc);
            TrainResult tr =
                train_whcn(model, sc[s].descriptors, sc[s].hypergraph,
                           sc[s].hypergraph.labeled_vertices, config.epochs,
                           config.learning_rate);
            VertexLabeling labeling =
                forward(model, sc[s].descriptors, sc[s].hypergraph, false);
            vertex_labels[s] = labeling.labels;
            sc[s].model = std::move(model);
            sc[s].loss_trace = std::move(tr.loss_trace);
        });
    });

    if (wants(PipelineStage::Expand)) stage("expand", [&] {
        for_each_scene(n_scenes, [&](int s) {
            sc[s].point_labels.resize(sc[s].cloud.size());
            for (std::size_t i = 0; i < sc[s].cloud.size(); ++i)
                sc[s].point_labels[i] = vertex_labels[s][expansion[s][i]];
        });
    });

    if (wants(PipelineStage::Evaluate)) stage("evaluate", [&] {
        std::vector<int> pred, gt, base_pred;
        for (int s = 0; s < n_scenes; ++s) {
            pred.insert(pred.end(), sc[s].point_labels.begin(), sc[s].point_labels.end());
            gt.insert(gt.end(), sc[s].cloud.gt_labels.begin(),
                      sc[s].cloud.gt_labels.end());
            const auto base_vertex =
                seed_only_vertex_labels(sc[s].seeds, sc[s].partition.n_superpoints);
            for (std::size_t i = 0; i < sc[s].cloud.size(); ++i)
                base_pred.push_back(base_vertex[expansion[s][i]]);
        }
        const MiouResult main = evaluate_miou(pred, gt, n_cat);
        report.per_category_iou = main.per_category;
        report.miou = main.miou;
        report.seed_baseline_miou = evaluate_miou(base_pred, gt, n_cat).miou;

        for (int s = 0; s < n_scenes; ++s) {
            SceneSummary summary;
            summary.id = sc[s].id;
            summary.points = static_cast<int>(sc[s].cloud.size());
            summary.superpoints = sc[s].partition.n_superpoints;
            summary.seeds = static_cast<int>(sc[s].seeds.entries.size());
            summary.seed_coverage = static_cast<double>(summary.seeds) /
                                    static_cast<double>(summary.superpoints);
            report.scenes.push_back(summary);
        }
    });

    if (keep_artifacts) run.scenes = std::move(sc);
    return run;
}

std::vector<AblationRow> run_ablation(const PipelineConfig& base, int n_seeds) {
    if (n_seeds < 1) throw InvalidConfig("run_ablation: need at least one seed");
    std::vector<AblationRow> rows(4);
    rows[0].name = "seeds_only";
    rows[1].name = "pointwise";
    rows[2].name = "attention_off";
    rows[3].name = "full";

    for (int s = 0; s < n_seeds; ++s) {
        PipelineConfig cfg = base;
        cfg.rng_seed = mix_seed(base.rng_seed, 5000 + static_cast<std::uint64_t>(s));

        PipelineConfig seeds_only = cfg;
        seeds_only.use_whcn = false;
        PipelineConfig pointwise = cfg;
        pointwise.use_superpoints = false;
        PipelineConfig no_attention = cfg;
        no_attention.use_attention = false;

        rows[0].per_seed_miou.push_back(run_pipeline(seeds_only).report.miou);
        rows[1].per_seed_miou.push_back(run_pipeline(pointwise).report.miou);
        rows[2].per_seed_miou.push_back(run_pipeline(no_attention).report.miou);
        rows[3].per_seed_miou.push_back(run_pipeline(cfg).report.miou);
    }
    for (auto& row : rows) {
        double sum = 0.0;
        for (double v : row.per_seed_miou) sum += v;
        row.mean_miou = sum / static_cast<double>(row.per_seed_miou.size());
    }
    return rows;
}

void save_ablation(const std::vector<AblationRow>& rows, const std::string& path) {
    nlohmann::ordered_json doc;
    doc["format"] = "WHCN-ABLATION v1";
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json jr;
        jr["name"] = row.name;
        jr["mean_miou"] = row.mean_miou;
        jr["per_seed_miou"] = row.per_seed_miou;
        arr.push_back(jr);
    }
    doc["rows"] = arr;
    std::ofstream out(path);
    if (!out) throw IoError("save_ablation: cannot open " + path);
    out << doc.dump(2) << '\n';
}

}  // namespace whcn
