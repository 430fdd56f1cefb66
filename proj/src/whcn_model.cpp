#include "whcn/whcn_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "whcn/adam.hpp"
#include "whcn/errors.hpp"
#include "whcn/textio.hpp"

namespace whcn {

namespace {

constexpr double kWeightFloor = 1e-300;  // keeps hyperedge weights positive
constexpr double kLogClamp = 1e-12;

double leaky_relu(double t, double slope) { return t > 0.0 ? t : slope * t; }
double leaky_slope_at(double t, double slope) { return t > 0.0 ? 1.0 : slope; }

void check_edges_nondegenerate(const Hypergraph& hg) {
    for (const auto& mem : hg.members)
        if (mem.size() < 2)
            throw DegenerateHyperedge("hyperedge with fewer than 2 members");
}

// p_v = a1 . z_v, q_v = a2 . z_v with a = [a1 || a2]
void attention_projections(const Matrix& z, const Matrix& attention,
                           std::vector<double>& p, std::vector<double>& q) {
    const std::size_t n = z.rows(), dz = z.cols();
    p.assign(n, 0.0);
    q.assign(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        double pv = 0.0, qv = 0.0;
        for (std::size_t k = 0; k < dz; ++k) {
            pv += attention(0, k) * z(v, k);
            qv += attention(0, dz + k) * z(v, k);
        }
        p[v] = pv;
        q[v] = qv;
    }
}

std::vector<double> attention_weights_from_projections(const std::vector<double>& p,
                                                       const std::vector<double>& q,
                                                       const Hypergraph& hg, double mu,
                                                       double slope, Exec exec) {
    const long long ne = static_cast<long long>(hg.n_edges());
    std::vector<double> w(hg.n_edges());
    auto edge_weight = [&](std::size_t e) {
        const auto& mem = hg.members[e];
        const double r = static_cast<double>(mem.size());
        double sum = 0.0;
        for (std::size_t a = 0; a < mem.size(); ++a)
            for (std::size_t b = 0; b < mem.size(); ++b) {
                if (a == b) continue;
                const double sim = p[mem[a]] + q[mem[b]];
                sum += std::exp(-leaky_relu(sim, slope) / mu);
            }
        return std::max(sum / (r * (r - 1.0)), kWeightFloor);
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long e = 0; e < ne; ++e) w[e] = edge_weight(static_cast<std::size_t>(e));
    } else {
        for (long long e = 0; e < ne; ++e) w[e] = edge_weight(static_cast<std::size_t>(e));
    }
    return w;
}

// S H W B^{-1} H^T S z with S = diag(degree^{-1/2}); fills the cache fields.
void propagate(const Matrix& z, const Hypergraph& hg, const std::vector<double>& w,
               const std::vector<std::vector<int>>& vertex_edges, LayerCache& lc,
               Exec exec) {
    const long long n = static_cast<long long>(hg.n_vertices);
    const long long ne = static_cast<long long>(hg.n_edges());
    const std::size_t dz = z.cols();

    lc.degree.assign(hg.n_vertices, 0.0);
    lc.dinv_sqrt.assign(hg.n_vertices, 0.0);
    for (long long v = 0; v < n; ++v) {
        double dv = 0.0;
        for (int e : vertex_edges[v]) dv += w[e];
        lc.degree[v] = dv;
        lc.dinv_sqrt[v] = dv > 0.0 ? 1.0 / std::sqrt(dv) : 0.0;
    }

    lc.edge_gather = Matrix(hg.n_edges(), dz);
    auto gather_edge = [&](std::size_t e) {
        double* out = lc.edge_gather.row(e);
        for (int v : hg.members[e]) {
            const double sv = lc.dinv_sqrt[v];
            const double* zr = z.row(v);
            for (std::size_t k = 0; k < dz; ++k) out[k] += sv * zr[k];
        }
    };
    lc.vertex_gather = Matrix(hg.n_vertices, dz);
    auto gather_vertex = [&](std::size_t v) {
        double* out = lc.vertex_gather.row(v);
        for (int e : vertex_edges[v]) {
            const double scale = w[e] / static_cast<double>(hg.members[e].size());
            const double* mr = lc.edge_gather.row(e);
            for (std::size_t k = 0; k < dz; ++k) out[k] += scale * mr[k];
        }
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long e = 0; e < ne; ++e) gather_edge(static_cast<std::size_t>(e));
#pragma omp parallel for schedule(static)
        for (long long v = 0; v < n; ++v) gather_vertex(static_cast<std::size_t>(v));
    } else {
        for (long long e = 0; e < ne; ++e) gather_edge(static_cast<std::size_t>(e));
        for (long long v = 0; v < n; ++v) gather_vertex(static_cast<std::size_t>(v));
    }

    lc.pre_act = Matrix(hg.n_vertices, dz);
    for (long long v = 0; v < n; ++v) {
        const double sv = lc.dinv_sqrt[v];
        for (std::size_t k = 0; k < dz; ++k) lc.pre_act(v, k) = sv * lc.vertex_gather(v, k);
    }
}

void softmax_rows(const Matrix& logits, Matrix& probs) {
    probs = Matrix(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        double mx = logits(i, 0);
        for (std::size_t j = 1; j < logits.cols(); ++j) mx = std::max(mx, logits(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            probs(i, j) = std::exp(logits(i, j) - mx);
            sum += probs(i, j);
        }
        for (std::size_t j = 0; j < logits.cols(); ++j) probs(i, j) /= sum;
    }
}

}  // namespace

WhcnModel make_whcn_model(int input_dim, int n_categories, const WhcnConfig& config) {
    if (input_dim < 1 || n_categories < 2 || config.hidden_dim < 1)
        throw InvalidConfig("make_whcn_model: bad dimensions");
    if (!(config.mu > 0.0)) throw InvalidConfig("make_whcn_model: mu must be positive");
    if (config.dropout_rate < 0.0 || config.dropout_rate >= 1.0)
        throw InvalidConfig("make_whcn_model: dropout must be in [0, 1)");

    WhcnModel model;
    model.config = config;
    Rng rng(mix_seed(config.rng_seed, 0x9d01));
    const int dims[3] = {input_dim, config.hidden_dim, n_categories};
    for (int l = 0; l < 2; ++l) {
        WhcnLayer layer;
        layer.theta = Matrix(dims[l], dims[l + 1]);
        const double bound = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
        for (auto& v : layer.theta.data()) v = rng.uniform(-bound, bound);
        layer.attention = Matrix(1, 2 * dims[l + 1]);
        for (auto& v : layer.attention.data()) v = rng.uniform(-0.05, 0.05);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

std::vector<double> hyperedge_attention_weights(const Matrix& x, const Matrix& theta,
                                                const Matrix& attention,
                                                const Hypergraph& hg, double mu,
                                                double leaky_slope, Exec exec) {
    check_edges_nondegenerate(hg);
    if (x.cols() != theta.rows() || attention.cols() != 2 * theta.cols())
        throw ShapeMismatch("hyperedge_attention_weights: dimension mismatch");
    Matrix z = matmul(x, theta, exec);
    std::vector<double> p, q;
    attention_projections(z, attention, p, q);
    return attention_weights_from_projections(p, q, hg, mu, leaky_slope, exec);
}

Matrix whcn_layer(const Matrix& x, const Hypergraph& hg, const Matrix& theta,
                  Activation act, Exec exec) {
    if (static_cast<int>(x.rows()) != hg.n_vertices || x.cols() != theta.rows())
        throw ShapeMismatch("whcn_layer: dimension mismatch");
    Matrix z = matmul(x, theta, exec);
    LayerCache lc;
    const auto ve = hg.vertex_edges();
    propagate(z, hg, hg.weights, ve, lc, exec);
    if (act == Activation::ReLU)
        for (auto& v : lc.pre_act.data()) v = std::max(0.0, v);
    return std::move(lc.pre_act);
}

VertexLabeling forward(const WhcnModel& model, const Matrix& x0, const Hypergraph& hg,
                       bool training_mode, ForwardCache* cache, Rng* dropout_rng) {
    if (model.layers.empty()) throw InvalidConfig("forward: model has no layers");
    if (static_cast<int>(x0.rows()) != hg.n_vertices)
        throw ShapeMismatch("forward: x0 rows vs hypergraph vertices");
    check_edges_nondegenerate(hg);

    ForwardCache local;
    ForwardCache& fc = cache ? *cache : local;
    fc.layers.clear();
    fc.layers.resize(model.layers.size());

    const auto ve = hg.vertex_edges();
    const std::size_t n_layers = model.layers.size();
    Matrix x = x0;
    Rng fallback_rng(mix_seed(model.config.rng_seed, 0xd40));
    Rng& drng = dropout_rng ? *dropout_rng : fallback_rng;

    for (std::size_t l = 0; l < n_layers; ++l) {
        LayerCache& lc = fc.layers[l];
        const WhcnLayer& layer = model.layers[l];
        if (x.cols() != layer.theta.rows())
            throw ShapeMismatch("forward: layer " + std::to_string(l) + " input width");
        lc.x = x;
        lc.z = matmul(x, layer.theta);

        if (model.config.use_attention) {
            attention_projections(lc.z, layer.attention, lc.p, lc.q);
            lc.w = attention_weights_from_projections(lc.p, lc.q, hg, model.config.mu,
                                                      model.config.leaky_slope,
                                                      Exec::Parallel);
        } else {
            lc.w.assign(hg.n_edges(), 1.0);
        }
        propagate(lc.z, hg, lc.w, ve, lc, Exec::Parallel);

        if (l + 1 < n_layers) {
            Matrix activated = lc.pre_act;
            lc.relu_mask.assign(activated.size(), 0);
            for (std::size_t k = 0; k < activated.size(); ++k) {
                if (activated.data()[k] > 0.0)
                    lc.relu_mask[k] = 1;
                else
                    activated.data()[k] = 0.0;
            }
            if (training_mode && model.config.dropout_rate > 0.0) {
                const double rate = model.config.dropout_rate;
                lc.dropout_scale.assign(activated.size(), 0.0);
                for (std::size_t k = 0; k < activated.size(); ++k) {
                    const bool keep = drng.uniform01() >= rate;
                    lc.dropout_scale[k] = keep ? 1.0 / (1.0 - rate) : 0.0;
                    activated.data()[k] *= lc.dropout_scale[k];
                }
            }
            x = std::move(activated);
        }
    }

    VertexLabeling out;
    softmax_rows(fc.layers.back().pre_act, out.probabilities);
    fc.probabilities = out.probabilities;
    out.labels.resize(out.probabilities.rows());
    for (std::size_t i = 0; i < out.probabilities.rows(); ++i) {
        int best = 0;
        for (std::size_t j = 1; j < out.probabilities.cols(); ++j)
            if (out.probabilities(i, j) > out.probabilities(i, best))
                best = static_cast<int>(j);
        out.labels[i] = best;
    }
    return out;
}

double whcn_loss(const VertexLabeling& labeling,
                 const std::vector<std::pair<int, int>>& labeled_vertices) {
    if (labeled_vertices.empty()) throw NoLabeledVertices("whcn_loss");
    const Matrix& p = labeling.probabilities;
    double loss = 0.0;
    for (auto [v, c] : labeled_vertices) {
        if (v < 0 || static_cast<std::size_t>(v) >= p.rows() || c < 0 ||
            static_cast<std::size_t>(c) >= p.cols())
            throw ShapeMismatch("whcn_loss: labeled vertex out of range");
        loss -= std::log(std::max(p(v, c), kLogClamp));
    }
    return loss;
}

WhcnGradients backward(const WhcnModel& model, const ForwardCache& cache,
                       const Hypergraph& hg,
                       const std::vector<std::pair<int, int>>& labeled_vertices) {
    if (labeled_vertices.empty()) throw NoLabeledVertices("backward");
    const std::size_t n_layers = model.layers.size();
    const auto ve = hg.vertex_edges();
    const int n = hg.n_vertices;

    WhcnGradients grads;
    grads.theta.resize(n_layers);
    grads.attention.resize(n_layers);

    // softmax + cross entropy: adjoint of the final pre-activation
    const Matrix& probs = cache.probabilities;
    Matrix up(probs.rows(), probs.cols());
    for (auto [v, c] : labeled_vertices) {
        for (std::size_t j = 0; j < probs.cols(); ++j) up(v, j) += probs(v, j);
        up(v, c) -= 1.0;
    }

    for (std::size_t l = n_layers; l-- > 0;) {
        const LayerCache& lc = cache.layers[l];
        const WhcnLayer& layer = model.layers[l];
        const std::size_t dz = lc.z.cols();

        // hidden layers: undo dropout and ReLU first
        if (l + 1 < n_layers) {
            if (!lc.dropout_scale.empty())
                for (std::size_t k = 0; k < up.size(); ++k)
                    up.data()[k] *= lc.dropout_scale[k];
            for (std::size_t k = 0; k < up.size(); ++k)
                if (!lc.relu_mask[k]) up.data()[k] = 0.0;
        }

        // pre_act = S * vertex_gather
        Matrix d_gather(n, dz);
        std::vector<double> d_s(n, 0.0);
        for (int v = 0; v < n; ++v) {
            const double sv = lc.dinv_sqrt[v];
            double acc = 0.0;
            for (std::size_t k = 0; k < dz; ++k) {
                d_gather(v, k) = sv * up(v, k);
                acc += up(v, k) * lc.vertex_gather(v, k);
            }
            d_s[v] = acc;
        }

        // vertex_gather = H (W B^{-1} edge_gather)
        Matrix d_edge_scaled(hg.n_edges(), dz);
        for (std::size_t e = 0; e < hg.n_edges(); ++e) {
            double* out = d_edge_scaled.row(e);
            for (int v : hg.members[e])
                for (std::size_t k = 0; k < dz; ++k) out[k] += d_gather(v, k);
        }
        std::vector<double> d_w(hg.n_edges(), 0.0);
        Matrix d_edge(hg.n_edges(), dz);
        for (std::size_t e = 0; e < hg.n_edges(); ++e) {
            const double inv_b = 1.0 / static_cast<double>(hg.members[e].size());
            double acc = 0.0;
            for (std::size_t k = 0; k < dz; ++k) {
                d_edge(e, k) = lc.w[e] * inv_b * d_edge_scaled(e, k);
                acc += d_edge_scaled(e, k) * lc.edge_gather(e, k);
            }
            d_w[e] = inv_b * acc;
        }

        // edge_gather = H^T (S z)
        Matrix dz_mat(n, dz);
        for (int v = 0; v < n; ++v) {
            const double sv = lc.dinv_sqrt[v];
            double acc = 0.0;
            double* out = dz_mat.row(v);
            for (int e : ve[v])
                for (std::size_t k = 0; k < dz; ++k) out[k] += d_edge(e, k);
            for (std::size_t k = 0; k < dz; ++k) {
                acc += out[k] * lc.z(v, k);
                out[k] *= sv;
            }
            d_s[v] += acc;
        }

        // s = degree^{-1/2}; degree = sum of incident weights
        for (int v = 0; v < n; ++v) {
            if (lc.degree[v] <= 0.0) continue;
            const double sv = lc.dinv_sqrt[v];
            const double dd = -0.5 * sv * sv * sv * d_s[v];
            for (int e : ve[v]) d_w[e] += dd;
        }

        grads.attention[l] = Matrix(1, layer.attention.cols());
        if (model.config.use_attention) {
            std::vector<double> dp(n, 0.0), dq(n, 0.0);
            const double mu = model.config.mu;
            const double slope = model.config.leaky_slope;
            for (std::size_t e = 0; e < hg.n_edges(); ++e) {
                const auto& mem = hg.members[e];
                const double r = static_cast<double>(mem.size());
                const double coef = d_w[e] / (r * (r - 1.0));
                for (std::size_t a = 0; a < mem.size(); ++a)
                    for (std::size_t b = 0; b < mem.size(); ++b) {
                        if (a == b) continue;
                        const double sim = lc.p[mem[a]] + lc.q[mem[b]];
                        const double g = coef * std::exp(-leaky_relu(sim, slope) / mu) *
                                         (-1.0 / mu) * leaky_slope_at(sim, slope);
                        dp[mem[a]] += g;
                        dq[mem[b]] += g;
                    }
            }
            for (int v = 0; v < n; ++v) {
                for (std::size_t k = 0; k < dz; ++k) {
                    dz_mat(v, k) += dp[v] * layer.attention(0, k) +
                                    dq[v] * layer.attention(0, dz + k);
                    grads.attention[l](0, k) += dp[v] * lc.z(v, k);
                    grads.attention[l](0, dz + k) += dq[v] * lc.z(v, k);
                }
            }
        }

        grads.theta[l] = matmul(lc.x.transposed(), dz_mat);
        if (l > 0) up = matmul(dz_mat, layer.theta.transposed());
    }
    return grads;
}

TrainResult train_whcn(WhcnModel& model, const Matrix& x0, const Hypergraph& hg,
                       const std::vector<std::pair<int, int>>& labeled_vertices,
                       int epochs, double lr) {
    if (labeled_vertices.empty()) throw NoLabeledVertices("train_whcn");
    TrainResult result;
    std::vector<AdamState> theta_state, att_state;
    for (const auto& layer : model.layers) {
        theta_state.emplace_back(layer.theta.rows(), layer.theta.cols(), lr);
        att_state.emplace_back(layer.attention.rows(), layer.attention.cols(), lr);
    }

    const bool use_dropout = model.config.dropout_rate > 0.0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        Rng drop_rng(mix_seed(model.config.rng_seed, 0xd0 + epoch));
        ForwardCache cache;
        VertexLabeling out =
            forward(model, x0, hg, use_dropout, &cache, &drop_rng);
        result.loss_trace.push_back(whcn_loss(out, labeled_vertices));
        WhcnGradients grads = backward(model, cache, hg, labeled_vertices);
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            adam_step(model.layers[l].theta, grads.theta[l], theta_state[l]);
            adam_step(model.layers[l].attention, grads.attention[l], att_state[l]);
        }
    }
    return result;
}

std::vector<int> expand_to_points(const VertexLabeling& labeling,
                                  const SuperpointPartition& partition) {
    if (static_cast<int>(labeling.probabilities.rows()) != partition.n_superpoints)
        throw ShapeMismatch("expand_to_points: labeling vs partition size");
    std::vector<int> out(partition.assignment.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = labeling.labels[partition.assignment[i]];
    return out;
}

void save_whcn_model(const WhcnModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_whcn_model: cannot open " + path);
    out << "WHCN-MODEL v1\n";
    out << "config " << model.config.hidden_dim << ' '
        << format_double(model.config.dropout_rate) << ' '
        << format_double(model.config.mu) << ' '
        << format_double(model.config.leaky_slope) << ' ' << model.config.rng_seed << ' '
        << (model.config.use_attention ? 1 : 0) << '\n';
    out << "layers " << model.layers.size() << '\n';
    for (const auto& layer : model.layers) {
        out << "layer " << layer.theta.rows() << ' ' << layer.theta.cols() << '\n';
        for (std::size_t i = 0; i < layer.theta.rows(); ++i) {
            for (std::size_t j = 0; j < layer.theta.cols(); ++j)
                out << (j ? " " : "") << format_double(layer.theta(i, j));
            out << '\n';
        }
        for (std::size_t j = 0; j < layer.attention.cols(); ++j)
            out << (j ? " " : "") << format_double(layer.attention(0, j));
        out << '\n';
    }
    if (!out) throw IoError("save_whcn_model: write failed for " + path);
}

namespace {

std::vector<std::string> read_tokens(std::ifstream& in, std::size_t& line_no) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(line_no + 1, "unexpected end of file");
    ++line_no;
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
}

double tok_double(const std::vector<std::string>& toks, std::size_t idx,
                  std::size_t line_no) {
    auto v = parse_double(toks.at(idx));
    if (!v) throw ParseError(line_no, "bad number '" + toks[idx] + "'");
    return *v;
}

}  // namespace

WhcnModel load_whcn_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_whcn_model: cannot open " + path);
    std::size_t line_no = 0;

    auto header = read_tokens(in, line_no);
    if (header.size() != 2 || header[0] != "WHCN-MODEL" || header[1] != "v1")
        throw ParseError(line_no, "expected 'WHCN-MODEL v1'");

    auto cfg = read_tokens(in, line_no);
    if (cfg.size() != 7 || cfg[0] != "config")
        throw ParseError(line_no, "expected config line");
    WhcnModel model;
    model.config.hidden_dim = static_cast<int>(tok_double(cfg, 1, line_no));
    model.config.dropout_rate = tok_double(cfg, 2, line_no);
    model.config.mu = tok_double(cfg, 3, line_no);
    model.config.leaky_slope = tok_double(cfg, 4, line_no);
    model.config.rng_seed = static_cast<std::uint64_t>(tok_double(cfg, 5, line_no));
    model.config.use_attention = tok_double(cfg, 6, line_no) != 0.0;

    auto layers_line = read_tokens(in, line_no);
    if (layers_line.size() != 2 || layers_line[0] != "layers")
        throw ParseError(line_no, "expected layers line");
    const int n_layers = static_cast<int>(tok_double(layers_line, 1, line_no));

    for (int l = 0; l < n_layers; ++l) {
        auto layer_line = read_tokens(in, line_no);
        if (layer_line.size() != 3 || layer_line[0] != "layer")
            throw ParseError(line_no, "expected layer line");
        const auto d_in = static_cast<std::size_t>(tok_double(layer_line, 1, line_no));
        const auto d_out = static_cast<std::size_t>(tok_double(layer_line, 2, line_no));
        WhcnLayer layer;
        layer.theta = Matrix(d_in, d_out);
        for (std::size_t i = 0; i < d_in; ++i) {
            auto row = read_tokens(in, line_no);
            if (row.size() != d_out)
                throw ParseError(line_no, "expected " + std::to_string(d_out) + " values");
            for (std::size_t j = 0; j < d_out; ++j)
                layer.theta(i, j) = tok_double(row, j, line_no);
        }
        auto att = read_tokens(in, line_no);
        if (att.size() != 2 * d_out)
            throw ParseError(line_no, "expected " + std::to_string(2 * d_out) +
                                          " attention values");
        layer.attention = Matrix(1, 2 * d_out);
        for (std::size_t j = 0; j < 2 * d_out; ++j)
            layer.attention(0, j) = tok_double(att, j, line_no);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

void save_loss_trace(const std::vector<double>& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_loss_trace: cannot open " + path);
    out << "epoch,loss\n";
    for (std::size_t e = 0; e < trace.size(); ++e)
        out << e << ',' << format_double(trace[e]) << '\n';
    if (!out) throw IoError("save_loss_trace: write failed for " + path);
}

}  // namespace whcn
