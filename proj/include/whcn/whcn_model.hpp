#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "whcn/cut_pursuit.hpp"
#include "whcn/exec.hpp"
#include "whcn/hypergraph.hpp"
#include "whcn/matrix.hpp"
#include "whcn/rng.hpp"

namespace whcn {

enum class Activation { ReLU, Identity };

struct WhcnLayer {
    Matrix theta;      // d_in x d_out
    Matrix attention;  // 1 x 2*d_out, the pair-similarity vector a
};

struct WhcnConfig {
    int hidden_dim = 32;
    double dropout_rate = 0.5;
    double mu = 1.0;          // attention weight scale
    double leaky_slope = 0.01;
    std::uint64_t rng_seed = 0;
    bool use_attention = true;  // false forces every hyperedge weight to 1
};

struct WhcnModel {
    std::vector<WhcnLayer> layers;
    WhcnConfig config;
};

// Two hypergraph convolutional layers: input -> hidden (ReLU) -> C classes.
// Theta init uniform +-sqrt(6/(d_in+d_out)), attention uniform +-0.05.
WhcnModel make_whcn_model(int input_dim, int n_categories, const WhcnConfig& config);

struct VertexLabeling {
    Matrix probabilities;     // N x C, rows sum to 1
    std::vector<int> labels;  // per-vertex argmax (ties to lower category)
};

// Per-hyperedge attention weight: mean over ordered member pairs (i, j) of
// exp(-LeakyReLU(a^T [x_i Theta || x_j Theta]) / mu). Strictly positive.
// Throws DegenerateHyperedge if any hyperedge has fewer than 2 members.
std::vector<double> hyperedge_attention_weights(const Matrix& x, const Matrix& theta,
                                                const Matrix& attention,
                                                const Hypergraph& hg, double mu,
                                                double leaky_slope,
                                                Exec exec = Exec::Parallel);

// One propagation step with the hypergraph's current weights:
//   act(D^{-1/2} H W B^{-1} H^T D^{-1/2} x theta)
// Degrees are recomputed from hg.weights; zero degrees use the pseudo-inverse
// convention (the corresponding output row is act(0)).
Matrix whcn_layer(const Matrix& x, const Hypergraph& hg, const Matrix& theta,
                  Activation act, Exec exec = Exec::Parallel);

// Everything backward() needs from one layer's forward pass.
struct LayerCache {
    Matrix x;                    // layer input
    Matrix z;                    // x * theta
    std::vector<double> p, q;    // attention projections a1.z_v, a2.z_v
    std::vector<double> w;       // hyperedge weights used by this layer
    std::vector<double> degree;  // d(v) under w
    std::vector<double> dinv_sqrt;
    Matrix edge_gather;          // H^T (S z), per hyperedge
    Matrix vertex_gather;        // H (W B^{-1} edge_gather), per vertex
    Matrix pre_act;              // S vertex_gather
    std::vector<char> relu_mask;
    std::vector<double> dropout_scale;  // per activation; empty if unused
};

struct ForwardCache {
    std::vector<LayerCache> layers;
    Matrix probabilities;
};

// Full pass: per layer recompute attention from that layer's input, set W,
// propagate (ReLU on hidden, identity on output), inverted dropout on hidden
// activations in training mode, then row softmax.
VertexLabeling forward(const WhcnModel& model, const Matrix& x0, const Hypergraph& hg,
                       bool training_mode, ForwardCache* cache = nullptr,
                       Rng* dropout_rng = nullptr);

// Cross-entropy over the labeled vertices, log clamped at 1e-12.
// Throws NoLabeledVertices.
double whcn_loss(const VertexLabeling& labeling,
                 const std::vector<std::pair<int, int>>& labeled_vertices);

struct WhcnGradients {
    std::vector<Matrix> theta;
    std::vector<Matrix> attention;
};

// Reverse-mode gradients of whcn_loss through softmax, both layers, and the
// attention path (weights and the degree normalization they induce).
WhcnGradients backward(const WhcnModel& model, const ForwardCache& cache,
                       const Hypergraph& hg,
                       const std::vector<std::pair<int, int>>& labeled_vertices);

struct TrainResult {
    std::vector<double> loss_trace;  // loss at the start of each epoch
};

// Full-batch Adam; dropout masks are drawn per epoch from config.rng_seed.
TrainResult train_whcn(WhcnModel& model, const Matrix& x0, const Hypergraph& hg,
                       const std::vector<std::pair<int, int>>& labeled_vertices,
                       int epochs, double lr);

// Every point inherits its superpoint's argmax label.
std::vector<int> expand_to_points(const VertexLabeling& labeling,
                                  const SuperpointPartition& partition);

// WHCN-MODEL v1 text checkpoint and `epoch,loss` CSV trace.
void save_whcn_model(const WhcnModel& model, const std::string& path);
WhcnModel load_whcn_model(const std::string& path);
void save_loss_trace(const std::vector<double>& trace, const std::string& path);

}  // namespace whcn
