#include "whcn/scene_classifier.hpp"

#include <cmath>

#include "whcn/adam.hpp"
#include "whcn/errors.hpp"

namespace whcn {

namespace {

// numerically stable: max(z,0) - z*y + log(1 + exp(-|z|))
double sigmoid_bce(double z, double y) {
    return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

SceneClassifier train_scene_classifier(const std::vector<SceneSample>& corpus,
                                       int n_categories, int epochs, double lr) {
    if (corpus.empty()) throw EmptyCorpus("train_scene_classifier: no scenes");
    const std::size_t d = corpus[0].descriptors.cols();
    for (const auto& s : corpus) {
        if (s.descriptors.cols() != d)
            throw ShapeMismatch("train_scene_classifier: descriptor width differs");
        if (s.descriptors.rows() == 0)
            throw EmptyCorpus("train_scene_classifier: scene without superpoints");
        for (int c : s.scene_labels)
            if (c < 0 || c >= n_categories)
                throw ShapeMismatch("train_scene_classifier: label outside category space");
    }
    const std::size_t n_scenes = corpus.size();

    // global average pooling per scene
    Matrix pooled(n_scenes, d);
    for (std::size_t s = 0; s < n_scenes; ++s) {
        const Matrix& ds = corpus[s].descriptors;
        for (std::size_t i = 0; i < ds.rows(); ++i)
            for (std::size_t k = 0; k < d; ++k) pooled(s, k) += ds(i, k);
        for (std::size_t k = 0; k < d; ++k) pooled(s, k) /= static_cast<double>(ds.rows());
    }

    SceneClassifier clf;
    clf.weights = Matrix(n_categories, d);
    clf.bias.assign(n_categories, 0.0);

    Matrix bias_m(1, n_categories);
    AdamState w_state(n_categories, d, lr);
    AdamState b_state(1, n_categories, lr);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        Matrix w_grad(n_categories, d);
        Matrix b_grad(1, n_categories);
        double loss = 0.0;
        for (std::size_t s = 0; s < n_scenes; ++s) {
            for (int c = 0; c < n_categories; ++c) {
                double z = clf.bias[c];
                for (std::size_t k = 0; k < d; ++k) z += clf.weights(c, k) * pooled(s, k);
                const double y = corpus[s].scene_labels.count(c) ? 1.0 : 0.0;
                loss += sigmoid_bce(z, y);
                const double dz = (sigmoid(z) - y) / static_cast<double>(n_scenes);
                for (std::size_t k = 0; k < d; ++k) w_grad(c, k) += dz * pooled(s, k);
                b_grad(0, c) += dz;
            }
        }
        clf.training_log.push_back(loss / static_cast<double>(n_scenes));

        adam_step(clf.weights, w_grad, w_state);
        adam_step(bias_m, b_grad, b_state);
        for (int c = 0; c < n_categories; ++c) clf.bias[c] = bias_m(0, c);
    }
    return clf;
}

Matrix class_activation_map(const SceneClassifier& classifier, const Matrix& descriptors) {
    if (classifier.weights.cols() != descriptors.cols())
        throw ShapeMismatch("class_activation_map: descriptor width vs classifier");
    const std::size_t n = descriptors.rows();
    const std::size_t n_cat = classifier.weights.rows();
    Matrix cam(n, n_cat);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t c = 0; c < n_cat; ++c) {
            double v = 0.0;
            for (std::size_t j = 0; j < descriptors.cols(); ++j)
                v += classifier.weights(c, j) * descriptors(k, j);
            cam(k, c) = v;
        }
    return cam;
}

}  // namespace whcn
