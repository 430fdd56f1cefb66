#pragma once

#include <set>
#include <vector>

#include "whcn/matrix.hpp"

namespace whcn {

// Linear multi-label scene classifier trained with sigmoid cross-entropy on
// scene-level labels; its weight rows feed the class activation maps.
struct SceneClassifier {
    Matrix weights;                   // C x d, row c is w_c
    std::vector<double> bias;         // C
    std::vector<double> training_log; // loss at the start of each epoch
};

struct SceneSample {
    Matrix descriptors;        // superpoints x d
    std::set<int> scene_labels;
};

// Full-batch Adam on the mean per-scene loss. Scene logits come from global
// average pooling over the scene's superpoint descriptors. Zero init, so the
// first logged loss is exactly C*ln 2 per scene.
SceneClassifier train_scene_classifier(const std::vector<SceneSample>& corpus,
                                       int n_categories, int epochs = 500,
                                       double lr = 0.003);

// cam(k, c) = dot(w_c, descriptor_k); no bias term.
Matrix class_activation_map(const SceneClassifier& classifier, const Matrix& descriptors);

}  // namespace whcn
