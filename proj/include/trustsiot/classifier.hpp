#pragma once

// Five-feature samples, the single-hidden-layer neural aggregator, and the
// evaluation metrics.
//
// Feature order is fixed: <DTM, R(trustee), B(trustee), RTM, C-DoR>. The MLP
// is 5 -> H relu -> 3 softmax trained full-batch with Adam on cross-entropy
// plus an L2 penalty on the weight matrices (biases unpenalized). MAE/MSE map
// the three classes onto {0, 0.5, 1}; F1 is micro-averaged over the pooled
// confusion matrix.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "trustsiot/credibility.hpp"
#include "trustsiot/graph.hpp"
#include "trustsiot/kge.hpp"
#include "trustsiot/recommendation.hpp"

namespace trustsiot {

inline constexpr std::size_t kFeatureCount = 5;
inline constexpr std::size_t kClassCount = 3;

struct TrustSample {
    ObjectId trustor = kInvalidObject;
    ObjectId trustee = kInvalidObject;
    std::array<double, kFeatureCount> features{};
    TrustLabel label = TrustLabel::Neutral;
};

// One sample per labeled ordered pair; RTM takes the local route when a
// credible recommender exists, global otherwise; C-DoR defaults to 0 for
// objects missing from the KG. Throws when a pair references an unknown node
// or a missing edge (an upstream bug, not a data condition).
std::vector<TrustSample> build_features(
    const TrustGraph& g, const CredibilityScores& scores, const EmbeddingTable& table,
    const std::map<std::pair<ObjectId, ObjectId>, TrustLabel>& pairs,
    const RecommendationOptions& rec_opts = {}, CdorDiagnostics* cdor_diag = nullptr);

struct MlpModel {
    std::size_t hidden_size = 0;
    double l2_penalty = 0.0;
    std::vector<double> hidden_weights;  // kFeatureCount x H row-major
    std::vector<double> hidden_bias;     // H
    std::vector<double> output_weights;  // H x kClassCount row-major
    std::vector<double> output_bias;     // kClassCount

    friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

struct MlpTrainConfig {
    std::size_t hidden_size = 16;
    double l2 = 1e-4;
    std::size_t max_epochs = 500;
    double cost_threshold = 1e-3;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
};

MlpModel init_mlp(std::size_t hidden_size, double l2, std::uint64_t seed);

struct MlpGradients {
    std::vector<double> hidden_weights, hidden_bias, output_weights, output_bias;
    static MlpGradients zeros_like(const MlpModel& m);
};

// Full objective (mean cross-entropy + l2 * ||W||^2) and, when grads is
// non-null, its gradients; shared by the trainer and the gradient tests.
double mlp_batch_loss(const MlpModel& model, std::span<const TrustSample> samples,
                      MlpGradients* grads = nullptr);

struct MlpTrainResult {
    MlpModel model;
    std::vector<double> epoch_loss;  // objective before each accepted step
};

// Throws "degenerate labels" when training data carries a single class.
MlpTrainResult train_mlp(std::span<const TrustSample> samples, const MlpTrainConfig& cfg);

// Same loop from an explicit starting point; used by warm starts and the
// feature-permutation tests.
MlpTrainResult train_mlp_from(MlpModel model, std::span<const TrustSample> samples,
                              const MlpTrainConfig& cfg);

struct Prediction {
    TrustLabel label = TrustLabel::Neutral;
    std::array<double, kClassCount> probabilities{};
};

// Softmax probabilities; argmax label with ties broken toward the lower class
// index. Throws on non-finite features.
Prediction predict(const MlpModel& model, std::span<const double> features);

struct EvalReport {
    double f1_micro = 0.0;
    double mae = 0.0;
    double mse = 0.0;
    std::array<std::array<std::size_t, kClassCount>, kClassCount> confusion{};  // [truth][pred]
    std::size_t n_test = 0;
};

EvalReport evaluate(const MlpModel& model, std::span<const TrustSample> test);

// Metrics for an explicit prediction vector; evaluate() and the metric oracle
// tests both funnel through this.
EvalReport score_predictions(std::span<const TrustLabel> truth, std::span<const TrustLabel> predicted);

// Disjoint (train, validation) index sets, sizes within 1, seeded shuffle.
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_split(
    std::size_t n_samples, std::size_t k, std::uint64_t seed);

// Fixed-weight aggregation baseline: T = sum w_i * feature_i, clamped to
// [0,1] and thresholded into thirds. Weights must sum to 1.
TrustLabel weighted_trust_label(std::span<const double> features, std::span<const double> weights);
EvalReport evaluate_weighted(std::span<const TrustSample> test, std::span<const double> weights);

void save_model(const MlpModel& model, std::ostream& os);
MlpModel load_model(std::istream& is);

}  // namespace trustsiot
