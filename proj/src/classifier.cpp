#include "trustsiot/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "trustsiot/io_util.hpp"
#include "trustsiot/rng.hpp"

namespace trustsiot {

std::vector<TrustSample> build_features(
    const TrustGraph& g, const CredibilityScores& scores, const EmbeddingTable& table,
    const std::map<std::pair<ObjectId, ObjectId>, TrustLabel>& pairs,
    const RecommendationOptions& rec_opts, CdorDiagnostics* cdor_diag) {
    if (scores.reliability.size() != g.node_count())
        throw std::invalid_argument("build_features: scores not solved for this graph");

    std::vector<TrustSample> samples;
    samples.reserve(pairs.size());
    for (const auto& [pair, label] : pairs) {
        auto [trustor, trustee] = pair;
        if (!g.has_node(trustor) || !g.has_node(trustee))
            throw std::logic_error("build_features: labeled pair references unknown object");
        auto direct = g.dtm(trustor, trustee);
        if (!direct)
            throw std::logic_error("build_features: labeled pair has no interaction edge");

        TrustSample s;
        s.trustor = trustor;
        s.trustee = trustee;
        s.label = label;
        s.features[0] = *direct;
        s.features[1] = scores.reliability[trustee];
        s.features[2] = scores.benevolence[trustee];
        s.features[3] = rtm(g, scores, trustor, trustee, rec_opts);
        s.features[4] = cdor(table, trustor, trustee, cdor_diag);
        samples.push_back(s);
    }
    return samples;
}

MlpGradients MlpGradients::zeros_like(const MlpModel& m) {
    MlpGradients g;
    g.hidden_weights.assign(m.hidden_weights.size(), 0.0);
    g.hidden_bias.assign(m.hidden_bias.size(), 0.0);
    g.output_weights.assign(m.output_weights.size(), 0.0);
    g.output_bias.assign(m.output_bias.size(), 0.0);
    return g;
}

MlpModel init_mlp(std::size_t hidden_size, double l2, std::uint64_t seed) {
    if (hidden_size == 0) throw std::invalid_argument("init_mlp: hidden size must be >= 1");
    MlpModel m;
    m.hidden_size = hidden_size;
    m.l2_penalty = l2;
    Rng rng = substream(seed, "mlp.init");
    auto glorot = [&](std::size_t fan_in, std::size_t fan_out, std::vector<double>& w) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        w.resize(fan_in * fan_out);
        for (double& x : w) x = rng.real(-bound, bound);
    };
    glorot(kFeatureCount, hidden_size, m.hidden_weights);
    m.hidden_bias.assign(hidden_size, 0.0);
    glorot(hidden_size, kClassCount, m.output_weights);
    m.output_bias.assign(kClassCount, 0.0);
    return m;
}

namespace {

struct Forward {
    std::vector<double> hidden;  // relu activations
    std::array<double, kClassCount> probs{};
};

Forward forward_pass(const MlpModel& m, std::span<const double> x) {
    const std::size_t h = m.hidden_size;
    Forward f;
    f.hidden.resize(h);
    for (std::size_t j = 0; j < h; ++j) {
        double z = m.hidden_bias[j];
        for (std::size_t i = 0; i < kFeatureCount; ++i) z += x[i] * m.hidden_weights[i * h + j];
        f.hidden[j] = z > 0.0 ? z : 0.0;  // relu, subgradient 0 at 0
    }
    std::array<double, kClassCount> logits{};
    for (std::size_t c = 0; c < kClassCount; ++c) {
        double z = m.output_bias[c];
        for (std::size_t j = 0; j < h; ++j) z += f.hidden[j] * m.output_weights[j * kClassCount + c];
        logits[c] = z;
    }
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < kClassCount; ++c) {
        f.probs[c] = std::exp(logits[c] - zmax);
        sum += f.probs[c];
    }
    for (double& p : f.probs) p /= sum;
    return f;
}

}  // namespace

double mlp_batch_loss(const MlpModel& model, std::span<const TrustSample> samples,
                      MlpGradients* grads) {
    if (samples.empty()) throw std::invalid_argument("mlp_batch_loss: empty batch");
    const std::size_t h = model.hidden_size;
    const double inv_n = 1.0 / static_cast<double>(samples.size());

    double ce = 0.0;
    for (const TrustSample& s : samples) {
        Forward f = forward_pass(model, s.features);
        const std::size_t y = static_cast<std::size_t>(s.label);
        ce -= std::log(std::max(f.probs[y], 1e-300));
        if (!grads) continue;

        std::array<double, kClassCount> dz2{};
        for (std::size_t c = 0; c < kClassCount; ++c)
            dz2[c] = (f.probs[c] - (c == y ? 1.0 : 0.0)) * inv_n;
        for (std::size_t c = 0; c < kClassCount; ++c) grads->output_bias[c] += dz2[c];
        std::vector<double> da1(h, 0.0);
        for (std::size_t j = 0; j < h; ++j) {
            for (std::size_t c = 0; c < kClassCount; ++c) {
                grads->output_weights[j * kClassCount + c] += f.hidden[j] * dz2[c];
                da1[j] += model.output_weights[j * kClassCount + c] * dz2[c];
            }
        }
        for (std::size_t j = 0; j < h; ++j) {
            const double dz1 = f.hidden[j] > 0.0 ? da1[j] : 0.0;
            grads->hidden_bias[j] += dz1;
            for (std::size_t i = 0; i < kFeatureCount; ++i)
                grads->hidden_weights[i * h + j] += s.features[i] * dz1;
        }
    }

    double penalty = 0.0;
    for (double w : model.hidden_weights) penalty += w * w;
    for (double w : model.output_weights) penalty += w * w;
    if (grads) {
        for (std::size_t i = 0; i < model.hidden_weights.size(); ++i)
            grads->hidden_weights[i] += 2.0 * model.l2_penalty * model.hidden_weights[i];
        for (std::size_t i = 0; i < model.output_weights.size(); ++i)
            grads->output_weights[i] += 2.0 * model.l2_penalty * model.output_weights[i];
    }
    return ce * inv_n + model.l2_penalty * penalty;
}

namespace {

struct AdamState {
    std::vector<double> m, v;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adam_update(std::vector<double>& param, const std::vector<double>& grad, AdamState& state,
                 double lr, std::size_t step) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < param.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
        param[i] -= lr * (state.m[i] / bc1) / (std::sqrt(state.v[i] / bc2) + eps);
    }
}

}  // namespace

MlpTrainResult train_mlp_from(MlpModel model, std::span<const TrustSample> samples,
                              const MlpTrainConfig& cfg) {
    if (samples.empty()) throw std::invalid_argument("train_mlp: no samples");

    MlpTrainResult result;
    AdamState w1_state(model.hidden_weights.size());
    AdamState b1_state(model.hidden_bias.size());
    AdamState w2_state(model.output_weights.size());
    AdamState b2_state(model.output_bias.size());

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        MlpGradients grads = MlpGradients::zeros_like(model);
        const double loss = mlp_batch_loss(model, samples, &grads);
        if (!std::isfinite(loss))
            throw std::runtime_error("train_mlp: loss diverged at epoch " + std::to_string(epoch));
        result.epoch_loss.push_back(loss);
        if (loss < cfg.cost_threshold) break;
        adam_update(model.hidden_weights, grads.hidden_weights, w1_state, cfg.learning_rate, epoch);
        adam_update(model.hidden_bias, grads.hidden_bias, b1_state, cfg.learning_rate, epoch);
        adam_update(model.output_weights, grads.output_weights, w2_state, cfg.learning_rate, epoch);
        adam_update(model.output_bias, grads.output_bias, b2_state, cfg.learning_rate, epoch);
    }
    result.model = std::move(model);
    return result;
}

MlpTrainResult train_mlp(std::span<const TrustSample> samples, const MlpTrainConfig& cfg) {
    bool present[kClassCount] = {};
    for (const TrustSample& s : samples) present[static_cast<std::size_t>(s.label)] = true;
    std::size_t classes = 0;
    for (bool p : present) classes += p ? 1 : 0;
    if (classes < 2) throw std::invalid_argument("train_mlp: degenerate labels");

    return train_mlp_from(init_mlp(cfg.hidden_size, cfg.l2, cfg.seed), samples, cfg);
}

Prediction predict(const MlpModel& model, std::span<const double> features) {
    if (features.size() != kFeatureCount)
        throw std::invalid_argument("predict: feature vector must have 5 entries");
    for (double x : features)
        if (!std::isfinite(x)) throw std::invalid_argument("predict: non-finite feature");

    Forward f = forward_pass(model, features);
    Prediction p;
    p.probabilities = f.probs;
    std::size_t best = 0;
    for (std::size_t c = 1; c < kClassCount; ++c)
        if (f.probs[c] > f.probs[best]) best = c;  // strict: ties keep the lower index
    p.label = static_cast<TrustLabel>(best);
    return p;
}

EvalReport score_predictions(std::span<const TrustLabel> truth,
                             std::span<const TrustLabel> predicted) {
    if (truth.empty() || truth.size() != predicted.size())
        throw std::invalid_argument("score_predictions: size mismatch or empty");
    EvalReport r;
    r.n_test = truth.size();
    double abs_sum = 0.0, sq_sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++r.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
        const double diff = label_value(truth[i]) - label_value(predicted[i]);
        abs_sum += std::fabs(diff);
        sq_sum += diff * diff;
    }
    r.mae = abs_sum / static_cast<double>(r.n_test);
    r.mse = sq_sum / static_cast<double>(r.n_test);

    double tp = 0.0, fp = 0.0, fn = 0.0;
    for (std::size_t c = 0; c < kClassCount; ++c) {
        tp += static_cast<double>(r.confusion[c][c]);
        for (std::size_t o = 0; o < kClassCount; ++o) {
            if (o == c) continue;
            fp += static_cast<double>(r.confusion[o][c]);
            fn += static_cast<double>(r.confusion[c][o]);
        }
    }
    const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    r.f1_micro = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    return r;
}

EvalReport evaluate(const MlpModel& model, std::span<const TrustSample> test) {
    if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
    std::vector<TrustLabel> truth, pred;
    truth.reserve(test.size());
    pred.reserve(test.size());
    for (const TrustSample& s : test) {
        truth.push_back(s.label);
        pred.push_back(predict(model, s.features).label);
    }
    return score_predictions(truth, pred);
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_split(
    std::size_t n_samples, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold_split: k must be >= 2");
    if (k > n_samples) throw std::invalid_argument("kfold_split: k exceeds sample count");

    std::vector<std::size_t> order(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) order[i] = i;
    Rng rng = substream(seed, "split.kfold");
    for (std::size_t i = n_samples; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> folds(k);
    for (std::size_t fold = 0; fold < k; ++fold) {
        // fold f takes positions f, f+k, f+2k, ... of the shuffled order
        for (std::size_t i = 0; i < n_samples; ++i)
            (i % k == fold ? folds[fold].second : folds[fold].first).push_back(order[i]);
        std::sort(folds[fold].first.begin(), folds[fold].first.end());
        std::sort(folds[fold].second.begin(), folds[fold].second.end());
    }
    return folds;
}

TrustLabel weighted_trust_label(std::span<const double> features, std::span<const double> weights) {
    if (features.size() != kFeatureCount || weights.size() != kFeatureCount)
        throw std::invalid_argument("weighted_trust_label: need 5 features and 5 weights");
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    if (std::fabs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("weighted_trust_label: weights must sum to 1");
    double t = 0.0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) t += weights[i] * features[i];
    t = std::clamp(t, 0.0, 1.0);  // C-DoR may pull below 0
    return t < 1.0 / 3.0 ? TrustLabel::Untrustworthy
           : t < 2.0 / 3.0 ? TrustLabel::Neutral
                           : TrustLabel::Trustworthy;
}

EvalReport evaluate_weighted(std::span<const TrustSample> test, std::span<const double> weights) {
    if (test.empty()) throw std::invalid_argument("evaluate_weighted: empty test set");
    std::vector<TrustLabel> truth, pred;
    for (const TrustSample& s : test) {
        truth.push_back(s.label);
        pred.push_back(weighted_trust_label(s.features, weights));
    }
    return score_predictions(truth, pred);
}

void save_model(const MlpModel& model, std::ostream& os) {
    os << "mlp\tinput\t" << kFeatureCount << "\thidden\t" << model.hidden_size << "\toutput\t"
       << kClassCount << "\tl2\t" << format_double(model.l2_penalty) << "\n";
    auto block = [&](const char* name, const std::vector<double>& v) {
        os << name;
        for (double x : v) os << "\t" << format_double(x);
        os << "\n";
    };
    block("hidden_weights", model.hidden_weights);
    block("hidden_bias", model.hidden_bias);
    block("output_weights", model.output_weights);
    block("output_bias", model.output_bias);
}

MlpModel load_model(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("model: empty file");
    auto f = split_fields(line);
    if (f.size() != 9 || f[0] != "mlp" || f[1] != "input" || f[3] != "hidden" || f[5] != "output" ||
        f[7] != "l2")
        throw std::runtime_error("model: bad header");
    if (std::stoul(f[2]) != kFeatureCount || std::stoul(f[6]) != kClassCount)
        throw std::runtime_error("model: unsupported shape");
    MlpModel m;
    m.hidden_size = std::stoul(f[4]);
    m.l2_penalty = std::stod(f[8]);

    auto block = [&](const char* name, std::size_t expected) {
        if (!std::getline(is, line)) throw std::runtime_error("model: truncated");
        auto fields = split_fields(line);
        if (fields.empty() || fields[0] != name)
            throw std::runtime_error("model: expected block " + std::string(name));
        if (fields.size() != expected + 1)
            throw std::runtime_error("model: block " + std::string(name) + " has wrong size");
        std::vector<double> v(expected);
        for (std::size_t i = 0; i < expected; ++i) v[i] = std::stod(fields[i + 1]);
        return v;
    };
    m.hidden_weights = block("hidden_weights", kFeatureCount * m.hidden_size);
    m.hidden_bias = block("hidden_bias", m.hidden_size);
    m.output_weights = block("output_weights", m.hidden_size * kClassCount);
    m.output_bias = block("output_bias", kClassCount);
    return m;
}

}  // namespace trustsiot
