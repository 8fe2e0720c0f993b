#include "trustsiot/kge.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "trustsiot/io_util.hpp"

namespace trustsiot {

namespace {

constexpr double kDenomGuard = 1e-9;
constexpr double kSigmoidClamp = 30.0;

double sigmoid_clamped(double x) {
    x = std::clamp(x, -kSigmoidClamp, kSigmoidClamp);
    return 1.0 / (1.0 + std::exp(-x));
}

double guarded_denom(double rho, double t) {
    double d = 1.0 + rho * t;
    if (std::fabs(d) < kDenomGuard) d += kDenomGuard;
    return d;
}

}  // namespace

std::optional<std::size_t> EmbeddingTable::entity_row(ObjectId id) const {
    auto it = std::lower_bound(entity_ids.begin(), entity_ids.end(), id);
    if (it == entity_ids.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - entity_ids.begin());
}

std::optional<std::size_t> EmbeddingTable::relation_row(Relation r) const {
    auto it = std::lower_bound(relations.begin(), relations.end(), r);
    if (it == relations.end() || *it != r) return std::nullopt;
    return static_cast<std::size_t>(it - relations.begin());
}

double rotl_score(std::span<const double> h_vec, std::span<const double> rel_angles,
                  std::span<const double> t_vec, double alpha, double b_h, double b_t) {
    const std::size_t d = h_vec.size();
    if (d % 2 != 0 || t_vec.size() != d || rel_angles.size() != d / 2)
        throw std::invalid_argument("rotl_score: dimension mismatch");

    double norm_sq = 0.0;
    for (std::size_t k = 0; k < d / 2; ++k) {
        const double c = std::cos(rel_angles[k]);
        const double s = std::sin(rel_angles[k]);
        const double rho_a = c * h_vec[2 * k] - s * h_vec[2 * k + 1];
        const double rho_b = s * h_vec[2 * k] + c * h_vec[2 * k + 1];
        const double m_a = alpha * (rho_a + t_vec[2 * k]) / guarded_denom(rho_a, t_vec[2 * k]);
        const double m_b =
            alpha * (rho_b + t_vec[2 * k + 1]) / guarded_denom(rho_b, t_vec[2 * k + 1]);
        norm_sq += m_a * m_a + m_b * m_b;
    }
    const double norm = std::sqrt(norm_sq);
    return -(norm * std::exp(norm)) + b_h + b_t;
}

ScoreGrad rotl_score_grad(std::span<const double> h_vec, std::span<const double> rel_angles,
                          std::span<const double> t_vec, double alpha, double b_h, double b_t) {
    const std::size_t d = h_vec.size();
    if (d % 2 != 0 || t_vec.size() != d || rel_angles.size() != d / 2)
        throw std::invalid_argument("rotl_score_grad: dimension mismatch");

    std::vector<double> rho(d), m(d), denom(d);
    for (std::size_t k = 0; k < d / 2; ++k) {
        const double c = std::cos(rel_angles[k]);
        const double s = std::sin(rel_angles[k]);
        rho[2 * k] = c * h_vec[2 * k] - s * h_vec[2 * k + 1];
        rho[2 * k + 1] = s * h_vec[2 * k] + c * h_vec[2 * k + 1];
    }
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        denom[i] = guarded_denom(rho[i], t_vec[i]);
        m[i] = alpha * (rho[i] + t_vec[i]) / denom[i];
        norm_sq += m[i] * m[i];
    }
    const double norm = std::sqrt(norm_sq);

    ScoreGrad out;
    out.score = -(norm * std::exp(norm)) + b_h + b_t;
    out.d_head.assign(d, 0.0);
    out.d_tail.assign(d, 0.0);
    out.d_angles.assign(d / 2, 0.0);

    // d(score)/d(norm) = -(1 + norm) e^norm; norm = 0 only when m = 0, where
    // every downstream gradient vanishes too.
    if (norm == 0.0) return out;
    const double g_norm = -(1.0 + norm) * std::exp(norm);

    std::vector<double> g_rho(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double g_m = g_norm * m[i] / norm;
        out.d_alpha += g_m * (rho[i] + t_vec[i]) / denom[i];
        const double dsq = denom[i] * denom[i];
        g_rho[i] = g_m * alpha * (1.0 - t_vec[i] * t_vec[i]) / dsq;
        out.d_tail[i] = g_m * alpha * (1.0 - rho[i] * rho[i]) / dsq;
    }
    for (std::size_t k = 0; k < d / 2; ++k) {
        const double c = std::cos(rel_angles[k]);
        const double s = std::sin(rel_angles[k]);
        out.d_angles[k] = g_rho[2 * k] * (-rho[2 * k + 1]) + g_rho[2 * k + 1] * rho[2 * k];
        out.d_head[2 * k] = c * g_rho[2 * k] + s * g_rho[2 * k + 1];
        out.d_head[2 * k + 1] = -s * g_rho[2 * k] + c * g_rho[2 * k + 1];
    }
    return out;
}

std::vector<RowTriple> negative_samples(const RowTriple& triple, std::size_t n_entities,
                                        std::size_t k, Rng& rng) {
    if (n_entities < 2) throw std::invalid_argument("negative_samples: need >= 2 entities");
    std::vector<RowTriple> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        RowTriple neg = triple;
        std::size_t& slot = rng.coin() ? neg.head : neg.tail;
        const std::size_t replaced = slot;
        std::size_t draw = rng.below(n_entities - 1);
        if (draw >= replaced) ++draw;  // skip the replaced row, stay uniform
        slot = draw;
        out.push_back(neg);
    }
    return out;
}

double kge_loss(std::span<const double> positive_scores,
                std::span<const double> negative_scores) {
    if (positive_scores.empty()) throw std::invalid_argument("kge_loss: no positive scores");
    double sum = 0.0;
    for (double f : positive_scores) sum += std::log(sigmoid_clamped(f));
    for (double f : negative_scores) sum += std::log(1.0 - sigmoid_clamped(f));
    return -sum / static_cast<double>(positive_scores.size());
}

KgeGradients KgeGradients::zeros_like(const EmbeddingTable& table) {
    KgeGradients g;
    g.entity_vecs.assign(table.entity_vecs.size(), 0.0);
    g.entity_bias.assign(table.entity_bias.size(), 0.0);
    g.relation_angles.assign(table.relation_angles.size(), 0.0);
    g.relation_alpha.assign(table.relation_alpha.size(), 0.0);
    return g;
}

namespace {

// Accumulates df * d(score)/d(params) into grads for one triple.
void accumulate_triple(const EmbeddingTable& table, const RowTriple& t, double df,
                       KgeGradients& grads) {
    const std::size_t d = table.dim;
    ScoreGrad sg = rotl_score_grad(table.entity_vec(t.head), table.angles(t.rel),
                                   table.entity_vec(t.tail), table.relation_alpha[t.rel],
                                   table.entity_bias[t.head], table.entity_bias[t.tail]);
    for (std::size_t i = 0; i < d; ++i) {
        grads.entity_vecs[t.head * d + i] += df * sg.d_head[i];
        grads.entity_vecs[t.tail * d + i] += df * sg.d_tail[i];
    }
    for (std::size_t k = 0; k < d / 2; ++k)
        grads.relation_angles[t.rel * (d / 2) + k] += df * sg.d_angles[k];
    grads.relation_alpha[t.rel] += df * sg.d_alpha;
    grads.entity_bias[t.head] += df;
    grads.entity_bias[t.tail] += df;
}

double triple_score(const EmbeddingTable& table, const RowTriple& t) {
    return rotl_score(table.entity_vec(t.head), table.angles(t.rel), table.entity_vec(t.tail),
                      table.relation_alpha[t.rel], table.entity_bias[t.head],
                      table.entity_bias[t.tail]);
}

}  // namespace

double kge_batch_loss(const EmbeddingTable& table, std::span<const RowTriple> positives,
                      std::span<const RowTriple> negatives, KgeGradients* grads) {
    if (positives.empty()) throw std::invalid_argument("kge_batch_loss: empty batch");
    const double inv_n = 1.0 / static_cast<double>(positives.size());

    double sum = 0.0;
    for (const RowTriple& t : positives) {
        const double sig = sigmoid_clamped(triple_score(table, t));
        sum += std::log(sig);
        // d/df log(sigma(f)) = 1 - sigma(f); loss carries -1/n
        if (grads) accumulate_triple(table, t, -inv_n * (1.0 - sig), *grads);
    }
    for (const RowTriple& t : negatives) {
        const double sig = sigmoid_clamped(triple_score(table, t));
        sum += std::log(1.0 - sig);
        // d/df log(1 - sigma(f)) = -sigma(f)
        if (grads) accumulate_triple(table, t, inv_n * sig, *grads);
    }
    return -sum * inv_n;
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

EmbeddingTable init_table(const RelationKG& kg, const KgeTrainConfig& cfg) {
    EmbeddingTable table;
    table.dim = cfg.dim;
    table.entity_ids.assign(kg.entities().begin(), kg.entities().end());
    bool seen[kRelationCount] = {};
    for (const RelationTriple& t : kg.triples()) seen[static_cast<std::size_t>(t.relation)] = true;
    for (std::size_t r = 0; r < kRelationCount; ++r)
        if (seen[r]) table.relations.push_back(static_cast<Relation>(r));

    const std::size_t n_v = table.entity_ids.size();
    const std::size_t n_r = table.relations.size();
    const double bound = 0.5 / std::sqrt(static_cast<double>(cfg.dim));

    Rng rng = substream(cfg.seed, "kge.init");
    table.entity_vecs.resize(n_v * cfg.dim);
    for (double& x : table.entity_vecs) x = rng.real(-bound, bound);
    table.entity_bias.assign(n_v, 0.0);
    table.relation_angles.resize(n_r * (cfg.dim / 2));
    for (double& x : table.relation_angles) x = rng.real(-bound, bound);
    table.relation_alpha.assign(n_r, 1.0);
    return table;
}

}  // namespace

KgeTrainResult train_kge(const RelationKG& kg, const KgeTrainConfig& cfg) {
    if (kg.triple_count() == 0) throw std::invalid_argument("train_kge: empty knowledge graph");
    if (cfg.dim == 0 || cfg.dim % 2 != 0) throw std::invalid_argument("train_kge: dim must be even and > 0");
    if (cfg.batch_size == 0 || cfg.learning_rate <= 0.0 || cfg.neg_samples == 0)
        throw std::invalid_argument("train_kge: hyperparameters must be positive");

    KgeTrainResult result;
    result.table = init_table(kg, cfg);
    EmbeddingTable& table = result.table;

    // Row-space training triples.
    std::vector<RowTriple> triples;
    triples.reserve(kg.triple_count());
    for (const RelationTriple& t : kg.triples())
        triples.push_back({*table.entity_row(t.head), *table.relation_row(t.relation),
                           *table.entity_row(t.tail)});

    AdamState vec_state(table.entity_vecs.size());
    AdamState bias_state(table.entity_bias.size());
    AdamState angle_state(table.relation_angles.size());
    AdamState alpha_state(table.relation_alpha.size());

    Rng shuffle_rng = substream(cfg.seed, "kge.shuffle");
    Rng neg_rng = substream(cfg.seed, "kge.neg");

    std::vector<std::size_t> order(triples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.below(i)]);

        double epoch_loss_sum = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            const std::size_t end = std::min(begin + cfg.batch_size, order.size());
            std::vector<RowTriple> positives, negatives;
            positives.reserve(end - begin);
            negatives.reserve((end - begin) * cfg.neg_samples);
            for (std::size_t i = begin; i < end; ++i) {
                positives.push_back(triples[order[i]]);
                auto negs = negative_samples(triples[order[i]], table.entity_count(),
                                             cfg.neg_samples, neg_rng);
                negatives.insert(negatives.end(), negs.begin(), negs.end());
            }

            KgeGradients grads = KgeGradients::zeros_like(table);
            const double loss = kge_batch_loss(table, positives, negatives, &grads);
            if (!std::isfinite(loss))
                throw std::runtime_error("train_kge: loss diverged at epoch " +
                                         std::to_string(epoch));
            epoch_loss_sum += loss * static_cast<double>(positives.size());

            ++step;
            adam_update(table.entity_vecs, grads.entity_vecs, vec_state, cfg.learning_rate, step);
            adam_update(table.entity_bias, grads.entity_bias, bias_state, cfg.learning_rate, step);
            adam_update(table.relation_angles, grads.relation_angles, angle_state,
                        cfg.learning_rate, step);
            adam_update(table.relation_alpha, grads.relation_alpha, alpha_state,
                        cfg.learning_rate, step);
        }
        result.epoch_loss.push_back(epoch_loss_sum / static_cast<double>(triples.size()));
    }
    return result;
}

double cdor(const EmbeddingTable& table, ObjectId s_i, ObjectId s_j, CdorDiagnostics* diag) {
    auto row_i = table.entity_row(s_i);
    auto row_j = table.entity_row(s_j);
    if (!row_i || !row_j) {
        if (diag) ++diag->missing_entity_pairs;
        return 0.0;
    }
    auto vi = table.entity_vec(*row_i);
    auto vj = table.entity_vec(*row_j);
    double dot = 0.0, ni = 0.0, nj = 0.0;
    for (std::size_t k = 0; k < table.dim; ++k) {
        dot += vi[k] * vj[k];
        ni += vi[k] * vi[k];
        nj += vj[k] * vj[k];
    }
    if (ni == 0.0 || nj == 0.0) {
        if (diag) ++diag->zero_norm_pairs;
        return 0.0;
    }
    return dot / (std::sqrt(ni) * std::sqrt(nj));
}

void save_embeddings(const EmbeddingTable& table, std::ostream& entity_os,
                     std::ostream& relation_os) {
    entity_os << "entity";
    for (std::size_t k = 0; k < table.dim; ++k) entity_os << "\tv" << k;
    entity_os << "\tbias\n";
    for (std::size_t row = 0; row < table.entity_count(); ++row) {
        entity_os << table.entity_ids[row];
        for (double x : table.entity_vec(row)) entity_os << "\t" << format_double(x);
        entity_os << "\t" << format_double(table.entity_bias[row]) << "\n";
    }
    relation_os << "relation";
    for (std::size_t k = 0; k < table.dim / 2; ++k) relation_os << "\ta" << k;
    relation_os << "\talpha\n";
    for (std::size_t row = 0; row < table.relation_count(); ++row) {
        relation_os << relation_name(table.relations[row]);
        for (double x : table.angles(row)) relation_os << "\t" << format_double(x);
        relation_os << "\t" << format_double(table.relation_alpha[row]) << "\n";
    }
}

EmbeddingTable load_embeddings(std::istream& entity_is, std::istream& relation_is) {
    EmbeddingTable table;
    std::string line;
    if (!std::getline(entity_is, line)) throw std::runtime_error("embeddings: empty entity file");
    auto header = split_fields(line);
    if (header.size() < 3 || header.front() != "entity" || header.back() != "bias")
        throw std::runtime_error("embeddings: bad entity header");
    table.dim = header.size() - 2;
    if (table.dim % 2 != 0) throw std::runtime_error("embeddings: odd dimension");

    while (std::getline(entity_is, line)) {
        if (line.empty()) continue;
        auto f = split_fields(line);
        if (f.size() != table.dim + 2)
            throw std::runtime_error("embeddings: entity row has wrong column count");
        table.entity_ids.push_back(static_cast<ObjectId>(std::stoul(f[0])));
        for (std::size_t k = 0; k < table.dim; ++k)
            table.entity_vecs.push_back(std::stod(f[1 + k]));
        table.entity_bias.push_back(std::stod(f.back()));
    }
    if (!std::is_sorted(table.entity_ids.begin(), table.entity_ids.end()))
        throw std::runtime_error("embeddings: entity rows must be sorted by id");

    if (!std::getline(relation_is, line)) throw std::runtime_error("embeddings: empty relation file");
    header = split_fields(line);
    if (header.size() != table.dim / 2 + 2 || header.front() != "relation" ||
        header.back() != "alpha")
        throw std::runtime_error("embeddings: bad relation header");
    while (std::getline(relation_is, line)) {
        if (line.empty()) continue;
        auto f = split_fields(line);
        if (f.size() != table.dim / 2 + 2)
            throw std::runtime_error("embeddings: relation row has wrong column count");
        table.relations.push_back(relation_from_name(f[0]));
        for (std::size_t k = 0; k < table.dim / 2; ++k)
            table.relation_angles.push_back(std::stod(f[1 + k]));
        table.relation_alpha.push_back(std::stod(f.back()));
    }
    auto check_finite = [](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) throw std::runtime_error("embeddings: non-finite value");
    };
    check_finite(table.entity_vecs);
    check_finite(table.entity_bias);
    check_finite(table.relation_angles);
    check_finite(table.relation_alpha);
    return table;
}

}  // namespace trustsiot
