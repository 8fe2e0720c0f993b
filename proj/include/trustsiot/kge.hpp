#pragma once

// RotL knowledge-graph embedding over the five SIoT relations.
//
// Score of a triple (h, r, t):
//   f = -phi(|| Rot(theta_r) e_h  (+)_a  e_t ||) + b_h + b_t
// with phi(x) = x*e^x, Rot applied as d/2 independent Givens blocks over
// coordinate pairs (2k, 2k+1), and the modified addition applied elementwise:
//   x (+)_a y = a*(x + y) / (1 + x*y)
// Denominators within 1e-9 of zero are nudged by +1e-9. Training minimizes
// the binary cross-entropy negative-sampling loss with Adam; gradients are
// analytic and finite-difference checked in the tests.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "trustsiot/graph.hpp"
#include "trustsiot/rng.hpp"

namespace trustsiot {

struct EmbeddingTable {
    std::size_t dim = 0;                    // d, even
    std::vector<ObjectId> entity_ids;       // ascending; row order of entity_vecs
    std::vector<double> entity_vecs;        // n_V x d row-major
    std::vector<double> entity_bias;        // n_V
    std::vector<Relation> relations;        // present relations, ascending enum order
    std::vector<double> relation_angles;    // n_R x d/2 row-major
    std::vector<double> relation_alpha;     // n_R

    std::size_t entity_count() const { return entity_ids.size(); }
    std::size_t relation_count() const { return relations.size(); }

    std::optional<std::size_t> entity_row(ObjectId id) const;
    std::optional<std::size_t> relation_row(Relation r) const;

    std::span<const double> entity_vec(std::size_t row) const {
        return std::span<const double>(entity_vecs.data() + row * dim, dim);
    }
    std::span<const double> angles(std::size_t row) const {
        return std::span<const double>(relation_angles.data() + row * (dim / 2), dim / 2);
    }

    friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;
};

// Triple addressed by table rows rather than object ids.
struct RowTriple {
    std::size_t head = 0;
    std::size_t rel = 0;
    std::size_t tail = 0;
};

double rotl_score(std::span<const double> h_vec, std::span<const double> rel_angles,
                  std::span<const double> t_vec, double alpha, double b_h, double b_t);

// Score plus gradients w.r.t. every input; the trainer and the
// finite-difference tests share this path.
struct ScoreGrad {
    double score = 0.0;
    std::vector<double> d_head;
    std::vector<double> d_tail;
    std::vector<double> d_angles;
    double d_alpha = 0.0;
    // d_bias_head = d_bias_tail = 1 always; omitted.
};
ScoreGrad rotl_score_grad(std::span<const double> h_vec, std::span<const double> rel_angles,
                          std::span<const double> t_vec, double alpha, double b_h, double b_t);

// k corrupted triples; head or tail replaced (fair coin) by a uniform random
// different entity row. Requires n_entities >= 2.
std::vector<RowTriple> negative_samples(const RowTriple& triple, std::size_t n_entities,
                                        std::size_t k, Rng& rng);

// Mean binary cross-entropy per positive triple; sigmoid inputs are clamped
// to [-30, 30] before the logs.
double kge_loss(std::span<const double> positive_scores, std::span<const double> negative_scores);

struct KgeGradients {
    std::vector<double> entity_vecs;
    std::vector<double> entity_bias;
    std::vector<double> relation_angles;
    std::vector<double> relation_alpha;

    static KgeGradients zeros_like(const EmbeddingTable& table);
};

// Loss of one batch (positives plus their flattened negatives) and, when
// `grads` is non-null, the accumulated parameter gradients.
double kge_batch_loss(const EmbeddingTable& table, std::span<const RowTriple> positives,
                      std::span<const RowTriple> negatives, KgeGradients* grads = nullptr);

struct KgeTrainConfig {
    std::size_t dim = 32;
    std::size_t epochs = 100;
    std::size_t batch_size = 256;
    double learning_rate = 1e-3;
    std::size_t neg_samples = 2;
    std::uint64_t seed = 0;
};

struct KgeTrainResult {
    EmbeddingTable table;
    std::vector<double> epoch_loss;  // mean per-positive loss, one entry per epoch
};

// Seeded random init (vectors uniform in +-0.5/sqrt(d), alpha = 1, biases 0),
// then cfg.epochs of minibatch Adam. Zero epochs returns the init unchanged.
// Throws on empty KG, odd dim, or NaN loss (message carries the epoch).
KgeTrainResult train_kge(const RelationKG& kg, const KgeTrainConfig& cfg);

struct CdorDiagnostics {
    std::size_t missing_entity_pairs = 0;
    std::size_t zero_norm_pairs = 0;
};

// Cosine similarity of the two learned object vectors; 0 when either id is
// absent from the table or a vector has zero norm.
double cdor(const EmbeddingTable& table, ObjectId s_i, ObjectId s_j,
            CdorDiagnostics* diag = nullptr);

void save_embeddings(const EmbeddingTable& table, std::ostream& entity_os, std::ostream& relation_os);
EmbeddingTable load_embeddings(std::istream& entity_is, std::istream& relation_is);

}  // namespace trustsiot
