#pragma once

// Core graph data model shared by every pipeline stage.
//
// TrustGraph holds one directed edge per ordered pair with at least one
// interaction; the edge payload is the direct trust weight. RelationKG is the
// deduplicated multi-relational triple store. Both are immutable after build
// except for the staged fills (edge weights, node scores), which run
// single-threaded; concurrent readers are safe afterwards.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "trustsiot/core.hpp"

namespace trustsiot {

enum class Direction { In, Out };

struct BuildDiagnostics {
    std::size_t self_loop_interactions = 0;
    std::size_t self_loop_triples = 0;
    std::size_t duplicate_triples = 0;
};

class TrustGraph {
public:
    struct Edge {
        ObjectId trustor = kInvalidObject;
        ObjectId trustee = kInvalidObject;
        double dtm = 0.5;
    };

    TrustGraph() = default;

    std::size_t node_count() const { return out_offset_.empty() ? 0 : out_offset_.size() - 1; }
    std::size_t edge_count() const { return edges_.size(); }

    bool has_node(ObjectId v) const { return v < node_count(); }
    bool has_edge(ObjectId trustor, ObjectId trustee) const {
        return edge_index(trustor, trustee).has_value();
    }

    // Edge weight; nullopt when the ordered pair never interacted.
    std::optional<double> dtm(ObjectId trustor, ObjectId trustee) const {
        auto idx = edge_index(trustor, trustee);
        if (!idx) return std::nullopt;
        return edges_[*idx].dtm;
    }

    void set_dtm(ObjectId trustor, ObjectId trustee, double value);

    // Edges sorted by (trustor, trustee); iteration order is the canonical
    // deterministic order for every downstream pass.
    std::span<const Edge> edges() const { return edges_; }

    // Targets of s's outgoing edges, ascending id.
    std::span<const ObjectId> out_neighbors(ObjectId s) const;
    // Sources of s's incoming edges, ascending id.
    std::span<const ObjectId> in_neighbors(ObjectId s) const;

    // Owning variant of the two span accessors; throws std::out_of_range for
    // unknown ids.
    std::vector<ObjectId> neighbors(ObjectId s, Direction dir) const;

    double reliability(ObjectId v) const { return reliability_.at(v); }
    double benevolence(ObjectId v) const { return benevolence_.at(v); }
    double credibility(ObjectId v) const { return credibility_.at(v); }

    void set_node_scores(std::vector<double> reliability, std::vector<double> benevolence,
                         std::vector<double> credibility);

    // Stable textual form: node count, then one `trustor trustee dtm` line per
    // edge in canonical order, then the three node-score rows.
    void save(std::ostream& os) const;
    static TrustGraph load(std::istream& is);

    // Construct from unique ordered pairs (any input order); node ids must be
    // < node_count.
    static TrustGraph from_edges(std::size_t node_count, std::vector<Edge> edges);

private:
    std::optional<std::size_t> edge_index(ObjectId trustor, ObjectId trustee) const;

    std::vector<Edge> edges_;                 // sorted by (trustor, trustee)
    std::vector<std::size_t> out_offset_;     // CSR over edges_, size n+1
    std::vector<ObjectId> out_targets_;       // edges_[i].trustee, contiguous per node
    std::vector<ObjectId> in_sources_;        // CSR payload, ascending per node
    std::vector<std::size_t> in_offset_;      // size n+1
    std::vector<double> reliability_;
    std::vector<double> benevolence_;
    std::vector<double> credibility_;
};

class RelationKG {
public:
    RelationKG() = default;
    explicit RelationKG(std::vector<RelationTriple> triples);

    std::size_t triple_count() const { return triples_.size(); }     // n_T
    std::size_t entity_count() const { return entities_.size(); }    // n_V
    std::size_t relation_count() const { return n_relations_; }      // n_R

    std::span<const RelationTriple> triples() const { return triples_; }
    std::span<const ObjectId> entities() const { return entities_; }

    bool has_entity(ObjectId v) const { return entity_row(v).has_value(); }
    // Dense row of v in the embedding table; nullopt when v has no triples.
    std::optional<std::size_t> entity_row(ObjectId v) const;

private:
    std::vector<RelationTriple> triples_;  // deduped, sorted by (head, relation, tail)
    std::vector<ObjectId> entities_;       // sorted distinct ids appearing in triples
    std::size_t n_relations_ = 0;
};

// Raw per-pair interaction records, kept off the edges so the decay stage can
// re-bucket them for any t0. Grouped and sorted for per-pair range scans.
class InteractionLog {
public:
    InteractionLog() = default;
    explicit InteractionLog(std::vector<InteractionRecord> records);

    std::size_t size() const { return records_.size(); }
    std::span<const InteractionRecord> records() const { return records_; }

    // All records for the ordered pair, ascending time.
    std::span<const InteractionRecord> pair_records(ObjectId trustor, ObjectId trustee) const;

private:
    std::vector<InteractionRecord> records_;  // sorted by (trustor, trustee, time)
};

struct GraphBundle {
    TrustGraph graph;
    RelationKG kg;
    InteractionLog log;
    BuildDiagnostics diagnostics;
};

// Node set is the union of all ids seen in either input (ids are assumed
// dense already; ingest owns the remap). Self-loop records are rejected and
// counted; duplicate triples dedupe silently.
GraphBundle build_graph(std::span<const InteractionRecord> interactions,
                        std::span<const RelationTriple> triples);

}  // namespace trustsiot
