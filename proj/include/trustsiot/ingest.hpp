#pragma once

// Dataset loading and the three-step SIoT merge.
//
// Rating files are TSV (tab, space, or comma separated):
//   trustor  trustee  rating  [time]
// Advogato ratings are the four certification levels mapped onto
// {0.1, 0.5, 0.7, 1.0}; BTC-style ratings are numeric and min-max normalized
// over the observed range. SIoT relation files are TSV:
//   head  relation  tail        (relation spelled CLOR|POR|OOR|SOR|SOR2)
//
// The merge converts the SIoT data to a relation graph, samples a sub-network
// matching the rating dataset's node count (degree-biased BFS from a seeded
// start, so sampled objects are likely to interact), and maps the sampled
// nodes 1:1 onto rating nodes in descending-degree order.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "trustsiot/core.hpp"
#include "trustsiot/graph.hpp"

namespace trustsiot {

struct RawRating {
    ObjectId rater = kInvalidObject;
    ObjectId rated = kInvalidObject;
    double value = 0.0;  // normalized to [0,1] by the loaders
    Timestamp time = 0;
};

struct IngestDiagnostics {
    std::size_t bad_lines = 0;        // rejected for any reason
    std::size_t unknown_levels = 0;   // Advogato lines with a level outside the four
    std::size_t self_ratings = 0;     // rater == rated
    std::size_t duplicate_pairs = 0;  // repeated ordered pairs (last-write-wins for labels)
};

struct RatingData {
    std::vector<RawRating> ratings;
    IdMap ids;
    IngestDiagnostics diagnostics;
};

// Levels Observer/Apprentice/Journeyer/Master -> 0.1/0.5/0.7/1.0; any other
// level string rejects the line.
RatingData load_advogato(const std::filesystem::path& path);

// Numeric ratings min-max normalized into [0,1] over the observed range.
// Throws "no ratings" when nothing parses.
RatingData load_btc_alpha(const std::filesystem::path& path);

struct SiotData {
    std::vector<RelationTriple> triples;  // ids dense in the SIoT file's own space
    IdMap ids;
    IngestDiagnostics diagnostics;
};

SiotData load_triples(const std::filesystem::path& path);

// One interaction per rating: positive when value >= positive_threshold,
// negative below; timestamps carried over.
std::vector<InteractionRecord> ratings_to_interactions(const std::vector<RawRating>& ratings,
                                                       double positive_threshold);

struct LabelThresholds {
    double low = 1.0 / 3.0;   // below: Untrustworthy
    double high = 2.0 / 3.0;  // below: Neutral; at or above: Trustworthy
};

// Equal-width thirds over [0,1] by default: value < low Untrustworthy,
// < high Neutral, else Trustworthy. Duplicate ordered pairs resolve
// last-write-wins. Throws on values outside [0,1] or inverted cut points.
std::map<std::pair<ObjectId, ObjectId>, TrustLabel> label_pairs(
    const std::vector<RawRating>& ratings, const LabelThresholds& cuts = {});

struct MergeResult {
    std::vector<InteractionRecord> interactions;
    RelationKG kg;                 // triples relabeled onto rating-dataset ids
    std::size_t sampled_nodes = 0;
};

// Throws "insufficient relation coverage" when the SIoT graph has fewer nodes
// than the rating dataset.
MergeResult merge_siot_relations(const RatingData& ratings, const SiotData& siot,
                                 std::uint64_t seed, double positive_threshold = 0.5);

struct DatasetManifest {
    std::filesystem::path ratings;
    std::filesystem::path triples;
    std::string format;  // advogato | btc
};

// Plain key=value file (ratings=..., triples=..., format=...); relative paths
// resolve against the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace trustsiot
