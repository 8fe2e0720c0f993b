#pragma once

// Text artifacts exchanged between pipeline stages. Every writer is
// deterministic (canonical ordering, shortest round-trip doubles) so
// identical runs produce byte-identical files; every loader validates shape
// and fails fast on corruption.

#include <filesystem>
#include <map>
#include <vector>

#include "trustsiot/classifier.hpp"
#include "trustsiot/core.hpp"
#include "trustsiot/credibility.hpp"
#include "trustsiot/graph.hpp"

namespace trustsiot {

void save_interactions(const std::filesystem::path& path,
                       std::span<const InteractionRecord> records);
std::vector<InteractionRecord> load_interactions(const std::filesystem::path& path);

void save_triples(const std::filesystem::path& path, std::span<const RelationTriple> triples);
std::vector<RelationTriple> load_triples_artifact(const std::filesystem::path& path);

void save_labels(const std::filesystem::path& path,
                 const std::map<std::pair<ObjectId, ObjectId>, TrustLabel>& labels);
std::map<std::pair<ObjectId, ObjectId>, TrustLabel> load_labels(
    const std::filesystem::path& path);

void save_dtm(const std::filesystem::path& path, const TrustGraph& g);
// Applies stored weights onto an already-built graph; edge set must match.
void load_dtm_into(const std::filesystem::path& path, TrustGraph& g);

// CSV `id,reliability,benevolence,credibility` plus a trailing meta row.
void save_scores(const std::filesystem::path& path, const CredibilityScores& scores);
CredibilityScores load_scores(const std::filesystem::path& path);

void save_features(const std::filesystem::path& path, std::span<const TrustSample> samples);
std::vector<TrustSample> load_features(const std::filesystem::path& path);

}  // namespace trustsiot
