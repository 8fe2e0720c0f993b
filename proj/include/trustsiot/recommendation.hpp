#pragma once

// Recommendation trust via credibility-filtered two-hop paths, with the
// trustee's global mean reputation as fallback when no credible local
// recommender exists.

#include <cstddef>
#include <optional>
#include <vector>

#include "trustsiot/credibility.hpp"
#include "trustsiot/graph.hpp"

namespace trustsiot {

struct RecommenderSet {
    std::vector<ObjectId> members;  // ascending id
    double threshold = 0.5;
    bool is_global_fallback = false;
    std::size_t global_raters = 0;  // |U| at query time, informational
};

struct RecommendationOptions {
    double th = 0.5;
    // Cap on |K|; keeps the highest-credibility members (ties by lower id).
    std::optional<std::size_t> max_k;
};

// members = out-neighbors k of the trustor with an edge k->trustee and
// CR(k) >= th. Empty set flags the global fallback.
RecommenderSet select_credible(const TrustGraph& g, const CredibilityScores& scores,
                               ObjectId trustor, ObjectId trustee,
                               const RecommendationOptions& opts = {});

// Mean over k of DTM(trustor,k)*DTM(k,trustee). Throws when the set is the
// global fallback; callers route through rtm_global instead.
double rtm_local(const TrustGraph& g, const RecommenderSet& set, ObjectId trustor,
                 ObjectId trustee);

// Mean DTM over all in-raters of the trustee (the trustor's own rating is not
// excluded); 0.5 prior when the trustee was never rated.
double rtm_global(const TrustGraph& g, ObjectId trustee);

// Local route when the set is non-empty, global otherwise.
double rtm(const TrustGraph& g, const CredibilityScores& scores, ObjectId trustor,
           ObjectId trustee, const RecommendationOptions& opts = {});

}  // namespace trustsiot
