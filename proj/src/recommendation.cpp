#include "trustsiot/recommendation.hpp"

#include <algorithm>
#include <stdexcept>

namespace trustsiot {

RecommenderSet select_credible(const TrustGraph& g, const CredibilityScores& scores,
                               ObjectId trustor, ObjectId trustee,
                               const RecommendationOptions& opts) {
    if (!g.has_node(trustor) || !g.has_node(trustee))
        throw std::out_of_range("select_credible: object not found");

    RecommenderSet set;
    set.threshold = opts.th;
    for (ObjectId k : g.out_neighbors(trustor)) {
        if (k == trustee) continue;
        if (!g.has_edge(k, trustee)) continue;
        if (scores.credibility.at(k) >= opts.th) set.members.push_back(k);
    }
    if (opts.max_k && set.members.size() > *opts.max_k) {
        std::stable_sort(set.members.begin(), set.members.end(), [&](ObjectId a, ObjectId b) {
            return scores.credibility[a] > scores.credibility[b];
        });
        set.members.resize(*opts.max_k);
        std::sort(set.members.begin(), set.members.end());
    }
    set.global_raters = g.in_neighbors(trustee).size();
    set.is_global_fallback = set.members.empty();
    return set;
}

double rtm_local(const TrustGraph& g, const RecommenderSet& set, ObjectId trustor,
                 ObjectId trustee) {
    if (set.members.empty()) throw std::logic_error("rtm_local: use global fallback");
    double sum = 0.0;
    for (ObjectId k : set.members) sum += *g.dtm(trustor, k) * *g.dtm(k, trustee);
    return sum / static_cast<double>(set.members.size());
}

double rtm_global(const TrustGraph& g, ObjectId trustee) {
    if (!g.has_node(trustee)) throw std::out_of_range("rtm_global: object not found");
    auto raters = g.in_neighbors(trustee);
    if (raters.empty()) return 0.5;
    double sum = 0.0;
    for (ObjectId u : raters) sum += *g.dtm(u, trustee);
    return sum / static_cast<double>(raters.size());
}

double rtm(const TrustGraph& g, const CredibilityScores& scores, ObjectId trustor,
           ObjectId trustee, const RecommendationOptions& opts) {
    RecommenderSet set = select_credible(g, scores, trustor, trustee, opts);
    return set.is_global_fallback ? rtm_global(g, trustee) : rtm_local(g, set, trustor, trustee);
}

}  // namespace trustsiot
