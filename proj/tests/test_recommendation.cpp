#include <doctest.h>

#include <algorithm>
#include <climits>
#include <tuple>

#include "trustsiot/recommendation.hpp"
#include "trustsiot/rng.hpp"

using namespace trustsiot;

namespace {

TrustGraph graph_from_edges(std::size_t n,
                            const std::vector<std::tuple<ObjectId, ObjectId, double>>& edges) {
    std::vector<InteractionRecord> records;
    ObjectId max_ref = 0;
    for (auto [u, v, w] : edges) {
        records.push_back({u, v, 0, Outcome::Positive});
        max_ref = std::max({max_ref, u, v});
    }
    // anchor the node count without granting anyone an extra in-rater
    if (max_ref + 1 < n) records.push_back({static_cast<ObjectId>(n - 1), 0, 0, Outcome::Positive});
    TrustGraph g = build_graph(records, {}).graph;
    for (auto [u, v, w] : edges) g.set_dtm(u, v, w);
    return g;
}

CredibilityScores uniform_scores(std::size_t n, double cr) {
    CredibilityScores s;
    s.reliability.assign(n, 1.0);
    s.benevolence.assign(n, cr);
    s.credibility.assign(n, cr);
    s.converged = true;
    return s;
}

}  // namespace

TEST_CASE("no qualifying neighbor flags the global fallback") {
    // 0 -> 1 exists but 1 has no edge to 2
    TrustGraph g = graph_from_edges(3, {{0, 1, 0.9}});
    auto set = select_credible(g, uniform_scores(3, 0.9), 0, 2);
    CHECK(set.members.empty());
    CHECK(set.is_global_fallback);
}

TEST_CASE("filter keeps credible two-hop intermediaries, boundary inclusive") {
    TrustGraph g = graph_from_edges(3, {{0, 1, 0.8}, {1, 2, 0.9}});
    auto at_threshold = select_credible(g, uniform_scores(3, 0.5), 0, 2, {.th = 0.5});
    CHECK(at_threshold.members == std::vector<ObjectId>{1});
    CHECK_FALSE(at_threshold.is_global_fallback);

    auto below = select_credible(g, uniform_scores(3, 0.49), 0, 2, {.th = 0.5});
    CHECK(below.members.empty());
}

TEST_CASE("local recommendation of a single two-hop path") {
    TrustGraph g = graph_from_edges(3, {{0, 1, 0.8}, {1, 2, 0.9}});
    auto set = select_credible(g, uniform_scores(3, 0.9), 0, 2);
    CHECK(rtm_local(g, set, 0, 2) == doctest::Approx(0.72).epsilon(1e-12));
}

TEST_CASE("local recommendation averages over recommenders") {
    TrustGraph g =
        graph_from_edges(4, {{0, 1, 0.8}, {1, 3, 0.9}, {0, 2, 1.0}, {2, 3, 0.5}});
    auto set = select_credible(g, uniform_scores(4, 0.9), 0, 3);
    REQUIRE(set.members.size() == 2);
    CHECK(rtm_local(g, set, 0, 3) == doctest::Approx(0.61).epsilon(1e-12));
}

TEST_CASE("all-unit chain recommends exactly one") {
    TrustGraph g = graph_from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    auto set = select_credible(g, uniform_scores(3, 1.0), 0, 2);
    CHECK(rtm_local(g, set, 0, 2) == 1.0);
}

TEST_CASE("rtm_local refuses the fallback set") {
    TrustGraph g = graph_from_edges(3, {{0, 1, 0.8}});
    auto set = select_credible(g, uniform_scores(3, 0.9), 0, 2);
    CHECK_THROWS_AS(rtm_local(g, set, 0, 2), std::logic_error);
}

TEST_CASE("global recommendation averages the trustee's in-raters") {
    TrustGraph g = graph_from_edges(3, {{0, 2, 0.6}});
    CHECK(rtm_global(g, 2) == doctest::Approx(0.6).epsilon(1e-15));

    TrustGraph g2 = graph_from_edges(3, {{0, 2, 0.2}, {1, 2, 0.8}});
    CHECK(rtm_global(g2, 2) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("never-rated trustee gets the uninformative prior") {
    TrustGraph g = graph_from_edges(3, {{1, 0, 0.7}});
    CHECK(rtm_global(g, 2) == 0.5);
}

TEST_CASE("raising the threshold never enlarges the recommender set") {
    Rng rng(41);
    for (int round = 0; round < 40; ++round) {
        const std::size_t n = 8;
        std::vector<std::tuple<ObjectId, ObjectId, double>> edges;
        for (ObjectId u = 0; u < n; ++u)
            for (ObjectId v = 0; v < n; ++v)
                if (u != v && rng.real() < 0.4) edges.emplace_back(u, v, rng.real());
        TrustGraph g = graph_from_edges(n, edges);
        CredibilityScores scores;
        scores.reliability.assign(n, 1.0);
        scores.benevolence.assign(n, 1.0);
        scores.credibility.resize(n);
        for (double& c : scores.credibility) c = rng.real();

        ObjectId trustor = static_cast<ObjectId>(rng.below(n));
        ObjectId trustee = static_cast<ObjectId>(rng.below(n));
        if (trustor == trustee) continue;
        std::size_t prev = SIZE_MAX;
        for (double th = 0.0; th <= 1.0; th += 0.1) {
            auto set = select_credible(g, scores, trustor, trustee, {.th = th});
            CHECK(set.members.size() <= prev);
            prev = set.members.size();
            double r = rtm(g, scores, trustor, trustee, {.th = th});
            CHECK(r >= 0.0);
            CHECK(r <= 1.0);
        }
    }
}

TEST_CASE("max_k keeps the most credible recommenders") {
    TrustGraph g = graph_from_edges(
        5, {{0, 1, 0.9}, {0, 2, 0.9}, {0, 3, 0.9}, {1, 4, 0.5}, {2, 4, 0.5}, {3, 4, 0.5}});
    CredibilityScores scores;
    scores.reliability.assign(5, 1.0);
    scores.benevolence.assign(5, 1.0);
    scores.credibility = {1.0, 0.6, 0.9, 0.8, 1.0};

    RecommendationOptions opts;
    opts.th = 0.5;
    opts.max_k = 2;
    auto set = select_credible(g, scores, 0, 4, opts);
    CHECK(set.members == std::vector<ObjectId>{2, 3});
}

TEST_CASE("dishonest recommender drops out of the credible set") {
    // honest clique 0..4 rates each other and trustee 6 at 1.0; node 5 rates
    // the trustee 0.0 and its outgoing trust disagrees with everyone's
    // benevolence, so reliability and credibility both collapse
    std::vector<std::tuple<ObjectId, ObjectId, double>> edges;
    for (ObjectId i = 0; i < 5; ++i)
        for (ObjectId j = 0; j < 5; ++j)
            if (i != j) edges.emplace_back(i, j, 1.0);
    for (ObjectId i = 0; i < 5; ++i) edges.emplace_back(i, 6, 1.0);
    edges.emplace_back(0, 5, 0.5);  // trustor's own mixed experience with 5
    edges.emplace_back(5, 6, 0.0);
    for (ObjectId i = 0; i < 5; ++i) edges.emplace_back(5, i, 0.0);

    TrustGraph g = graph_from_edges(7, edges);
    CredibilityScores scores = solve_credibility(g);

    // trustor 0 asks about trustee 6; candidates are 1..4 (honest) and 5
    auto set = select_credible(g, scores, 0, 6, {.th = 0.5});
    CHECK(scores.credibility[5] < 0.5);
    CHECK(std::find(set.members.begin(), set.members.end(), 5) == set.members.end());
    CHECK(set.members == std::vector<ObjectId>{1, 2, 3, 4});
    // the dishonest rater is also less reliable than the honest ones
    CHECK(scores.reliability[5] < scores.reliability[1]);
}
