#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "trustsiot/graph.hpp"
#include "trustsiot/rng.hpp"

using namespace trustsiot;

namespace {

InteractionRecord rec(ObjectId a, ObjectId b, Outcome o = Outcome::Positive, Timestamp t = 0) {
    return InteractionRecord{a, b, t, o};
}

// Random interaction set over n nodes; used by the property checks.
std::vector<InteractionRecord> random_interactions(Rng& rng, std::size_t n, std::size_t count) {
    std::vector<InteractionRecord> out;
    for (std::size_t i = 0; i < count; ++i) {
        ObjectId a = static_cast<ObjectId>(rng.below(n));
        ObjectId b = static_cast<ObjectId>(rng.below(n));
        if (a == b) continue;
        out.push_back(rec(a, b, rng.coin() ? Outcome::Positive : Outcome::Negative,
                          static_cast<Timestamp>(rng.below(100))));
    }
    return out;
}

}  // namespace

TEST_CASE("empty inputs build an empty graph and KG") {
    GraphBundle bundle = build_graph({}, {});
    CHECK(bundle.graph.node_count() == 0);
    CHECK(bundle.graph.edge_count() == 0);
    CHECK(bundle.kg.triple_count() == 0);
    CHECK(bundle.kg.entity_count() == 0);
}

TEST_CASE("repeat interactions collapse onto one edge") {
    std::vector<InteractionRecord> records = {rec(0, 1, Outcome::Positive),
                                              rec(0, 1, Outcome::Negative)};
    GraphBundle bundle = build_graph(records, {});
    CHECK(bundle.graph.node_count() == 2);
    CHECK(bundle.graph.edge_count() == 1);
    CHECK(bundle.graph.has_edge(0, 1));
    CHECK_FALSE(bundle.graph.has_edge(1, 0));
    CHECK(bundle.log.pair_records(0, 1).size() == 2);
}

TEST_CASE("KG counts distinct triples and relations") {
    std::vector<RelationTriple> triples = {
        {0, Relation::CLOR, 1}, {1, Relation::POR, 2}, {0, Relation::CLOR, 2}};
    GraphBundle bundle = build_graph({}, triples);
    CHECK(bundle.kg.triple_count() == 3);
    CHECK(bundle.kg.relation_count() == 2);
    CHECK(bundle.kg.entity_count() == 3);
}

TEST_CASE("duplicate triples dedupe silently, self-loops are rejected with counts") {
    std::vector<RelationTriple> triples = {
        {0, Relation::SOR, 1}, {0, Relation::SOR, 1}, {2, Relation::OOR, 2}};
    std::vector<InteractionRecord> records = {rec(3, 3)};
    GraphBundle bundle = build_graph(records, triples);
    CHECK(bundle.kg.triple_count() == 1);
    CHECK(bundle.diagnostics.duplicate_triples == 1);
    CHECK(bundle.diagnostics.self_loop_triples == 1);
    CHECK(bundle.diagnostics.self_loop_interactions == 1);
    CHECK(bundle.log.size() == 0);
}

TEST_CASE("neighbors are sorted and direction-aware") {
    std::vector<InteractionRecord> records = {rec(2, 0), rec(1, 0), rec(0, 3)};
    GraphBundle bundle = build_graph(records, {});
    const TrustGraph& g = bundle.graph;

    CHECK(g.neighbors(0, Direction::In) == std::vector<ObjectId>{1, 2});
    CHECK(g.neighbors(0, Direction::Out) == std::vector<ObjectId>{3});
    CHECK(g.neighbors(3, Direction::Out).empty());
    CHECK(g.neighbors(1, Direction::In).empty());
    CHECK_THROWS_WITH_AS(g.neighbors(9, Direction::In), "TrustGraph: object not found",
                         std::out_of_range);
}

TEST_CASE("out/in adjacency stays mutually consistent") {
    Rng rng(7);
    for (int round = 0; round < 20; ++round) {
        auto records = random_interactions(rng, 12, 60);
        if (records.empty()) continue;
        GraphBundle bundle = build_graph(records, {});
        const TrustGraph& g = bundle.graph;
        for (const TrustGraph::Edge& e : g.edges()) {
            auto out = g.neighbors(e.trustor, Direction::Out);
            auto in = g.neighbors(e.trustee, Direction::In);
            CHECK(std::find(out.begin(), out.end(), e.trustee) != out.end());
            CHECK(std::find(in.begin(), in.end(), e.trustor) != in.end());
        }
        // counts match the distinct input pairs and ids
        std::set<std::pair<ObjectId, ObjectId>> pairs;
        std::set<ObjectId> ids;
        for (const auto& r : records) {
            pairs.emplace(r.trustor, r.trustee);
            ids.insert(r.trustor);
            ids.insert(r.trustee);
        }
        CHECK(g.edge_count() == pairs.size());
        CHECK(g.node_count() == *ids.rbegin() + 1);
    }
}

TEST_CASE("serialized graph round-trips to an identical graph") {
    Rng rng(11);
    auto records = random_interactions(rng, 8, 40);
    GraphBundle bundle = build_graph(records, {});
    TrustGraph& g = bundle.graph;
    for (const TrustGraph::Edge& e : g.edges()) g.set_dtm(e.trustor, e.trustee, rng.real());
    std::vector<double> r(g.node_count()), b(g.node_count()), c(g.node_count());
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        r[i] = rng.real();
        b[i] = rng.real();
        c[i] = r[i] * b[i];
    }
    g.set_node_scores(r, b, c);

    std::stringstream ss;
    g.save(ss);
    TrustGraph loaded = TrustGraph::load(ss);

    REQUIRE(loaded.node_count() == g.node_count());
    REQUIRE(loaded.edge_count() == g.edge_count());
    for (const TrustGraph::Edge& e : g.edges())
        CHECK(*loaded.dtm(e.trustor, e.trustee) == *g.dtm(e.trustor, e.trustee));
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        CHECK(loaded.reliability(i) == g.reliability(i));
        CHECK(loaded.benevolence(i) == g.benevolence(i));
        CHECK(loaded.credibility(i) == g.credibility(i));
    }

    std::stringstream again;
    loaded.save(again);
    CHECK(again.str() == ss.str());
}

TEST_CASE("interaction log returns per-pair records in time order") {
    std::vector<InteractionRecord> records = {rec(0, 1, Outcome::Positive, 5),
                                              rec(0, 1, Outcome::Negative, 2), rec(1, 0)};
    InteractionLog log(records);
    auto span = log.pair_records(0, 1);
    REQUIRE(span.size() == 2);
    CHECK(span[0].time == 2);
    CHECK(span[1].time == 5);
    CHECK(log.pair_records(2, 3).empty());
}
