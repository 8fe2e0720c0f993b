#include "trustsiot/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "trustsiot/io_util.hpp"

namespace trustsiot {

const char* relation_name(Relation r) {
    switch (r) {
        case Relation::CLOR: return "CLOR";
        case Relation::POR: return "POR";
        case Relation::OOR: return "OOR";
        case Relation::SOR: return "SOR";
        case Relation::SOR2: return "SOR2";
    }
    throw std::invalid_argument("relation_name: bad enum value");
}

Relation relation_from_name(const std::string& name) {
    if (name == "CLOR") return Relation::CLOR;
    if (name == "POR") return Relation::POR;
    if (name == "OOR") return Relation::OOR;
    if (name == "SOR") return Relation::SOR;
    if (name == "SOR2") return Relation::SOR2;
    throw std::invalid_argument("unknown relation: " + name);
}

TrustGraph TrustGraph::from_edges(std::size_t node_count, std::vector<Edge> edges) {
    TrustGraph g;
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.trustor != b.trustor ? a.trustor < b.trustor : a.trustee < b.trustee;
    });
    for (const Edge& e : edges) {
        if (e.trustor >= node_count || e.trustee >= node_count)
            throw std::out_of_range("TrustGraph: edge endpoint out of range");
        if (e.dtm < 0.0 || e.dtm > 1.0)
            throw std::invalid_argument("TrustGraph: edge weight outside [0,1]");
    }
    g.edges_ = std::move(edges);

    g.out_offset_.assign(node_count + 1, 0);
    for (const Edge& e : g.edges_) ++g.out_offset_[e.trustor + 1];
    for (std::size_t v = 0; v < node_count; ++v) g.out_offset_[v + 1] += g.out_offset_[v];

    g.in_offset_.assign(node_count + 1, 0);
    for (const Edge& e : g.edges_) ++g.in_offset_[e.trustee + 1];
    for (std::size_t v = 0; v < node_count; ++v) g.in_offset_[v + 1] += g.in_offset_[v];
    g.in_sources_.resize(g.edges_.size());
    std::vector<std::size_t> cursor(g.in_offset_.begin(), g.in_offset_.end() - 1);
    // edges_ is sorted by trustor, so each in-list fills in ascending order
    for (const Edge& e : g.edges_) g.in_sources_[cursor[e.trustee]++] = e.trustor;

    g.out_targets_.reserve(g.edges_.size());
    for (const Edge& e : g.edges_) g.out_targets_.push_back(e.trustee);

    g.reliability_.assign(node_count, 0.5);
    g.benevolence_.assign(node_count, 0.5);
    g.credibility_.assign(node_count, 0.25);
    return g;
}

std::optional<std::size_t> TrustGraph::edge_index(ObjectId trustor, ObjectId trustee) const {
    if (trustor >= node_count() || trustee >= node_count()) return std::nullopt;
    auto first = edges_.begin() + static_cast<std::ptrdiff_t>(out_offset_[trustor]);
    auto last = edges_.begin() + static_cast<std::ptrdiff_t>(out_offset_[trustor + 1]);
    auto it = std::lower_bound(first, last, trustee,
                               [](const Edge& e, ObjectId t) { return e.trustee < t; });
    if (it == last || it->trustee != trustee) return std::nullopt;
    return static_cast<std::size_t>(it - edges_.begin());
}

void TrustGraph::set_dtm(ObjectId trustor, ObjectId trustee, double value) {
    auto idx = edge_index(trustor, trustee);
    if (!idx) throw std::out_of_range("TrustGraph::set_dtm: no such edge");
    if (value < 0.0 || value > 1.0)
        throw std::invalid_argument("TrustGraph::set_dtm: weight outside [0,1]");
    edges_[*idx].dtm = value;
}

std::span<const ObjectId> TrustGraph::out_neighbors(ObjectId s) const {
    if (!has_node(s)) throw std::out_of_range("TrustGraph: object not found");
    return std::span<const ObjectId>(out_targets_.data() + out_offset_[s],
                                     out_offset_[s + 1] - out_offset_[s]);
}

std::span<const ObjectId> TrustGraph::in_neighbors(ObjectId s) const {
    if (!has_node(s)) throw std::out_of_range("TrustGraph: object not found");
    return std::span<const ObjectId>(in_sources_.data() + in_offset_[s],
                                     in_offset_[s + 1] - in_offset_[s]);
}

std::vector<ObjectId> TrustGraph::neighbors(ObjectId s, Direction dir) const {
    if (!has_node(s)) throw std::out_of_range("TrustGraph: object not found");
    std::vector<ObjectId> out;
    if (dir == Direction::Out) {
        for (std::size_t i = out_offset_[s]; i < out_offset_[s + 1]; ++i)
            out.push_back(edges_[i].trustee);
    } else {
        auto span = in_neighbors(s);
        out.assign(span.begin(), span.end());
    }
    return out;
}

void TrustGraph::set_node_scores(std::vector<double> reliability, std::vector<double> benevolence,
                                 std::vector<double> credibility) {
    const std::size_t n = node_count();
    if (reliability.size() != n || benevolence.size() != n || credibility.size() != n)
        throw std::invalid_argument("TrustGraph::set_node_scores: size mismatch");
    reliability_ = std::move(reliability);
    benevolence_ = std::move(benevolence);
    credibility_ = std::move(credibility);
}

void TrustGraph::save(std::ostream& os) const {
    os << "nodes\t" << node_count() << "\n";
    os << "edges\t" << edge_count() << "\n";
    for (const Edge& e : edges_)
        os << e.trustor << "\t" << e.trustee << "\t" << format_double(e.dtm) << "\n";
    auto row = [&](const char* name, const std::vector<double>& v) {
        os << name;
        for (double x : v) os << "\t" << format_double(x);
        os << "\n";
    };
    row("reliability", reliability_);
    row("benevolence", benevolence_);
    row("credibility", credibility_);
}

TrustGraph TrustGraph::load(std::istream& is) {
    std::string key;
    std::size_t n = 0, m = 0;
    if (!(is >> key >> n) || key != "nodes") throw std::runtime_error("graph load: bad header");
    if (!(is >> key >> m) || key != "edges") throw std::runtime_error("graph load: bad header");
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        Edge e;
        if (!(is >> e.trustor >> e.trustee >> e.dtm))
            throw std::runtime_error("graph load: truncated edge list");
        edges.push_back(e);
    }
    TrustGraph g = from_edges(n, std::move(edges));
    auto row = [&](const char* name) {
        std::vector<double> v(n);
        std::string got;
        if (!(is >> got) || got != name) throw std::runtime_error("graph load: missing score row");
        for (std::size_t i = 0; i < n; ++i)
            if (!(is >> v[i])) throw std::runtime_error("graph load: truncated score row");
        return v;
    };
    auto r = row("reliability");
    auto b = row("benevolence");
    auto c = row("credibility");
    g.set_node_scores(std::move(r), std::move(b), std::move(c));
    return g;
}

RelationKG::RelationKG(std::vector<RelationTriple> triples) : triples_(std::move(triples)) {
    auto key = [](const RelationTriple& t) {
        return std::tuple(t.head, static_cast<int>(t.relation), t.tail);
    };
    std::sort(triples_.begin(), triples_.end(),
              [&](const RelationTriple& a, const RelationTriple& b) { return key(a) < key(b); });
    triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());

    std::set<ObjectId> ents;
    bool seen[kRelationCount] = {};
    for (const RelationTriple& t : triples_) {
        ents.insert(t.head);
        ents.insert(t.tail);
        seen[static_cast<std::size_t>(t.relation)] = true;
    }
    entities_.assign(ents.begin(), ents.end());
    n_relations_ = 0;
    for (bool s : seen) n_relations_ += s ? 1 : 0;
}

std::optional<std::size_t> RelationKG::entity_row(ObjectId v) const {
    auto it = std::lower_bound(entities_.begin(), entities_.end(), v);
    if (it == entities_.end() || *it != v) return std::nullopt;
    return static_cast<std::size_t>(it - entities_.begin());
}

InteractionLog::InteractionLog(std::vector<InteractionRecord> records)
    : records_(std::move(records)) {
    std::sort(records_.begin(), records_.end(),
              [](const InteractionRecord& a, const InteractionRecord& b) {
                  if (a.trustor != b.trustor) return a.trustor < b.trustor;
                  if (a.trustee != b.trustee) return a.trustee < b.trustee;
                  return a.time < b.time;
              });
}

std::span<const InteractionRecord> InteractionLog::pair_records(ObjectId trustor,
                                                                ObjectId trustee) const {
    auto lo = std::lower_bound(records_.begin(), records_.end(), std::pair(trustor, trustee),
                               [](const InteractionRecord& r, const std::pair<ObjectId, ObjectId>& p) {
                                   return std::pair(r.trustor, r.trustee) < p;
                               });
    auto hi = std::upper_bound(records_.begin(), records_.end(), std::pair(trustor, trustee),
                               [](const std::pair<ObjectId, ObjectId>& p, const InteractionRecord& r) {
                                   return p < std::pair(r.trustor, r.trustee);
                               });
    return std::span<const InteractionRecord>(records_.data() + (lo - records_.begin()),
                                              static_cast<std::size_t>(hi - lo));
}

GraphBundle build_graph(std::span<const InteractionRecord> interactions,
                        std::span<const RelationTriple> triples) {
    GraphBundle bundle;

    std::size_t node_count = 0;
    std::vector<InteractionRecord> kept;
    kept.reserve(interactions.size());
    for (const InteractionRecord& r : interactions) {
        if (r.trustor == r.trustee) {
            ++bundle.diagnostics.self_loop_interactions;
            continue;
        }
        node_count = std::max<std::size_t>(node_count, std::max(r.trustor, r.trustee) + 1);
        kept.push_back(r);
    }

    std::vector<RelationTriple> kept_triples;
    kept_triples.reserve(triples.size());
    for (const RelationTriple& t : triples) {
        if (t.head == t.tail) {
            ++bundle.diagnostics.self_loop_triples;
            continue;
        }
        node_count = std::max<std::size_t>(node_count, std::max(t.head, t.tail) + 1);
        kept_triples.push_back(t);
    }

    std::set<std::pair<ObjectId, ObjectId>> pairs;
    for (const InteractionRecord& r : kept) pairs.emplace(r.trustor, r.trustee);
    std::vector<TrustGraph::Edge> edges;
    edges.reserve(pairs.size());
    for (auto [u, v] : pairs) edges.push_back({u, v, 0.5});

    bundle.graph = TrustGraph::from_edges(node_count, std::move(edges));

    std::size_t before = kept_triples.size();
    bundle.kg = RelationKG(std::move(kept_triples));
    bundle.diagnostics.duplicate_triples = before - bundle.kg.triple_count();

    bundle.log = InteractionLog(std::move(kept));
    return bundle;
}

}  // namespace trustsiot
