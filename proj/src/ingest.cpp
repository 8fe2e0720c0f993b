#include "trustsiot/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "trustsiot/io_util.hpp"
#include "trustsiot/rng.hpp"

namespace trustsiot {

namespace {

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_time(const std::string& s, Timestamp& out) {
    // Some exports carry fractional epoch seconds; truncate toward zero.
    // Ticks are non-negative by contract.
    double v = 0.0;
    if (!parse_double(s, v) || v < 0.0) return false;
    out = static_cast<Timestamp>(v);
    return true;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

bool skip_line(const std::string& line) {
    return line.empty() || line[0] == '#' || line[0] == '%';
}

void note_duplicates(RatingData& data) {
    std::set<std::pair<ObjectId, ObjectId>> seen;
    for (const RawRating& r : data.ratings)
        if (!seen.emplace(r.rater, r.rated).second) ++data.diagnostics.duplicate_pairs;
}

}  // namespace

RatingData load_advogato(const std::filesystem::path& path) {
    RatingData data;
    for (const std::string& line : read_lines(path)) {
        if (skip_line(line)) continue;
        auto f = split_fields(line);
        if (f.size() < 3) {
            ++data.diagnostics.bad_lines;
            continue;
        }
        double value = 0.0;
        if (f[2] == "Observer") value = 0.1;
        else if (f[2] == "Apprentice") value = 0.5;
        else if (f[2] == "Journeyer") value = 0.7;
        else if (f[2] == "Master") value = 1.0;
        else {
            ++data.diagnostics.unknown_levels;
            ++data.diagnostics.bad_lines;
            continue;
        }
        Timestamp t = 0;
        if (f.size() >= 4 && !parse_time(f[3], t)) {
            ++data.diagnostics.bad_lines;
            continue;
        }
        if (f[0] == f[1]) {
            ++data.diagnostics.self_ratings;
            continue;
        }
        RawRating r;
        r.rater = data.ids.intern(f[0]);
        r.rated = data.ids.intern(f[1]);
        r.value = value;
        r.time = t;
        data.ratings.push_back(r);
    }
    note_duplicates(data);
    return data;
}

RatingData load_btc_alpha(const std::filesystem::path& path) {
    RatingData data;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const std::string& line : read_lines(path)) {
        if (skip_line(line)) continue;
        auto f = split_fields(line);
        double value = 0.0;
        if (f.size() < 3 || !parse_double(f[2], value)) {
            ++data.diagnostics.bad_lines;
            continue;
        }
        Timestamp t = 0;
        if (f.size() >= 4 && !parse_time(f[3], t)) {
            ++data.diagnostics.bad_lines;
            continue;
        }
        if (f[0] == f[1]) {
            ++data.diagnostics.self_ratings;
            continue;
        }
        RawRating r;
        r.rater = data.ids.intern(f[0]);
        r.rated = data.ids.intern(f[1]);
        r.value = value;
        r.time = t;
        data.ratings.push_back(r);
        lo = std::min(lo, value);
        hi = std::max(hi, value);
    }
    if (data.ratings.empty()) throw std::runtime_error("no ratings: " + path.string());
    // Degenerate single-value files normalize to the midpoint.
    for (RawRating& r : data.ratings) r.value = hi > lo ? (r.value - lo) / (hi - lo) : 0.5;
    note_duplicates(data);
    return data;
}

SiotData load_triples(const std::filesystem::path& path) {
    SiotData data;
    for (const std::string& line : read_lines(path)) {
        if (skip_line(line)) continue;
        auto f = split_fields(line);
        if (f.size() != 3) {
            ++data.diagnostics.bad_lines;
            continue;
        }
        Relation rel;
        try {
            rel = relation_from_name(f[1]);
        } catch (const std::invalid_argument&) {
            ++data.diagnostics.bad_lines;
            continue;
        }
        if (f[0] == f[2]) {
            ++data.diagnostics.self_ratings;
            continue;
        }
        RelationTriple t;
        t.head = data.ids.intern(f[0]);
        t.relation = rel;
        t.tail = data.ids.intern(f[2]);
        data.triples.push_back(t);
    }
    return data;
}

std::vector<InteractionRecord> ratings_to_interactions(const std::vector<RawRating>& ratings,
                                                       double positive_threshold) {
    std::vector<InteractionRecord> out;
    out.reserve(ratings.size());
    for (const RawRating& r : ratings) {
        InteractionRecord rec;
        rec.trustor = r.rater;
        rec.trustee = r.rated;
        rec.time = r.time;
        rec.outcome = r.value >= positive_threshold ? Outcome::Positive : Outcome::Negative;
        out.push_back(rec);
    }
    return out;
}

std::map<std::pair<ObjectId, ObjectId>, TrustLabel> label_pairs(
    const std::vector<RawRating>& ratings, const LabelThresholds& cuts) {
    if (!(cuts.low < cuts.high) || cuts.low <= 0.0 || cuts.high >= 1.0)
        throw std::invalid_argument("label_pairs: need 0 < low < high < 1");
    std::map<std::pair<ObjectId, ObjectId>, TrustLabel> labels;
    for (const RawRating& r : ratings) {
        if (r.value < 0.0 || r.value > 1.0)
            throw std::out_of_range("label_pairs: rating outside [0,1]");
        TrustLabel label = r.value < cuts.low    ? TrustLabel::Untrustworthy
                           : r.value < cuts.high ? TrustLabel::Neutral
                                                 : TrustLabel::Trustworthy;
        labels[{r.rater, r.rated}] = label;  // last write wins
    }
    return labels;
}

namespace {

// Undirected adjacency of the SIoT relation graph; degree counts distinct
// neighbors.
std::vector<std::vector<ObjectId>> relation_adjacency(const SiotData& siot) {
    std::vector<std::set<ObjectId>> adj(siot.ids.size());
    for (const RelationTriple& t : siot.triples) {
        adj[t.head].insert(t.tail);
        adj[t.tail].insert(t.head);
    }
    std::vector<std::vector<ObjectId>> out(adj.size());
    for (std::size_t v = 0; v < adj.size(); ++v) out[v].assign(adj[v].begin(), adj[v].end());
    return out;
}

// BFS that expands each frontier in descending-degree order; restarts at the
// highest-degree unvisited node when a component runs out.
std::vector<ObjectId> sample_subnetwork(const std::vector<std::vector<ObjectId>>& adj,
                                        std::size_t count, std::uint64_t seed) {
    const std::size_t n = adj.size();
    auto degree = [&](ObjectId v) { return adj[v].size(); };
    auto deg_order = [&](ObjectId a, ObjectId b) {
        return degree(a) != degree(b) ? degree(a) > degree(b) : a < b;
    };

    // Degree-biased seeded start: weight nodes by degree+1 so isolated nodes
    // remain reachable as starts in degenerate graphs.
    Rng rng = substream(seed, "merge.start");
    std::uint64_t total = 0;
    for (std::size_t v = 0; v < n; ++v) total += degree(static_cast<ObjectId>(v)) + 1;
    std::uint64_t pick = rng.below(total);
    ObjectId start = 0;
    for (std::size_t v = 0; v < n; ++v) {
        std::uint64_t w = degree(static_cast<ObjectId>(v)) + 1;
        if (pick < w) {
            start = static_cast<ObjectId>(v);
            break;
        }
        pick -= w;
    }

    std::vector<bool> visited(n, false);
    std::vector<ObjectId> sampled;
    sampled.reserve(count);
    std::deque<ObjectId> queue;
    queue.push_back(start);
    visited[start] = true;

    std::vector<ObjectId> by_degree(n);
    for (std::size_t v = 0; v < n; ++v) by_degree[v] = static_cast<ObjectId>(v);
    std::sort(by_degree.begin(), by_degree.end(), deg_order);
    std::size_t restart_cursor = 0;

    while (sampled.size() < count) {
        if (queue.empty()) {
            while (restart_cursor < n && visited[by_degree[restart_cursor]]) ++restart_cursor;
            if (restart_cursor == n) break;
            visited[by_degree[restart_cursor]] = true;
            queue.push_back(by_degree[restart_cursor]);
        }
        ObjectId v = queue.front();
        queue.pop_front();
        sampled.push_back(v);
        std::vector<ObjectId> next(adj[v].begin(), adj[v].end());
        std::sort(next.begin(), next.end(), deg_order);
        for (ObjectId u : next) {
            if (!visited[u]) {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    return sampled;
}

}  // namespace

MergeResult merge_siot_relations(const RatingData& ratings, const SiotData& siot,
                                 std::uint64_t seed, double positive_threshold) {
    if (ratings.ratings.empty()) throw std::invalid_argument("merge: no ratings");
    if (siot.triples.empty()) throw std::invalid_argument("merge: no relation triples");

    const std::size_t n_target = ratings.ids.size();
    if (siot.ids.size() < n_target)
        throw std::runtime_error("insufficient relation coverage: SIoT graph has " +
                                 std::to_string(siot.ids.size()) + " nodes, need " +
                                 std::to_string(n_target));

    auto adj = relation_adjacency(siot);
    std::vector<ObjectId> sampled = sample_subnetwork(adj, n_target, seed);

    // Rank both node sets by descending degree and zip them together.
    std::sort(sampled.begin(), sampled.end(), [&](ObjectId a, ObjectId b) {
        return adj[a].size() != adj[b].size() ? adj[a].size() > adj[b].size() : a < b;
    });

    std::vector<std::set<ObjectId>> rating_partners(n_target);
    for (const RawRating& r : ratings.ratings) {
        rating_partners[r.rater].insert(r.rated);
        rating_partners[r.rated].insert(r.rater);
    }
    std::vector<ObjectId> rating_nodes(n_target);
    for (std::size_t v = 0; v < n_target; ++v) rating_nodes[v] = static_cast<ObjectId>(v);
    std::sort(rating_nodes.begin(), rating_nodes.end(), [&](ObjectId a, ObjectId b) {
        return rating_partners[a].size() != rating_partners[b].size()
                   ? rating_partners[a].size() > rating_partners[b].size()
                   : a < b;
    });

    std::vector<ObjectId> siot_to_rating(siot.ids.size(), kInvalidObject);
    for (std::size_t i = 0; i < sampled.size(); ++i) siot_to_rating[sampled[i]] = rating_nodes[i];

    std::vector<RelationTriple> relabeled;
    for (const RelationTriple& t : siot.triples) {
        ObjectId h = siot_to_rating[t.head];
        ObjectId ta = siot_to_rating[t.tail];
        if (h == kInvalidObject || ta == kInvalidObject) continue;
        relabeled.push_back({h, t.relation, ta});
    }

    MergeResult result;
    result.interactions = ratings_to_interactions(ratings.ratings, positive_threshold);
    result.kg = RelationKG(std::move(relabeled));
    result.sampled_nodes = sampled.size();
    return result;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    DatasetManifest m;
    for (const std::string& line : read_lines(path)) {
        if (skip_line(line)) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("manifest: bad line: " + line);
        auto trim = [](std::string s) {
            const char* ws = " \t";
            s.erase(0, s.find_first_not_of(ws));
            s.erase(s.find_last_not_of(ws) + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "ratings") m.ratings = value;
        else if (key == "triples") m.triples = value;
        else if (key == "format") m.format = value;
        else throw std::runtime_error("manifest: unknown key: " + key);
    }
    if (m.format != "advogato" && m.format != "btc")
        throw std::runtime_error("manifest: format must be advogato or btc");
    if (m.ratings.empty()) throw std::runtime_error("manifest: missing ratings path");
    auto base = path.parent_path();
    if (m.ratings.is_relative()) m.ratings = base / m.ratings;
    if (!m.triples.empty() && m.triples.is_relative()) m.triples = base / m.triples;
    return m;
}

}  // namespace trustsiot
