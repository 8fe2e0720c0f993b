#include "trustsiot/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "trustsiot/io_util.hpp"

namespace trustsiot {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    return in;
}

[[noreturn]] void corrupt(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

}  // namespace

void save_interactions(const std::filesystem::path& path,
                       std::span<const InteractionRecord> records) {
    auto out = open_out(path);
    out << "trustor\ttrustee\toutcome\ttime\n";
    for (const InteractionRecord& r : records)
        out << r.trustor << "\t" << r.trustee << "\t"
            << (r.outcome == Outcome::Positive ? 1 : 0) << "\t" << r.time << "\n";
}

std::vector<InteractionRecord> load_interactions(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split_fields(line).size() != 4)
        corrupt(path, "bad interactions header");
    std::vector<InteractionRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_fields(line);
        if (f.size() != 4) corrupt(path, "bad interactions row");
        InteractionRecord r;
        r.trustor = static_cast<ObjectId>(std::stoul(f[0]));
        r.trustee = static_cast<ObjectId>(std::stoul(f[1]));
        int outcome = std::stoi(f[2]);
        if (outcome != 0 && outcome != 1) corrupt(path, "outcome must be 0 or 1");
        r.outcome = outcome == 1 ? Outcome::Positive : Outcome::Negative;
        r.time = std::stoll(f[3]);
        records.push_back(r);
    }
    return records;
}

void save_triples(const std::filesystem::path& path, std::span<const RelationTriple> triples) {
    auto out = open_out(path);
    for (const RelationTriple& t : triples)
        out << t.head << "\t" << relation_name(t.relation) << "\t" << t.tail << "\n";
}

std::vector<RelationTriple> load_triples_artifact(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<RelationTriple> triples;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_fields(line);
        if (f.size() != 3) corrupt(path, "bad triple row");
        triples.push_back({static_cast<ObjectId>(std::stoul(f[0])), relation_from_name(f[1]),
                           static_cast<ObjectId>(std::stoul(f[2]))});
    }
    return triples;
}

void save_labels(const std::filesystem::path& path,
                 const std::map<std::pair<ObjectId, ObjectId>, TrustLabel>& labels) {
    auto out = open_out(path);
    out << "trustor\ttrustee\tlabel\n";
    for (const auto& [pair, label] : labels)
        out << pair.first << "\t" << pair.second << "\t" << static_cast<int>(label) << "\n";
}

std::map<std::pair<ObjectId, ObjectId>, TrustLabel> load_labels(
    const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split_fields(line).size() != 3)
        corrupt(path, "bad labels header");
    std::map<std::pair<ObjectId, ObjectId>, TrustLabel> labels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_fields(line);
        if (f.size() != 3) corrupt(path, "bad labels row");
        int level = std::stoi(f[2]);
        if (level < 0 || level > 2) corrupt(path, "label must be 0..2");
        labels[{static_cast<ObjectId>(std::stoul(f[0])), static_cast<ObjectId>(std::stoul(f[1]))}] =
            static_cast<TrustLabel>(level);
    }
    return labels;
}

void save_dtm(const std::filesystem::path& path, const TrustGraph& g) {
    auto out = open_out(path);
    out << "trustor\ttrustee\tdtm\n";
    for (const TrustGraph::Edge& e : g.edges())
        out << e.trustor << "\t" << e.trustee << "\t" << format_double(e.dtm) << "\n";
}

void load_dtm_into(const std::filesystem::path& path, TrustGraph& g) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split_fields(line).size() != 3)
        corrupt(path, "bad dtm header");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_fields(line);
        if (f.size() != 3) corrupt(path, "bad dtm row");
        ObjectId u = static_cast<ObjectId>(std::stoul(f[0]));
        ObjectId v = static_cast<ObjectId>(std::stoul(f[1]));
        double w = std::stod(f[2]);
        if (!g.has_edge(u, v)) corrupt(path, "dtm row for unknown edge");
        g.set_dtm(u, v, w);
        ++rows;
    }
    if (rows != g.edge_count()) corrupt(path, "dtm row count does not match edge set");
}

void save_scores(const std::filesystem::path& path, const CredibilityScores& scores) {
    auto out = open_out(path);
    out << "id,reliability,benevolence,credibility\n";
    for (std::size_t v = 0; v < scores.reliability.size(); ++v)
        out << v << "," << format_double(scores.reliability[v]) << ","
            << format_double(scores.benevolence[v]) << ","
            << format_double(scores.credibility[v]) << "\n";
    out << "# iterations=" << scores.iterations << " converged=" << (scores.converged ? 1 : 0)
        << "\n";
}

CredibilityScores load_scores(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line != "id,reliability,benevolence,credibility")
        corrupt(path, "bad scores header");
    CredibilityScores scores;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t iters = 0;
            int conv = 0;
            if (std::sscanf(line.c_str(), "# iterations=%zu converged=%d", &iters, &conv) == 2) {
                scores.iterations = iters;
                scores.converged = conv == 1;
            }
            continue;
        }
        auto f = split_fields(line);
        if (f.size() != 4) corrupt(path, "bad scores row");
        if (std::stoul(f[0]) != scores.reliability.size()) corrupt(path, "scores rows out of order");
        scores.reliability.push_back(std::stod(f[1]));
        scores.benevolence.push_back(std::stod(f[2]));
        scores.credibility.push_back(std::stod(f[3]));
    }
    return scores;
}

void save_features(const std::filesystem::path& path, std::span<const TrustSample> samples) {
    auto out = open_out(path);
    out << "trustor\ttrustee\tdtm\treliability\tbenevolence\trtm\tcdor\tlabel\n";
    for (const TrustSample& s : samples) {
        out << s.trustor << "\t" << s.trustee;
        for (double x : s.features) out << "\t" << format_double(x);
        out << "\t" << static_cast<int>(s.label) << "\n";
    }
}

std::vector<TrustSample> load_features(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split_fields(line).size() != kFeatureCount + 3)
        corrupt(path, "bad features header");
    std::vector<TrustSample> samples;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_fields(line);
        if (f.size() != kFeatureCount + 3) corrupt(path, "bad features row");
        TrustSample s;
        s.trustor = static_cast<ObjectId>(std::stoul(f[0]));
        s.trustee = static_cast<ObjectId>(std::stoul(f[1]));
        for (std::size_t i = 0; i < kFeatureCount; ++i) s.features[i] = std::stod(f[2 + i]);
        int level = std::stoi(f[2 + kFeatureCount]);
        if (level < 0 || level > 2) corrupt(path, "label must be 0..2");
        s.label = static_cast<TrustLabel>(level);
        samples.push_back(s);
    }
    return samples;
}

}  // namespace trustsiot
