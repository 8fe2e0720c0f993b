#include "trustsiot/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "trustsiot/artifacts.hpp"
#include "trustsiot/io_util.hpp"
#include "trustsiot/rng.hpp"

namespace trustsiot {

ExperimentConfig parse_experiment(const Config& cfg) {
    ExperimentConfig e;
    e.manifest = cfg.get("dataset");
    e.out_dir = cfg.get("out");
    e.seed = cfg.get_uint("seed");

    e.decay.lambda = cfg.get_double("lambda");
    e.decay.t0 = cfg.get_int("t0");
    e.decay.horizon = cfg.get_double("horizon");
    e.dtm_smoothed = cfg.get_bool("dtm.smoothed");
    e.positive_threshold = cfg.get_double("positive_threshold");
    e.labels.low = cfg.get_double("labels.low");
    e.labels.high = cfg.get_double("labels.high");

    e.credibility.epsilon = cfg.get_double("epsilon");
    e.credibility.max_iter = cfg.get_uint("max_iter");

    e.recommendation.th = cfg.get_double("th");
    if (cfg.get_uint("max_k") > 0) e.recommendation.max_k = cfg.get_uint("max_k");

    e.kge.dim = cfg.get_uint("kge.dim");
    e.kge.epochs = cfg.get_uint("kge.epochs");
    e.kge.learning_rate = cfg.get_double("kge.lr");
    e.kge.neg_samples = cfg.get_uint("kge.neg");
    e.kge.batch_size = cfg.get_uint("kge.batch");
    e.kge.seed = e.seed;

    e.mlp.hidden_size = cfg.get_uint("mlp.hidden");
    e.mlp.l2 = cfg.get_double("mlp.l2");
    e.mlp.max_epochs = cfg.get_uint("mlp.max_epochs");
    e.mlp.cost_threshold = cfg.get_double("mlp.cost_threshold");
    e.mlp.learning_rate = cfg.get_double("mlp.lr");
    e.mlp.seed = e.seed;

    if (cfg.is_set("grid.hidden"))
        for (double h : parse_double_list(cfg.get("grid.hidden")))
            e.grid_hidden.push_back(static_cast<std::size_t>(h));

    e.train_fraction = cfg.get_double("train_fraction");
    if (e.train_fraction <= 0.0 || e.train_fraction >= 1.0)
        throw std::invalid_argument("train_fraction must lie in (0,1)");
    e.k_folds = cfg.get_uint("k_folds");

    if (cfg.is_set("baseline.weights")) {
        e.baseline_weights = parse_double_list(cfg.get("baseline.weights"));
        if (e.baseline_weights.size() != kFeatureCount)
            throw std::invalid_argument("baseline.weights needs exactly 5 entries");
    }
    e.config_echo = cfg.echo();
    return e;
}

namespace {

namespace fs = std::filesystem;

fs::path art(const ExperimentConfig& cfg, const char* name) { return cfg.out_dir / name; }

std::string dataset_name(const ExperimentConfig& cfg) {
    if (cfg.manifest.empty()) return "dataset";
    return load_manifest(cfg.manifest).ratings.stem().string();
}

GraphBundle rebuild_graph(const ExperimentConfig& cfg) {
    auto interactions = load_interactions(art(cfg, "interactions.tsv"));
    auto triples = load_triples_artifact(art(cfg, "triples.tsv"));
    return build_graph(interactions, triples);
}

std::pair<Timestamp, double> time_window(std::span<const InteractionRecord> records,
                                         const ExperimentConfig& cfg) {
    Timestamp now = 0, earliest = 0;
    if (!records.empty()) {
        now = records[0].time;
        earliest = records[0].time;
        for (const InteractionRecord& r : records) {
            now = std::max(now, r.time);
            earliest = std::min(earliest, r.time);
        }
    }
    double horizon = cfg.decay.horizon > 0.0
                         ? cfg.decay.horizon
                         : std::max<double>(1.0, static_cast<double>(now - earliest));
    return {now, horizon};
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(
    std::size_t n, double fraction, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng = substream(seed, "split.train_test");
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    std::size_t n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

std::vector<TrustSample> gather(const std::vector<TrustSample>& samples,
                                const std::vector<std::size_t>& idx) {
    std::vector<TrustSample> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(samples[i]);
    return out;
}

// Mean validation micro-F1 over k folds for one hidden size.
double cv_score(const std::vector<TrustSample>& train, std::size_t hidden,
                const ExperimentConfig& cfg) {
    auto folds = kfold_split(train.size(), cfg.k_folds, cfg.seed);
    double sum = 0.0;
    for (const auto& [tr_idx, va_idx] : folds) {
        MlpTrainConfig mc = cfg.mlp;
        mc.hidden_size = hidden;
        MlpModel model = train_mlp(gather(train, tr_idx), mc).model;
        sum += evaluate(model, gather(train, va_idx)).f1_micro;
    }
    return sum / static_cast<double>(folds.size());
}

MlpModel fit_classifier(const std::vector<TrustSample>& train, const ExperimentConfig& cfg) {
    MlpTrainConfig mc = cfg.mlp;
    if (!cfg.grid_hidden.empty() && train.size() >= cfg.k_folds) {
        double best = -1.0;
        std::size_t best_h = cfg.grid_hidden.front();
        for (std::size_t h : cfg.grid_hidden) {
            double score = cv_score(train, h, cfg);
            if (score > best) {
                best = score;
                best_h = h;
            }
        }
        mc.hidden_size = best_h;
    }
    return train_mlp(train, mc).model;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

}  // namespace

void stage_ingest(const ExperimentConfig& cfg) {
    stage("ingest", [&] {
        if (cfg.manifest.empty()) throw std::runtime_error("no dataset manifest configured");
        DatasetManifest manifest = load_manifest(cfg.manifest);
        RatingData ratings = manifest.format == "advogato" ? load_advogato(manifest.ratings)
                                                           : load_btc_alpha(manifest.ratings);

        std::vector<InteractionRecord> interactions;
        std::vector<RelationTriple> triples;
        if (!manifest.triples.empty()) {
            SiotData siot = load_triples(manifest.triples);
            MergeResult merged =
                merge_siot_relations(ratings, siot, cfg.seed, cfg.positive_threshold);
            interactions = std::move(merged.interactions);
            triples.assign(merged.kg.triples().begin(), merged.kg.triples().end());
        } else {
            interactions = ratings_to_interactions(ratings.ratings, cfg.positive_threshold);
        }

        fs::create_directories(cfg.out_dir);
        save_interactions(art(cfg, "interactions.tsv"), interactions);
        save_triples(art(cfg, "triples.tsv"), triples);
        save_labels(art(cfg, "labels.tsv"), label_pairs(ratings.ratings, cfg.labels));
    });
}

void stage_dtm(const ExperimentConfig& cfg) {
    stage("dtm", [&] {
        GraphBundle bundle = rebuild_graph(cfg);
        auto [now, horizon] = time_window(bundle.log.records(), cfg);
        DecayParams decay = cfg.decay;
        decay.horizon = horizon;
        compute_all_dtm(bundle.graph, bundle.log, decay, now, DtmOptions{cfg.dtm_smoothed});
        save_dtm(art(cfg, "dtm.tsv"), bundle.graph);
    });
}

void stage_credibility(const ExperimentConfig& cfg) {
    stage("credibility", [&] {
        GraphBundle bundle = rebuild_graph(cfg);
        load_dtm_into(art(cfg, "dtm.tsv"), bundle.graph);
        CredibilityScores scores = solve_credibility(bundle.graph, cfg.credibility);
        save_scores(art(cfg, "scores.csv"), scores);
    });
}

void stage_kge_train(const ExperimentConfig& cfg) {
    stage("kge-train", [&] {
        RelationKG kg(load_triples_artifact(art(cfg, "triples.tsv")));
        std::ofstream entity_os(art(cfg, "embeddings.tsv"), std::ios::binary | std::ios::trunc);
        std::ofstream relation_os(art(cfg, "relations.tsv"), std::ios::binary | std::ios::trunc);
        if (!entity_os || !relation_os) throw std::runtime_error("cannot write embedding files");
        if (kg.triple_count() == 0) {
            // No relation data: emit empty tables; C-DoR falls back to 0.
            EmbeddingTable empty;
            empty.dim = cfg.kge.dim;
            save_embeddings(empty, entity_os, relation_os);
            return;
        }
        KgeTrainResult result = train_kge(kg, cfg.kge);
        save_embeddings(result.table, entity_os, relation_os);

        std::ostringstream trace;
        trace << "epoch\tloss\n";
        for (std::size_t i = 0; i < result.epoch_loss.size(); ++i)
            trace << i << "\t" << format_double(result.epoch_loss[i]) << "\n";
        write_text_file(art(cfg, "kge_loss.tsv"), trace.str());
    });
}

void stage_features(const ExperimentConfig& cfg) {
    stage("features", [&] {
        GraphBundle bundle = rebuild_graph(cfg);
        load_dtm_into(art(cfg, "dtm.tsv"), bundle.graph);
        CredibilityScores scores = load_scores(art(cfg, "scores.csv"));
        if (scores.reliability.size() != bundle.graph.node_count())
            throw std::runtime_error("scores.csv does not match the graph node set");
        std::ifstream entity_is(art(cfg, "embeddings.tsv"));
        std::ifstream relation_is(art(cfg, "relations.tsv"));
        if (!entity_is || !relation_is) throw std::runtime_error("missing embedding files");
        EmbeddingTable table = load_embeddings(entity_is, relation_is);
        auto labels = load_labels(art(cfg, "labels.tsv"));
        auto samples = build_features(bundle.graph, scores, table, labels, cfg.recommendation);
        save_features(art(cfg, "features.tsv"), samples);
    });
}

void stage_train(const ExperimentConfig& cfg) {
    stage("train", [&] {
        auto samples = load_features(art(cfg, "features.tsv"));
        auto [train_idx, test_idx] = train_test_split(samples.size(), cfg.train_fraction, cfg.seed);
        MlpModel model = fit_classifier(gather(samples, train_idx), cfg);
        std::ofstream os(art(cfg, "model.tsv"), std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write model.tsv");
        save_model(model, os);
    });
}

PipelineResult stage_evaluate(const ExperimentConfig& cfg) {
    return stage("evaluate", [&] {
        auto samples = load_features(art(cfg, "features.tsv"));
        std::ifstream is(art(cfg, "model.tsv"));
        if (!is) throw std::runtime_error("missing model.tsv");
        MlpModel model = load_model(is);
        auto [train_idx, test_idx] = train_test_split(samples.size(), cfg.train_fraction, cfg.seed);
        auto test = gather(samples, test_idx);

        PipelineResult result;
        result.report = evaluate(model, test);
        result.train_fraction = cfg.train_fraction;
        result.dataset_name = dataset_name(cfg);
        result.n_train = train_idx.size();
        result.chosen_hidden = model.hidden_size;

        std::string csv = metrics_csv_header() +
                          metrics_csv_row(result.dataset_name, cfg.train_fraction, result.report);
        write_text_file(art(cfg, "metrics.csv"), csv);

        if (!cfg.baseline_weights.empty()) {
            EvalReport base = evaluate_weighted(test, cfg.baseline_weights);
            write_text_file(art(cfg, "baseline_metrics.csv"),
                            metrics_csv_header() +
                                metrics_csv_row(result.dataset_name, cfg.train_fraction, base));
        }
        return result;
    });
}

PipelineResult run_pipeline(const ExperimentConfig& cfg) {
    stage_ingest(cfg);
    stage_dtm(cfg);
    stage_credibility(cfg);
    stage_kge_train(cfg);
    stage_features(cfg);
    stage_train(cfg);
    PipelineResult result = stage_evaluate(cfg);
    result.kge_trained = true;

    std::ostringstream manifest;
    manifest << "# configuration\n" << cfg.config_echo;
    manifest << "# inputs\n";
    DatasetManifest dm = load_manifest(cfg.manifest);
    manifest << "ratings_fnv1a64 = " << std::hex << hash_file(dm.ratings) << std::dec << "\n";
    if (!dm.triples.empty())
        manifest << "triples_fnv1a64 = " << std::hex << hash_file(dm.triples) << std::dec << "\n";
    write_text_file(art(cfg, "run_manifest.txt"), manifest.str());
    return result;
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, SweepAxis axis,
                            const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("sweep: no values");

    // Shared upstream stages; the KGE table does not depend on the label
    // split, so one pass serves every row.
    stage_ingest(cfg);
    stage_dtm(cfg);
    stage_credibility(cfg);
    stage_kge_train(cfg);
    stage_features(cfg);

    std::vector<SweepRow> rows;
    if (axis == SweepAxis::TrainFraction) {
        for (double v : values) {
            SweepRow row;
            row.value = v;
            if (v <= 0.0 || v >= 1.0) {
                rows.push_back(row);
                continue;
            }
            ExperimentConfig sub = cfg;
            sub.train_fraction = v;
            stage_train(sub);
            row.report = stage_evaluate(sub).report;
            row.valid = true;
            rows.push_back(row);
        }
        return rows;
    }

    // Interactions axis: train once at the configured fraction, then slice
    // the test split into interaction-count quantile buckets.
    stage_train(cfg);
    auto samples = load_features(art(cfg, "features.tsv"));
    std::ifstream is(art(cfg, "model.tsv"));
    MlpModel model = load_model(is);
    auto [train_idx, test_idx] = train_test_split(samples.size(), cfg.train_fraction, cfg.seed);
    auto test = gather(samples, test_idx);

    GraphBundle bundle = rebuild_graph(cfg);
    std::vector<std::size_t> counts;
    counts.reserve(test.size());
    for (const TrustSample& s : test)
        counts.push_back(bundle.log.pair_records(s.trustor, s.trustee).size());
    std::vector<std::size_t> sorted_counts = counts;
    std::sort(sorted_counts.begin(), sorted_counts.end());

    auto quantile_count = [&](double q) {
        std::size_t rank = static_cast<std::size_t>(
            std::ceil(q * static_cast<double>(sorted_counts.size())));
        rank = std::clamp<std::size_t>(rank, 1, sorted_counts.size());
        return sorted_counts[rank - 1];
    };

    std::vector<double> valid_sorted;
    for (double v : values)
        if (v > 0.0 && v <= 1.0) valid_sorted.push_back(v);
    std::sort(valid_sorted.begin(), valid_sorted.end());

    for (double v : values) {
        SweepRow row;
        row.value = v;
        if (v <= 0.0 || v > 1.0 || test.empty()) {
            rows.push_back(row);
            continue;
        }
        auto pos = std::lower_bound(valid_sorted.begin(), valid_sorted.end(), v);
        std::size_t lo = pos == valid_sorted.begin() ? 0 : quantile_count(*(pos - 1));
        std::size_t hi = quantile_count(v);
        std::vector<TrustSample> bucket;
        for (std::size_t i = 0; i < test.size(); ++i) {
            bool above_lo = pos == valid_sorted.begin() ? counts[i] >= lo : counts[i] > lo;
            if (above_lo && counts[i] <= hi) bucket.push_back(test[i]);
        }
        if (bucket.empty()) {
            rows.push_back(row);
            continue;
        }
        row.report = evaluate(model, bucket);
        row.valid = true;
        rows.push_back(row);
    }
    return rows;
}

std::string metrics_csv_header() { return "dataset,train_frac,f1,mae,mse\n"; }

std::string metrics_csv_row(const std::string& dataset, double train_frac, const EvalReport& r) {
    std::ostringstream ss;
    ss << dataset << "," << format_double(train_frac) << "," << format_double(r.f1_micro) << ","
       << format_double(r.mae) << "," << format_double(r.mse) << "\n";
    return ss.str();
}

}  // namespace trustsiot
