#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "test_util.hpp"
#include "trustsiot/artifacts.hpp"
#include "trustsiot/config.hpp"
#include "trustsiot/io_util.hpp"
#include "trustsiot/pipeline.hpp"
#include "trustsiot/rng.hpp"

using namespace trustsiot;
using trustsiot::testing::SynthDataset;
using trustsiot::testing::SynthSpec;
using trustsiot::testing::TempDir;

namespace {

SynthSpec small_spec() {
    SynthSpec spec;
    spec.objects = 60;
    spec.rating_pairs = 320;
    spec.relation_triples = 260;
    spec.extra_siot_nodes = 15;
    return spec;
}

ExperimentConfig small_experiment(const SynthDataset& data, const std::filesystem::path& out) {
    Config cfg;
    cfg.set("dataset", data.manifest.string());
    cfg.set("out", out.string());
    cfg.set("kge.epochs", "30");
    cfg.set("kge.dim", "8");
    cfg.set("kge.batch", "64");
    cfg.set("mlp.max_epochs", "200");
    cfg.set("seed", "17");
    return parse_experiment(cfg);
}

}  // namespace

TEST_CASE("config files, overrides, and env echo") {
    TempDir tmp("trustsiot_cfg");
    auto p = tmp.file("exp.cfg",
                      "# experiment\n"
                      "kge.dim = 16\n"
                      "train_fraction = 0.6\n");
    Config cfg = Config::from_file(p);
    CHECK(cfg.get_uint("kge.dim") == 16);
    CHECK(cfg.get_double("train_fraction") == 0.6);
    CHECK(cfg.get_uint("max_iter") == 200);  // untouched default

    CHECK_THROWS_WITH_AS(cfg.set("kge.dims", "8"), "unknown config key: kge.dims",
                         std::invalid_argument);

    CHECK(Config::env_name("kge.dim") == "TRUSTSIOT_KGE_DIM");
    ::setenv("TRUSTSIOT_KGE_DIM", "24", 1);
    cfg.apply_env();
    ::unsetenv("TRUSTSIOT_KGE_DIM");
    CHECK(cfg.get_uint("kge.dim") == 24);
}

TEST_CASE("experiment parsing validates ranges") {
    Config cfg;
    cfg.set("train_fraction", "1.5");
    CHECK_THROWS(parse_experiment(cfg));
    cfg.set("train_fraction", "0.8");
    cfg.set("baseline.weights", "0.5,0.5");
    CHECK_THROWS(parse_experiment(cfg));
    cfg.set("baseline.weights", "0.2,0.2,0.2,0.2,0.2");
    ExperimentConfig e = parse_experiment(cfg);
    CHECK(e.baseline_weights.size() == 5);
    CHECK(e.kge.dim == 32);
}

TEST_CASE("pipeline runs are byte-identical for the same inputs and seed") {
    TempDir tmp("trustsiot_pipe");
    SynthDataset data = write_synthetic_dataset(tmp, small_spec());

    ExperimentConfig a = small_experiment(data, tmp.path / "run_a");
    ExperimentConfig b = small_experiment(data, tmp.path / "run_b");
    PipelineResult ra = run_pipeline(a);
    PipelineResult rb = run_pipeline(b);

    CHECK(ra.report.f1_micro == rb.report.f1_micro);
    for (const char* name : {"interactions.tsv", "triples.tsv", "labels.tsv", "dtm.tsv",
                             "scores.csv", "embeddings.tsv", "relations.tsv", "features.tsv",
                             "model.tsv", "metrics.csv"}) {
        CHECK(read_text_file(tmp.path / "run_a" / name) ==
              read_text_file(tmp.path / "run_b" / name));
    }

    // run manifest echoes the configuration and hashes the inputs
    std::string manifest = read_text_file(tmp.path / "run_a" / "run_manifest.txt");
    CHECK(manifest.find("kge.epochs = 30") != std::string::npos);
    CHECK(manifest.find("seed = 17") != std::string::npos);
    CHECK(manifest.find("ratings_fnv1a64 = ") != std::string::npos);

    // metrics row carries the dataset stem and the configured fraction
    std::string metrics = read_text_file(tmp.path / "run_a" / "metrics.csv");
    CHECK(metrics.find("dataset,train_frac,f1,mae,mse") == 0);
    CHECK(metrics.find("synth_ratings,0.8,") != std::string::npos);
}

TEST_CASE("single-value sweep agrees with the straight pipeline") {
    TempDir tmp("trustsiot_sweep1");
    SynthDataset data = write_synthetic_dataset(tmp, small_spec());

    ExperimentConfig cfg = small_experiment(data, tmp.path / "run");
    PipelineResult direct = run_pipeline(cfg);
    auto rows = sweep(cfg, SweepAxis::TrainFraction, {0.8});
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].valid);
    CHECK(rows[0].report.f1_micro == direct.report.f1_micro);
    CHECK(rows[0].report.mae == direct.report.mae);
}

TEST_CASE("train-fraction sweep emits one row per value in input order") {
    TempDir tmp("trustsiot_sweep3");
    SynthDataset data = write_synthetic_dataset(tmp, small_spec());

    ExperimentConfig cfg = small_experiment(data, tmp.path / "run");
    auto rows = sweep(cfg, SweepAxis::TrainFraction, {0.8, 0.6, 1.7, 0.4});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].value == 0.8);
    CHECK(rows[1].value == 0.6);
    CHECK(rows[3].value == 0.4);
    CHECK(rows[0].valid);
    CHECK(rows[1].valid);
    CHECK_FALSE(rows[2].valid);  // out-of-range fraction becomes a warning row
    CHECK(rows[3].valid);
}

TEST_CASE("interaction sweep buckets the test split by pair activity") {
    TempDir tmp("trustsiot_sweepq");
    SynthDataset data = write_synthetic_dataset(tmp, small_spec());

    ExperimentConfig cfg = small_experiment(data, tmp.path / "run");
    auto rows = sweep(cfg, SweepAxis::Interactions, {0.5, 1.0, -0.3});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].valid);
    CHECK(rows[1].valid);
    CHECK_FALSE(rows[2].valid);
    CHECK(rows[0].report.n_test + rows[1].report.n_test > 0);
}

TEST_CASE("corrupted embeddings fail the features stage fast") {
    TempDir tmp("trustsiot_corrupt");
    SynthDataset data = write_synthetic_dataset(tmp, small_spec());

    ExperimentConfig cfg = small_experiment(data, tmp.path / "run");
    run_pipeline(cfg);

    // chop a column off the last embedding row
    auto emb = tmp.path / "run" / "embeddings.tsv";
    std::string text = read_text_file(emb);
    write_text_file(emb, text.substr(0, text.rfind('\t')) + "\n");

    try {
        stage_features(cfg);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage == "features");
    }
}

TEST_CASE("stage errors carry the failing stage name") {
    TempDir tmp("trustsiot_stageerr");
    ExperimentConfig cfg;
    cfg.out_dir = tmp.path / "nowhere";
    try {
        stage_dtm(cfg);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage == "dtm");
    }
    try {
        stage_ingest(cfg);  // no manifest configured
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage == "ingest");
    }
}

TEST_CASE("scores artifact mismatch is caught by the features stage") {
    TempDir tmp("trustsiot_scoremix");
    SynthDataset data = write_synthetic_dataset(tmp, small_spec());
    ExperimentConfig cfg = small_experiment(data, tmp.path / "run");
    run_pipeline(cfg);

    // drop the last score row: node-count mismatch must be detected
    auto scores = tmp.path / "run" / "scores.csv";
    std::string text = read_text_file(scores);
    auto cut = text.rfind("\n#");
    auto prev = text.rfind('\n', cut - 1);
    write_text_file(scores, text.substr(0, prev + 1) + text.substr(cut + 1));
    CHECK_THROWS_AS(stage_features(cfg), StageError);
}

TEST_CASE("btc-format manifests run through the same pipeline") {
    TempDir tmp("trustsiot_btc");
    Rng rng(61);
    std::string ratings;
    for (int p = 0; p < 420; ++p) {
        int a = static_cast<int>(rng.below(40));
        int b = static_cast<int>(rng.below(40));
        if (a == b) continue;
        // three behavior tiers over the native -10..10 scale
        double base = b % 3 == 0 ? -8.0 : b % 3 == 1 ? 0.0 : 8.0;
        for (std::size_t e = 0; e < 2 + rng.below(3); ++e)
            ratings += std::to_string(a) + "," + std::to_string(b) + "," +
                       format_double(base + rng.real(-2.0, 2.0)) + "," +
                       std::to_string(rng.below(1000)) + "\n";
    }
    tmp.file("btc.csv", ratings);
    std::string triples;
    const char* rels[5] = {"CLOR", "POR", "OOR", "SOR", "SOR2"};
    for (int t = 0; t < 150; ++t) {
        int h = static_cast<int>(rng.below(52));
        int ta = static_cast<int>(rng.below(52));
        if (h == ta) continue;
        triples += "n" + std::to_string(h) + "\t" + rels[rng.below(5)] + "\tn" +
                   std::to_string(ta) + "\n";
    }
    tmp.file("btc_triples.tsv", triples);
    auto manifest = tmp.file("btc.manifest",
                             "ratings = btc.csv\ntriples = btc_triples.tsv\nformat = btc\n");

    Config cfg;
    cfg.set("dataset", manifest.string());
    cfg.set("out", (tmp.path / "run").string());
    cfg.set("kge.epochs", "15");
    cfg.set("kge.dim", "8");
    cfg.set("mlp.max_epochs", "150");
    PipelineResult result = run_pipeline(parse_experiment(cfg));
    CHECK(result.report.n_test > 0);
    CHECK(result.dataset_name == "btc");
    // tiered behavior is learnable well above chance
    CHECK(result.report.f1_micro > 0.5);
}

TEST_CASE("manifest without triples skips embeddings and zeroes C-DoR") {
    TempDir tmp("trustsiot_notriples");
    SynthDataset data = write_synthetic_dataset(tmp, small_spec());
    auto manifest = tmp.file("nt.manifest",
                             "ratings = synth_ratings.tsv\nformat = advogato\n");
    Config cfg;
    cfg.set("dataset", manifest.string());
    cfg.set("out", (tmp.path / "run").string());
    cfg.set("kge.epochs", "15");
    cfg.set("mlp.max_epochs", "150");
    PipelineResult result = run_pipeline(parse_experiment(cfg));
    CHECK(result.report.n_test > 0);

    for (const TrustSample& s : load_features(tmp.path / "run" / "features.tsv"))
        CHECK(s.features[4] == 0.0);
}

TEST_CASE("hidden-size grid search picks a grid member by cross-validation") {
    TempDir tmp("trustsiot_grid");
    SynthDataset data = write_synthetic_dataset(tmp, small_spec());
    Config cfg;
    cfg.set("dataset", data.manifest.string());
    cfg.set("out", (tmp.path / "run").string());
    cfg.set("kge.epochs", "10");
    cfg.set("kge.dim", "8");
    cfg.set("mlp.max_epochs", "120");
    cfg.set("grid.hidden", "4,8");
    PipelineResult result = run_pipeline(parse_experiment(cfg));
    CHECK((result.chosen_hidden == 4 || result.chosen_hidden == 8));
}

TEST_CASE("baseline weighted scoring writes its own metrics file") {
    TempDir tmp("trustsiot_baseline");
    SynthDataset data = write_synthetic_dataset(tmp, small_spec());
    Config cfg;
    cfg.set("dataset", data.manifest.string());
    cfg.set("out", (tmp.path / "run").string());
    cfg.set("kge.epochs", "10");
    cfg.set("kge.dim", "8");
    cfg.set("mlp.max_epochs", "100");
    cfg.set("baseline.weights", "0.35,0.15,0.2,0.2,0.1");
    ExperimentConfig exp = parse_experiment(cfg);
    run_pipeline(exp);
    std::string baseline = read_text_file(tmp.path / "run" / "baseline_metrics.csv");
    CHECK(baseline.find("dataset,train_frac,f1,mae,mse") == 0);
}
