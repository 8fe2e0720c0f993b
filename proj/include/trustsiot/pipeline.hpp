#pragma once

// End-to-end orchestration: ingest -> direct trust -> credibility -> KGE ->
// features -> train -> evaluate, with per-stage artifact files so stages can
// be re-run individually. All stage randomness derives from the single
// experiment seed through named substreams.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trustsiot/classifier.hpp"
#include "trustsiot/config.hpp"
#include "trustsiot/direct_trust.hpp"
#include "trustsiot/ingest.hpp"
#include "trustsiot/kge.hpp"

namespace trustsiot {

struct ExperimentConfig {
    std::filesystem::path manifest;
    std::filesystem::path out_dir;
    std::uint64_t seed = 42;

    DecayParams decay;           // horizon 0 means "dataset time span"
    bool dtm_smoothed = true;
    double positive_threshold = 0.5;
    LabelThresholds labels;

    CredibilityOptions credibility;
    RecommendationOptions recommendation;

    KgeTrainConfig kge;
    MlpTrainConfig mlp;
    std::vector<std::size_t> grid_hidden;  // optional CV grid over hidden size

    double train_fraction = 0.8;
    std::size_t k_folds = 5;
    std::vector<double> baseline_weights;  // empty: ANN only

    std::string config_echo;  // sorted key=value snapshot for the run manifest
};

ExperimentConfig parse_experiment(const Config& cfg);

// Reports errors with the stage that raised them.
struct StageError : std::runtime_error {
    StageError(const std::string& stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage(stage) {}
    std::string stage;
};

struct PipelineResult {
    EvalReport report;
    double train_fraction = 0.0;
    std::string dataset_name;
    std::size_t n_train = 0;
    std::size_t chosen_hidden = 0;
    bool kge_trained = false;
};

// Individual stages; each reads its inputs from out_dir (or the dataset
// manifest) and writes its artifact files back.
void stage_ingest(const ExperimentConfig& cfg);
void stage_dtm(const ExperimentConfig& cfg);
void stage_credibility(const ExperimentConfig& cfg);
void stage_kge_train(const ExperimentConfig& cfg);
void stage_features(const ExperimentConfig& cfg);
void stage_train(const ExperimentConfig& cfg);
PipelineResult stage_evaluate(const ExperimentConfig& cfg);

// All stages in order plus the run manifest; byte-identical outputs for
// identical (inputs, config, seed).
PipelineResult run_pipeline(const ExperimentConfig& cfg);

enum class SweepAxis { TrainFraction, Interactions };

struct SweepRow {
    double value = 0.0;
    bool valid = false;
    EvalReport report;  // meaningful only when valid
};

// One row per value. train_fraction re-splits and re-trains over shared
// features (the KGE stage is label-independent and reused); interactions
// buckets the test split by pair interaction-count quantile. Invalid values
// produce a warning row instead of aborting.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, SweepAxis axis,
                            const std::vector<double>& values);

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& dataset, double train_frac, const EvalReport& r);

}  // namespace trustsiot
