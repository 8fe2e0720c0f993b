// Experiment CLI: runs the trust pipeline end to end or stage by stage from
// a key=value config file. See README for the file formats.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trustsiot/io_util.hpp"
#include "trustsiot/pipeline.hpp"

namespace {

using trustsiot::Config;
using trustsiot::ExperimentConfig;

struct CliOptions {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value
    std::string axis = "train_fraction";
    std::vector<double> values;
};

ExperimentConfig make_experiment(const CliOptions& opts) {
    Config cfg = opts.config_path.empty() ? Config() : Config::from_file(opts.config_path);
    for (const std::string& kv : opts.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got: " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.apply_env();
    return trustsiot::parse_experiment(cfg);
}

void print_report(const trustsiot::PipelineResult& result) {
    std::cout << "dataset=" << result.dataset_name << " train_frac=" << result.train_fraction
              << " n_train=" << result.n_train << " hidden=" << result.chosen_hidden << "\n"
              << "f1=" << trustsiot::format_double(result.report.f1_micro)
              << " mae=" << trustsiot::format_double(result.report.mae)
              << " mse=" << trustsiot::format_double(result.report.mse) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trust pipeline over SIoT interaction graphs"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global options after the subcommand name

    CliOptions opts;
    app.add_option("-c,--config", opts.config_path, "key = value config file");
    app.add_option("--set", opts.overrides, "override a config key (key=value, repeatable)");

    auto* ingest = app.add_subcommand("ingest", "load datasets, merge relations, write artifacts");
    auto* dtm = app.add_subcommand("dtm", "compute direct trust edge weights");
    auto* credibility = app.add_subcommand("credibility", "solve reliability/benevolence scores");
    auto* kge = app.add_subcommand("kge-train", "train relation embeddings");
    auto* features = app.add_subcommand("features", "assemble the five-feature samples");
    auto* train = app.add_subcommand("train", "train the trust classifier");
    auto* evaluate = app.add_subcommand("evaluate", "evaluate on the held-out split");
    auto* pipeline = app.add_subcommand("pipeline", "run every stage in order");
    auto* sweep = app.add_subcommand("sweep", "metric rows over an experiment axis");
    sweep->add_option("--axis", opts.axis, "train_fraction or interactions")
        ->check(CLI::IsMember({"train_fraction", "interactions"}));
    sweep->add_option("--values", opts.values, "axis values")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = make_experiment(opts);
        if (ingest->parsed()) {
            trustsiot::stage_ingest(cfg);
        } else if (dtm->parsed()) {
            trustsiot::stage_dtm(cfg);
        } else if (credibility->parsed()) {
            trustsiot::stage_credibility(cfg);
        } else if (kge->parsed()) {
            trustsiot::stage_kge_train(cfg);
        } else if (features->parsed()) {
            trustsiot::stage_features(cfg);
        } else if (train->parsed()) {
            trustsiot::stage_train(cfg);
        } else if (evaluate->parsed()) {
            print_report(trustsiot::stage_evaluate(cfg));
        } else if (pipeline->parsed()) {
            print_report(trustsiot::run_pipeline(cfg));
        } else if (sweep->parsed()) {
            trustsiot::SweepAxis axis = opts.axis == "interactions"
                                            ? trustsiot::SweepAxis::Interactions
                                            : trustsiot::SweepAxis::TrainFraction;
            auto rows = trustsiot::sweep(cfg, axis, opts.values);
            std::string csv = "dataset,axis,value,f1,mae,mse\n";
            std::string name = cfg.manifest.empty()
                                   ? "dataset"
                                   : trustsiot::load_manifest(cfg.manifest).ratings.stem().string();
            for (const auto& row : rows) {
                csv += name + "," + opts.axis + "," + trustsiot::format_double(row.value);
                if (row.valid) {
                    csv += "," + trustsiot::format_double(row.report.f1_micro) + "," +
                           trustsiot::format_double(row.report.mae) + "," +
                           trustsiot::format_double(row.report.mse) + "\n";
                } else {
                    csv += ",nan,nan,nan\n";
                    std::cerr << "warning: skipped axis value " << row.value << "\n";
                }
            }
            trustsiot::write_text_file(cfg.out_dir / "sweep.csv", csv);
            std::cout << csv;
        }
    } catch (const trustsiot::StageError& e) {
        std::cerr << "error in stage " << e.stage << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
