// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: run, report, gen-data.
//
// Exit codes: 0 success, 1 config or usage error, 2 training failure, 3 I/O error.

#include "unimodal/data.hpp"
#include "unimodal/errors.hpp"
#include "unimodal/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kTraining = 2, kIo = 3 };

int cmd_run(const std::string& config_path, const std::optional<std::string>& out,
            const std::optional<std::size_t>& workers)
{
    unimodal::ExperimentConfig cfg = unimodal::load_config(config_path);
    if (out) {
        cfg.output_dir = *out;
    }
    if (workers) {
        if (*workers < 1) {
            throw unimodal::ConfigError("workers", "must be >= 1");
        }
        cfg.workers = *workers;
    }
    const unimodal::ExperimentOutcome outcome = unimodal::run_experiment(cfg);
    std::cout << unimodal::render_markdown(outcome.table);
    std::cout << "wrote " << outcome.records.size() << " run records to " << cfg.output_dir.string() << "\n";
    if (outcome.failed_runs > 0) {
        for (const auto& r : outcome.records) {
            if (!r.ok) {
                std::cerr << "run " << unimodal::record_stem(r) << " failed: " << r.failure << "\n";
            }
        }
        return kTraining;
    }
    return kOk;
}

int cmd_report(const std::string& dir, std::size_t smooth)
{
    const unimodal::ReportResult result = unimodal::report(dir, smooth);
    for (const auto& w : result.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    std::cout << unimodal::render_markdown(result.table);
    return kOk;
}

int cmd_gen_data(const unimodal::SyntheticSpec& spec, const std::string& out)
{
    spec.validate();
    unimodal::write_csv(unimodal::generate(spec), out);
    std::cout << "wrote " << spec.n << " samples to " << out << "\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Unimodal ordinal classification experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> workers;
    CLI::App* run = app.add_subcommand("run", "Train every sweep entry of a config and write a run directory");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    run->add_option("--workers", workers, "Parallel runs (overrides workers)");

    std::string report_dir;
    std::size_t smooth = 1;
    CLI::App* rep = app.add_subcommand("report", "Re-render the comparison table from stored run records");
    rep->add_option("dir", report_dir, "Run directory")->required();
    rep->add_option("--smooth", smooth, "Moving-average window for curve CSVs")->check(CLI::PositiveNumber);

    unimodal::SyntheticSpec spec;
    std::string data_out;
    CLI::App* gen = app.add_subcommand("gen-data", "Write a synthetic ordinal dataset as CSV");
    gen->add_option("--c", spec.classes, "Number of classes")->capture_default_str();
    gen->add_option("--d", spec.d, "Feature dimension")->capture_default_str();
    gen->add_option("--n", spec.n, "Number of samples")->capture_default_str();
    gen->add_option("--noise", spec.noise_sigma, "Gaussian noise sigma")->capture_default_str();
    gen->add_option("--embed-seed", spec.embed_seed, "Seed of the feature embedding")->capture_default_str();
    gen->add_option("--sample-seed", spec.sample_seed, "Seed of the samples")->capture_default_str();
    gen->add_option("--out", data_out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (run->parsed()) {
            return cmd_run(config_path, out_dir, workers);
        }
        if (rep->parsed()) {
            return cmd_report(report_dir, smooth);
        }
        return cmd_gen_data(spec, data_out);
    } catch (const unimodal::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const unimodal::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const unimodal::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const unimodal::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kIo;
    } catch (const unimodal::ValidationError& e) {
        std::cerr << "invalid data: " << e.what() << "\n";
        return kIo;
    } catch (const unimodal::TrainingError& e) {
        std::cerr << "training failure: " << e.what() << "\n";
        return kTraining;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kTraining;
    }
}
