// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0
//
// Config-driven experiment runner and reporting.
//
// A run directory holds:
//   config.json                 resolved configuration
//   manifests/split_seed<S>.json
//   records/<I>_<NAME>_seed<S>.json   one RunRecord per (sweep entry, seed)
//   curves/<I>_<NAME>_seed<S>.csv     epoch,train_loss,val_mae,val_soi
//   table.md, table.csv         comparison table over test metrics

#pragma once

#include "unimodal/data.hpp"
#include "unimodal/trainer.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace unimodal {

inline constexpr int kConfigVersion = 1;

struct DatasetBlock {
    std::optional<SyntheticSpec> synthetic;
    std::optional<std::filesystem::path> csv;
    std::array<double, 3> fractions = {0.6, 0.2, 0.2};
    std::uint64_t split_seed = 0;
};

struct SweepEntry {
    std::string name;
    LossSettings loss;
};

struct ExperimentConfig {
    DatasetBlock dataset;
    std::vector<SweepEntry> sweep;
    TrainConfig trainer;
    /// Replicates. Seed s trains with TrainConfig::seed = s and splits with split_seed + s.
    std::vector<std::uint64_t> seeds = {0};
    std::size_t workers = 1;
    std::filesystem::path output_dir = "runs";
};

/// Validates against the schema. Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct ComparisonRow {
    std::string name;
    std::size_t runs = 0;
    std::size_t failed = 0;
    Aggregate mae;
    Aggregate soi_predicted; ///< fraction
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
};

/// One row per sweep entry (ordered by sweep index) over successful runs.
ComparisonTable build_table(const std::vector<RunRecord>& records);
std::string render_markdown(const ComparisonTable& table);
std::string render_csv(const ComparisonTable& table);

/// Trailing moving average; window 1 returns the input.
std::vector<double> moving_average(const std::vector<double>& values, std::size_t window);
std::string render_curve_csv(const RunRecord& record, std::size_t smooth = 1);

std::string record_stem(const RunRecord& record);

struct ExperimentOutcome {
    std::vector<RunRecord> records;
    ComparisonTable table;
    std::size_t failed_runs = 0;
};

/// Builds the dataset, trains every (sweep entry, seed) pair and writes the run
/// directory. Failed runs are kept in the outputs and counted in failed_runs.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

/// Builds the train/validation/test splits for one replicate seed.
Splits prepare_splits(const ExperimentConfig& cfg, std::uint64_t seed, SplitResult* manifest_out = nullptr);

struct ReportResult {
    ComparisonTable table;
    std::vector<RunRecord> records;
    std::vector<std::string> warnings;
};

/// Re-reads records from a run directory. Corrupt or version-mismatched files
/// are skipped with a warning. With smooth > 1, smoothed curve CSVs are
/// written next to the raw ones.
ReportResult report(const std::filesystem::path& dir, std::size_t smooth = 1);

} // namespace unimodal
