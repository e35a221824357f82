// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic mini-batch SGD with momentum and coupled L2 weight decay.

#pragma once

#include "unimodal/data.hpp"
#include "unimodal/losses.hpp"
#include "unimodal/metrics.hpp"
#include "unimodal/model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace unimodal {

inline constexpr int kRunRecordVersion = 1;

struct TrainConfig {
    LossSettings loss;
    std::size_t epochs = 300;
    std::size_t batch_size = 8;
    double lr = 1e-3;
    std::size_t lr_decay_every = 100;
    double lr_decay_factor = 0.1;
    double lr_min = 1e-7;
    double momentum = 0.9;
    double weight_decay = 1e-5;
    std::vector<std::size_t> hidden_dims = {64, 64};
    std::uint64_t seed = 0;

    void validate() const;
};

/// max(lr * factor^floor(epoch / every), lr_min), epoch 0-based.
double learning_rate(const TrainConfig& cfg, std::size_t epoch);

/// Seeds derived from TrainConfig::seed for the independent RNG streams.
std::uint64_t init_seed(std::uint64_t seed);
std::uint64_t shuffle_seed(std::uint64_t seed);

struct SgdParams {
    double lr = 1e-3;
    double momentum = 0.9;
    double weight_decay = 1e-5;
};

/// velocity <- momentum * velocity + (grad + weight_decay * param)
/// param    <- param - lr * velocity
/// Throws TrainingError naming the parameter and batch on a non-finite gradient.
void sgd_step(std::span<double> params, std::span<const double> grad, std::span<double> velocity,
              const SgdParams& sgd, std::size_t batch_index = 0);

struct Splits {
    Dataset train;
    Dataset validation;
    Dataset test;
};

struct RunRecord {
    int version = kRunRecordVersion;
    std::string name;
    std::size_t sweep_index = 0;
    std::uint64_t seed = 0;
    nlohmann::json config;

    std::vector<double> train_loss;
    std::vector<double> learning_rate;
    std::vector<double> temperature;
    std::vector<MetricsReport> validation;

    /// 0 means the initial parameters (only when no epoch completed).
    std::size_t best_epoch = 0;
    std::size_t best_epoch_mae = 0;
    /// Test metrics at the best validation SOI_pred checkpoint (MAE breaks ties).
    MetricsReport test;
    /// Test metrics at the best validation MAE checkpoint (SOI_pred breaks ties).
    MetricsReport test_mae_selected;

    double wall_time_seconds = 0.0;
    bool ok = true;
    std::string failure;
};

/// Metrics of a parameter set on a dataset under a loss's prediction rule.
MetricsReport evaluate_model(const ParameterSet& params, const Dataset& ds, const LossSettings& loss);

/// Spec for the model a loss needs: Poisson head for PO, logits otherwise.
MLPSpec model_spec_for(const TrainConfig& cfg, std::size_t input_dim, int classes);

/// Trains on standardized features (statistics from the train split). Never
/// throws on divergence: the record is returned with ok = false.
RunRecord train(const Splits& splits, const TrainConfig& cfg, ParameterSet* best = nullptr);

struct Aggregate {
    double mean = 0.0;
    double stdev = 0.0; ///< sample standard deviation; 0 for a single value
    std::size_t count = 0;
};

Aggregate aggregate(std::span<const double> values);

struct KFoldResult {
    FoldAssignment folds;
    std::vector<RunRecord> runs;
    std::vector<std::size_t> failed_folds;
    Aggregate mae;
    Aggregate soi_predicted;
};

/// Fold i validates, the remaining folds train; every run is scored on `test`.
KFoldResult kfold(const Dataset& pool, const Dataset& test, std::size_t k, std::uint64_t seed,
                  const TrainConfig& cfg);

nlohmann::json to_json(const MetricsReport& m);
MetricsReport metrics_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& cfg);
nlohmann::json to_json(const RunRecord& r);
/// Throws ParseError on a malformed record or an unknown schema version.
RunRecord run_record_from_json(const nlohmann::json& j);

} // namespace unimodal
