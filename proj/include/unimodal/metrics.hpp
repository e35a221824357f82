// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0
//
// Evaluation metrics: mean absolute error and the sides order index (SOI).
//
// SOI of a distribution p with respect to a reference label nu is the fraction
// of the c-1 adjacent pairs whose order is strict in the unimodal direction:
// p_j < p_{j+1} below nu and p_{j+1} < p_j from nu upward. Ties count as
// violations. Values are stored as fractions in [0, 1].

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace unimodal {

struct MetricsReport {
    double mae = 0.0;
    double soi_predicted = 0.0;
    double soi_true = 0.0;
    /// Entry j counts samples whose pair (j+1, j+2) is out of order relative to
    /// the predicted label.
    std::vector<std::size_t> violation_histogram;
    std::size_t n_samples = 0;
};

double mae(std::span<const int> predictions, std::span<const int> truths);

/// Number of satisfied pairs, in 0..c-1.
std::size_t soi_satisfied(std::span<const double> p, int nu);
double soi(std::span<const double> p, int nu);

/// Mean per-sample SOI, each sample against its own reference label.
double soi_dataset(std::span<const std::vector<double>> distributions, std::span<const int> references);

std::vector<std::size_t> violation_histogram(std::span<const std::vector<double>> distributions,
                                             std::span<const int> references);

/// Full report for an evaluated set; SOI_pred uses `predictions` as references.
MetricsReport evaluate(std::span<const std::vector<double>> distributions,
                       std::span<const int> predictions, std::span<const int> truths);

} // namespace unimodal
