// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0

#include "unimodal/metrics.hpp"

#include "unimodal/errors.hpp"
#include "unimodal/ordinal.hpp"

#include <cstdlib>
#include <string>

namespace unimodal {

namespace {

// Pair j (0-based) compares labels j+1 and j+2.
bool pair_satisfied(std::span<const double> p, int nu, std::size_t j)
{
    const int k = static_cast<int>(j) + 1;
    if (k < nu) {
        return p[j] - p[j + 1] < 0.0;
    }
    return p[j + 1] - p[j] < 0.0;
}

void require_same_size(std::size_t a, std::size_t b, const char* what)
{
    if (a != b) {
        throw UsageError(std::string(what) + ": length mismatch " + std::to_string(a) + " vs " +
                         std::to_string(b));
    }
    if (a == 0) {
        throw UsageError(std::string(what) + ": empty evaluation set");
    }
}

} // namespace

double mae(std::span<const int> predictions, std::span<const int> truths)
{
    require_same_size(predictions.size(), truths.size(), "mae");
    double total = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        total += std::abs(predictions[i] - truths[i]);
    }
    return total / static_cast<double>(predictions.size());
}

std::size_t soi_satisfied(std::span<const double> p, int nu)
{
    const LabelSpace space(static_cast<int>(p.size()));
    space.require(nu);
    std::size_t ok = 0;
    for (std::size_t j = 0; j + 1 < p.size(); ++j) {
        ok += pair_satisfied(p, nu, j) ? 1 : 0;
    }
    return ok;
}

double soi(std::span<const double> p, int nu)
{
    return static_cast<double>(soi_satisfied(p, nu)) / static_cast<double>(p.size() - 1);
}

double soi_dataset(std::span<const std::vector<double>> distributions, std::span<const int> references)
{
    require_same_size(distributions.size(), references.size(), "soi_dataset");
    double total = 0.0;
    for (std::size_t i = 0; i < distributions.size(); ++i) {
        total += soi(distributions[i], references[i]);
    }
    return total / static_cast<double>(distributions.size());
}

std::vector<std::size_t> violation_histogram(std::span<const std::vector<double>> distributions,
                                             std::span<const int> references)
{
    require_same_size(distributions.size(), references.size(), "violation_histogram");
    const std::size_t pairs = distributions.front().size() - 1;
    std::vector<std::size_t> hist(pairs, 0);
    for (std::size_t i = 0; i < distributions.size(); ++i) {
        const auto& p = distributions[i];
        if (p.size() != pairs + 1) {
            throw UsageError("violation_histogram: inconsistent label counts");
        }
        LabelSpace(static_cast<int>(p.size())).require(references[i]);
        for (std::size_t j = 0; j < pairs; ++j) {
            if (!pair_satisfied(p, references[i], j)) {
                ++hist[j];
            }
        }
    }
    return hist;
}

MetricsReport evaluate(std::span<const std::vector<double>> distributions,
                       std::span<const int> predictions, std::span<const int> truths)
{
    MetricsReport r;
    r.mae = mae(predictions, truths);
    r.soi_predicted = soi_dataset(distributions, predictions);
    r.soi_true = soi_dataset(distributions, truths);
    r.violation_histogram = violation_histogram(distributions, predictions);
    r.n_samples = predictions.size();
    return r;
}

} // namespace unimodal
