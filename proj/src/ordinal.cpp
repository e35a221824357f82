// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0

#include "unimodal/ordinal.hpp"

#include "unimodal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace unimodal {

LabelSpace::LabelSpace(int classes) : classes_(classes)
{
    if (classes < 2) {
        throw UsageError("label space needs at least 2 labels, got " + std::to_string(classes));
    }
}

void LabelSpace::require(int label) const
{
    if (!contains(label)) {
        throw UsageError("label " + std::to_string(label) + " outside 1.." +
                         std::to_string(classes_));
    }
}

std::vector<double> softmax(std::span<const double> scores)
{
    if (scores.empty()) {
        return {};
    }
    const double m = *std::max_element(scores.begin(), scores.end());
    std::vector<double> p(scores.size());
    double z = 0.0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        p[k] = std::exp(scores[k] - m);
        z += p[k];
    }
    for (double& v : p) {
        v /= z;
    }
    return p;
}

std::vector<double> adjacent_diff(std::span<const double> v, Direction direction)
{
    if (v.size() < 2) {
        throw UsageError("adjacent_diff: need at least 2 entries, got " + std::to_string(v.size()));
    }
    const double sign = direction == Direction::LeftToRight ? 1.0 : -1.0;
    std::vector<double> out(v.size() - 1);
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        out[k] = sign * (v[k] - v[k + 1]);
    }
    return out;
}

int predict_argmax(std::span<const double> p)
{
    if (p.empty()) {
        throw UsageError("predict_argmax: empty distribution");
    }
    // max_element returns the first maximum, which is the smaller label.
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()) + 1;
}

int predict_expectation(std::span<const double> p)
{
    if (p.empty()) {
        throw UsageError("predict_expectation: empty distribution");
    }
    double m = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        m += static_cast<double>(k + 1) * p[k];
    }
    const auto label = static_cast<long>(std::lround(m));
    return static_cast<int>(std::clamp<long>(label, 1, static_cast<long>(p.size())));
}

} // namespace unimodal
