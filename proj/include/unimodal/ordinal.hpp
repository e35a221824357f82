// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0
//
// Label-space semantics shared by losses, metrics and the trainer.
// Labels are 1-based everywhere in the public interface: Y = {1, ..., c}.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace unimodal {

/// The totally ordered label set {1, ..., c}, c >= 2.
class LabelSpace {
  public:
    explicit LabelSpace(int classes);

    int classes() const { return classes_; }
    /// Number of adjacent pairs (k, k+1): always c - 1.
    int pairs() const { return classes_ - 1; }
    bool contains(int label) const { return label >= 1 && label <= classes_; }
    /// Throws UsageError when label is outside 1..c.
    void require(int label) const;

  private:
    int classes_;
};

enum class Direction { LeftToRight, RightToLeft };

/// Max-shifted softmax.
std::vector<double> softmax(std::span<const double> scores);

/// LeftToRight: out[k] = v[k] - v[k+1]. RightToLeft is its negation.
std::vector<double> adjacent_diff(std::span<const double> v, Direction direction);

/// Label with the largest probability; ties go to the smaller label.
int predict_argmax(std::span<const double> p);

/// round(sum_k k * p_k), half away from zero, clamped to [1, c].
int predict_expectation(std::span<const double> p);

} // namespace unimodal
