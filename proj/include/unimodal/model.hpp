// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "unimodal/diff.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace unimodal {

enum class HeadKind {
    Logits,      ///< c unbounded scores
    PoissonRate, ///< softplus of one affine output
};

/// Affine/rectifier stack. Dimensions are input -> hidden... -> head.
struct MLPSpec {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden_dims;
    HeadKind head = HeadKind::Logits;
    int classes = 2;
    std::uint64_t seed = 0;

    std::size_t output_dim() const { return head == HeadKind::Logits ? static_cast<std::size_t>(classes) : 1; }
    void validate() const;
};

struct LayerShape {
    std::size_t rows = 0; ///< fan-out
    std::size_t cols = 0; ///< fan-in
    std::size_t weight_offset = 0;
    std::size_t bias_offset = 0;
};

/// All weights and biases in one flat buffer: per layer, the row-major weight
/// matrix followed by the bias vector.
class ParameterSet {
  public:
    explicit ParameterSet(MLPSpec spec);

    const MLPSpec& spec() const { return spec_; }
    const std::vector<LayerShape>& layers() const { return layers_; }
    std::size_t size() const { return values_.size(); }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::span<const double> weights(std::size_t layer) const;
    std::span<const double> bias(std::size_t layer) const;

    bool operator==(const ParameterSet& other) const { return values_ == other.values_; }

  private:
    MLPSpec spec_;
    std::vector<LayerShape> layers_;
    std::vector<double> values_;
};

/// sqrt(6 / (fan_in + fan_out)).
double glorot_bound(std::size_t fan_in, std::size_t fan_out);

/// Weights ~ U(-b, b) with b = glorot_bound per layer; zero biases. Seeded by spec.seed.
ParameterSet init(const MLPSpec& spec);

/// Parameters placed on a tape: one flat leaf, sliced per layer.
struct BoundParameters {
    const MLPSpec* spec = nullptr;
    Var flat;
    std::vector<Var> weights;
    std::vector<Var> biases;
};

BoundParameters bind(const MLPSpec& spec, const Var& flat);

/// Differentiable forward pass. Throws UsageError on a feature-dimension mismatch.
Var forward(const BoundParameters& params, std::span<const double> x);

/// Plain evaluation with the same arithmetic as the differentiable path.
std::vector<double> forward(const ParameterSet& params, std::span<const double> x);

/// Text checkpoint, version-tagged; values written with round-trip precision.
void save_checkpoint(const ParameterSet& params, const std::filesystem::path& path);
std::string checkpoint_to_string(const ParameterSet& params);
ParameterSet load_checkpoint(const std::filesystem::path& path);
ParameterSet checkpoint_from_string(const std::string& text);

} // namespace unimodal
