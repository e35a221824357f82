// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0
//
// Datasets: synthetic ordinal generation, CSV ingestion, deterministic splits.
//
// CSV contract:
//   line 1   "# c=<int>"
//   line 2   "f1,...,fd,label"
//   rest     one sample per row, '.'-decimal reals, integer label in 1..c

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace unimodal {

struct Dataset {
    std::size_t n = 0;
    std::size_t d = 0;
    int classes = 2;
    std::vector<double> features; ///< n x d, row-major
    std::vector<int> labels;      ///< 1-based
    std::string provenance;

    std::span<const double> row(std::size_t i) const
    {
        return std::span<const double>(features).subspan(i * d, d);
    }
    /// Throws ValidationError if a label is out of range or a value is not finite.
    void validate() const;

    bool operator==(const Dataset& other) const
    {
        return n == other.n && d == other.d && classes == other.classes &&
               features == other.features && labels == other.labels;
    }
};

/// Latent z ~ U[0,1), label = 1 + floor(z c), x = A phi(z) + noise with
/// phi(z) = [z, z^2, sin 2 pi z, cos 2 pi z].
struct SyntheticSpec {
    int classes = 10;
    std::size_t d = 16;
    std::size_t n = 2000;
    double noise_sigma = 0.6;
    std::uint64_t embed_seed = 1;
    std::uint64_t sample_seed = 2;

    void validate() const;
};

inline constexpr std::size_t kLatentFeatures = 4;

/// The d x 4 embedding drawn (standard normal) from spec.embed_seed.
std::vector<double> draw_embedding(const SyntheticSpec& spec);
Dataset generate(const SyntheticSpec& spec);
/// Same as generate() with an explicit row-major d x 4 embedding.
Dataset generate(const SyntheticSpec& spec, std::span<const double> embedding);

std::string to_csv(const Dataset& ds);
void write_csv(const Dataset& ds, const std::filesystem::path& path);
Dataset parse_csv(const std::string& text, const std::string& provenance = "<memory>");
Dataset load_csv(const std::filesystem::path& path);

Dataset subset(const Dataset& ds, std::span<const std::size_t> indices);

struct SplitResult {
    std::uint64_t seed = 0;
    std::array<double, 3> fractions{};
    bool stratified = true;
    std::vector<std::string> warnings;
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

/// Disjoint train/validation/test index sets, sizes from the fractions by the
/// largest-remainder rule. Stratified by label unless some class has fewer
/// samples than there are splits, in which case a warning is recorded.
SplitResult split(const Dataset& ds, std::array<double, 3> fractions, std::uint64_t seed);

nlohmann::json manifest(const SplitResult& split);

struct FoldAssignment {
    bool stratified = true;
    std::vector<std::string> warnings;
    std::vector<std::vector<std::size_t>> folds;
};

/// Partition of 0..n-1 into k folds whose sizes differ by at most one.
FoldAssignment kfold_indices(std::span<const int> labels, std::size_t k, std::uint64_t seed);

/// Per-column standardization fitted on one set and applied to others.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Dataset& ds);
    Dataset apply(const Dataset& ds) const;
};

} // namespace unimodal
