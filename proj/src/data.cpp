// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0

#include "unimodal/data.hpp"

#include "unimodal/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace unimodal {

void Dataset::validate() const
{
    if (classes < 2) {
        throw ValidationError("dataset needs at least 2 classes");
    }
    if (n == 0) {
        throw ValidationError("empty dataset");
    }
    if (features.size() != n * d || labels.size() != n) {
        throw ValidationError("dataset buffers do not match n x d");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] < 1 || labels[i] > classes) {
            throw ValidationError("row " + std::to_string(i) + ": label " + std::to_string(labels[i]) +
                                  " outside 1.." + std::to_string(classes));
        }
    }
    for (double v : features) {
        if (!std::isfinite(v)) {
            throw ValidationError("dataset contains a non-finite feature");
        }
    }
}

void SyntheticSpec::validate() const
{
    if (classes < 2) {
        throw UsageError("synthetic c must be >= 2");
    }
    if (d < 1) {
        throw UsageError("synthetic d must be >= 1");
    }
    if (n < 1) {
        throw UsageError("synthetic n must be >= 1");
    }
    if (!(noise_sigma >= 0.0)) {
        throw UsageError("synthetic noise sigma must be >= 0");
    }
}

std::vector<double> draw_embedding(const SyntheticSpec& spec)
{
    spec.validate();
    std::mt19937_64 rng(spec.embed_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> a(spec.d * kLatentFeatures);
    for (double& v : a) {
        v = normal(rng);
    }
    return a;
}

Dataset generate(const SyntheticSpec& spec)
{
    const std::vector<double> a = draw_embedding(spec);
    return generate(spec, a);
}

Dataset generate(const SyntheticSpec& spec, std::span<const double> embedding)
{
    spec.validate();
    if (embedding.size() != spec.d * kLatentFeatures) {
        throw UsageError("embedding must be d x 4");
    }
    Dataset ds;
    ds.n = spec.n;
    ds.d = spec.d;
    ds.classes = spec.classes;
    ds.features.resize(spec.n * spec.d);
    ds.labels.resize(spec.n);
    std::ostringstream prov;
    prov << "synthetic:c=" << spec.classes << ",d=" << spec.d << ",n=" << spec.n
         << ",noise=" << spec.noise_sigma << ",embed_seed=" << spec.embed_seed
         << ",sample_seed=" << spec.sample_seed;
    ds.provenance = prov.str();

    std::mt19937_64 rng(spec.sample_seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
    const double c = static_cast<double>(spec.classes);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double z = uniform(rng);
        const int bin = static_cast<int>(std::floor(z * c));
        ds.labels[i] = 1 + std::min(bin, spec.classes - 1);
        const double angle = 2.0 * std::numbers::pi * z;
        const std::array<double, kLatentFeatures> phi = {z, z * z, std::sin(angle), std::cos(angle)};
        for (std::size_t j = 0; j < spec.d; ++j) {
            double x = 0.0;
            for (std::size_t k = 0; k < kLatentFeatures; ++k) {
                x += embedding[j * kLatentFeatures + k] * phi[k];
            }
            if (spec.noise_sigma > 0.0) {
                x += noise(rng);
            }
            ds.features[i * spec.d + j] = x;
        }
    }
    return ds;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

void append_double(std::string& out, double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return cells;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty();
}

} // namespace

std::string to_csv(const Dataset& ds)
{
    std::string out = "# c=" + std::to_string(ds.classes) + "\n";
    for (std::size_t j = 0; j < ds.d; ++j) {
        out += "f" + std::to_string(j + 1) + ",";
    }
    out += "label\n";
    for (std::size_t i = 0; i < ds.n; ++i) {
        for (double v : ds.row(i)) {
            append_double(out, v);
            out += ',';
        }
        out += std::to_string(ds.labels[i]);
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << to_csv(ds);
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

Dataset parse_csv(const std::string& text, const std::string& provenance)
{
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) {
            return false;
        }
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        return true;
    };

    Dataset ds;
    ds.provenance = provenance;
    if (!next_line()) {
        throw ParseError("missing '# c=<int>' line", 1);
    }
    {
        std::string_view v = trim(line);
        if (v.substr(0, 4) != "# c=" || !parse_number(v.substr(4), ds.classes)) {
            throw ParseError("expected '# c=<int>'", line_no);
        }
        if (ds.classes < 2) {
            throw ValidationError("line 1: c must be >= 2");
        }
    }
    if (!next_line()) {
        throw ParseError("missing header line", 2);
    }
    {
        const auto cells = split_commas(line);
        if (cells.size() < 2 || trim(cells.back()) != "label") {
            throw ParseError("header must be f1,...,fd,label", line_no);
        }
        ds.d = cells.size() - 1;
        for (std::size_t j = 0; j < ds.d; ++j) {
            if (trim(cells[j]) != "f" + std::to_string(j + 1)) {
                throw ParseError("header column " + std::to_string(j + 1) + " must be f" +
                                     std::to_string(j + 1),
                                 line_no);
            }
        }
    }
    while (next_line()) {
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_commas(line);
        if (cells.size() != ds.d + 1) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(ds.d + 1) +
                                 " fields, got " + std::to_string(cells.size()),
                             line_no);
        }
        for (std::size_t j = 0; j < ds.d; ++j) {
            double v = 0.0;
            if (!parse_number(cells[j], v) || !std::isfinite(v)) {
                throw ParseError("line " + std::to_string(line_no) + ": bad value in column f" +
                                     std::to_string(j + 1),
                                 line_no);
            }
            ds.features.push_back(v);
        }
        int label = 0;
        if (!parse_number(cells.back(), label)) {
            throw ParseError("line " + std::to_string(line_no) + ": label is not an integer", line_no);
        }
        if (label < 1 || label > ds.classes) {
            throw ValidationError("line " + std::to_string(line_no) + ": label " + std::to_string(label) +
                                  " outside 1.." + std::to_string(ds.classes));
        }
        ds.labels.push_back(label);
        ++ds.n;
    }
    if (ds.n == 0) {
        throw ValidationError("empty dataset: no sample rows");
    }
    return ds;
}

Dataset load_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> indices)
{
    Dataset out;
    out.n = indices.size();
    out.d = ds.d;
    out.classes = ds.classes;
    out.provenance = ds.provenance;
    out.features.reserve(out.n * out.d);
    out.labels.reserve(out.n);
    for (std::size_t i : indices) {
        if (i >= ds.n) {
            throw UsageError("subset: index " + std::to_string(i) + " out of range");
        }
        const auto r = ds.row(i);
        out.features.insert(out.features.end(), r.begin(), r.end());
        out.labels.push_back(ds.labels[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Splitting

namespace {

// Indices grouped by class (class 1 first), each group shuffled. Falls back to
// one shuffled group when some class has fewer than `min_per_class` members.
std::vector<std::size_t> stratified_order(std::span<const int> labels, std::size_t min_per_class,
                                          std::mt19937_64& rng, bool& stratified,
                                          std::vector<std::string>& warnings)
{
    int max_label = 0;
    for (int y : labels) {
        max_label = std::max(max_label, y);
    }
    std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(max_label) + 1);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        groups[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    stratified = true;
    for (std::size_t y = 0; y < groups.size(); ++y) {
        if (!groups[y].empty() && groups[y].size() < min_per_class) {
            stratified = false;
            warnings.push_back("class " + std::to_string(y) + " has " + std::to_string(groups[y].size()) +
                               " samples, fewer than " + std::to_string(min_per_class) +
                               "; falling back to unstratified assignment");
            break;
        }
    }
    std::vector<std::size_t> order;
    order.reserve(labels.size());
    if (stratified) {
        for (auto& g : groups) {
            std::shuffle(g.begin(), g.end(), rng);
            order.insert(order.end(), g.begin(), g.end());
        }
    } else {
        order.resize(labels.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
    }
    return order;
}

std::vector<std::size_t> largest_remainder(std::size_t n, std::span<const double> fractions)
{
    std::vector<std::size_t> sizes(fractions.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    double total_fraction = 0.0;
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < fractions.size(); ++j) {
        const double exact = fractions[j] * static_cast<double>(n);
        sizes[j] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        remainders.emplace_back(exact - static_cast<double>(sizes[j]), j);
        assigned += sizes[j];
        total_fraction += fractions[j];
    }
    const auto wanted = std::min(
        n, static_cast<std::size_t>(std::llround(total_fraction * static_cast<double>(n))));
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < wanted && r < remainders.size(); ++r, ++assigned) {
        ++sizes[remainders[r].second];
    }
    return sizes;
}

} // namespace

SplitResult split(const Dataset& ds, std::array<double, 3> fractions, std::uint64_t seed)
{
    double total = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0)) {
            throw UsageError("split fractions must be positive");
        }
        total += f;
    }
    if (total > 1.0 + 1e-9) {
        throw UsageError("split fractions must sum to at most 1");
    }

    SplitResult result;
    result.seed = seed;
    result.fractions = fractions;

    std::mt19937_64 rng(seed);
    const std::vector<std::size_t> order =
        stratified_order(ds.labels, fractions.size(), rng, result.stratified, result.warnings);

    // Bucket 3 collects whatever the fractions leave unused.
    const std::size_t n = ds.n;
    std::vector<std::size_t> target = largest_remainder(n, fractions);
    target.push_back(n - (target[0] + target[1] + target[2]));

    // Walk the class-grouped order and always feed the bucket furthest behind
    // its proportional quota, so each class is spread across the splits.
    std::array<std::vector<std::size_t>*, 3> out = {&result.train, &result.validation, &result.test};
    std::vector<std::size_t> filled(4, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 4;
        double best_deficit = -1e300;
        for (std::size_t j = 0; j < 4; ++j) {
            if (filled[j] >= target[j]) {
                continue;
            }
            const double deficit = static_cast<double>(target[j]) * static_cast<double>(i + 1) /
                                       static_cast<double>(n) -
                                   static_cast<double>(filled[j]);
            if (deficit > best_deficit) {
                best_deficit = deficit;
                best = j;
            }
        }
        ++filled[best];
        if (best < 3) {
            out[best]->push_back(order[i]);
        }
    }
    for (auto* v : out) {
        std::sort(v->begin(), v->end());
    }
    return result;
}

nlohmann::json manifest(const SplitResult& split)
{
    nlohmann::json j;
    j["version"] = 1;
    j["seed"] = split.seed;
    j["fractions"] = split.fractions;
    j["stratified"] = split.stratified;
    j["warnings"] = split.warnings;
    j["train"] = split.train;
    j["validation"] = split.validation;
    j["test"] = split.test;
    return j;
}

FoldAssignment kfold_indices(std::span<const int> labels, std::size_t k, std::uint64_t seed)
{
    if (k < 2) {
        throw UsageError("kfold: k must be >= 2");
    }
    if (labels.size() < k) {
        throw UsageError("kfold: fewer samples than folds");
    }
    FoldAssignment result;
    std::mt19937_64 rng(seed);
    const std::vector<std::size_t> order = stratified_order(labels, k, rng, result.stratified, result.warnings);
    result.folds.resize(k);
    for (std::size_t i = 0; i < order.size(); ++i) {
        result.folds[i % k].push_back(order[i]);
    }
    for (auto& f : result.folds) {
        std::sort(f.begin(), f.end());
    }
    return result;
}

Standardizer Standardizer::fit(const Dataset& ds)
{
    Standardizer s;
    s.mean.assign(ds.d, 0.0);
    s.scale.assign(ds.d, 1.0);
    if (ds.n == 0) {
        return s;
    }
    for (std::size_t i = 0; i < ds.n; ++i) {
        for (std::size_t j = 0; j < ds.d; ++j) {
            s.mean[j] += ds.features[i * ds.d + j];
        }
    }
    for (double& m : s.mean) {
        m /= static_cast<double>(ds.n);
    }
    std::vector<double> var(ds.d, 0.0);
    for (std::size_t i = 0; i < ds.n; ++i) {
        for (std::size_t j = 0; j < ds.d; ++j) {
            const double c = ds.features[i * ds.d + j] - s.mean[j];
            var[j] += c * c;
        }
    }
    for (std::size_t j = 0; j < ds.d; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(ds.n));
        s.scale[j] = sd > 1e-12 ? sd : 1.0;
    }
    return s;
}

Dataset Standardizer::apply(const Dataset& ds) const
{
    if (ds.d != mean.size()) {
        throw UsageError("standardizer: feature dimension mismatch");
    }
    Dataset out = ds;
    for (std::size_t i = 0; i < ds.n; ++i) {
        for (std::size_t j = 0; j < ds.d; ++j) {
            double& v = out.features[i * ds.d + j];
            v = (v - mean[j]) / scale[j];
        }
    }
    return out;
}

} // namespace unimodal
