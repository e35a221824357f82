// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0

#include "unimodal/model.hpp"

#include "unimodal/errors.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace unimodal {

namespace {

constexpr const char* kCheckpointMagic = "unimodal-checkpoint";
constexpr int kCheckpointVersion = 1;

std::vector<std::size_t> layer_dims(const MLPSpec& spec)
{
    std::vector<std::size_t> dims;
    dims.push_back(spec.input_dim);
    dims.insert(dims.end(), spec.hidden_dims.begin(), spec.hidden_dims.end());
    dims.push_back(spec.output_dim());
    return dims;
}

double softplus(double v)
{
    return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v)));
}

void check_input(const MLPSpec& spec, std::span<const double> x)
{
    if (x.size() != spec.input_dim) {
        throw UsageError("forward: expected " + std::to_string(spec.input_dim) +
                         " features, got " + std::to_string(x.size()));
    }
}

} // namespace

void MLPSpec::validate() const
{
    if (input_dim < 1) {
        throw UsageError("model input_dim must be >= 1");
    }
    for (std::size_t h : hidden_dims) {
        if (h < 1) {
            throw UsageError("model hidden dims must be >= 1");
        }
    }
    if (head == HeadKind::Logits && classes < 2) {
        throw UsageError("model logits head needs classes >= 2");
    }
}

ParameterSet::ParameterSet(MLPSpec spec) : spec_(std::move(spec))
{
    spec_.validate();
    const auto dims = layer_dims(spec_);
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        LayerShape s;
        s.cols = dims[l];
        s.rows = dims[l + 1];
        s.weight_offset = offset;
        s.bias_offset = offset + s.rows * s.cols;
        offset = s.bias_offset + s.rows;
        layers_.push_back(s);
    }
    values_.assign(offset, 0.0);
}

std::span<const double> ParameterSet::weights(std::size_t layer) const
{
    const LayerShape& s = layers_.at(layer);
    return std::span<const double>(values_).subspan(s.weight_offset, s.rows * s.cols);
}

std::span<const double> ParameterSet::bias(std::size_t layer) const
{
    const LayerShape& s = layers_.at(layer);
    return std::span<const double>(values_).subspan(s.bias_offset, s.rows);
}

double glorot_bound(std::size_t fan_in, std::size_t fan_out)
{
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

ParameterSet init(const MLPSpec& spec)
{
    ParameterSet params(spec);
    std::mt19937_64 rng(spec.seed);
    auto values = params.values();
    for (const LayerShape& s : params.layers()) {
        const double b = glorot_bound(s.cols, s.rows);
        std::uniform_real_distribution<double> dist(-b, b);
        for (std::size_t i = 0; i < s.rows * s.cols; ++i) {
            values[s.weight_offset + i] = dist(rng);
        }
    }
    return params;
}

BoundParameters bind(const MLPSpec& spec, const Var& flat)
{
    const ParameterSet layout(spec);
    if (flat.size() != layout.size()) {
        throw UsageError("bind: expected " + std::to_string(layout.size()) + " parameters, got " +
                         std::to_string(flat.size()));
    }
    BoundParameters bound;
    bound.spec = &spec;
    bound.flat = flat;
    for (const LayerShape& s : layout.layers()) {
        bound.weights.push_back(slice(flat, s.weight_offset, s.rows * s.cols));
        bound.biases.push_back(slice(flat, s.bias_offset, s.rows));
    }
    return bound;
}

Var forward(const BoundParameters& params, std::span<const double> x)
{
    const MLPSpec& spec = *params.spec;
    check_input(spec, x);
    Var h = params.flat.tape().constant(x);
    const std::size_t n = params.weights.size();
    for (std::size_t l = 0; l < n; ++l) {
        const std::size_t rows = params.biases[l].size();
        h = matvec(params.weights[l], h, rows, h.size()) + params.biases[l];
        if (l + 1 < n) {
            h = maximum(h, 0.0);
        }
    }
    return spec.head == HeadKind::PoissonRate ? softplus(h) : h;
}

std::vector<double> forward(const ParameterSet& params, std::span<const double> x)
{
    check_input(params.spec(), x);
    std::vector<double> h(x.begin(), x.end());
    std::vector<double> next;
    const auto& layers = params.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const LayerShape& s = layers[l];
        const auto w = params.weights(l);
        const auto b = params.bias(l);
        next.assign(s.rows, 0.0);
        for (std::size_t r = 0; r < s.rows; ++r) {
            double acc = 0.0;
            for (std::size_t k = 0; k < s.cols; ++k) {
                acc += w[r * s.cols + k] * h[k];
            }
            next[r] = acc + b[r];
            if (l + 1 < layers.size() && !(next[r] > 0.0)) {
                next[r] = 0.0;
            }
        }
        h.swap(next);
    }
    if (params.spec().head == HeadKind::PoissonRate) {
        h[0] = softplus(h[0]);
    }
    return h;
}

std::string checkpoint_to_string(const ParameterSet& params)
{
    const MLPSpec& spec = params.spec();
    std::ostringstream out;
    out.precision(17);
    out << kCheckpointMagic << " v" << kCheckpointVersion << '\n';
    out << "head " << (spec.head == HeadKind::Logits ? "logits" : "poisson") << ' ' << spec.classes << '\n';
    out << "seed " << spec.seed << '\n';
    out << "layers " << params.layers().size() << '\n';
    for (std::size_t l = 0; l < params.layers().size(); ++l) {
        const LayerShape& s = params.layers()[l];
        out << "layer " << s.rows << ' ' << s.cols << '\n';
        const auto w = params.weights(l);
        for (std::size_t r = 0; r < s.rows; ++r) {
            for (std::size_t k = 0; k < s.cols; ++k) {
                out << (k ? " " : "") << w[r * s.cols + k];
            }
            out << '\n';
        }
        const auto b = params.bias(l);
        for (std::size_t r = 0; r < s.rows; ++r) {
            out << (r ? " " : "") << b[r];
        }
        out << '\n';
    }
    return out.str();
}

void save_checkpoint(const ParameterSet& params, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write checkpoint " + path.string());
    }
    out << checkpoint_to_string(params);
    if (!out) {
        throw IoError("failed writing checkpoint " + path.string());
    }
}

ParameterSet checkpoint_from_string(const std::string& text)
{
    std::istringstream in(text);
    std::string magic, version, key, head;
    in >> magic >> version;
    if (magic != kCheckpointMagic) {
        throw ParseError("not a unimodal checkpoint", 1);
    }
    if (version != "v" + std::to_string(kCheckpointVersion)) {
        throw ParseError("unsupported checkpoint version " + version, 1);
    }
    MLPSpec spec;
    std::size_t n_layers = 0;
    in >> key >> head >> spec.classes;
    if (key != "head" || (head != "logits" && head != "poisson")) {
        throw ParseError("bad head line", 2);
    }
    spec.head = head == "logits" ? HeadKind::Logits : HeadKind::PoissonRate;
    in >> key >> spec.seed;
    if (key != "seed") {
        throw ParseError("bad seed line", 3);
    }
    in >> key >> n_layers;
    if (key != "layers" || n_layers == 0 || !in) {
        throw ParseError("bad layers line", 4);
    }
    std::vector<std::pair<std::size_t, std::size_t>> shapes;
    std::vector<double> values;
    for (std::size_t l = 0; l < n_layers; ++l) {
        std::size_t rows = 0, cols = 0;
        in >> key >> rows >> cols;
        if (key != "layer" || !in) {
            throw ParseError("bad layer header for layer " + std::to_string(l), 0);
        }
        shapes.emplace_back(rows, cols);
        for (std::size_t i = 0; i < rows * cols + rows; ++i) {
            double v = 0.0;
            if (!(in >> v)) {
                throw ParseError("truncated values in layer " + std::to_string(l), 0);
            }
            values.push_back(v);
        }
    }
    spec.input_dim = shapes.front().second;
    for (std::size_t l = 0; l + 1 < shapes.size(); ++l) {
        spec.hidden_dims.push_back(shapes[l].first);
        if (shapes[l + 1].second != shapes[l].first) {
            throw ParseError("layer shapes do not chain at layer " + std::to_string(l + 1), 0);
        }
    }
    ParameterSet params(spec);
    if (shapes.back().first != spec.output_dim() || values.size() != params.size()) {
        throw ParseError("layer shapes disagree with the head", 0);
    }
    std::copy(values.begin(), values.end(), params.values().begin());
    return params;
}

ParameterSet load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read checkpoint " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return checkpoint_from_string(buf.str());
}

} // namespace unimodal
