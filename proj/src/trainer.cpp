// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0

#include "unimodal/trainer.hpp"

#include "unimodal/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

namespace unimodal {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Candidate {
    double soi = -1.0;
    double mae = 0.0;
    std::size_t epoch = 0;
    bool set = false;
};

bool better_by_soi(const MetricsReport& m, const Candidate& c)
{
    if (!c.set) {
        return true;
    }
    if (m.soi_predicted != c.soi) {
        return m.soi_predicted > c.soi;
    }
    return m.mae < c.mae;
}

bool better_by_mae(const MetricsReport& m, const Candidate& c)
{
    if (!c.set) {
        return true;
    }
    if (m.mae != c.mae) {
        return m.mae < c.mae;
    }
    return m.soi_predicted > c.soi;
}

void take(Candidate& c, const MetricsReport& m, std::size_t epoch)
{
    c.soi = m.soi_predicted;
    c.mae = m.mae;
    c.epoch = epoch;
    c.set = true;
}

// Trims the per-epoch traces to the epochs that completed validation.
void mark_failed(RunRecord& record, const std::string& why)
{
    record.ok = false;
    record.failure = why;
    const std::size_t done = record.validation.size();
    record.learning_rate.resize(done);
    record.temperature.resize(done);
    record.train_loss.resize(done);
}

} // namespace

void TrainConfig::validate() const
{
    if (batch_size < 1) {
        throw UsageError("batch_size must be >= 1");
    }
    if (!(lr > 0.0) || !(lr_min >= 0.0)) {
        throw UsageError("learning rates must be positive");
    }
    if (lr_decay_every < 1) {
        throw UsageError("lr_decay_every must be >= 1");
    }
    if (!(lr_decay_factor > 0.0)) {
        throw UsageError("lr_decay_factor must be > 0");
    }
    if (!(momentum >= 0.0) || !(weight_decay >= 0.0)) {
        throw UsageError("momentum and weight_decay must be >= 0");
    }
    loss.penalty.validate();
}

double learning_rate(const TrainConfig& cfg, std::size_t epoch)
{
    const auto steps = static_cast<double>(epoch / cfg.lr_decay_every);
    return std::max(cfg.lr * std::pow(cfg.lr_decay_factor, steps), cfg.lr_min);
}

std::uint64_t init_seed(std::uint64_t seed)
{
    return splitmix64(seed ^ 0x696e6974ULL);
}

std::uint64_t shuffle_seed(std::uint64_t seed)
{
    return splitmix64(seed ^ 0x73687566ULL);
}

void sgd_step(std::span<double> params, std::span<const double> grad, std::span<double> velocity,
              const SgdParams& sgd, std::size_t batch_index)
{
    if (params.size() != grad.size() || params.size() != velocity.size()) {
        throw UsageError("sgd_step: parameter, gradient and velocity lengths differ");
    }
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (!std::isfinite(grad[i])) {
            throw TrainingError("non-finite gradient for parameter " + std::to_string(i) + " in batch " +
                                std::to_string(batch_index));
        }
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = sgd.momentum * velocity[i] + (grad[i] + sgd.weight_decay * params[i]);
        params[i] -= sgd.lr * velocity[i];
    }
}

MetricsReport evaluate_model(const ParameterSet& params, const Dataset& ds, const LossSettings& loss)
{
    std::vector<std::vector<double>> dists;
    std::vector<int> preds;
    dists.reserve(ds.n);
    preds.reserve(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        const std::vector<double> out = forward(params, ds.row(i));
        Decision d = decide(loss, out, ds.classes);
        dists.push_back(std::move(d.distribution));
        preds.push_back(d.label);
    }
    return evaluate(dists, preds, ds.labels);
}

MLPSpec model_spec_for(const TrainConfig& cfg, std::size_t input_dim, int classes)
{
    MLPSpec spec;
    spec.input_dim = input_dim;
    spec.hidden_dims = cfg.hidden_dims;
    spec.head = cfg.loss.kind == LossKind::PO ? HeadKind::PoissonRate : HeadKind::Logits;
    spec.classes = classes;
    spec.seed = init_seed(cfg.seed);
    return spec;
}

RunRecord train(const Splits& splits, const TrainConfig& cfg, ParameterSet* best)
{
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();
    const int classes = splits.train.classes;
    if (splits.validation.classes != classes || splits.test.classes != classes) {
        throw UsageError("train: splits disagree on the number of classes");
    }
    if (splits.train.n == 0 || splits.validation.n == 0 || splits.test.n == 0) {
        throw UsageError("train: every split needs at least one sample");
    }

    const Standardizer standardizer = Standardizer::fit(splits.train);
    const Dataset train_set = standardizer.apply(splits.train);
    const Dataset val_set = standardizer.apply(splits.validation);
    const Dataset test_set = standardizer.apply(splits.test);

    RunRecord record;
    record.name = std::string(to_string(cfg.loss.kind));
    record.seed = cfg.seed;
    record.config = to_json(cfg);

    const MLPSpec spec = model_spec_for(cfg, train_set.d, classes);
    ParameterSet params = init(spec);
    ParameterSet best_soi = params;
    ParameterSet best_mae = params;
    Candidate soi_pick;
    Candidate mae_pick;

    LossSettings loss = cfg.loss;
    std::vector<double> velocity(params.size(), 0.0);
    std::mt19937_64 shuffle_rng(shuffle_seed(cfg.seed));
    std::vector<std::size_t> order(train_set.n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    Tape tape;
    std::vector<Var> batch_losses;
    std::vector<double> grad(params.size());
    std::size_t batch_index = 0;

    try {
        for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
            const SgdParams sgd{learning_rate(cfg, epoch), cfg.momentum, cfg.weight_decay};
            record.learning_rate.push_back(sgd.lr);
            record.temperature.push_back(loss.barrier.current());
            std::shuffle(order.begin(), order.end(), shuffle_rng);

            double epoch_loss = 0.0;
            for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
                const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
                tape.clear();
                batch_losses.clear();
                const BoundParameters bound = bind(spec, tape.leaf(params.values()));
                for (std::size_t b = start; b < stop; ++b) {
                    const std::size_t i = order[b];
                    const Var out = forward(bound, train_set.row(i));
                    batch_losses.push_back(sample_loss(loss, out, train_set.labels[i], classes));
                }
                const Var batch_loss = batch_reduce(batch_losses);
                const double value = batch_loss.scalar();
                if (!std::isfinite(value)) {
                    throw TrainingError("non-finite loss in batch " + std::to_string(batch_index) +
                                        " (epoch " + std::to_string(epoch + 1) + ")");
                }
                epoch_loss += value * static_cast<double>(stop - start);
                tape.backward(batch_loss);
                const auto g = bound.flat.grad();
                std::copy(g.begin(), g.end(), grad.begin());
                sgd_step(params.values(), grad, velocity, sgd, batch_index);
                ++batch_index;
            }
            record.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));

            if (cfg.loss.kind == LossKind::ELB) {
                loss.barrier.step();
            }

            const MetricsReport val = evaluate_model(params, val_set, loss);
            record.validation.push_back(val);
            if (better_by_soi(val, soi_pick)) {
                take(soi_pick, val, epoch + 1);
                best_soi = params;
            }
            if (better_by_mae(val, mae_pick)) {
                take(mae_pick, val, epoch + 1);
                best_mae = params;
            }
        }
    } catch (const TrainingError& e) {
        mark_failed(record, e.what());
    } catch (const DomainError& e) {
        mark_failed(record, e.what());
    }

    record.best_epoch = soi_pick.epoch;
    record.best_epoch_mae = mae_pick.epoch;
    record.test = evaluate_model(best_soi, test_set, loss);
    record.test_mae_selected = evaluate_model(best_mae, test_set, loss);
    if (best != nullptr) {
        *best = best_soi;
    }
    record.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return record;
}

Aggregate aggregate(std::span<const double> values)
{
    Aggregate a;
    a.count = values.size();
    if (values.empty()) {
        return a;
    }
    a.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - a.mean) * (v - a.mean);
        }
        a.stdev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return a;
}

KFoldResult kfold(const Dataset& pool, const Dataset& test, std::size_t k, std::uint64_t seed,
                  const TrainConfig& cfg)
{
    KFoldResult result;
    result.folds = kfold_indices(pool.labels, k, seed);
    std::vector<double> maes;
    std::vector<double> sois;
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> train_idx;
        for (std::size_t g = 0; g < k; ++g) {
            if (g != f) {
                train_idx.insert(train_idx.end(), result.folds.folds[g].begin(), result.folds.folds[g].end());
            }
        }
        std::sort(train_idx.begin(), train_idx.end());
        Splits splits{subset(pool, train_idx), subset(pool, result.folds.folds[f]), test};
        RunRecord r = train(splits, cfg);
        r.name += "/fold" + std::to_string(f);
        if (r.ok) {
            maes.push_back(r.test.mae);
            sois.push_back(r.test.soi_predicted);
        } else {
            result.failed_folds.push_back(f);
        }
        result.runs.push_back(std::move(r));
    }
    result.mae = aggregate(maes);
    result.soi_predicted = aggregate(sois);
    return result;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const MetricsReport& m)
{
    return {{"mae", m.mae},
            {"soi_predicted", m.soi_predicted},
            {"soi_true", m.soi_true},
            {"violation_histogram", m.violation_histogram},
            {"n_samples", m.n_samples}};
}

MetricsReport metrics_from_json(const nlohmann::json& j)
{
    MetricsReport m;
    m.mae = j.at("mae").get<double>();
    m.soi_predicted = j.at("soi_predicted").get<double>();
    m.soi_true = j.at("soi_true").get<double>();
    m.violation_histogram = j.at("violation_histogram").get<std::vector<std::size_t>>();
    m.n_samples = j.at("n_samples").get<std::size_t>();
    return m;
}

nlohmann::json to_json(const TrainConfig& cfg)
{
    const LossSettings& l = cfg.loss;
    return {{"loss", std::string(to_string(l.kind))},
            {"epochs", cfg.epochs},
            {"batch_size", cfg.batch_size},
            {"lr", cfg.lr},
            {"lr_decay_every", cfg.lr_decay_every},
            {"lr_decay_factor", cfg.lr_decay_factor},
            {"lr_min", cfg.lr_min},
            {"momentum", cfg.momentum},
            {"weight_decay", cfg.weight_decay},
            {"hidden", cfg.hidden_dims},
            {"seed", cfg.seed},
            {"penalty", {{"lambda", l.penalty.lambda}, {"epsilon", l.penalty.epsilon}}},
            {"barrier",
             {{"t_init", l.barrier.t_init()}, {"growth", l.barrier.growth()}, {"t_max", l.barrier.t_max()}}},
            {"ld", {{"sigma", l.ld.sigma}}},
            {"mv", {{"lambda1", l.mv.lambda1}, {"lambda2", l.mv.lambda2}}},
            {"po", {{"tau", l.po.tau}}}};
}

nlohmann::json to_json(const RunRecord& r)
{
    nlohmann::json validation = nlohmann::json::array();
    for (const auto& m : r.validation) {
        validation.push_back(to_json(m));
    }
    return {{"version", r.version},
            {"name", r.name},
            {"sweep_index", r.sweep_index},
            {"seed", r.seed},
            {"config", r.config},
            {"train_loss", r.train_loss},
            {"learning_rate", r.learning_rate},
            {"temperature", r.temperature},
            {"validation", validation},
            {"best_epoch", r.best_epoch},
            {"best_epoch_mae", r.best_epoch_mae},
            {"test", to_json(r.test)},
            {"test_mae_selected", to_json(r.test_mae_selected)},
            {"wall_time_seconds", r.wall_time_seconds},
            {"ok", r.ok},
            {"failure", r.failure}};
}

RunRecord run_record_from_json(const nlohmann::json& j)
{
    try {
        RunRecord r;
        r.version = j.at("version").get<int>();
        if (r.version != kRunRecordVersion) {
            throw ParseError("run record schema version " + std::to_string(r.version) + ", expected " +
                                 std::to_string(kRunRecordVersion),
                             0);
        }
        r.name = j.at("name").get<std::string>();
        r.sweep_index = j.at("sweep_index").get<std::size_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.config = j.at("config");
        r.train_loss = j.at("train_loss").get<std::vector<double>>();
        r.learning_rate = j.at("learning_rate").get<std::vector<double>>();
        r.temperature = j.at("temperature").get<std::vector<double>>();
        for (const auto& m : j.at("validation")) {
            r.validation.push_back(metrics_from_json(m));
        }
        r.best_epoch = j.at("best_epoch").get<std::size_t>();
        r.best_epoch_mae = j.at("best_epoch_mae").get<std::size_t>();
        r.test = metrics_from_json(j.at("test"));
        r.test_mae_selected = metrics_from_json(j.at("test_mae_selected"));
        r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
        r.ok = j.at("ok").get<bool>();
        r.failure = j.at("failure").get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed run record: ") + e.what(), 0);
    }
}

} // namespace unimodal
