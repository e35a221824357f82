// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0

#include "unimodal/experiment.hpp"

#include "unimodal/errors.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace unimodal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Schema helpers. Every accessor names the full field path on failure.

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path)
{
    if (!j.is_object()) {
        throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    }
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed)
{
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError(join(path, key), "unknown field");
        }
    }
}

// Integers written in JSON text parse as unsigned; values built in code may be signed.
bool is_count(const json& v)
{
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

double get_real(const json& j, const std::string& path, const std::string& key, double fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_number()) {
        throw ConfigError(join(path, key), "expected a number");
    }
    return v.get<double>();
}

std::uint64_t get_count(const json& j, const std::string& path, const std::string& key, std::uint64_t fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!is_count(v)) {
        throw ConfigError(join(path, key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::vector<std::size_t> get_dims(const json& j, const std::string& path, const std::string& key,
                                  const std::vector<std::size_t>& fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_array()) {
        throw ConfigError(join(path, key), "expected an array of positive integers");
    }
    std::vector<std::size_t> dims;
    for (const auto& e : v) {
        if (!is_count(e) || e.get<std::uint64_t>() == 0) {
            throw ConfigError(join(path, key), "expected an array of positive integers");
        }
        dims.push_back(e.get<std::size_t>());
    }
    return dims;
}

SyntheticSpec parse_synthetic(const json& j, const std::string& path)
{
    require_object(j, path);
    check_keys(j, path, {"c", "d", "n", "noise_sigma", "embed_seed", "sample_seed"});
    SyntheticSpec s;
    s.classes = static_cast<int>(get_count(j, path, "c", static_cast<std::uint64_t>(s.classes)));
    s.d = get_count(j, path, "d", s.d);
    s.n = get_count(j, path, "n", s.n);
    s.noise_sigma = get_real(j, path, "noise_sigma", s.noise_sigma);
    s.embed_seed = get_count(j, path, "embed_seed", s.embed_seed);
    s.sample_seed = get_count(j, path, "sample_seed", s.sample_seed);
    if (s.classes < 2) {
        throw ConfigError(join(path, "c"), "must be >= 2");
    }
    if (s.d < 1) {
        throw ConfigError(join(path, "d"), "must be >= 1");
    }
    if (s.n < 1) {
        throw ConfigError(join(path, "n"), "must be >= 1");
    }
    if (!(s.noise_sigma >= 0.0)) {
        throw ConfigError(join(path, "noise_sigma"), "must be >= 0");
    }
    return s;
}

DatasetBlock parse_dataset(const json& j, const fs::path& base_dir)
{
    const std::string path = "dataset";
    require_object(j, path);
    check_keys(j, path, {"synthetic", "csv", "split"});
    DatasetBlock block;
    if (j.contains("synthetic") == j.contains("csv")) {
        throw ConfigError(path, "exactly one of 'synthetic' or 'csv' is required");
    }
    if (j.contains("synthetic")) {
        block.synthetic = parse_synthetic(j.at("synthetic"), join(path, "synthetic"));
    } else {
        if (!j.at("csv").is_string()) {
            throw ConfigError(join(path, "csv"), "expected a path string");
        }
        fs::path p = j.at("csv").get<std::string>();
        block.csv = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (j.contains("split")) {
        const std::string sp = join(path, "split");
        const json& s = j.at("split");
        require_object(s, sp);
        check_keys(s, sp, {"fractions", "seed"});
        if (s.contains("fractions")) {
            const json& f = s.at("fractions");
            if (!f.is_array() || f.size() != 3) {
                throw ConfigError(join(sp, "fractions"), "expected [train, validation, test]");
            }
            double total = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                if (!f[i].is_number() || !(f[i].get<double>() > 0.0)) {
                    throw ConfigError(join(sp, "fractions"), "entries must be positive numbers");
                }
                block.fractions[i] = f[i].get<double>();
                total += block.fractions[i];
            }
            if (total > 1.0 + 1e-9) {
                throw ConfigError(join(sp, "fractions"), "must sum to at most 1");
            }
        }
        block.split_seed = get_count(s, sp, "seed", block.split_seed);
    }
    return block;
}

SweepEntry parse_sweep_entry(const json& j, const std::string& path)
{
    require_object(j, path);
    if (!j.contains("loss") || !j.at("loss").is_string()) {
        throw ConfigError(join(path, "loss"), "required loss name (CE, PN, ELB, REN, LD, MV, PO)");
    }
    const std::string name = j.at("loss").get<std::string>();
    const auto kind = parse_loss_kind(name);
    if (!kind) {
        throw ConfigError(join(path, "loss"), "unknown loss '" + name + "'");
    }
    SweepEntry e;
    e.loss.kind = *kind;
    e.name = name;
    std::set<std::string> allowed = {"loss", "name"};
    switch (*kind) {
    case LossKind::PN:
        allowed.insert({"lambda", "epsilon"});
        e.loss.penalty.lambda = get_real(j, path, "lambda", e.loss.penalty.lambda);
        e.loss.penalty.epsilon = get_real(j, path, "epsilon", e.loss.penalty.epsilon);
        if (!(e.loss.penalty.lambda >= 0.0)) {
            throw ConfigError(join(path, "lambda"), "must be >= 0");
        }
        if (!(e.loss.penalty.epsilon > 0.0)) {
            throw ConfigError(join(path, "epsilon"), "must be > 0");
        }
        break;
    case LossKind::ELB: {
        allowed.insert({"t_init", "growth", "t_max"});
        const double t0 = get_real(j, path, "t_init", 1.0);
        const double g = get_real(j, path, "growth", 1.001);
        const double tm = get_real(j, path, "t_max", 5.0);
        try {
            e.loss.barrier = BarrierSchedule(t0, g, tm);
        } catch (const UsageError& err) {
            throw ConfigError(path, err.what());
        }
        break;
    }
    case LossKind::LD:
        allowed.insert("sigma");
        e.loss.ld.sigma = get_real(j, path, "sigma", e.loss.ld.sigma);
        if (!(e.loss.ld.sigma > 0.0)) {
            throw ConfigError(join(path, "sigma"), "must be > 0");
        }
        break;
    case LossKind::MV:
        allowed.insert({"lambda1", "lambda2"});
        e.loss.mv.lambda1 = get_real(j, path, "lambda1", e.loss.mv.lambda1);
        e.loss.mv.lambda2 = get_real(j, path, "lambda2", e.loss.mv.lambda2);
        break;
    case LossKind::PO:
        allowed.insert("tau");
        e.loss.po.tau = get_real(j, path, "tau", e.loss.po.tau);
        if (!(e.loss.po.tau > 0.0)) {
            throw ConfigError(join(path, "tau"), "must be > 0");
        }
        break;
    case LossKind::CE:
    case LossKind::REN:
        break;
    }
    check_keys(j, path, allowed);
    if (j.contains("name")) {
        if (!j.at("name").is_string() || j.at("name").get<std::string>().empty()) {
            throw ConfigError(join(path, "name"), "expected a non-empty string");
        }
        e.name = j.at("name").get<std::string>();
        for (char ch : e.name) {
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.')) {
                throw ConfigError(join(path, "name"), "may only contain letters, digits, '-', '_' and '.'");
            }
        }
    }
    return e;
}

TrainConfig parse_trainer(const json& j)
{
    const std::string path = "trainer";
    require_object(j, path);
    check_keys(j, path,
               {"epochs", "batch_size", "lr", "lr_decay_every", "lr_decay_factor", "lr_min", "momentum",
                "weight_decay", "hidden"});
    TrainConfig t;
    t.epochs = get_count(j, path, "epochs", t.epochs);
    t.batch_size = get_count(j, path, "batch_size", t.batch_size);
    t.lr = get_real(j, path, "lr", t.lr);
    t.lr_decay_every = get_count(j, path, "lr_decay_every", t.lr_decay_every);
    t.lr_decay_factor = get_real(j, path, "lr_decay_factor", t.lr_decay_factor);
    t.lr_min = get_real(j, path, "lr_min", t.lr_min);
    t.momentum = get_real(j, path, "momentum", t.momentum);
    t.weight_decay = get_real(j, path, "weight_decay", t.weight_decay);
    t.hidden_dims = get_dims(j, path, "hidden", t.hidden_dims);
    if (t.batch_size < 1) {
        throw ConfigError(join(path, "batch_size"), "must be >= 1");
    }
    if (!(t.lr > 0.0)) {
        throw ConfigError(join(path, "lr"), "must be > 0");
    }
    if (t.lr_decay_every < 1) {
        throw ConfigError(join(path, "lr_decay_every"), "must be >= 1");
    }
    if (!(t.lr_decay_factor > 0.0)) {
        throw ConfigError(join(path, "lr_decay_factor"), "must be > 0");
    }
    if (!(t.lr_min >= 0.0)) {
        throw ConfigError(join(path, "lr_min"), "must be >= 0");
    }
    if (!(t.momentum >= 0.0)) {
        throw ConfigError(join(path, "momentum"), "must be >= 0");
    }
    if (!(t.weight_decay >= 0.0)) {
        throw ConfigError(join(path, "weight_decay"), "must be >= 0");
    }
    return t;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

void make_dirs(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    }
}

std::string fixed(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

void append_double(std::string& out, double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

std::string cell(const Aggregate& a, double scale, int decimals)
{
    if (a.count == 0) {
        return "-";
    }
    std::string s = fixed(a.mean * scale, decimals);
    if (a.count > 1) {
        s += " ± " + fixed(a.stdev * scale, decimals);
    }
    return s;
}

// Display width in code points (the table only uses ASCII and '±').
std::size_t display_width(const std::string& s)
{
    std::size_t w = 0;
    for (unsigned char ch : s) {
        if ((ch & 0xC0) != 0x80) {
            ++w;
        }
    }
    return w;
}

} // namespace

// ---------------------------------------------------------------------------
// Config

ExperimentConfig parse_config(const json& j, const fs::path& base_dir)
{
    require_object(j, "");
    check_keys(j, "", {"version", "dataset", "sweep", "trainer", "seeds", "workers", "output_dir"});
    if (j.contains("version") && get_count(j, "", "version", kConfigVersion) != kConfigVersion) {
        throw ConfigError("version", "unsupported config version");
    }
    ExperimentConfig cfg;
    if (!j.contains("dataset")) {
        throw ConfigError("dataset", "required");
    }
    cfg.dataset = parse_dataset(j.at("dataset"), base_dir);

    if (!j.contains("sweep") || !j.at("sweep").is_array() || j.at("sweep").empty()) {
        throw ConfigError("sweep", "expected a non-empty array of loss entries");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < j.at("sweep").size(); ++i) {
        SweepEntry e = parse_sweep_entry(j.at("sweep")[i], "sweep[" + std::to_string(i) + "]");
        if (!names.insert(e.name).second) {
            throw ConfigError("sweep[" + std::to_string(i) + "].name", "duplicate entry name '" + e.name + "'");
        }
        cfg.sweep.push_back(std::move(e));
    }

    if (j.contains("trainer")) {
        cfg.trainer = parse_trainer(j.at("trainer"));
    }
    if (j.contains("seeds")) {
        const json& s = j.at("seeds");
        if (!s.is_array() || s.empty()) {
            throw ConfigError("seeds", "expected a non-empty array of non-negative integers");
        }
        cfg.seeds.clear();
        for (const auto& v : s) {
            if (!is_count(v)) {
                throw ConfigError("seeds", "expected a non-empty array of non-negative integers");
            }
            cfg.seeds.push_back(v.get<std::uint64_t>());
        }
    }
    cfg.workers = get_count(j, "", "workers", cfg.workers);
    if (cfg.workers < 1) {
        throw ConfigError("workers", "must be >= 1");
    }
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) {
            throw ConfigError("output_dir", "expected a path string");
        }
        fs::path p = j.at("output_dir").get<std::string>();
        cfg.output_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    return cfg;
}

ExperimentConfig load_config(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read config " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("not valid JSON: ") + e.what());
    }
    return parse_config(j, path.parent_path());
}

json to_json(const ExperimentConfig& cfg)
{
    json ds;
    if (cfg.dataset.synthetic) {
        const SyntheticSpec& s = *cfg.dataset.synthetic;
        ds["synthetic"] = {{"c", s.classes},       {"d", s.d},
                           {"n", s.n},             {"noise_sigma", s.noise_sigma},
                           {"embed_seed", s.embed_seed}, {"sample_seed", s.sample_seed}};
    } else if (cfg.dataset.csv) {
        ds["csv"] = cfg.dataset.csv->generic_string();
    }
    ds["split"] = {{"fractions", cfg.dataset.fractions}, {"seed", cfg.dataset.split_seed}};
    json sweep = json::array();
    for (const auto& e : cfg.sweep) {
        TrainConfig t = cfg.trainer;
        t.loss = e.loss;
        json entry = to_json(t);
        sweep.push_back({{"name", e.name}, {"resolved", entry}});
    }
    return {{"version", kConfigVersion},
            {"dataset", ds},
            {"sweep", sweep},
            {"seeds", cfg.seeds},
            {"workers", cfg.workers},
            {"output_dir", cfg.output_dir.generic_string()}};
}

// ---------------------------------------------------------------------------
// Tables and curves

ComparisonTable build_table(const std::vector<RunRecord>& records)
{
    std::vector<const RunRecord*> sorted;
    for (const auto& r : records) {
        sorted.push_back(&r);
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](const RunRecord* a, const RunRecord* b) {
        return a->sweep_index != b->sweep_index ? a->sweep_index < b->sweep_index : a->seed < b->seed;
    });

    ComparisonTable table;
    std::size_t i = 0;
    while (i < sorted.size()) {
        const std::size_t idx = sorted[i]->sweep_index;
        ComparisonRow row;
        row.name = sorted[i]->name;
        std::vector<double> maes;
        std::vector<double> sois;
        for (; i < sorted.size() && sorted[i]->sweep_index == idx; ++i) {
            ++row.runs;
            if (!sorted[i]->ok) {
                ++row.failed;
                continue;
            }
            maes.push_back(sorted[i]->test.mae);
            sois.push_back(sorted[i]->test.soi_predicted);
        }
        row.mae = aggregate(maes);
        row.soi_predicted = aggregate(sois);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string render_markdown(const ComparisonTable& table)
{
    std::vector<std::array<std::string, 4>> cells;
    cells.push_back({"Method", "Runs", "MAE", "SOI_pred (%)"});
    for (const auto& r : table.rows) {
        std::string runs = std::to_string(r.runs - r.failed);
        if (r.failed > 0) {
            runs += " (" + std::to_string(r.failed) + " failed)";
        }
        cells.push_back({r.name, runs, cell(r.mae, 1.0, 4), cell(r.soi_predicted, 100.0, 2)});
    }
    std::array<std::size_t, 4> width{};
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < 4; ++c) {
            width[c] = std::max(width[c], display_width(row[c]));
        }
    }
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - display_width(s), ' '); };
    std::string out;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        out += "|";
        for (std::size_t c = 0; c < 4; ++c) {
            out += " " + pad(cells[r][c], width[c]) + " |";
        }
        out += "\n";
        if (r == 0) {
            out += "|";
            for (std::size_t c = 0; c < 4; ++c) {
                out += (c == 0 ? ":" : "-") + std::string(width[c], '-') + (c == 0 ? "-|" : ":|");
            }
            out += "\n";
        }
    }
    return out;
}

std::string render_csv(const ComparisonTable& table)
{
    std::string out = "method,runs,failed,mae_mean,mae_std,soi_pred_pct_mean,soi_pred_pct_std\n";
    for (const auto& r : table.rows) {
        out += r.name + "," + std::to_string(r.runs) + "," + std::to_string(r.failed) + ",";
        out += fixed(r.mae.mean, 6) + "," + fixed(r.mae.stdev, 6) + ",";
        out += fixed(100.0 * r.soi_predicted.mean, 4) + "," + fixed(100.0 * r.soi_predicted.stdev, 4) + "\n";
    }
    return out;
}

std::vector<double> moving_average(const std::vector<double>& values, std::size_t window)
{
    if (window <= 1) {
        return values;
    }
    std::vector<double> out(values.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        acc += values[i];
        if (i >= window) {
            acc -= values[i - window];
        }
        out[i] = acc / static_cast<double>(std::min(window, i + 1));
    }
    return out;
}

std::string render_curve_csv(const RunRecord& record, std::size_t smooth)
{
    std::vector<double> mae_curve;
    std::vector<double> soi_curve;
    for (const auto& m : record.validation) {
        mae_curve.push_back(m.mae);
        soi_curve.push_back(m.soi_predicted);
    }
    const auto loss = moving_average(record.train_loss, smooth);
    mae_curve = moving_average(mae_curve, smooth);
    soi_curve = moving_average(soi_curve, smooth);
    std::string out = "epoch,train_loss,val_mae,val_soi\n";
    for (std::size_t e = 0; e < mae_curve.size(); ++e) {
        out += std::to_string(e + 1) + ",";
        append_double(out, e < loss.size() ? loss[e] : 0.0);
        out += ",";
        append_double(out, mae_curve[e]);
        out += ",";
        append_double(out, soi_curve[e]);
        out += "\n";
    }
    return out;
}

std::string record_stem(const RunRecord& record)
{
    char idx[16];
    std::snprintf(idx, sizeof(idx), "%02zu", record.sweep_index);
    return std::string(idx) + "_" + record.name + "_seed" + std::to_string(record.seed);
}

// ---------------------------------------------------------------------------
// Running

Splits prepare_splits(const ExperimentConfig& cfg, std::uint64_t seed, SplitResult* manifest_out)
{
    Dataset full;
    if (cfg.dataset.synthetic) {
        full = generate(*cfg.dataset.synthetic);
    } else if (cfg.dataset.csv) {
        full = load_csv(*cfg.dataset.csv);
    } else {
        throw ConfigError("dataset", "no data source");
    }
    SplitResult s = split(full, cfg.dataset.fractions, cfg.dataset.split_seed + seed);
    if (s.train.empty() || s.validation.empty() || s.test.empty()) {
        throw ConfigError("dataset.split.fractions", "a split came out empty for n = " + std::to_string(full.n));
    }
    Splits splits{subset(full, s.train), subset(full, s.validation), subset(full, s.test)};
    if (manifest_out != nullptr) {
        *manifest_out = std::move(s);
    }
    return splits;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg)
{
    if (cfg.sweep.empty()) {
        throw ConfigError("sweep", "at least one loss is required");
    }
    const fs::path out_dir = cfg.output_dir;
    make_dirs(out_dir / "records");
    make_dirs(out_dir / "curves");
    make_dirs(out_dir / "manifests");
    write_text(out_dir / "config.json", to_json(cfg).dump(2) + "\n");

    // Data preparation is shared by every sweep entry of a replicate.
    std::vector<Splits> per_seed;
    for (std::uint64_t seed : cfg.seeds) {
        SplitResult m;
        per_seed.push_back(prepare_splits(cfg, seed, &m));
        write_text(out_dir / "manifests" / ("split_seed" + std::to_string(seed) + ".json"),
                   manifest(m).dump(2) + "\n");
    }

    struct Job {
        std::size_t entry;
        std::size_t seed_index;
    };
    std::vector<Job> jobs;
    for (std::size_t e = 0; e < cfg.sweep.size(); ++e) {
        for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
            jobs.push_back({e, s});
        }
    }

    std::vector<RunRecord> records(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next.fetch_add(1); k < jobs.size(); k = next.fetch_add(1)) {
            try {
                const Job& job = jobs[k];
                TrainConfig t = cfg.trainer;
                t.loss = cfg.sweep[job.entry].loss;
                t.seed = cfg.seeds[job.seed_index];
                RunRecord r = train(per_seed[job.seed_index], t);
                r.name = cfg.sweep[job.entry].name;
                r.sweep_index = job.entry;
                records[k] = std::move(r);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(cfg.workers, jobs.size()));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    ExperimentOutcome outcome;
    for (const RunRecord& r : records) {
        const std::string stem = record_stem(r);
        write_text(out_dir / "records" / (stem + ".json"), to_json(r).dump(2) + "\n");
        write_text(out_dir / "curves" / (stem + ".csv"), render_curve_csv(r));
        if (!r.ok) {
            ++outcome.failed_runs;
        }
    }
    outcome.table = build_table(records);
    write_text(out_dir / "table.md", render_markdown(outcome.table));
    write_text(out_dir / "table.csv", render_csv(outcome.table));
    outcome.records = std::move(records);
    return outcome;
}

ReportResult report(const fs::path& dir, std::size_t smooth)
{
    ReportResult result;
    const fs::path records_dir = dir / "records";
    std::vector<fs::path> files;
    std::error_code ec;
    if (fs::is_directory(records_dir, ec)) {
        for (const auto& entry : fs::directory_iterator(records_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                files.push_back(entry.path());
            }
        }
    } else if (!fs::is_directory(dir, ec)) {
        throw IoError("not a directory: " + dir.string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        result.warnings.push_back("no run records found in " + records_dir.string());
    }
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            result.warnings.push_back(path.filename().string() + ": corrupt record, skipped (" + e.what() + ")");
            continue;
        }
        if (!j.is_object() || !j.contains("version") || j.at("version") != kRunRecordVersion) {
            const std::string v = j.is_object() && j.contains("version") ? j.at("version").dump() : "missing";
            result.warnings.push_back(path.filename().string() + ": schema version " + v + ", expected " +
                                      std::to_string(kRunRecordVersion) + "; skipped");
            continue;
        }
        try {
            result.records.push_back(run_record_from_json(j));
        } catch (const ParseError& e) {
            result.warnings.push_back(path.filename().string() + ": " + e.what() + "; skipped");
        }
    }
    if (smooth > 1) {
        make_dirs(dir / "curves");
        for (const auto& r : result.records) {
            write_text(dir / "curves" / (record_stem(r) + ".smooth" + std::to_string(smooth) + ".csv"),
                       render_curve_csv(r, smooth));
        }
    }
    result.table = build_table(result.records);
    return result;
}

} // namespace unimodal
