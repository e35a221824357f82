// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0

#include "unimodal/data.hpp"
#include "unimodal/diff.hpp"
#include "unimodal/errors.hpp"
#include "unimodal/experiment.hpp"
#include "unimodal/losses.hpp"
#include "unimodal/metrics.hpp"
#include "unimodal/ordinal.hpp"
#include "unimodal/trainer.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <utility>
#include <vector>

namespace py = pybind11;
using namespace unimodal;

namespace {

LossSettings settings_from(const std::string& name, const py::kwargs& kw)
{
    const auto kind = parse_loss_kind(name);
    if (!kind) {
        throw UsageError("unknown loss '" + name + "'");
    }
    LossSettings s;
    s.kind = *kind;
    auto get = [&kw](const char* key, double fallback) {
        return kw.contains(key) ? kw[key].cast<double>() : fallback;
    };
    s.penalty.lambda = get("lam", s.penalty.lambda);
    s.penalty.epsilon = get("epsilon", s.penalty.epsilon);
    const double t = get("t", 1.0);
    s.barrier = BarrierSchedule(t, 1.0, t);
    s.ld.sigma = get("sigma", s.ld.sigma);
    s.mv.lambda1 = get("lambda1", s.mv.lambda1);
    s.mv.lambda2 = get("lambda2", s.mv.lambda2);
    s.po.tau = get("tau", s.po.tau);
    return s;
}

std::pair<double, std::vector<double>> loss_and_grad(const std::string& name, const std::vector<double>& output,
                                                     int label, int classes, const py::kwargs& kw)
{
    const LossSettings s = settings_from(name, kw);
    Tape tape;
    const Var x = tape.leaf(output);
    const Var l = sample_loss(s, x, label, classes, nullptr);
    tape.backward(l);
    return {l.scalar(), std::vector<double>(x.grad().begin(), x.grad().end())};
}

py::dict metrics_dict(const MetricsReport& m)
{
    py::dict d;
    d["mae"] = m.mae;
    d["soi_predicted"] = m.soi_predicted;
    d["soi_true"] = m.soi_true;
    d["violation_histogram"] = m.violation_histogram;
    d["n_samples"] = m.n_samples;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Unimodality-constrained ordinal classification losses, metrics and training.";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

    m.def("softmax", [](const std::vector<double>& s) { return softmax(s); }, py::arg("scores"));
    m.def("predict_argmax", [](const std::vector<double>& p) { return predict_argmax(p); }, py::arg("p"));
    m.def("predict_expectation", [](const std::vector<double>& p) { return predict_expectation(p); },
          py::arg("p"));
    m.def("soi", [](const std::vector<double>& p, int nu) { return soi(p, nu); }, py::arg("p"), py::arg("nu"));
    m.def("mae", [](const std::vector<int>& pred, const std::vector<int>& truth) { return mae(pred, truth); },
          py::arg("predictions"), py::arg("truths"));

    m.def(
        "loss",
        [](const std::string& name, const std::vector<double>& output, int label, int classes,
           const py::kwargs& kw) { return loss_and_grad(name, output, label, classes, kw).first; },
        py::arg("name"), py::arg("output"), py::arg("label"), py::arg("classes"),
        "Per-sample loss. Keyword settings: lam, epsilon, t, sigma, lambda1, lambda2, tau.");
    m.def("loss_and_grad", &loss_and_grad, py::arg("name"), py::arg("output"), py::arg("label"),
          py::arg("classes"), "Per-sample loss and its gradient with respect to the output vector.");
    m.def("po_distribution", &po_distribution, py::arg("eta"), py::arg("classes"), py::arg("tau") = 1.0);
    m.def("ld_target", &ld_target, py::arg("classes"), py::arg("label"), py::arg("sigma") = 1.0);

    m.def(
        "generate",
        [](int c, std::size_t d, std::size_t n, double noise, std::uint64_t embed_seed, std::uint64_t sample_seed) {
            SyntheticSpec spec{c, d, n, noise, embed_seed, sample_seed};
            const Dataset ds = generate(spec);
            std::vector<std::vector<double>> rows(ds.n);
            for (std::size_t i = 0; i < ds.n; ++i) {
                const auto r = ds.row(i);
                rows[i].assign(r.begin(), r.end());
            }
            return std::make_pair(rows, ds.labels);
        },
        py::arg("c") = 10, py::arg("d") = 16, py::arg("n") = 2000, py::arg("noise") = 0.6,
        py::arg("embed_seed") = 1, py::arg("sample_seed") = 2, "Synthetic ordinal dataset as (features, labels).");
    m.def(
        "gen_data_csv",
        [](int c, std::size_t d, std::size_t n, double noise, std::uint64_t embed_seed, std::uint64_t sample_seed) {
            return to_csv(generate(SyntheticSpec{c, d, n, noise, embed_seed, sample_seed}));
        },
        py::arg("c") = 10, py::arg("d") = 16, py::arg("n") = 2000, py::arg("noise") = 0.6,
        py::arg("embed_seed") = 1, py::arg("sample_seed") = 2);

    m.def(
        "run_experiment",
        [](const std::string& config_json, const std::string& base_dir) {
            const ExperimentConfig cfg = parse_config(nlohmann::json::parse(config_json), base_dir);
            ExperimentOutcome out;
            {
                py::gil_scoped_release release;
                out = run_experiment(cfg);
            }
            py::list records;
            for (const auto& r : out.records) {
                py::dict d;
                d["name"] = r.name;
                d["seed"] = r.seed;
                d["ok"] = r.ok;
                d["best_epoch"] = r.best_epoch;
                d["test"] = metrics_dict(r.test);
                d["train_loss"] = r.train_loss;
                records.append(d);
            }
            py::dict result;
            result["records"] = records;
            result["table"] = render_markdown(out.table);
            result["failed_runs"] = out.failed_runs;
            return result;
        },
        py::arg("config_json"), py::arg("base_dir") = std::string(),
        "Runs a JSON experiment config and writes its run directory.");
    m.def(
        "report",
        [](const std::string& dir, std::size_t smooth) {
            const ReportResult r = report(dir, smooth);
            return std::make_pair(render_markdown(r.table), r.warnings);
        },
        py::arg("dir"), py::arg("smooth") = 1, "Re-renders (table, warnings) from a run directory.");
}
