// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0

#include "unimodal/losses.hpp"

#include "unimodal/errors.hpp"
#include "unimodal/ordinal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace unimodal {

namespace {

constexpr std::array<std::string_view, 7> kLossNames = {"CE", "PN", "ELB", "REN", "LD", "MV", "PO"};

int classes_of(const Var& scores)
{
    return static_cast<int>(scores.size());
}

void require_label(int classes, int label)
{
    LabelSpace(classes).require(label);
}

// +1 on the below-target pairs, -1 on the above-target pairs.
std::vector<double> side_signs(int classes, int label)
{
    std::vector<double> sign(static_cast<std::size_t>(classes - 1), -1.0);
    for (int k = 1; k < label; ++k) {
        sign[static_cast<std::size_t>(k - 1)] = 1.0;
    }
    return sign;
}

// Tallies the emitted terms by side, read off the sign mask that builds them.
void record(ConstraintTrace* trace, const std::vector<double>& sign)
{
    if (trace != nullptr) {
        for (double v : sign) {
            ++(v > 0.0 ? trace->below : trace->above);
        }
    }
}

Var signed_residuals(const Var& scores, const std::vector<double>& sign)
{
    return adjacent_diff(scores) * scores.tape().constant(sign);
}

std::vector<double> label_indices(int classes)
{
    std::vector<double> k(static_cast<std::size_t>(classes));
    for (int i = 0; i < classes; ++i) {
        k[static_cast<std::size_t>(i)] = static_cast<double>(i + 1);
    }
    return k;
}

} // namespace

std::string_view to_string(LossKind kind)
{
    return kLossNames[static_cast<std::size_t>(kind)];
}

std::optional<LossKind> parse_loss_kind(std::string_view name)
{
    for (std::size_t i = 0; i < kLossNames.size(); ++i) {
        if (kLossNames[i] == name) {
            return static_cast<LossKind>(i);
        }
    }
    return std::nullopt;
}

void PenaltyConfig::validate() const
{
    if (!(lambda >= 0.0)) {
        throw UsageError("penalty lambda must be >= 0");
    }
    if (!(epsilon > 0.0)) {
        throw UsageError("penalty epsilon must be > 0");
    }
}

BarrierSchedule::BarrierSchedule(double t_init, double growth, double t_max)
    : t_init_(t_init), growth_(growth), t_max_(t_max), t_(t_init)
{
    if (!(t_init > 0.0)) {
        throw UsageError("barrier t_init must be > 0");
    }
    if (!(growth >= 1.0)) {
        throw UsageError("barrier growth factor must be >= 1");
    }
    if (!(t_max >= t_init)) {
        throw UsageError("barrier t_max must be >= t_init");
    }
}

void BarrierSchedule::step()
{
    t_ = std::min(t_ * growth_, t_max_);
}

Var ce_loss(const Var& scores, int label)
{
    require_label(classes_of(scores), label);
    return log_sum_exp(scores) - pick(scores, static_cast<std::size_t>(label - 1));
}

Var penalty_h(const Var& delta, double epsilon)
{
    if (!(epsilon > 0.0)) {
        throw UsageError("penalty_h: epsilon must be > 0");
    }
    // Branch on -delta so that delta == 0 lands on the active (left) side.
    return piecewise(
        -delta, 0.0, [epsilon](const Var& u) { return square(epsilon - u); },
        [](const Var& u) { return u * 0.0; });
}

Var barrier_psi(const Var& r, double t)
{
    if (!(t > 0.0)) {
        throw UsageError("barrier_psi: t must be > 0");
    }
    const double inv_t = 1.0 / t;
    const double breakpoint = -inv_t * inv_t;
    const double offset = -inv_t * std::log(inv_t * inv_t) + inv_t;
    return piecewise(
        r, breakpoint, [inv_t](const Var& u) { return log(-u) * (-inv_t); },
        [t, offset](const Var& u) { return u * t + offset; });
}

Var constraint_residuals(const Var& scores, int label)
{
    const int c = classes_of(scores);
    require_label(c, label);
    return signed_residuals(scores, side_signs(c, label));
}

Var pn_loss(const Var& scores, int label, const PenaltyConfig& cfg, ConstraintTrace* trace)
{
    cfg.validate();
    require_label(classes_of(scores), label);
    const std::vector<double> sign = side_signs(classes_of(scores), label);
    const Var r = signed_residuals(scores, sign);
    record(trace, sign);
    return ce_loss(scores, label) + sum(penalty_h(r, cfg.epsilon)) * cfg.lambda;
}

Var elb_loss(const Var& scores, int label, double t, ConstraintTrace* trace)
{
    require_label(classes_of(scores), label);
    const std::vector<double> sign = side_signs(classes_of(scores), label);
    const Var r = signed_residuals(scores, sign);
    record(trace, sign);
    return ce_loss(scores, label) + sum(barrier_psi(r, t));
}

Var ren_loss(const Var& squashed, int label)
{
    const int c = classes_of(squashed);
    require_label(c, label);
    std::vector<double> target(static_cast<std::size_t>(c), 0.0);
    std::fill_n(target.begin(), label, 1.0);
    return sum(square(squashed - squashed.tape().constant(target))) * (1.0 / c);
}

int ren_predict(std::span<const double> squashed)
{
    const auto above = std::count_if(squashed.begin(), squashed.end(), [](double o) { return o > 0.5; });
    return std::max(1, static_cast<int>(above));
}

namespace {

std::vector<double> ld_log_target(int classes, int label, double sigma)
{
    require_label(classes, label);
    if (!(sigma > 0.0)) {
        throw UsageError("ld: sigma must be > 0");
    }
    std::vector<double> logq(static_cast<std::size_t>(classes));
    for (int k = 1; k <= classes; ++k) {
        const double d = static_cast<double>(k - label);
        logq[static_cast<std::size_t>(k - 1)] = -d * d / (2.0 * sigma * sigma);
    }
    const double m = *std::max_element(logq.begin(), logq.end());
    double z = 0.0;
    for (double v : logq) {
        z += std::exp(v - m);
    }
    const double lse = m + std::log(z);
    for (double& v : logq) {
        v -= lse;
    }
    return logq;
}

} // namespace

std::vector<double> ld_target(int classes, int label, double sigma)
{
    std::vector<double> q = ld_log_target(classes, label, sigma);
    for (double& v : q) {
        v = std::exp(v);
    }
    return q;
}

Var ld_loss(const Var& scores, int label, const LDConfig& cfg)
{
    const int c = classes_of(scores);
    const std::vector<double> logq = ld_log_target(c, label, cfg.sigma);
    std::vector<double> q(logq.size());
    double negentropy = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
        q[k] = std::exp(logq[k]);
        negentropy += q[k] * logq[k];
    }
    const Var log_p = scores - log_sum_exp(scores);
    return negentropy - sum(scores.tape().constant(q) * log_p);
}

Var mv_loss(const Var& scores, int label, const MVConfig& cfg)
{
    const int c = classes_of(scores);
    require_label(c, label);
    Tape& tape = scores.tape();
    const Var lse = log_sum_exp(scores);
    const Var p = exp(scores - lse);
    const Var k = tape.constant(label_indices(c));
    const Var m = sum(p * k);
    const Var v = sum(p * square(k - m));
    const Var ce = lse - pick(scores, static_cast<std::size_t>(label - 1));
    return ce + square(m - static_cast<double>(label)) * (cfg.lambda1 / 2.0) + v * cfg.lambda2;
}

Var po_logits(const Var& eta, int classes, double tau)
{
    if (eta.size() != 1) {
        throw UsageError("po: eta must be a scalar");
    }
    if (!(eta.scalar() > 0.0)) {
        throw DomainError("po: eta must be > 0, got " + std::to_string(eta.scalar()));
    }
    if (!(tau > 0.0)) {
        throw UsageError("po: tau must be > 0");
    }
    LabelSpace space(classes);
    Tape& tape = eta.tape();
    std::vector<double> log_factorial(static_cast<std::size_t>(classes));
    for (int k = 1; k <= classes; ++k) {
        log_factorial[static_cast<std::size_t>(k - 1)] = -std::lgamma(static_cast<double>(k) + 1.0);
    }
    const Var logits = log(eta) * tape.constant(label_indices(classes)) +
                       tape.constant(log_factorial) - eta;
    return logits * (1.0 / tau);
}

std::vector<double> po_distribution(double eta, int classes, double tau)
{
    Tape tape;
    const Var z = po_logits(tape.constant(eta), classes, tau);
    return softmax(z.value());
}

Var po_loss(const Var& eta, int label, int classes, double tau)
{
    require_label(classes, label);
    const Var z = po_logits(eta, classes, tau);
    return log_sum_exp(z) - pick(z, static_cast<std::size_t>(label - 1));
}

Var batch_reduce(std::span<const Var> losses)
{
    if (losses.empty()) {
        throw UsageError("batch_reduce: empty batch");
    }
    return mean(losses);
}

std::size_t output_width(LossKind kind, int classes)
{
    return kind == LossKind::PO ? 1 : static_cast<std::size_t>(classes);
}

Var sample_loss(const LossSettings& settings, const Var& output, int label, int classes,
                ConstraintTrace* trace)
{
    if (output.size() != output_width(settings.kind, classes)) {
        throw UsageError("sample_loss: output length " + std::to_string(output.size()) +
                         " does not match loss " + std::string(to_string(settings.kind)));
    }
    switch (settings.kind) {
    case LossKind::CE:
        return ce_loss(output, label);
    case LossKind::PN:
        return pn_loss(output, label, settings.penalty, trace);
    case LossKind::ELB:
        return elb_loss(output, label, settings.barrier.current(), trace);
    case LossKind::REN:
        return ren_loss(sigmoid(output), label);
    case LossKind::LD:
        return ld_loss(output, label, settings.ld);
    case LossKind::MV:
        return mv_loss(output, label, settings.mv);
    case LossKind::PO:
        return po_loss(output, label, classes, settings.po.tau);
    }
    throw UsageError("sample_loss: unknown loss kind");
}

Decision decide(const LossSettings& settings, std::span<const double> output, int classes)
{
    if (output.size() != output_width(settings.kind, classes)) {
        throw UsageError("decide: output length " + std::to_string(output.size()) +
                         " does not match loss " + std::string(to_string(settings.kind)));
    }
    Decision d;
    switch (settings.kind) {
    case LossKind::PO:
        d.distribution = po_distribution(output[0], classes, settings.po.tau);
        d.label = predict_expectation(d.distribution);
        return d;
    case LossKind::REN: {
        // The logistic unit is monotone, so the softmax of the raw outputs has
        // the same adjacent ordering as the squashed outputs.
        d.distribution = softmax(output);
        std::vector<double> squashed(output.size());
        std::transform(output.begin(), output.end(), squashed.begin(),
                       [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
        d.label = ren_predict(squashed);
        return d;
    }
    case LossKind::MV:
        d.distribution = softmax(output);
        d.label = predict_expectation(d.distribution);
        return d;
    case LossKind::CE:
    case LossKind::PN:
    case LossKind::ELB:
    case LossKind::LD:
        d.distribution = softmax(output);
        d.label = predict_argmax(d.distribution);
        return d;
    }
    return d;
}

} // namespace unimodal
