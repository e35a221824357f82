// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0
//
// Training losses for ordinal classification. Every loss is a differentiable
// scalar built on a Tape from one sample's model output and its 1-based label.
//
// The unimodality constraints on a score vector s with target y are
//   s_k < s_{k+1}   for k < y        (below the target)
//   s_{k+1} < s_k   for y <= k < c   (above the target)
// i.e. exactly c-1 adjacent-pair constraints, split (y-1, c-y).

#pragma once

#include "unimodal/diff.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace unimodal {

enum class LossKind { CE, PN, ELB, REN, LD, MV, PO };

std::string_view to_string(LossKind kind);
std::optional<LossKind> parse_loss_kind(std::string_view name);

/// Quadratic-penalty weight and slack.
struct PenaltyConfig {
    double lambda = 1e-2;
    double epsilon = 1e-1;

    void validate() const;
};

/// Temperature sequence for the extended log-barrier. t only grows, saturating at t_max.
class BarrierSchedule {
  public:
    BarrierSchedule() : BarrierSchedule(1.0, 1.001, 5.0) {}
    BarrierSchedule(double t_init, double growth, double t_max);

    double t_init() const { return t_init_; }
    double growth() const { return growth_; }
    double t_max() const { return t_max_; }
    double current() const { return t_; }

    /// t <- min(t * growth, t_max). Called once per epoch boundary.
    void step();

  private:
    double t_init_;
    double growth_;
    double t_max_;
    double t_;
};

/// Gaussian label-distribution width over label indices.
struct LDConfig {
    double sigma = 1.0;
};

struct MVConfig {
    double lambda1 = 0.2;
    double lambda2 = 0.05;
};

/// Temperature of the Poisson head's softmax.
struct POConfig {
    double tau = 1.0;
};

/// Counts constraint terms as they are emitted; used to instrument PN/ELB.
struct ConstraintTrace {
    std::size_t below = 0;
    std::size_t above = 0;
};

/// -log softmax(s)_y via log-sum-exp.
Var ce_loss(const Var& scores, int label);

/// Elementwise (delta + epsilon)^2 where delta >= 0, else 0.
Var penalty_h(const Var& delta, double epsilon);

/// Elementwise log-barrier extension
///   -(1/t) log(-r)                       if r <= -1/t^2
///   t r - (1/t) log(1/t^2) + 1/t         otherwise.
Var barrier_psi(const Var& r, double t);

/// Length c-1 residuals whose negativity is the constraint set: entries k < y
/// hold s_k - s_{k+1}, entries k >= y hold s_{k+1} - s_k (1-based k).
Var constraint_residuals(const Var& scores, int label);

/// CE + lambda * sum_k H(r_k).
Var pn_loss(const Var& scores, int label, const PenaltyConfig& cfg, ConstraintTrace* trace = nullptr);

/// CE + sum_k psi(r_k; t). The barrier terms carry no weight.
Var elb_loss(const Var& scores, int label, double t, ConstraintTrace* trace = nullptr);

/// Mean squared error against the cumulative target tau_k = [k <= y].
/// `squashed` must already be in (0, 1).
Var ren_loss(const Var& squashed, int label);
/// max(1, #{k : o_k > 0.5}).
int ren_predict(std::span<const double> squashed);

/// Normalized q_k ~ exp(-(k - y)^2 / (2 sigma^2)) over k = 1..c.
std::vector<double> ld_target(int classes, int label, double sigma);
/// KL(q || softmax(s)); zero exactly when the posterior equals the target.
Var ld_loss(const Var& scores, int label, const LDConfig& cfg);

/// CE + lambda1/2 (m - y)^2 + lambda2 v with m, v the posterior mean and variance of the label.
Var mv_loss(const Var& scores, int label, const MVConfig& cfg);

/// Poisson label logits (k log eta - eta - log k!) / tau for k = 1..c.
Var po_logits(const Var& eta, int classes, double tau);
std::vector<double> po_distribution(double eta, int classes, double tau);
/// -log p_y under po_distribution. eta must be positive (DomainError otherwise).
Var po_loss(const Var& eta, int label, int classes, double tau);

/// Arithmetic mean of per-sample losses. Throws UsageError on an empty batch.
Var batch_reduce(std::span<const Var> losses);

/// Everything needed to evaluate one configured loss.
struct LossSettings {
    LossKind kind = LossKind::CE;
    PenaltyConfig penalty;
    BarrierSchedule barrier;
    LDConfig ld;
    MVConfig mv;
    POConfig po;
};

/// Number of raw model outputs a loss consumes: 1 for PO, c otherwise.
std::size_t output_width(LossKind kind, int classes);

/// Per-sample loss for the configured kind. For REN the raw outputs are passed
/// through a logistic unit; for PO `output` is the positive rate. ELB reads
/// the schedule's current temperature.
Var sample_loss(const LossSettings& settings, const Var& output, int label, int classes,
                ConstraintTrace* trace = nullptr);

/// Posterior used for order metrics, plus the kind's prediction rule.
struct Decision {
    std::vector<double> distribution;
    int label = 1;
};

Decision decide(const LossSettings& settings, std::span<const double> output, int classes);

} // namespace unimodal
