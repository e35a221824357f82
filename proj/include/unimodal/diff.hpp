// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal tape-based reverse-mode differentiation over dense real vectors.
//
// Every node holds a vector value (scalars are vectors of length 1). Nodes are
// appended to a Tape during forward evaluation; backward() walks the tape in
// reverse insertion order, which is a reverse topological order because a node
// can only reference nodes recorded before it.
//
// Broadcasting is limited to scalar-with-vector in the binary elementwise ops.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace unimodal {

using NodeId = std::uint32_t;

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid until the tape is cleared.
class Var {
  public:
    Var() = default;
    Var(Tape* tape, NodeId id) : tape_(tape), id_(id) {}

    Tape& tape() const { return *tape_; }
    NodeId id() const { return id_; }
    std::size_t size() const;
    std::span<const double> value() const;
    std::span<const double> grad() const;
    /// Value of a length-1 node. Throws UsageError otherwise.
    double scalar() const;

  private:
    Tape* tape_ = nullptr;
    NodeId id_ = 0;
};

enum class Op : std::uint8_t {
    Leaf,
    Constant,
    Add,
    Sub,
    Mul,
    Neg,
    Scale,
    Shift,
    Exp,
    Log,
    Square,
    MaxConst,
    MinConst,
    Softplus,
    Sigmoid,
    Sum,
    LogSumExp,
    MatVec,
    Pick,
    Slice,
    AdjacentDiff,
    Select,
    Mean,
};

class Tape {
  public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Differentiable input.
    Var leaf(std::span<const double> value);
    Var leaf(std::initializer_list<double> value) { return leaf(std::span<const double>(value.begin(), value.size())); }
    Var leaf(double value) { return leaf(std::span<const double>(&value, 1)); }
    /// Non-differentiable input; backward never writes into it.
    Var constant(std::span<const double> value);
    Var constant(std::initializer_list<double> value) { return constant(std::span<const double>(value.begin(), value.size())); }
    Var constant(double value) { return constant(std::span<const double>(&value, 1)); }

    /// Seeds d(root)/d(root) = 1 and propagates adjoints. root must be scalar.
    void backward(const Var& root);

    /// Drops all nodes; keeps allocated capacity.
    void clear();

    std::size_t size() const { return nodes_.size(); }
    Op op(NodeId id) const { return nodes_[id].op; }
    std::span<const double> value(NodeId id) const;
    std::span<const double> grad(NodeId id) const;

    /// Number of node adjoint rules applied by the last backward() call.
    std::size_t last_backward_visits() const { return visits_; }

    /// Smallest distance between a branch input and its breakpoint seen since the
    /// last clear(), over Select, MaxConst and MinConst nodes. +inf if none.
    double min_branch_margin() const { return min_margin_; }

  private:
    friend class Var;
    friend struct TapeAccess;

    struct Node {
        Op op;
        bool needs_grad;
        std::uint32_t offset;
        std::uint32_t size;
        NodeId a;
        NodeId b;
        NodeId c;
        std::uint32_t aux0; // rows, index, slice offset, extra-parent offset
        std::uint32_t aux1; // cols, extra-parent count
        double param;       // constant operand, threshold
    };

    Var push(Op op, std::size_t size, bool needs_grad, NodeId a = 0, NodeId b = 0, NodeId c = 0,
             std::uint32_t aux0 = 0, std::uint32_t aux1 = 0, double param = 0.0);
    double* val(NodeId id) { return values_.data() + nodes_[id].offset; }
    double* adj(NodeId id) { return grads_.data() + nodes_[id].offset; }
    void note_margin(double m) {
        if (m < min_margin_) {
            min_margin_ = m;
        }
    }
    void apply_adjoint(NodeId id);

    std::vector<Node> nodes_;
    std::vector<double> values_;
    std::vector<double> grads_;
    std::vector<NodeId> extra_parents_;
    std::size_t visits_ = 0;
    double min_margin_ = std::numeric_limits<double>::infinity();
};

// Elementwise arithmetic. Operands must have equal length, or one must be scalar.
Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator-(const Var& a);
Var operator*(const Var& a, double k);
Var operator*(double k, const Var& a);
Var operator+(const Var& a, double k);
Var operator+(double k, const Var& a);
Var operator-(const Var& a, double k);
Var operator-(double k, const Var& a);

Var exp(const Var& x);
/// Throws DomainError naming the node and element when any entry is <= 0.
Var log(const Var& x);
Var square(const Var& x);
/// max(x, k) elementwise. At x == k the gradient goes to the constant (zero).
Var maximum(const Var& x, double k);
/// min(x, k) elementwise. At x == k the gradient passes through to x.
Var minimum(const Var& x, double k);
/// log(1 + exp(x)), overflow-free.
Var softplus(const Var& x);
Var sigmoid(const Var& x);

Var sum(const Var& x);
/// log(sum(exp(x))) with the maximum subtracted before exponentiation.
Var log_sum_exp(const Var& x);
/// Row-major (rows x cols) matrix times a length-cols vector.
Var matvec(const Var& matrix, const Var& x, std::size_t rows, std::size_t cols);
/// Element i (0-based) as a scalar.
Var pick(const Var& x, std::size_t index);
Var slice(const Var& x, std::size_t offset, std::size_t length);
/// Fixed [+1, -1] slide: out[k] = x[k] - x[k+1], length n-1. Requires n >= 2.
Var adjacent_diff(const Var& x);
/// Mean of scalars. Requires a non-empty span.
Var mean(std::span<const Var> scalars);

/// Elementwise branch selection: out[i] = x[i] <= threshold ? left(x)[i] : right(x)[i].
///
/// left receives min(x, threshold) and right receives max(x, threshold), so each
/// branch is only ever evaluated inside its own domain. At the breakpoint the
/// left branch is taken and differentiated.
Var piecewise(const Var& x, double threshold, const std::function<Var(const Var&)>& left,
              const std::function<Var(const Var&)>& right);

/// Scalar function of a parameter vector, expressed on a tape.
using TapeFunction = std::function<Var(Tape&, const Var&)>;

struct GradientCheckResult {
    /// max_i |analytic_i - central_i| / max(1, |central_i|)
    double max_relative_error = 0.0;
    std::size_t worst_index = 0;
    std::vector<double> analytic;
    std::vector<double> central;
    /// Branch margin observed at the unperturbed point.
    double branch_margin = std::numeric_limits<double>::infinity();
};

/// Compares backward() against central differences with the given step. When
/// `indices` is non-empty only those coordinates are probed. Failures while
/// evaluating a probe point are rethrown as DomainError/UsageError carrying the
/// probe index in the message.
GradientCheckResult check_gradient(const TapeFunction& f, std::span<const double> x, double step,
                                   std::span<const std::size_t> indices = {});

/// Convenience form returning only the maximum relative error.
double finite_difference_check(const TapeFunction& f, std::span<const double> x, double step);

} // namespace unimodal
