// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0

#include "unimodal/diff.hpp"

#include "unimodal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace unimodal {

namespace {

Tape& same_tape(const Var& a, const Var& b)
{
    if (&a.tape() != &b.tape()) {
        throw UsageError("operands live on different tapes");
    }
    return a.tape();
}

std::size_t broadcast_size(const Var& a, const Var& b, const char* op)
{
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    if (na == nb || nb == 1) {
        return na;
    }
    if (na == 1) {
        return nb;
    }
    throw UsageError(std::string(op) + ": shape mismatch " + std::to_string(na) + " vs " +
                     std::to_string(nb));
}

double stable_sigmoid(double x)
{
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace

// ---------------------------------------------------------------------------
// Var

std::size_t Var::size() const
{
    return tape_->nodes_[id_].size;
}

std::span<const double> Var::value() const
{
    return tape_->value(id_);
}

std::span<const double> Var::grad() const
{
    return tape_->grad(id_);
}

double Var::scalar() const
{
    if (size() != 1) {
        throw UsageError("scalar() on a node of length " + std::to_string(size()));
    }
    return value()[0];
}

// ---------------------------------------------------------------------------
// Tape

std::span<const double> Tape::value(NodeId id) const
{
    const Node& n = nodes_[id];
    return {values_.data() + n.offset, n.size};
}

std::span<const double> Tape::grad(NodeId id) const
{
    const Node& n = nodes_[id];
    return {grads_.data() + n.offset, n.size};
}

Var Tape::push(Op op, std::size_t size, bool needs_grad, NodeId a, NodeId b, NodeId c,
               std::uint32_t aux0, std::uint32_t aux1, double param)
{
    const auto offset = static_cast<std::uint32_t>(values_.size());
    values_.resize(values_.size() + size);
    grads_.resize(grads_.size() + size);
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(Node{op, needs_grad, offset, static_cast<std::uint32_t>(size), a, b, c, aux0,
                          aux1, param});
    return Var(this, id);
}

Var Tape::leaf(std::span<const double> value)
{
    Var v = push(Op::Leaf, value.size(), true);
    std::copy(value.begin(), value.end(), val(v.id()));
    return v;
}

Var Tape::constant(std::span<const double> value)
{
    Var v = push(Op::Constant, value.size(), false);
    std::copy(value.begin(), value.end(), val(v.id()));
    return v;
}

void Tape::clear()
{
    nodes_.clear();
    values_.clear();
    grads_.clear();
    extra_parents_.clear();
    visits_ = 0;
    min_margin_ = std::numeric_limits<double>::infinity();
}

void Tape::backward(const Var& root)
{
    if (&root.tape() != this) {
        throw UsageError("backward: root belongs to another tape");
    }
    if (root.size() != 1) {
        throw UsageError("backward: root must be scalar, got length " + std::to_string(root.size()));
    }
    std::fill(grads_.begin(), grads_.end(), 0.0);
    adj(root.id())[0] = 1.0;
    visits_ = 0;
    for (std::int64_t id = root.id(); id >= 0; --id) {
        ++visits_;
        const auto nid = static_cast<NodeId>(id);
        if (nodes_[nid].needs_grad) {
            apply_adjoint(nid);
        }
    }
}

void Tape::apply_adjoint(NodeId id)
{
    const Node n = nodes_[id];
    const double* g = grads_.data() + n.offset;
    const double* y = values_.data() + n.offset;
    const std::size_t len = n.size;

    auto wants = [&](NodeId p) { return nodes_[p].needs_grad; };

    switch (n.op) {
    case Op::Leaf:
    case Op::Constant:
        break;
    case Op::Add:
    case Op::Sub: {
        const double sign = n.op == Op::Sub ? -1.0 : 1.0;
        const bool abc = nodes_[n.a].size == 1 && len > 1;
        const bool bbc = nodes_[n.b].size == 1 && len > 1;
        if (wants(n.a)) {
            double* ga = adj(n.a);
            for (std::size_t i = 0; i < len; ++i) {
                ga[abc ? 0 : i] += g[i];
            }
        }
        if (wants(n.b)) {
            double* gb = adj(n.b);
            for (std::size_t i = 0; i < len; ++i) {
                gb[bbc ? 0 : i] += sign * g[i];
            }
        }
        break;
    }
    case Op::Mul: {
        const bool abc = nodes_[n.a].size == 1 && len > 1;
        const bool bbc = nodes_[n.b].size == 1 && len > 1;
        const double* xa = val(n.a);
        const double* xb = val(n.b);
        if (wants(n.a)) {
            double* ga = adj(n.a);
            for (std::size_t i = 0; i < len; ++i) {
                ga[abc ? 0 : i] += g[i] * xb[bbc ? 0 : i];
            }
        }
        if (wants(n.b)) {
            double* gb = adj(n.b);
            for (std::size_t i = 0; i < len; ++i) {
                gb[bbc ? 0 : i] += g[i] * xa[abc ? 0 : i];
            }
        }
        break;
    }
    case Op::Neg: {
        double* ga = adj(n.a);
        for (std::size_t i = 0; i < len; ++i) {
            ga[i] -= g[i];
        }
        break;
    }
    case Op::Scale: {
        double* ga = adj(n.a);
        for (std::size_t i = 0; i < len; ++i) {
            ga[i] += n.param * g[i];
        }
        break;
    }
    case Op::Shift: {
        double* ga = adj(n.a);
        for (std::size_t i = 0; i < len; ++i) {
            ga[i] += g[i];
        }
        break;
    }
    case Op::Exp: {
        double* ga = adj(n.a);
        for (std::size_t i = 0; i < len; ++i) {
            ga[i] += g[i] * y[i];
        }
        break;
    }
    case Op::Log: {
        double* ga = adj(n.a);
        const double* x = val(n.a);
        for (std::size_t i = 0; i < len; ++i) {
            ga[i] += g[i] / x[i];
        }
        break;
    }
    case Op::Square: {
        double* ga = adj(n.a);
        const double* x = val(n.a);
        for (std::size_t i = 0; i < len; ++i) {
            ga[i] += 2.0 * x[i] * g[i];
        }
        break;
    }
    case Op::MaxConst: {
        double* ga = adj(n.a);
        const double* x = val(n.a);
        for (std::size_t i = 0; i < len; ++i) {
            if (x[i] > n.param) {
                ga[i] += g[i];
            }
        }
        break;
    }
    case Op::MinConst: {
        double* ga = adj(n.a);
        const double* x = val(n.a);
        for (std::size_t i = 0; i < len; ++i) {
            if (x[i] <= n.param) {
                ga[i] += g[i];
            }
        }
        break;
    }
    case Op::Softplus: {
        double* ga = adj(n.a);
        const double* x = val(n.a);
        for (std::size_t i = 0; i < len; ++i) {
            ga[i] += g[i] * stable_sigmoid(x[i]);
        }
        break;
    }
    case Op::Sigmoid: {
        double* ga = adj(n.a);
        for (std::size_t i = 0; i < len; ++i) {
            ga[i] += g[i] * y[i] * (1.0 - y[i]);
        }
        break;
    }
    case Op::Sum: {
        double* ga = adj(n.a);
        const std::size_t m = nodes_[n.a].size;
        for (std::size_t i = 0; i < m; ++i) {
            ga[i] += g[0];
        }
        break;
    }
    case Op::LogSumExp: {
        double* ga = adj(n.a);
        const double* x = val(n.a);
        const std::size_t m = nodes_[n.a].size;
        for (std::size_t i = 0; i < m; ++i) {
            ga[i] += g[0] * std::exp(x[i] - y[0]);
        }
        break;
    }
    case Op::MatVec: {
        const std::size_t rows = n.aux0;
        const std::size_t cols = n.aux1;
        const double* w = val(n.a);
        const double* x = val(n.b);
        if (wants(n.a)) {
            double* gw = adj(n.a);
            for (std::size_t r = 0; r < rows; ++r) {
                const double gr = g[r];
                double* row = gw + r * cols;
                for (std::size_t k = 0; k < cols; ++k) {
                    row[k] += gr * x[k];
                }
            }
        }
        if (wants(n.b)) {
            double* gx = adj(n.b);
            for (std::size_t r = 0; r < rows; ++r) {
                const double gr = g[r];
                const double* row = w + r * cols;
                for (std::size_t k = 0; k < cols; ++k) {
                    gx[k] += gr * row[k];
                }
            }
        }
        break;
    }
    case Op::Pick:
        adj(n.a)[n.aux0] += g[0];
        break;
    case Op::Slice: {
        double* ga = adj(n.a) + n.aux0;
        for (std::size_t i = 0; i < len; ++i) {
            ga[i] += g[i];
        }
        break;
    }
    case Op::AdjacentDiff: {
        double* ga = adj(n.a);
        for (std::size_t i = 0; i < len; ++i) {
            ga[i] += g[i];
            ga[i + 1] -= g[i];
        }
        break;
    }
    case Op::Select: {
        const double* x = val(n.a);
        const bool gl = wants(n.b);
        const bool gr = wants(n.c);
        double* left = gl ? adj(n.b) : nullptr;
        double* right = gr ? adj(n.c) : nullptr;
        for (std::size_t i = 0; i < len; ++i) {
            if (x[i] <= n.param) {
                if (gl) {
                    left[i] += g[i];
                }
            } else if (gr) {
                right[i] += g[i];
            }
        }
        break;
    }
    case Op::Mean: {
        const double share = g[0] / static_cast<double>(n.aux1);
        for (std::uint32_t k = 0; k < n.aux1; ++k) {
            const NodeId p = extra_parents_[n.aux0 + k];
            if (wants(p)) {
                adj(p)[0] += share;
            }
        }
        break;
    }
    }
}

// ---------------------------------------------------------------------------
// Primitive operations

struct TapeAccess {
    static bool needs(const Tape& t, NodeId id) { return t.nodes_[id].needs_grad; }

    static Var push(Tape& t, Op op, std::size_t size, bool needs_grad, NodeId a = 0, NodeId b = 0,
                    NodeId c = 0, std::uint32_t aux0 = 0, std::uint32_t aux1 = 0, double param = 0.0)
    {
        return t.push(op, size, needs_grad, a, b, c, aux0, aux1, param);
    }

    static double* val(Tape& t, NodeId id) { return t.val(id); }

    static void margin(Tape& t, double m) { t.note_margin(m); }

    static std::uint32_t add_parents(Tape& t, std::span<const Var> parents)
    {
        const auto offset = static_cast<std::uint32_t>(t.extra_parents_.size());
        for (const Var& p : parents) {
            t.extra_parents_.push_back(p.id());
        }
        return offset;
    }
};

namespace {

enum class Binary { Add, Sub, Mul };

Var binary(const Var& a, const Var& b, Binary kind)
{
    static constexpr const char* names[] = {"add", "subtract", "multiply"};
    Tape& t = same_tape(a, b);
    const std::size_t n = broadcast_size(a, b, names[static_cast<int>(kind)]);
    const Op op = kind == Binary::Add ? Op::Add : kind == Binary::Sub ? Op::Sub : Op::Mul;
    const bool needs = TapeAccess::needs(t, a.id()) || TapeAccess::needs(t, b.id());
    Var out = TapeAccess::push(t, op, n, needs, a.id(), b.id());
    const double* xa = TapeAccess::val(t, a.id());
    const double* xb = TapeAccess::val(t, b.id());
    double* y = TapeAccess::val(t, out.id());
    const bool abc = a.size() == 1;
    const bool bbc = b.size() == 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = xa[abc ? 0 : i];
        const double v = xb[bbc ? 0 : i];
        y[i] = kind == Binary::Add ? u + v : kind == Binary::Sub ? u - v : u * v;
    }
    return out;
}

template <typename F>
Var unary(const Var& x, Op op, double param, F&& f)
{
    Tape& t = x.tape();
    Var out = TapeAccess::push(t, op, x.size(), TapeAccess::needs(t, x.id()), x.id(), 0, 0, 0, 0,
                               param);
    const double* in = TapeAccess::val(t, x.id());
    double* y = TapeAccess::val(t, out.id());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = f(in[i]);
    }
    return out;
}

} // namespace

Var operator+(const Var& a, const Var& b)
{
    return binary(a, b, Binary::Add);
}

Var operator-(const Var& a, const Var& b)
{
    return binary(a, b, Binary::Sub);
}

Var operator*(const Var& a, const Var& b)
{
    return binary(a, b, Binary::Mul);
}

Var operator-(const Var& a)
{
    return unary(a, Op::Neg, 0.0, [](double v) { return -v; });
}

Var operator*(const Var& a, double k)
{
    return unary(a, Op::Scale, k, [k](double v) { return k * v; });
}

Var operator*(double k, const Var& a)
{
    return a * k;
}

Var operator+(const Var& a, double k)
{
    return unary(a, Op::Shift, k, [k](double v) { return v + k; });
}

Var operator+(double k, const Var& a)
{
    return a + k;
}

Var operator-(const Var& a, double k)
{
    return a + (-k);
}

Var operator-(double k, const Var& a)
{
    return (-a) + k;
}

Var exp(const Var& x)
{
    return unary(x, Op::Exp, 0.0, [](double v) { return std::exp(v); });
}

Var log(const Var& x)
{
    const auto in = x.value();
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (!(in[i] > 0.0)) {
            throw DomainError("log: non-positive input " + std::to_string(in[i]) + " at node " +
                              std::to_string(x.id()) + " (element " + std::to_string(i) + ")");
        }
    }
    return unary(x, Op::Log, 0.0, [](double v) { return std::log(v); });
}

Var square(const Var& x)
{
    return unary(x, Op::Square, 0.0, [](double v) { return v * v; });
}

Var maximum(const Var& x, double k)
{
    for (double v : x.value()) {
        TapeAccess::margin(x.tape(), std::abs(v - k));
    }
    return unary(x, Op::MaxConst, k, [k](double v) { return v > k ? v : k; });
}

Var minimum(const Var& x, double k)
{
    for (double v : x.value()) {
        TapeAccess::margin(x.tape(), std::abs(v - k));
    }
    return unary(x, Op::MinConst, k, [k](double v) { return v <= k ? v : k; });
}

Var softplus(const Var& x)
{
    return unary(x, Op::Softplus, 0.0,
                 [](double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); });
}

Var sigmoid(const Var& x)
{
    return unary(x, Op::Sigmoid, 0.0, stable_sigmoid);
}

Var sum(const Var& x)
{
    Tape& t = x.tape();
    Var out = TapeAccess::push(t, Op::Sum, 1, TapeAccess::needs(t, x.id()), x.id());
    double acc = 0.0;
    for (double v : x.value()) {
        acc += v;
    }
    TapeAccess::val(t, out.id())[0] = acc;
    return out;
}

Var log_sum_exp(const Var& x)
{
    if (x.size() == 0) {
        throw UsageError("log_sum_exp: empty input");
    }
    Tape& t = x.tape();
    Var out = TapeAccess::push(t, Op::LogSumExp, 1, TapeAccess::needs(t, x.id()), x.id());
    const auto in = x.value();
    const double m = *std::max_element(in.begin(), in.end());
    double acc = 0.0;
    for (double v : in) {
        acc += std::exp(v - m);
    }
    TapeAccess::val(t, out.id())[0] = m + std::log(acc);
    return out;
}

Var matvec(const Var& matrix, const Var& x, std::size_t rows, std::size_t cols)
{
    Tape& t = same_tape(matrix, x);
    if (matrix.size() != rows * cols || x.size() != cols) {
        throw UsageError("matvec: expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " matrix and length-" + std::to_string(cols) + " vector, got " +
                         std::to_string(matrix.size()) + " and " + std::to_string(x.size()));
    }
    const bool needs = TapeAccess::needs(t, matrix.id()) || TapeAccess::needs(t, x.id());
    Var out = TapeAccess::push(t, Op::MatVec, rows, needs, matrix.id(), x.id(), 0,
                               static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(cols));
    const double* w = TapeAccess::val(t, matrix.id());
    const double* v = TapeAccess::val(t, x.id());
    double* y = TapeAccess::val(t, out.id());
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = w + r * cols;
        double acc = 0.0;
        for (std::size_t k = 0; k < cols; ++k) {
            acc += row[k] * v[k];
        }
        y[r] = acc;
    }
    return out;
}

Var pick(const Var& x, std::size_t index)
{
    if (index >= x.size()) {
        throw UsageError("pick: index " + std::to_string(index) + " out of range for length " +
                         std::to_string(x.size()));
    }
    Tape& t = x.tape();
    Var out = TapeAccess::push(t, Op::Pick, 1, TapeAccess::needs(t, x.id()), x.id(), 0, 0,
                               static_cast<std::uint32_t>(index));
    TapeAccess::val(t, out.id())[0] = x.value()[index];
    return out;
}

Var slice(const Var& x, std::size_t offset, std::size_t length)
{
    if (offset + length > x.size()) {
        throw UsageError("slice: [" + std::to_string(offset) + ", " +
                         std::to_string(offset + length) + ") exceeds length " +
                         std::to_string(x.size()));
    }
    Tape& t = x.tape();
    Var out = TapeAccess::push(t, Op::Slice, length, TapeAccess::needs(t, x.id()), x.id(), 0, 0,
                               static_cast<std::uint32_t>(offset));
    const double* in = TapeAccess::val(t, x.id()) + offset;
    std::copy(in, in + length, TapeAccess::val(t, out.id()));
    return out;
}

Var adjacent_diff(const Var& x)
{
    if (x.size() < 2) {
        throw UsageError("adjacent_diff: need at least 2 entries, got " + std::to_string(x.size()));
    }
    Tape& t = x.tape();
    const std::size_t n = x.size() - 1;
    Var out = TapeAccess::push(t, Op::AdjacentDiff, n, TapeAccess::needs(t, x.id()), x.id());
    const double* in = TapeAccess::val(t, x.id());
    double* y = TapeAccess::val(t, out.id());
    for (std::size_t k = 0; k < n; ++k) {
        y[k] = in[k] - in[k + 1];
    }
    return out;
}

Var mean(std::span<const Var> scalars)
{
    if (scalars.empty()) {
        throw UsageError("mean: empty batch");
    }
    Tape& t = scalars.front().tape();
    bool needs = false;
    double acc = 0.0;
    for (const Var& s : scalars) {
        if (&s.tape() != &t) {
            throw UsageError("mean: operands live on different tapes");
        }
        if (s.size() != 1) {
            throw UsageError("mean: expected scalars, got length " + std::to_string(s.size()));
        }
        needs = needs || TapeAccess::needs(t, s.id());
        acc += s.value()[0];
    }
    const std::uint32_t offset = TapeAccess::add_parents(t, scalars);
    Var out = TapeAccess::push(t, Op::Mean, 1, needs, 0, 0, 0, offset,
                               static_cast<std::uint32_t>(scalars.size()));
    TapeAccess::val(t, out.id())[0] = acc / static_cast<double>(scalars.size());
    return out;
}

Var piecewise(const Var& x, double threshold, const std::function<Var(const Var&)>& left,
              const std::function<Var(const Var&)>& right)
{
    Tape& t = x.tape();
    const Var lo = left(minimum(x, threshold));
    const Var hi = right(maximum(x, threshold));
    if (lo.size() != x.size() || hi.size() != x.size()) {
        throw UsageError("piecewise: branch results must match the input length");
    }
    const bool needs = TapeAccess::needs(t, lo.id()) || TapeAccess::needs(t, hi.id());
    Var out = TapeAccess::push(t, Op::Select, x.size(), needs, x.id(), lo.id(), hi.id(), 0, 0,
                               threshold);
    const auto in = x.value();
    const auto lv = lo.value();
    const auto hv = hi.value();
    double* y = TapeAccess::val(t, out.id());
    for (std::size_t i = 0; i < in.size(); ++i) {
        y[i] = in[i] <= threshold ? lv[i] : hv[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Finite-difference oracle

GradientCheckResult check_gradient(const TapeFunction& f, std::span<const double> x, double step,
                                   std::span<const std::size_t> indices)
{
    GradientCheckResult result;
    Tape tape;
    {
        const Var input = tape.leaf(x);
        const Var root = f(tape, input);
        tape.backward(root);
        const auto g = input.grad();
        result.analytic.assign(g.begin(), g.end());
        result.branch_margin = tape.min_branch_margin();
    }

    std::vector<std::size_t> probe(indices.begin(), indices.end());
    if (probe.empty()) {
        probe.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            probe[i] = i;
        }
    }

    std::vector<double> point(x.begin(), x.end());
    auto evaluate = [&](std::size_t i, double delta) {
        point[i] = x[i] + delta;
        tape.clear();
        double v = 0.0;
        try {
            v = f(tape, tape.leaf(point)).scalar();
        } catch (const DomainError& e) {
            throw DomainError("probe " + std::to_string(i) + ": " + e.what());
        } catch (const UsageError& e) {
            throw UsageError("probe " + std::to_string(i) + ": " + e.what());
        } catch (const std::exception& e) {
            throw std::runtime_error("probe " + std::to_string(i) + ": " + e.what());
        }
        point[i] = x[i];
        return v;
    };

    result.central.assign(x.size(), 0.0);
    for (std::size_t i : probe) {
        if (i >= x.size()) {
            throw UsageError("check_gradient: probe index " + std::to_string(i) + " out of range");
        }
        const double fd = (evaluate(i, step) - evaluate(i, -step)) / (2.0 * step);
        result.central[i] = fd;
        const double err = std::abs(result.analytic[i] - fd) / std::max(1.0, std::abs(fd));
        if (err > result.max_relative_error || !std::isfinite(err)) {
            result.max_relative_error = err;
            result.worst_index = i;
        }
    }
    return result;
}

double finite_difference_check(const TapeFunction& f, std::span<const double> x, double step)
{
    return check_gradient(f, x, step).max_relative_error;
}

} // namespace unimodal
