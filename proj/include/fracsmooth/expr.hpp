#pragma once

// Bivariate expressions f(x, y): parsing, evaluation, symbolic and
// truncated-Taylor differentiation.
//
// Grammar (whitespace is ignored between tokens):
//
//   expr    := term   { ("+" | "-") term }
//   term    := unary  { ("*" | "/") unary }
//   unary   := "-" unary | power
//   power   := primary [ "^" unary ]          (right associative)
//   primary := number | "x" | "y" | func "(" expr ")" | "(" expr ")"
//   func    := "sin" | "cos" | "exp" | "log" | "sqrt"
//   number  := digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
//
// The exponent of "^" must not depend on x or y.

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fracsmooth {

enum class Op { Const, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Sqrt };

enum class Var { X, Y };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op;
    double value = 0.0;  // Const only
    NodePtr lhs;         // unary operand or left operand
    NodePtr rhs;         // right operand of binary ops
};

/// Immutable expression tree. Copies share structure.
class Expr {
public:
    Expr();  // the constant 0
    explicit Expr(NodePtr root);

    static Expr constant(double v);
    static Expr var(Var v);

    [[nodiscard]] const Node& root() const { return *root_; }
    [[nodiscard]] const NodePtr& ptr() const { return root_; }
    [[nodiscard]] Op op() const { return root_->op; }

    /// True when the tree contains neither x nor y.
    [[nodiscard]] bool is_constant() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    NodePtr root_;
};

/// Builders with light constant folding (0 + a = a, 1 * a = a, ...).
Expr make_add(const Expr& a, const Expr& b);
Expr make_sub(const Expr& a, const Expr& b);
Expr make_mul(const Expr& a, const Expr& b);
Expr make_div(const Expr& a, const Expr& b);
Expr make_pow(const Expr& base, double exponent);
Expr make_neg(const Expr& a);
Expr make_call(Op fn, const Expr& arg);

/// Throws ParseError with the byte offset of the first bad token.
Expr parse(std::string_view source);

/// Fully parenthesised text that parses back to a structurally equal tree.
std::string to_string(const Expr& e);

/// Throws DomainError on log/sqrt of an invalid argument, division by zero,
/// or a non-finite result.
double eval(const Expr& f, double x, double y);

/// Symbolic derivative with respect to one variable.
Expr differentiate(const Expr& f, Var v);

/// Highest total differentiation order accepted by the Taylor engine.
inline constexpr int kMaxDiffOrder = 32;

/// Truncated bivariate Taylor expansion of f around (x, y):
///   coeff(p, q) = d^p/dx^p d^q/dy^q f(x, y) / (p! q!),  p + q <= order.
class TaylorJet {
public:
    explicit TaylorJet(int order);

    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] double coeff(int p, int q) const { return c_[index(p, q)]; }
    double& coeff(int p, int q) { return c_[index(p, q)]; }

    /// The partial derivative d^p_x d^q_y f, i.e. coeff(p, q) * p! * q!.
    [[nodiscard]] double partial(int p, int q) const;

    [[nodiscard]] static std::size_t index(int p, int q) {
        const auto d = static_cast<std::size_t>(p + q);
        return d * (d + 1) / 2 + static_cast<std::size_t>(q);
    }
    [[nodiscard]] std::size_t size() const { return c_.size(); }
    [[nodiscard]] const std::vector<double>& raw() const { return c_; }
    std::vector<double>& raw() { return c_; }

private:
    int order_;
    std::vector<double> c_;
};

/// Taylor expansion of f at (x, y) to total order `order`; exact up to
/// rounding. Throws DomainError where f is not smooth.
TaylorJet taylor_expand(const Expr& f, double x, double y, int order);

/// d^p/dx^p d^q/dy^q f(x, y).
double mixed_partial(const Expr& f, int p, int q, double x, double y);

/// All partials d^p_x d^q_y f(0, c0) with p + q <= n.
class DerivTable {
public:
    DerivTable() = default;
    DerivTable(int n, double c0, std::map<std::pair<int, int>, double> entries);

    [[nodiscard]] int order() const { return n_; }
    [[nodiscard]] double c0() const { return c0_; }
    /// Throws ConfigError if (p, q) is outside the table.
    [[nodiscard]] double at(int p, int q) const;
    [[nodiscard]] const std::map<std::pair<int, int>, double>& entries() const { return entries_; }

private:
    int n_ = 0;
    double c0_ = 0.0;
    std::map<std::pair<int, int>, double> entries_;
};

DerivTable derivative_table(const Expr& f, int n, double c0);

/// Max of |d^p_x d^q_y f| over p + q <= n on a grid x grid tensor sample of
/// [0, a] x [c0 - b, c0 + b], corners included. A lower estimate of the true
/// supremum.
double estimate_bound_M(const Expr& f, int n, double a, double c0, double b, int grid = 33);

}  // namespace fracsmooth
