// Truncated bivariate Taylor arithmetic. Elementary functions use the Euler
// operator E = dx d/ddx + dy d/ddy, which multiplies a homogeneous component of
// degree d by d; e.g. h = exp(a) satisfies E h = h E a, giving a recurrence in
// the total degree.

#include "fracsmooth/error.hpp"
#include "fracsmooth/expr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fracsmooth {

namespace {

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

using Jet = TaylorJet;

// Visits every (i, j) <= (p, q) componentwise.
template <class F>
void for_each_below(int p, int q, F&& fn) {
    for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= q; ++j) fn(i, j);
}

Jet constant_jet(int order, double v) {
    Jet r(order);
    r.coeff(0, 0) = v;
    return r;
}

Jet add(const Jet& a, const Jet& b, double sign) {
    Jet r = a;
    for (std::size_t k = 0; k < r.size(); ++k) r.raw()[k] += sign * b.raw()[k];
    return r;
}

Jet mul(const Jet& a, const Jet& b) {
    const int n = a.order();
    Jet r(n);
    for (int d = 0; d <= n; ++d)
        for (int q = 0; q <= d; ++q) {
            const int p = d - q;
            double s = 0.0;
            for_each_below(p, q, [&](int i, int j) { s += a.coeff(i, j) * b.coeff(p - i, q - j); });
            r.coeff(p, q) = s;
        }
    return r;
}

Jet div(const Jet& a, const Jet& b) {
    const double b0 = b.coeff(0, 0);
    if (b0 == 0.0) throw DomainError("division by zero");
    const int n = a.order();
    Jet r(n);
    for (int d = 0; d <= n; ++d)
        for (int q = 0; q <= d; ++q) {
            const int p = d - q;
            double s = a.coeff(p, q);
            for_each_below(p, q, [&](int i, int j) {
                if (i + j > 0) s -= b.coeff(i, j) * r.coeff(p - i, q - j);
            });
            r.coeff(p, q) = s / b0;
        }
    return r;
}

Jet exp_jet(const Jet& a) {
    const int n = a.order();
    Jet h(n);
    h.coeff(0, 0) = std::exp(a.coeff(0, 0));
    for (int d = 1; d <= n; ++d)
        for (int q = 0; q <= d; ++q) {
            const int p = d - q;
            double s = 0.0;
            for_each_below(p, q, [&](int i, int j) {
                if (i + j > 0) s += (i + j) * a.coeff(i, j) * h.coeff(p - i, q - j);
            });
            h.coeff(p, q) = s / d;
        }
    return h;
}

Jet log_jet(const Jet& a) {
    const double a0 = a.coeff(0, 0);
    if (a0 <= 0.0) throw DomainError("log of a non-positive number");
    const int n = a.order();
    Jet h(n);
    h.coeff(0, 0) = std::log(a0);
    for (int d = 1; d <= n; ++d)
        for (int q = 0; q <= d; ++q) {
            const int p = d - q;
            double s = d * a.coeff(p, q);
            for_each_below(p, q, [&](int i, int j) {
                if (i + j > 0 && i + j < d) s -= (i + j) * h.coeff(i, j) * a.coeff(p - i, q - j);
            });
            h.coeff(p, q) = s / (d * a0);
        }
    return h;
}

void sin_cos_jet(const Jet& a, Jet& s, Jet& c) {
    const int n = a.order();
    s = Jet(n);
    c = Jet(n);
    s.coeff(0, 0) = std::sin(a.coeff(0, 0));
    c.coeff(0, 0) = std::cos(a.coeff(0, 0));
    for (int d = 1; d <= n; ++d)
        for (int q = 0; q <= d; ++q) {
            const int p = d - q;
            double ss = 0.0, cc = 0.0;
            for_each_below(p, q, [&](int i, int j) {
                if (i + j == 0) return;
                const double ea = (i + j) * a.coeff(i, j);
                ss += ea * c.coeff(p - i, q - j);
                cc -= ea * s.coeff(p - i, q - j);
            });
            s.coeff(p, q) = ss / d;
            c.coeff(p, q) = cc / d;
        }
}

Jet int_pow(const Jet& a, long k) {
    Jet result = constant_jet(a.order(), 1.0);
    Jet base = a;
    while (k > 0) {
        if (k & 1) result = mul(result, base);
        k >>= 1;
        if (k) base = mul(base, base);
    }
    return result;
}

Jet pow_jet(const Jet& a, double r) {
    const int n = a.order();
    const double a0 = a.coeff(0, 0);
    if (r == std::floor(r) && std::abs(r) < 1e6) {
        const long k = static_cast<long>(r);
        if (k >= 0) return int_pow(a, k);
        return div(constant_jet(n, 1.0), int_pow(a, -k));
    }
    if (a0 < 0.0) throw DomainError("negative base with non-integer exponent");
    if (a0 == 0.0) {
        if (r < 0.0) throw DomainError("zero raised to a negative power");
        if (n > 0) throw DomainError("non-integer power is not differentiable at zero");
        return constant_jet(n, 0.0);
    }
    // a E h = r h E a
    Jet h(n);
    h.coeff(0, 0) = std::pow(a0, r);
    for (int d = 1; d <= n; ++d)
        for (int q = 0; q <= d; ++q) {
            const int p = d - q;
            double s = 0.0;
            for_each_below(p, q, [&](int i, int j) {
                const int e = i + j;
                if (e == 0) return;
                s += r * e * a.coeff(i, j) * h.coeff(p - i, q - j);
                if (e < d) s -= e * h.coeff(i, j) * a.coeff(p - i, q - j);
            });
            h.coeff(p, q) = s / (d * a0);
        }
    return h;
}

Jet expand(const Node& nd, double x, double y, int order) {
    switch (nd.op) {
        case Op::Const: return constant_jet(order, nd.value);
        case Op::VarX: {
            Jet r = constant_jet(order, x);
            if (order > 0) r.coeff(1, 0) = 1.0;
            return r;
        }
        case Op::VarY: {
            Jet r = constant_jet(order, y);
            if (order > 0) r.coeff(0, 1) = 1.0;
            return r;
        }
        case Op::Add: return add(expand(*nd.lhs, x, y, order), expand(*nd.rhs, x, y, order), 1.0);
        case Op::Sub: return add(expand(*nd.lhs, x, y, order), expand(*nd.rhs, x, y, order), -1.0);
        case Op::Mul: return mul(expand(*nd.lhs, x, y, order), expand(*nd.rhs, x, y, order));
        case Op::Div: return div(expand(*nd.lhs, x, y, order), expand(*nd.rhs, x, y, order));
        case Op::Pow: return pow_jet(expand(*nd.lhs, x, y, order), eval(Expr(nd.rhs), 0.0, 0.0));
        case Op::Neg: {
            Jet r = expand(*nd.lhs, x, y, order);
            for (double& v : r.raw()) v = -v;
            return r;
        }
        case Op::Sin:
        case Op::Cos: {
            Jet s(order), c(order);
            sin_cos_jet(expand(*nd.lhs, x, y, order), s, c);
            return nd.op == Op::Sin ? s : c;
        }
        case Op::Exp: return exp_jet(expand(*nd.lhs, x, y, order));
        case Op::Log: return log_jet(expand(*nd.lhs, x, y, order));
        case Op::Sqrt: {
            Jet a = expand(*nd.lhs, x, y, order);
            if (a.coeff(0, 0) < 0.0) throw DomainError("sqrt of a negative number");
            if (a.coeff(0, 0) == 0.0 && order > 0) throw DomainError("sqrt is not differentiable at zero");
            return pow_jet(a, 0.5);
        }
    }
    throw Error("corrupt expression node");
}

}  // namespace

TaylorJet::TaylorJet(int order) : order_(order) {
    if (order < 0) throw ConfigError("Taylor order must be non-negative");
    c_.assign(index(0, order) + 1, 0.0);
}

double TaylorJet::partial(int p, int q) const { return coeff(p, q) * factorial(p) * factorial(q); }

TaylorJet taylor_expand(const Expr& f, double x, double y, int order) {
    if (order > kMaxDiffOrder)
        throw ConfigError("differentiation depth " + std::to_string(order) + " exceeds the supported maximum " +
                          std::to_string(kMaxDiffOrder));
    TaylorJet r = expand(f.root(), x, y, order);
    for (double v : r.raw())
        if (!std::isfinite(v)) throw DomainError("non-finite Taylor coefficient");
    return r;
}

double mixed_partial(const Expr& f, int p, int q, double x, double y) {
    if (p < 0 || q < 0) throw ConfigError("derivative orders must be non-negative");
    return taylor_expand(f, x, y, p + q).partial(p, q);
}

DerivTable::DerivTable(int n, double c0, std::map<std::pair<int, int>, double> entries)
    : n_(n), c0_(c0), entries_(std::move(entries)) {
    for (int d = 0; d <= n_; ++d)
        for (int q = 0; q <= d; ++q)
            if (!entries_.count({d - q, q})) throw ConfigError("derivative table is incomplete");
}

double DerivTable::at(int p, int q) const {
    const auto it = entries_.find({p, q});
    if (it == entries_.end())
        throw ConfigError("derivative (" + std::to_string(p) + "," + std::to_string(q) + ") is not in the table");
    return it->second;
}

DerivTable derivative_table(const Expr& f, int n, double c0) {
    if (n < 1) throw ConfigError("derivative table order must be positive");
    const TaylorJet jet = taylor_expand(f, 0.0, c0, n);
    std::map<std::pair<int, int>, double> entries;
    for (int d = 0; d <= n; ++d)
        for (int q = 0; q <= d; ++q) entries[{d - q, q}] = jet.partial(d - q, q);
    // The (0,0) entry must be the plain value; the jet's constant term is computed
    // by the same floating operations as eval, so this is an exact copy.
    entries[{0, 0}] = eval(f, 0.0, c0);
    return DerivTable(n, c0, std::move(entries));
}

double estimate_bound_M(const Expr& f, int n, double a, double c0, double b, int grid) {
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("a and b must be positive");
    if (grid < 2) throw ConfigError("grid must be at least 2");
    if (n < 0) throw ConfigError("n must be non-negative");
    double best = 0.0;
    for (int ix = 0; ix < grid; ++ix) {
        const double x = ix == grid - 1 ? a : a * ix / (grid - 1);
        for (int iy = 0; iy < grid; ++iy) {
            const double y = iy == grid - 1 ? c0 + b : (c0 - b) + 2.0 * b * iy / (grid - 1);
            const TaylorJet jet = taylor_expand(f, x, y, n);
            for (int d = 0; d <= n; ++d)
                for (int q = 0; q <= d; ++q) best = std::max(best, std::abs(jet.partial(d - q, q)));
        }
    }
    return best;
}

}  // namespace fracsmooth
