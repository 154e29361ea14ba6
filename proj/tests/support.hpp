#pragma once
// Independent oracles and random generators shared by the unit tests and the
// acceptance binary. Nothing here calls into the code it is used to check.

#include "fracsmooth/expr.hpp"
#include "fracsmooth/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testsupport {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline bool close_rel(double got, double want, double rel) {
    return std::abs(got - want) <= rel * std::max(1.0, std::abs(want));
}

// ---- lattice -------------------------------------------------------------

// Numerators (over q) of all i + j p/q in (0, m), by a plain double loop.
struct BruteLattice {
    int m = 0;
    std::vector<std::int64_t> numerators;  // sorted, distinct
};

inline BruteLattice brute_lattice(std::int64_t p, std::int64_t q, int n) {
    BruteLattice out;
    // largest k with k < n p / q, i.e. k q < n p
    while (static_cast<std::int64_t>(out.m + 1) * q < n * p) ++out.m;
    std::set<std::int64_t> seen;
    const std::int64_t limit = static_cast<std::int64_t>(out.m) * q;
    const std::int64_t bound = 4 * n * q / p + 4;  // i, j <= 4n/alpha
    for (std::int64_t i = 0; i <= bound; ++i)
        for (std::int64_t j = 0; j <= bound; ++j) {
            const std::int64_t v = i * q + j * p;
            if (v > 0 && v < limit) seen.insert(v);
        }
    out.numerators.assign(seen.begin(), seen.end());
    return out;
}

// ---- finite differences --------------------------------------------------

// Weights of the central stencil for the order-d derivative with step 1,
// as (offset, weight) pairs; error O(h^2).
inline std::vector<std::pair<int, double>> central_stencil(int d) {
    switch (d) {
    case 0: return {{0, 1.0}};
    case 1: return {{-1, -0.5}, {1, 0.5}};
    case 2: return {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
    case 3: return {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
    default: return {};
    }
}

// Tensor-product central differences with two Richardson steps
// (h, h/2, h/4), giving an O(h^6) estimate of d^p_x d^q_y g(x, y).
inline double fd_partial(const std::function<double(double, double)>& g, int p, int q, double x, double y,
                         double h = 2e-2) {
    auto raw = [&](double step) {
        double s = 0.0;
        for (const auto& [ox, wx] : central_stencil(p))
            for (const auto& [oy, wy] : central_stencil(q)) s += wx * wy * g(x + ox * step, y + oy * step);
        return s / std::pow(step, p + q);
    };
    const double d1 = raw(h), d2 = raw(h / 2), d4 = raw(h / 4);
    const double r1 = (4.0 * d2 - d1) / 3.0, r2 = (4.0 * d4 - d2) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

// ---- random expressions --------------------------------------------------

// Smooth random expressions over [-1, 1]^2: polynomials with sin/cos/exp and a
// few guarded log/sqrt/division forms that stay well away from singularities.
class ExprGen {
public:
    explicit ExprGen(std::uint64_t seed) : rng_(seed) {}

    std::string operator()(int depth = 3) { return node(depth); }

    std::mt19937_64& rng() { return rng_; }

private:
    std::string constant() {
        std::uniform_int_distribution<int> d(-8, 8);
        int v = d(rng_);
        if (v == 0) v = 1;
        const std::string s = num(v / 4.0);
        return v < 0 ? "(" + s + ")" : s;
    }

    std::string leaf() {
        std::uniform_int_distribution<int> d(0, 3);
        switch (d(rng_)) {
        case 0: return "x";
        case 1: return "y";
        case 2: return "(x*y)";
        default: return constant();
        }
    }

    std::string node(int depth) {
        if (depth == 0) return leaf();
        std::uniform_int_distribution<int> d(0, 11);
        const std::string a = node(depth - 1);
        switch (d(rng_)) {
        case 0: return "(" + a + " + " + node(depth - 1) + ")";
        case 1: return "(" + a + " - " + node(depth - 1) + ")";
        case 2:
        case 3: return "(" + a + " * " + node(depth - 1) + ")";
        case 4: return "sin(" + a + ")";
        case 5: return "cos(" + a + ")";
        case 6: return "exp(0.5*sin(" + a + "))";
        case 7: return "(" + a + ")^2";
        case 8: return "log(2 + sin(" + a + "))";
        case 9: return "sqrt(1 + (" + a + ")^2)";
        case 10: return "(" + a + ")/(2 + cos(" + node(depth - 1) + "))";
        default: return "(" + a + ")^3";
        }
    }

    std::mt19937_64 rng_;
};

// ---- random polynomial problems -----------------------------------------

struct PolyProblem {
    std::int64_t p = 1, q = 2;  // alpha = p/q
    int n = 2;
    int m = 0;
    double c0 = 0.0;
    // a[i][k] multiplies x^i (y - c0)^k
    double a[4][4] = {};
    std::string text;

    // d^i_x d^k_y f(0, c0) = i! k! a[i][k]
    [[nodiscard]] double partial(int i, int k) const {
        if (i > 3 || k > 3) return 0.0;
        return std::tgamma(i + 1.0) * std::tgamma(k + 1.0) * a[i][k];
    }
    // true when d^i_x f(0, c0) = 0 for all i < m
    [[nodiscard]] bool condition() const {
        for (int i = 0; i < m && i <= 3; ++i)
            if (a[i][0] != 0.0) return false;
        return true;
    }
};

inline std::string poly_text(const PolyProblem& pr) {
    std::string s;
    const std::string ym = "(y - " + num(pr.c0) + ")";
    for (int i = 0; i <= 3; ++i)
        for (int k = 0; k <= 3; ++k) {
            if (pr.a[i][k] == 0.0) continue;
            std::string term = "(" + num(pr.a[i][k]) + ")";
            if (i > 0) term += "*x^" + std::to_string(i);
            if (k > 0) term += "*" + ym + "^" + std::to_string(k);
            s += s.empty() ? term : " + " + term;
        }
    return s.empty() ? "0" : s;
}

// Random f = sum a_ik x^i (y - c0)^k, i, k <= 3, coefficients in [-2, 2],
// alpha in `alphas`, 2 <= n <= max_n with m >= 1. When `force_condition`
// the pure-x coefficients below m are zeroed so the smoothness condition holds.
inline PolyProblem random_poly(std::mt19937_64& rng, const std::vector<std::pair<int, int>>& alphas, int max_n,
                               bool force_condition, int max_y_degree = 3) {
    PolyProblem pr;
    std::uniform_int_distribution<std::size_t> pick(0, alphas.size() - 1);
    std::uniform_int_distribution<int> pick_n(2, max_n);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> c0q(-4, 4);
    do {
        const auto [p, q] = alphas[pick(rng)];
        pr.p = p;
        pr.q = q;
        pr.n = pick_n(rng);
        pr.m = 0;
        while (static_cast<std::int64_t>(pr.m + 1) * pr.q < pr.n * pr.p) ++pr.m;
    } while (pr.m < 1);
    pr.c0 = c0q(rng) / 4.0;
    for (int i = 0; i <= 3; ++i)
        for (int k = 0; k <= max_y_degree; ++k)
            if (unit(rng) < 0.5) pr.a[i][k] = coef(rng);
    if (force_condition)
        for (int i = 0; i < pr.m && i <= 3; ++i) pr.a[i][0] = 0.0;
    pr.text = poly_text(pr);
    return pr;
}

inline const std::vector<std::pair<int, int>>& route_alphas() {
    static const std::vector<std::pair<int, int>> v{{1, 3}, {2, 5}, {1, 2}, {3, 5}};
    return v;
}

}  // namespace testsupport
