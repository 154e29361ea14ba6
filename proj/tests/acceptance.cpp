// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "support.hpp"

#include "fracsmooth/error.hpp"
#include "fracsmooth/expansion.hpp"
#include "fracsmooth/expr.hpp"
#include "fracsmooth/lattice.hpp"
#include "fracsmooth/series.hpp"
#include "fracsmooth/volterra.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace fracsmooth;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_seconds, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_seconds > 0 && secs >= budget_seconds) {
        o.pass = false;
        o.detail += "; over the " + testsupport::num(budget_seconds) + " s budget";
    }
    if (!o.pass) ++failures;
    std::printf("%s %d %s: %s [%.3f s]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Outcome lattice_correctness() {
    int mismatches = 0;
    std::mt19937_64 rng(2024);
    const std::pair<int, int> alphas[] = {{1, 3}, {2, 5}, {1, 2}, {3, 5}, {7, 10}};
    std::uniform_int_distribution<int> pick(0, 4), pick_n(1, 10);
    auto same = [](const LatticeSummary& got, const testsupport::BruteLattice& want) {
        if (got.m != want.m || got.J() != want.numerators.size()) return false;
        for (std::size_t j = 0; j < got.J(); ++j)
            if (got.gammas[j].numerator() != want.numerators[j]) return false;
        return true;
    };
    for (int k = 0; k < 200; ++k) {
        const auto [p, q] = alphas[pick(rng)];
        const int n = pick_n(rng);
        if (!same(build_lattice_allow_empty(Alpha(p, q), n), testsupport::brute_lattice(p, q, n))) ++mismatches;
    }
    const LatticeSummary a = build_lattice(Alpha(2, 5), 4), b = build_lattice(Alpha(1, 2), 5);
    const bool fixtures = a.m == 1 && a.J() == 2 && a.gammas[0].rational() == Rational(2, 5) &&
                          a.gammas[1].rational() == Rational(4, 5) && b.m == 2 && b.J() == 3 &&
                          b.gammas[0].rational() == Rational(1, 2) && b.gammas[1].rational() == 1 &&
                          b.gammas[2].rational() == Rational(3, 2);
    return {mismatches == 0 && fixtures,
            std::to_string(mismatches) + "/200 mismatches vs brute force; fixtures " + (fixtures ? "ok" : "wrong")};
}

Outcome closed_forms() {
    double worst = 0.0;
    for (const auto& [p, q] : testsupport::route_alphas()) {
        const Alpha a(p, q);
        const double al = a.value();
        const int n = 8;
        const LatticeSummary lat = build_lattice(a, n);
        const auto one = coefficients_by_recursion(derivative_table(parse("1"), n, 0.0), lat);
        const auto xx = coefficients_by_recursion(derivative_table(parse("x"), n, 0.0), lat);
        const auto yy = coefficients_by_recursion(derivative_table(parse("y"), n, 1.0), lat);
        for (std::size_t j = 0; j < lat.J(); ++j) {
            const Exponent& g = lat.gammas[j];
            const double w1 = g == Exponent(0, 1, a) ? 1.0 / std::tgamma(1.0 + al) : 0.0;
            const double wx = g == Exponent(1, 1, a) ? 1.0 / std::tgamma(2.0 + al) : 0.0;
            // gamma_j = k alpha for some k >= 1, else 0
            double wy = 0.0;
            for (int k = 1; k * al < lat.m + 1; ++k)
                if (g == Exponent(0, k, a)) wy = 1.0 / std::tgamma(1.0 + k * al);
            worst = std::max({worst, std::abs(one.coeffs[j] - w1), std::abs(xx.coeffs[j] - wx),
                              std::abs(yy.coeffs[j] - wy)});
        }
    }
    return {worst <= 1e-12, "max |c - closed form| = " + fmt(worst) + " (tol 1e-12)"};
}

struct RouteStats {
    double gap = 0.0;
    double residual = 0.0;
    int corollary_failures = 0;
};

RouteStats route_family() {
    RouteStats s;
    std::mt19937_64 rng(31337);
    for (int k = 0; k < 50; ++k) {
        const auto pr = testsupport::random_poly(rng, testsupport::route_alphas(), 6, k % 2 == 0);
        const Alpha a(pr.p, pr.q);
        const LatticeSummary lat = build_lattice(a, pr.n);
        const DerivTable t = derivative_table(parse(pr.text), pr.n, pr.c0);
        const SingularExpansion rec = coefficients_by_recursion(t, lat);
        const SingularExpansion ser = coefficients_by_series_match(t, lat);
        s.gap = std::max(s.gap, max_coefficient_gap(rec, ser));
        s.residual = std::max(s.residual, matching_residual(t, rec));

        double theta = 0.0, all = 0.0;
        for (std::size_t j = 0; j < rec.J(); ++j) all = std::max(all, std::abs(rec.coeffs[j]));
        for (std::size_t j : rec.theta) theta = std::max(theta, std::abs(rec.coeffs[j]));
        const bool holds = check_smoothness(t, rec).condition_holds;
        const bool ok = holds == pr.condition() && holds == (theta <= 1e-10) && (!holds || all <= 1e-10);
        if (!ok) ++s.corollary_failures;
    }
    return s;
}

Outcome solver_exactness() {
    double worst = 0.0;
    for (const int N : {16, 64, 256}) {
        SolveConfig c;
        c.alpha = Alpha(1, 2);
        c.c0 = 0.0;
        c.t_end = 1.0;
        c.steps = N;
        const SolveResult r = solve(c, parse("1"));
        for (int k = 0; k <= N; ++k)
            worst = std::max(worst, std::abs(r.y[k] - std::sqrt(r.x[k]) / std::tgamma(1.5)));
    }
    return {worst <= 1e-12, "max nodal error = " + fmt(worst) + " over N = 16, 64, 256 (tol 1e-12)"};
}

// Reference: c0 E_{1/2}(sqrt(t_end)), summed here independently of the library.
double ml_oracle(double z) {
    double s = 0.0, term;
    int k = 0;
    do {
        term = std::pow(z, k) / std::tgamma(0.5 * k + 1.0);
        s += term;
        ++k;
    } while (k < 200 && std::abs(term) > 1e-18);
    return s;
}

Outcome regularization_benefit() {
    const Alpha a(1, 2);
    const double exact = ml_oracle(std::sqrt(0.5));
    const int n = 5;
    const SingularExpansion e =
        coefficients_by_recursion(derivative_table(parse("y"), n, 1.0), build_lattice(a, n));
    std::array<double, 2> orders[2];
    std::string detail;
    for (int mode = 0; mode < 2; ++mode) {
        SolveConfig c;
        c.alpha = a;
        c.c0 = 1.0;
        c.t_end = 0.5;
        c.steps = 40;
        c.corrector_iterations = 2;
        c.mode = mode == 0 ? SolveMode::Direct : SolveMode::Regularized;
        if (mode == 1) c.expansion = e;
        const OrderReport rep = estimate_order(parse("y"), c, Reference{exact});
        orders[mode] = rep.orders;
        detail += std::string(mode == 0 ? "direct" : "regularized") + " errors " + fmt(rep.errors[0]) + "/" +
                  fmt(rep.errors[1]) + "/" + fmt(rep.errors[2]) + " orders " + fmt(rep.orders[0]) + "/" +
                  fmt(rep.orders[1]) + "; ";
    }
    // both refinement pairs must show the benefit, not only the finest one
    bool ok = true;
    for (int i = 0; i < 2; ++i) ok = ok && orders[1][i] >= orders[0][i] && orders[1][i] >= 1.7;
    return {ok, detail + "need regularized >= direct and >= 1.7 on each pair"};
}

Outcome ad_fidelity() {
    testsupport::ExprGen gen(4242);
    std::mt19937_64& rng = gen.rng();
    std::uniform_real_distribution<double> pt(-0.8, 0.8);
    std::uniform_int_distribution<int> order(0, 3);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Expr f = parse(gen(3));
        int p = order(rng), q = order(rng);
        while (p + q > 3) --q;
        const double x = pt(rng), y = pt(rng);
        const double exact = mixed_partial(f, p, q, x, y);
        const double fd = testsupport::fd_partial([&](double u, double v) { return eval(f, u, v); }, p, q, x, y);
        worst = std::max(worst, std::abs(exact - fd) / std::max(1.0, std::abs(fd)));
    }
    return {worst <= 1e-6, "max relative gap to central differences = " + fmt(worst) + " over 100 pairs (tol 1e-6)"};
}

Outcome hstar_fixture() {
    const double hs = h_star(Alpha(1, 2), 1.0, 1.0, 1.0);
    const double err = std::abs(hs - M_PI / 4);
    TheoremBudget t;
    t.C0 = t.C1 = t.K = 1.0;
    t.m = 1;
    t.alpha = Alpha(1, 2);
    t.norm_QS_prime = 0.0;
    t.h = 0.25;
    const bool at_quarter = theorem_budget_holds(t);
    t.h = 0.3;
    const bool at_03 = theorem_budget_holds(t);
    return {err <= 1e-12 && at_quarter && !at_03, "|h* - pi/4| = " + fmt(err) + "; budget h=0.25 " +
                                                      (at_quarter ? "holds" : "fails") + ", h=0.3 " +
                                                      (at_03 ? "holds" : "fails")};
}

Outcome special_functions() {
    std::mt19937_64 rng(99);
    // open interval (0, 10)
    std::uniform_real_distribution<double> u(std::nextafter(0.0, 1.0), 10.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double a = u(rng), b = u(rng);
        const double rhs = gamma_fn(a) * gamma_fn(b);
        worst = std::max(worst, std::abs(beta_fn(a, b) * gamma_fn(a + b) - rhs) / std::abs(rhs));
    }
    return {worst <= 1e-12, "max relative error of B(a,b) G(a+b) = G(a) G(b) = " + fmt(worst) + " (tol 1e-12)"};
}

}  // namespace

int main() {
    criterion(1, "lattice correctness", 1.0, lattice_correctness);
    criterion(2, "closed-form expansions", 1.0, closed_forms);

    RouteStats routes;
    criterion(3, "route equivalence", 30.0, [&] {
        routes = route_family();
        return Outcome{routes.gap <= 1e-10 && routes.residual <= 1e-10,
                       "50 polynomials: max coefficient gap " + fmt(routes.gap) + ", max Q-S residual below m " +
                           fmt(routes.residual) + " (tol 1e-10)"};
    });
    criterion(4, "smoothness criterion both directions", 0.0, [&] {
        return Outcome{routes.corollary_failures == 0,
                       std::to_string(routes.corollary_failures) + " counterexamples in the 50-polynomial family"};
    });
    criterion(5, "solver exactness", 0.0, solver_exactness);
    criterion(6, "regularization benefit", 10.0, regularization_benefit);
    criterion(7, "AD fidelity", 0.0, ad_fidelity);
    criterion(8, "h* and budget fixtures", 0.0, hstar_fixture);
    criterion(9, "special functions", 0.0, special_functions);

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
