#include "fracsmooth/expansion.hpp"

#include "fracsmooth/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace fracsmooth {

namespace {

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

SingularExpansion empty_expansion(const DerivTable& table, const LatticeSummary& lattice, Provenance prov) {
    if (table.order() < lattice.n - 1) throw ConfigError("derivative table is too short for this n");
    SingularExpansion e;
    e.c0 = table.c0();
    e.alpha = lattice.alpha;
    e.n = lattice.n;
    e.m = lattice.m;
    e.gammas = lattice.gammas;
    e.theta = lattice.theta;
    e.provenance = prov;
    return e;
}

// Sum over multisets {i_1 <= ... <= i_k} of indices < limit whose gammas sum to
// `target`, of prod c_i / prod multiplicity!.
double multiset_sum(const std::vector<Exponent>& gammas, const std::vector<double>& coeffs, std::size_t limit,
                    int k, const Exponent& target) {
    double total = 0.0;
    std::vector<std::size_t> picked;
    std::function<void(std::size_t, int, const Exponent&)> walk = [&](std::size_t start, int left,
                                                                      const Exponent& rest) {
        if (left == 0) {
            if (rest != Exponent::zero(rest.alpha())) return;
            double w = 1.0;
            std::size_t run = 1;
            for (std::size_t l = 0; l < picked.size(); ++l) {
                w *= coeffs[picked[l]];
                if (l > 0 && picked[l] == picked[l - 1]) {
                    ++run;
                    w /= static_cast<double>(run);
                } else {
                    run = 1;
                }
            }
            total += w;
            return;
        }
        for (std::size_t i = start; i < limit; ++i) {
            // gammas ascend, so `left` copies of gammas[i] bound the remaining sum from below
            if (rest < gammas[i] * left) break;
            picked.push_back(i);
            walk(i, left - 1, rest - gammas[i]);
            picked.pop_back();
        }
    };
    walk(0, k, target);
    return total;
}

}  // namespace

SingularWeight SingularExpansion::weight() const {
    SingularWeight w;
    // coeffs may still be partial while the series-match route is filling it
    for (std::size_t j = 0; j < std::min(gammas.size(), coeffs.size()); ++j) w.terms.emplace_back(gammas[j], coeffs[j]);
    return w;
}

GenSeries SingularExpansion::singular_series(const Exponent& cutoff) const {
    GenSeries s(alpha, cutoff);
    for (std::size_t j = 0; j < std::min(gammas.size(), coeffs.size()); ++j) s.add_term(gammas[j], coeffs[j]);
    return s;
}

SingularExpansion coefficients_by_recursion(const DerivTable& table, const LatticeSummary& lattice) {
    SingularExpansion e = empty_expansion(table, lattice, Provenance::Recursion);
    const Alpha& alpha = lattice.alpha;
    const int n = lattice.n;
    const Exponent shift(0, 1, alpha);
    const double gamma_alpha = gamma_fn(alpha.value());
    e.coeffs.assign(e.J(), 0.0);

    for (std::size_t j = 0; j < e.J(); ++j) {
        const Exponent& gj = e.gammas[j];
        // B(alpha, 1 + p + sum gamma) / Gamma(alpha) with 1 + p + sum gamma = 1 + gamma_j - alpha
        const double kernel = beta_fn(alpha.value(), 1.0 + gj.value() - alpha.value()) / gamma_alpha;
        const Exponent base = gj - shift;
        double c = 0.0;

        // pure x-derivatives: p + alpha = gamma_j
        if (base.is_integer() && base.i() >= 0 && base.i() <= n - 1) {
            const int p = static_cast<int>(base.i());
            c += kernel * table.at(p, 0) / factorial(p);
        }
        // mixed terms: k >= 1 factors of earlier c's, p x-derivatives, p + k <= n - 1
        for (int k = 1; k <= n - 1; ++k)
            for (int p = 0; p + k <= n - 1; ++p) {
                const double d = table.at(p, k);
                if (d == 0.0) continue;
                const Exponent target = base - Exponent::integer(p, alpha);
                if (!(Exponent::zero(alpha) < target)) break;
                const double w = multiset_sum(e.gammas, e.coeffs, j, k, target);
                c += kernel * d / factorial(p) * w;
            }
        e.coeffs[j] = c;
    }
    return e;
}

SingularExpansion coefficients_by_series_match(const DerivTable& table, const LatticeSummary& lattice,
                                               ExpandMode mode, const Tolerances& tol) {
    SingularExpansion e = empty_expansion(table, lattice, Provenance::SeriesMatch);
    for (std::size_t j = 0; j < e.J(); ++j) {
        const GenSeries q = expand_Q(table, e.weight(), e.alpha, e.n, e.gammas[j], mode);
        e.coeffs.push_back(q.coefficient(e.gammas[j]));
    }
    const double residual = matching_residual(table, e);
    if (!(residual <= tol.route_agreement))
        throw InconsistencyError("Q - S residual below m is " + std::to_string(residual));
    return e;
}

double matching_residual(const DerivTable& table, const SingularExpansion& e) {
    if (e.m == 0 || e.J() == 0) return 0.0;
    const Exponent m_exp = Exponent::integer(e.m, e.alpha);
    const GenSeries q = expand_Q(table, e.weight(), e.alpha, e.n, m_exp);
    GenSeries diff = q;
    diff += e.singular_series(m_exp).scaled(-1.0);
    double worst = 0.0;
    for (const auto& [exp, a] : diff.terms())
        if (exp < m_exp) worst = std::max(worst, std::abs(a));
    return worst;
}

double max_coefficient_gap(const SingularExpansion& a, const SingularExpansion& b) {
    if (a.gammas != b.gammas || a.coeffs.size() != b.coeffs.size())
        throw ConfigError("expansions have different exponent sets");
    double gap = 0.0;
    for (std::size_t j = 0; j < a.coeffs.size(); ++j) gap = std::max(gap, std::abs(a.coeffs[j] - b.coeffs[j]));
    return gap;
}

double eval_S(const SingularExpansion& e, double x) {
    if (x < 0.0) throw DomainError("S is defined for x >= 0");
    double s = e.c0;
    if (x == 0.0) return s;
    for (std::size_t j = 0; j < e.J(); ++j) s += e.coeffs[j] * std::pow(x, e.gammas[j].value());
    return s;
}

double eval_S_prime(const SingularExpansion& e, double x) {
    if (x < 0.0) throw DomainError("S' is defined for x >= 0");
    double s = 0.0;
    for (std::size_t j = 0; j < e.J(); ++j) {
        const double g = e.gammas[j].value();
        const double c = e.coeffs[j];
        if (c == 0.0) continue;
        if (x == 0.0) {
            if (g < 1.0) throw DomainError("S' is unbounded at 0 (exponent " + e.gammas[j].to_string() + ")");
            if (e.gammas[j] == Exponent::integer(1, e.alpha)) s += c;
            continue;
        }
        s += c * g * std::pow(x, g - 1.0);
    }
    return s;
}

SmoothnessReport check_smoothness(const DerivTable& table, const SingularExpansion& expansion,
                                  const Tolerances& tol) {
    SmoothnessReport r;
    r.condition_holds = true;
    for (int i = 0; i < expansion.m; ++i)
        if (std::abs(table.at(i, 0)) > tol.derivative_zero) {
            r.condition_holds = false;
            r.first_violating_i = i;
            break;
        }
    double max_theta = 0.0, max_all = 0.0;
    for (std::size_t j = 0; j < expansion.J(); ++j) max_all = std::max(max_all, std::abs(expansion.coeffs[j]));
    for (const std::size_t j : expansion.theta) {
        const double c = expansion.coeffs[j];
        max_theta = std::max(max_theta, std::abs(c));
        if (std::abs(c) > tol.coefficient_zero) r.singular_coeffs.emplace_back(expansion.gammas[j], c);
    }
    r.all_coeffs_zero = max_all <= tol.coefficient_zero;
    const bool theta_zero = max_theta <= tol.route_agreement;
    r.corollary_consistent =
        (r.condition_holds == theta_zero) && (!r.condition_holds || max_all <= tol.route_agreement);
    return r;
}

double h_star(const Alpha& alpha, double a, double b, double M) {
    if (!(a > 0.0) || !(b > 0.0) || !(M > 0.0)) throw DomainError("h_star requires a, b, M > 0");
    const double al = alpha.value();
    return std::min(a, std::pow(b * gamma_fn(1.0 + al) / M, 1.0 / al));
}

bool theorem_budget_holds(const TheoremBudget& t) {
    const double ha = std::pow(t.h, t.alpha.value());
    double powers = 0.0, kj = 1.0;
    for (int j = 1; j <= t.m; ++j) {
        kj *= t.K;
        powers += kj;
    }
    return t.norm_QS_prime + t.C1 * ha + t.C0 * ha * powers <= t.K;
}

GenSeries q_minus_s(const DerivTable& table, const SingularExpansion& e) {
    const GenSeries q = expand_Q(table, e.weight(), e.alpha, e.n, full_q_cutoff(e.weight(), e.alpha, e.n));
    return q.restricted_from(Exponent::integer(e.m, e.alpha));
}

double qs_prime_norm(const GenSeries& series, int m, double h, int samples) {
    if (samples < 2) throw ConfigError("need at least 2 samples");
    if (!(h > 0.0)) throw ConfigError("h must be positive");
    double sup = 0.0;
    for (int i = 1; i <= m; ++i) {
        const GenSeries d = series.derivative(i);
        for (int k = 0; k < samples; ++k) {
            const double x = k == samples - 1 ? h : h * k / (samples - 1);
            sup = std::max(sup, std::abs(d.evaluate(x)));
        }
    }
    return sup;
}

double largest_budget_h(const GenSeries& series, const TheoremBudget& base, double h_max, int iterations,
                        int samples) {
    auto holds = [&](double h) {
        TheoremBudget t = base;
        t.h = h;
        t.norm_QS_prime = qs_prime_norm(series, base.m, h, samples);
        return theorem_budget_holds(t);
    };
    if (holds(h_max)) return h_max;
    double lo = 0.0, hi = h_max;
    for (int it = 0; it < iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (holds(mid)) lo = mid;
        else hi = mid;
    }
    return lo;
}

}  // namespace fracsmooth
