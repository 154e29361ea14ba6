#pragma once

#include "fracsmooth/expr.hpp"
#include "fracsmooth/lattice.hpp"
#include "fracsmooth/series.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace fracsmooth {

struct Tolerances {
    double coefficient_zero = 1e-12;  // |c_j| below this counts as zero in reports
    double route_agreement = 1e-10;   // recursion vs series match, and Q - S residual
    double derivative_zero = 1e-14;   // d^i_x f(0, c0) treated as zero
};

enum class Provenance { Recursion, SeriesMatch };

/// S(x) = c0 + sum_j c_j x^gamma_j.
struct SingularExpansion {
    double c0 = 0.0;
    Alpha alpha{1, 2};
    int n = 1;
    int m = 0;
    std::vector<Exponent> gammas;
    std::vector<double> coeffs;
    std::vector<std::size_t> theta;
    Provenance provenance = Provenance::Recursion;

    [[nodiscard]] std::size_t J() const { return gammas.size(); }
    [[nodiscard]] SingularWeight weight() const;
    /// S(x) - c0 as a series.
    [[nodiscard]] GenSeries singular_series(const Exponent& cutoff) const;
};

/// Closed-form recursion: for each gamma_j in increasing order, sums over
/// canonical (p, multiset of earlier indices) with alpha + p + sum gamma = gamma_j
///   Gamma(1+gamma_j-alpha)/Gamma(1+gamma_j) * d^p_x d^k_y f(0,c0) * prod c / (p! prod mult!).
SingularExpansion coefficients_by_recursion(const DerivTable& table, const LatticeSummary& lattice);

/// Extracts c_j as the coefficient of x^gamma_j in Q, feeding c_1..c_{j-1}
/// into the weight before each extraction. Throws InconsistencyError if the
/// final Q - S residual below m exceeds tol.route_agreement.
SingularExpansion coefficients_by_series_match(const DerivTable& table, const LatticeSummary& lattice,
                                               ExpandMode mode = ExpandMode::DynamicProgramming,
                                               const Tolerances& tol = {});

/// max |coefficient of Q - S + c0| over exponents < m, with Q built from the
/// expansion's own coefficients.
double matching_residual(const DerivTable& table, const SingularExpansion& e);

/// max_j |a.coeffs[j] - b.coeffs[j]|; throws ConfigError on shape mismatch.
double max_coefficient_gap(const SingularExpansion& a, const SingularExpansion& b);

double eval_S(const SingularExpansion& e, double x);

/// Throws DomainError at x = 0 when some gamma_j < 1 has c_j != 0.
double eval_S_prime(const SingularExpansion& e, double x);

struct SmoothnessReport {
    bool condition_holds = false;
    std::optional<int> first_violating_i;
    std::vector<std::pair<Exponent, double>> singular_coeffs;
    bool all_coeffs_zero = false;
    /// condition_holds <=> all theta coefficients vanish (and then all vanish).
    bool corollary_consistent = true;
};

SmoothnessReport check_smoothness(const DerivTable& table, const SingularExpansion& expansion,
                                  const Tolerances& tol = {});

/// min{a, (b Gamma(1+alpha) / M)^(1/alpha)}.
double h_star(const Alpha& alpha, double a, double b, double M);

struct TheoremBudget {
    double C0 = 1.0;
    double C1 = 1.0;
    double K = 1.0;
    double h = 0.0;
    double norm_QS_prime = 0.0;
    int m = 1;
    Alpha alpha{1, 2};
};

/// norm + C1 h^alpha + C0 h^alpha sum_{j=1}^m K^j <= K.
bool theorem_budget_holds(const TheoremBudget& t);

/// Q - S as a series (exponents >= m only; the part below m vanishes by
/// construction), with Q expanded to its full support.
GenSeries q_minus_s(const DerivTable& table, const SingularExpansion& e);

/// Sampled sup over [0, h] of |(Q-S)^(i)|, 1 <= i <= m.
double qs_prime_norm(const GenSeries& q_minus_s_series, int m, double h, int samples = 256);

/// Largest h on a bisection grid in (0, h_max] for which the budget holds,
/// with the norm re-sampled on [0, h]. Returns 0 when none does.
double largest_budget_h(const GenSeries& q_minus_s_series, const TheoremBudget& base, double h_max,
                        int iterations = 60, int samples = 256);

}  // namespace fracsmooth
