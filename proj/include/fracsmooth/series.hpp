#pragma once

#include "fracsmooth/expr.hpp"
#include "fracsmooth/lattice.hpp"

#include <map>
#include <utility>
#include <vector>

namespace fracsmooth {

/// Gamma(x) for x > 0.
double gamma_fn(double x);

/// B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), evaluated in log space.
double beta_fn(double a, double b);

/// Gamma(e + 1) / Gamma(e + 1 + alpha): the coefficient picked up by x^e
/// under the Riemann-Liouville integral of order alpha.
double frac_integral_factor(double e, double alpha);

/// Finite generalised power series sum a_e x^e over lattice exponents,
/// truncated above `cutoff`. Zero coefficients are never stored.
class GenSeries {
public:
    GenSeries(const Alpha& alpha, const Exponent& cutoff);

    static GenSeries monomial(const Exponent& e, double coeff, const Exponent& cutoff);

    [[nodiscard]] const Alpha& alpha() const { return alpha_; }
    [[nodiscard]] const Exponent& cutoff() const { return cutoff_; }
    [[nodiscard]] const std::map<Exponent, double>& terms() const { return terms_; }
    [[nodiscard]] bool empty() const { return terms_.empty(); }
    [[nodiscard]] std::size_t size() const { return terms_.size(); }

    /// True once any term has been dropped for exceeding the cutoff.
    [[nodiscard]] bool truncated() const { return truncated_; }
    void mark_truncated() { truncated_ = true; }

    /// Coefficient of x^e (0 when absent).
    [[nodiscard]] double coefficient(const Exponent& e) const;

    /// Adds a*x^e; drops it (recording truncation) when e > cutoff.
    void add_term(const Exponent& e, double a);

    GenSeries& operator+=(const GenSeries& o);
    [[nodiscard]] GenSeries scaled(double s) const;

    /// Terms with exponent >= lower only.
    [[nodiscard]] GenSeries restricted_from(const Exponent& lower) const;

    /// Value at x >= 0. Terms with negative exponent require x > 0.
    [[nodiscard]] double evaluate(double x) const;

    /// k-th formal derivative: a x^e -> a e (e-1)...(e-k+1) x^(e-k).
    [[nodiscard]] GenSeries derivative(int k = 1) const;

private:
    Alpha alpha_;
    Exponent cutoff_;
    std::map<Exponent, double> terms_;
    bool truncated_ = false;
};

/// sum_j gamma_j c_j x^(gamma_j - 1), stored as (gamma_j, c_j) pairs.
struct SingularWeight {
    std::vector<std::pair<Exponent, double>> terms;
};

/// a x^e -> a/(e+1) x^(e+1). Throws DomainError for e <= -1.
GenSeries integrate(const GenSeries& s);

/// Multiplies by the weight sum_j gamma_j c_j x^(gamma_j - 1).
GenSeries mul_weight(const GenSeries& s, const SingularWeight& w);

/// Riemann-Liouville integral of order alpha:
/// a x^e -> a Gamma(e+1)/Gamma(e+1+alpha) x^(e+alpha).
GenSeries frac_integrate(const GenSeries& s, const Alpha& alpha);

enum class ExpandMode { DynamicProgramming, Exhaustive };

/// Series of the degree-(n-1) Taylor polynomial of f around (0, c0)
/// evaluated along y = S(t):
///   sum_{s<n} sum_{beta in {1,2}^s} d_beta f(0,c0) * nested integrals,
/// where a 1 in beta integrates 1 and a 2 integrates the weight S'.
GenSeries taylor_integrand(const DerivTable& table, const SingularWeight& w, const Alpha& alpha, int n,
                           const Exponent& cutoff, ExpandMode mode = ExpandMode::DynamicProgramming);

/// Q(x): the order-alpha integral of taylor_integrand, truncated at cutoff.
GenSeries expand_Q(const DerivTable& table, const SingularWeight& w, const Alpha& alpha, int n,
                   const Exponent& cutoff, ExpandMode mode = ExpandMode::DynamicProgramming);

/// Smallest exponent bound that keeps every term of Q for the given
/// weight: alpha + (n-1) * max(1, largest weight exponent).
Exponent full_q_cutoff(const SingularWeight& w, const Alpha& alpha, int n);

}  // namespace fracsmooth
