#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fracsmooth {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Fractional order alpha = p/q in lowest terms, 0 < alpha < 1.
class Alpha {
public:
    /// Reduces p/q; throws ConfigError unless 0 < p/q < 1.
    Alpha(std::int64_t p, std::int64_t q);

    /// Best rational approximation with denominator <= max_den
    /// (continued-fraction convergents and semiconvergents).
    static Alpha from_decimal(double value, std::int64_t max_den = 1000000);

    /// Accepts "p/q" or a decimal literal.
    static Alpha parse(std::string_view text);

    [[nodiscard]] std::int64_t p() const { return p_; }
    [[nodiscard]] std::int64_t q() const { return q_; }
    [[nodiscard]] double value() const { return static_cast<double>(p_) / static_cast<double>(q_); }
    [[nodiscard]] Rational rational() const { return Rational(p_, q_); }
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Alpha&, const Alpha&) = default;

private:
    std::int64_t p_;
    std::int64_t q_;
};

/// A point i + j*alpha of the exponent lattice. The pair (i, j) is kept in
/// canonical form 0 <= j < q, so two Exponents are equal exactly when their
/// rational values are. Series arithmetic may produce negative i (values
/// above -1) for the integrand weights.
class Exponent {
public:
    Exponent(std::int64_t i, std::int64_t j, const Alpha& alpha);

    static Exponent zero(const Alpha& alpha) { return {0, 0, alpha}; }
    static Exponent integer(std::int64_t k, const Alpha& alpha) { return {k, 0, alpha}; }

    [[nodiscard]] std::int64_t i() const { return i_; }
    [[nodiscard]] std::int64_t j() const { return j_; }
    [[nodiscard]] const Alpha& alpha() const { return alpha_; }

    /// Numerator of the value over the fixed denominator q: i*q + j*p.
    [[nodiscard]] BigInt numerator() const;
    [[nodiscard]] Rational rational() const;
    [[nodiscard]] double value() const;
    [[nodiscard]] bool is_integer() const { return j_ == 0; }

    Exponent operator+(const Exponent& o) const;
    Exponent operator-(const Exponent& o) const;
    Exponent operator*(std::int64_t k) const;

    friend bool operator==(const Exponent& a, const Exponent& b) { return a.i_ == b.i_ && a.j_ == b.j_; }
    friend std::strong_ordering operator<=>(const Exponent& a, const Exponent& b);

    [[nodiscard]] std::string to_string() const;

private:
    std::int64_t i_;
    std::int64_t j_;
    Alpha alpha_;
};

double exponent_value(const Exponent& e);

/// m, the singular exponents gamma_1 < ... < gamma_J in (0, m), and
/// theta (0-based indices of the non-integer gammas).
struct LatticeSummary {
    Alpha alpha{1, 2};
    int n = 1;
    int m = 0;
    std::vector<Exponent> gammas;
    std::vector<std::size_t> theta;

    [[nodiscard]] std::size_t J() const { return gammas.size(); }
};

/// m = max{k in N : k < n*alpha}.
int regularity_order(const Alpha& alpha, int n);

/// Throws ZeroRegularity when m = 0.
LatticeSummary build_lattice(const Alpha& alpha, int n);

/// Same as build_lattice but returns an empty summary for m = 0.
LatticeSummary build_lattice_allow_empty(const Alpha& alpha, int n);

/// Sorted union of the gammas and {i + j*alpha : i <= n-1, j >= 1}, restricted
/// to values <= cutoff.
std::vector<Exponent> extended_lattice(const Alpha& alpha, int n, const Exponent& cutoff);

}  // namespace fracsmooth
