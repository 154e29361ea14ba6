#include "fracsmooth/lattice.hpp"

#include "fracsmooth/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>

namespace fracsmooth {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t d = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --d;
    return d;
}

}  // namespace

Alpha::Alpha(std::int64_t p, std::int64_t q) {
    if (q == 0) throw ConfigError("alpha denominator must be non-zero");
    if (q < 0) {
        p = -p;
        q = -q;
    }
    if (p <= 0 || p >= q) throw ConfigError("alpha must lie in (0,1)");
    const std::int64_t g = std::gcd(p, q);
    p_ = p / g;
    q_ = q / g;
}

Alpha Alpha::from_decimal(double value, std::int64_t max_den) {
    if (!(value > 0.0 && value < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    // Stern-Brocot style search over convergents, keeping the best
    // semiconvergent within the denominator bound.
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double x = value;
    for (int iter = 0; iter < 64; ++iter) {
        const double a_d = std::floor(x);
        const auto a = static_cast<std::int64_t>(a_d);
        const std::int64_t q2 = q0 + a * q1;
        if (q2 > max_den) {
            const std::int64_t k = (max_den - q0) / q1;
            const std::int64_t ps = p0 + k * p1, qs = q0 + k * q1;
            const double err_semi = std::abs(value - static_cast<double>(ps) / qs);
            const double err_conv = std::abs(value - static_cast<double>(p1) / q1);
            if (k > 0 && err_semi < err_conv) return Alpha(ps, qs);
            return Alpha(p1, q1);
        }
        const std::int64_t p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const double frac = x - a_d;
        if (frac < 1e-15 || static_cast<double>(p1) / q1 == value) break;
        x = 1.0 / frac;
    }
    return Alpha(p1, q1);
}

Alpha Alpha::parse(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    auto parse_int = [&](std::string_view s) -> std::int64_t {
        s = trim(s);
        const std::string str(s);
        char* end = nullptr;
        const long long v = std::strtoll(str.c_str(), &end, 10);
        if (str.empty() || *end != '\0') throw ConfigError("malformed alpha '" + std::string(text) + "'");
        return v;
    };
    if (const auto slash = text.find('/'); slash != std::string_view::npos)
        return Alpha(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
    const std::string str(text);
    char* end = nullptr;
    const double v = std::strtod(str.c_str(), &end);
    if (str.empty() || *end != '\0') throw ConfigError("malformed alpha '" + str + "'");
    return from_decimal(v);
}

std::string Alpha::to_string() const { return std::to_string(p_) + "/" + std::to_string(q_); }

Exponent::Exponent(std::int64_t i, std::int64_t j, const Alpha& alpha) : i_(i), j_(j), alpha_(alpha) {
    const std::int64_t q = alpha_.q();
    if (j_ < 0 || j_ >= q) {
        // i + j p/q = (i + k p) + (j - k q) p/q with k = floor(j / q)
        const std::int64_t k = floor_div(j_, q);
        i_ += k * alpha_.p();
        j_ -= k * q;
    }
}

BigInt Exponent::numerator() const { return BigInt(i_) * alpha_.q() + BigInt(j_) * alpha_.p(); }

Rational Exponent::rational() const { return Rational(numerator(), BigInt(alpha_.q())); }

double Exponent::value() const {
    return static_cast<double>(i_) + static_cast<double>(j_) * alpha_.p() / static_cast<double>(alpha_.q());
}

Exponent Exponent::operator+(const Exponent& o) const { return {i_ + o.i_, j_ + o.j_, alpha_}; }

Exponent Exponent::operator-(const Exponent& o) const { return {i_ - o.i_, j_ - o.j_, alpha_}; }

Exponent Exponent::operator*(std::int64_t k) const { return {i_ * k, j_ * k, alpha_}; }

std::strong_ordering operator<=>(const Exponent& a, const Exponent& b) {
    const BigInt na = a.numerator(), nb = b.numerator();
    if (na < nb) return std::strong_ordering::less;
    if (nb < na) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Exponent::to_string() const {
    const Rational r = rational();
    return boost::multiprecision::numerator(r).str() +
           (boost::multiprecision::denominator(r) == 1 ? "" : "/" + boost::multiprecision::denominator(r).str());
}

double exponent_value(const Exponent& e) { return e.value(); }

int regularity_order(const Alpha& alpha, int n) {
    if (n < 1) throw ConfigError("n must be a positive integer");
    // largest integer k with k < n p / q, i.e. floor((n p - 1) / q)
    const BigInt np = BigInt(n) * alpha.p();
    return static_cast<int>((np - 1) / alpha.q());
}

LatticeSummary build_lattice_allow_empty(const Alpha& alpha, int n) {
    const int m = regularity_order(alpha, n);
    std::set<Exponent> points;
    const Exponent bound = Exponent::integer(m, alpha);
    for (std::int64_t j = 0; Exponent(0, j, alpha) < bound; ++j)
        for (std::int64_t i = j == 0 ? 1 : 0; Exponent(i, j, alpha) < bound; ++i) points.emplace(i, j, alpha);
    LatticeSummary s{alpha, n, m, {points.begin(), points.end()}, {}};
    for (std::size_t k = 0; k < s.gammas.size(); ++k)
        if (!s.gammas[k].is_integer()) s.theta.push_back(k);
    return s;
}

LatticeSummary build_lattice(const Alpha& alpha, int n) {
    LatticeSummary s = build_lattice_allow_empty(alpha, n);
    if (s.m == 0)
        throw ZeroRegularity("m = 0 (n*alpha <= 1): no singular expansion needed below C^0");
    return s;
}

std::vector<Exponent> extended_lattice(const Alpha& alpha, int n, const Exponent& cutoff) {
    if (!(Exponent::zero(alpha) < cutoff)) throw ConfigError("cutoff must be positive");
    const LatticeSummary lat = build_lattice_allow_empty(alpha, n);
    std::set<Exponent> points;
    for (const Exponent& g : lat.gammas)
        if (!(cutoff < g)) points.insert(g);
    for (std::int64_t i = 0; i <= n - 1; ++i)
        for (std::int64_t j = 1;; ++j) {
            const Exponent e(i, j, alpha);
            if (cutoff < e) break;
            points.insert(e);
        }
    return {points.begin(), points.end()};
}

}  // namespace fracsmooth
