#include "fracsmooth/series.hpp"

#include "fracsmooth/error.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

namespace fracsmooth {

double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive");
    return std::tgamma(x);
}

double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_fn: arguments must be positive");
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double frac_integral_factor(double e, double alpha) {
    if (!(e > -1.0)) throw DomainError("fractional integral of x^e requires e > -1");
    if (e + 1.0 + alpha < 170.0) return std::tgamma(e + 1.0) / std::tgamma(e + 1.0 + alpha);
    return std::exp(std::lgamma(e + 1.0) - std::lgamma(e + 1.0 + alpha));
}

GenSeries::GenSeries(const Alpha& alpha, const Exponent& cutoff) : alpha_(alpha), cutoff_(cutoff) {}

GenSeries GenSeries::monomial(const Exponent& e, double coeff, const Exponent& cutoff) {
    GenSeries s(e.alpha(), cutoff);
    s.add_term(e, coeff);
    return s;
}

double GenSeries::coefficient(const Exponent& e) const {
    const auto it = terms_.find(e);
    return it == terms_.end() ? 0.0 : it->second;
}

void GenSeries::add_term(const Exponent& e, double a) {
    if (a == 0.0) return;
    if (cutoff_ < e) {
        truncated_ = true;
        return;
    }
    auto [it, inserted] = terms_.try_emplace(e, a);
    if (!inserted) {
        it->second += a;
        if (it->second == 0.0) terms_.erase(it);
    }
}

GenSeries& GenSeries::operator+=(const GenSeries& o) {
    truncated_ = truncated_ || o.truncated_;
    for (const auto& [e, a] : o.terms_) add_term(e, a);
    return *this;
}

GenSeries GenSeries::scaled(double s) const {
    GenSeries r(alpha_, cutoff_);
    r.truncated_ = truncated_;
    for (const auto& [e, a] : terms_) r.add_term(e, a * s);
    return r;
}

GenSeries GenSeries::restricted_from(const Exponent& lower) const {
    GenSeries r(alpha_, cutoff_);
    r.truncated_ = truncated_;
    for (const auto& [e, a] : terms_)
        if (!(e < lower)) r.add_term(e, a);
    return r;
}

double GenSeries::evaluate(double x) const {
    if (x < 0.0) throw DomainError("series evaluated at negative x");
    double sum = 0.0;
    for (const auto& [e, a] : terms_) {
        const double v = e.value();
        if (x == 0.0) {
            if (v < 0.0) throw DomainError("series term with negative exponent is unbounded at 0");
            if (v == 0.0) sum += a;
        } else {
            sum += a * std::pow(x, v);
        }
    }
    return sum;
}

GenSeries GenSeries::derivative(int k) const {
    GenSeries r(alpha_, cutoff_);
    r.truncated_ = truncated_;
    for (const auto& [e, a] : terms_) {
        double factor = 1.0;
        const double v = e.value();
        for (int l = 0; l < k; ++l) factor *= v - l;
        // x^e with integer e < k differentiates to exactly zero
        if (e.is_integer() && e.i() >= 0 && e.i() < k) continue;
        r.add_term(e - Exponent::integer(k, alpha_), a * factor);
    }
    return r;
}

GenSeries integrate(const GenSeries& s) {
    const Exponent one = Exponent::integer(1, s.alpha());
    GenSeries r(s.alpha(), s.cutoff());
    if (s.truncated()) r.mark_truncated();
    for (const auto& [e, a] : s.terms()) {
        const double v = e.value();
        if (!(v > -1.0)) throw DomainError("integrate: exponent must exceed -1");
        r.add_term(e + one, a / (v + 1.0));
    }
    return r;
}

GenSeries mul_weight(const GenSeries& s, const SingularWeight& w) {
    const Exponent one = Exponent::integer(1, s.alpha());
    GenSeries r(s.alpha(), s.cutoff());
    if (s.truncated()) r.mark_truncated();
    for (const auto& [e, a] : s.terms())
        for (const auto& [gamma, c] : w.terms) {
            if (c == 0.0) continue;
            r.add_term(e + gamma - one, a * gamma.value() * c);
        }
    return r;
}

GenSeries frac_integrate(const GenSeries& s, const Alpha& alpha) {
    const Exponent shift(0, 1, alpha);
    GenSeries r(alpha, s.cutoff() + shift);
    if (s.truncated()) r.mark_truncated();
    for (const auto& [e, a] : s.terms()) r.add_term(e + shift, a * frac_integral_factor(e.value(), alpha.value()));
    return r;
}

GenSeries taylor_integrand(const DerivTable& table, const SingularWeight& w, const Alpha& alpha, int n,
                           const Exponent& cutoff, ExpandMode mode) {
    if (n < 1) throw ConfigError("n must be a positive integer");
    if (table.order() < n - 1) throw ConfigError("derivative table is too short for this n");
    const Exponent zero = Exponent::zero(alpha);
    GenSeries result(alpha, cutoff);
    const GenSeries one = GenSeries::monomial(zero, 1.0, cutoff);

    if (mode == ExpandMode::Exhaustive) {
        for (int s = 0; s < n; ++s)
            for (std::uint64_t word = 0; word < (std::uint64_t{1} << s); ++word) {
                // bit k-1 set <=> beta_k = 2; evaluate innermost (k = s) first
                GenSeries inner = one;
                for (int k = s; k >= 1; --k) {
                    if (word >> (k - 1) & 1u) inner = mul_weight(inner, w);
                    inner = integrate(inner);
                }
                const int twos = std::popcount(word);
                const double d = table.at(s - twos, twos);
                if (d != 0.0) result += inner.scaled(d);
            }
        return result;
    }

    // levels[q]: sum over words of the current length with q twos
    std::vector<GenSeries> levels{one};
    if (const double d = table.at(0, 0); d != 0.0) result += one.scaled(d);
    for (int s = 1; s < n; ++s) {
        std::vector<GenSeries> next(static_cast<std::size_t>(s) + 1, GenSeries(alpha, cutoff));
        for (int q = 0; q <= s; ++q) {
            GenSeries acc(alpha, cutoff);
            if (q < s) acc += integrate(levels[q]);
            if (q > 0) acc += integrate(mul_weight(levels[q - 1], w));
            next[q] = std::move(acc);
        }
        levels = std::move(next);
        for (int q = 0; q <= s; ++q)
            if (const double d = table.at(s - q, q); d != 0.0) result += levels[q].scaled(d);
    }
    return result;
}

GenSeries expand_Q(const DerivTable& table, const SingularWeight& w, const Alpha& alpha, int n,
                   const Exponent& cutoff, ExpandMode mode) {
    const Exponent shift(0, 1, alpha);
    const GenSeries integrand = taylor_integrand(table, w, alpha, n, cutoff - shift, mode);
    return frac_integrate(integrand, alpha);
}

Exponent full_q_cutoff(const SingularWeight& w, const Alpha& alpha, int n) {
    Exponent step = Exponent::integer(1, alpha);
    for (const auto& [gamma, c] : w.terms)
        if (step < gamma) step = gamma;
    return step * (n - 1) + Exponent(0, 1, alpha);
}

}  // namespace fracsmooth
