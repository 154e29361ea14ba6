#include "fracsmooth/volterra.hpp"

#include "fracsmooth/error.hpp"
#include "fracsmooth/series.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <string>

namespace fracsmooth {

namespace {

// Neumaier-compensated running sum; the summation order is fixed by the caller.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) comp_ += (sum_ - t) + v;
        else comp_ += (v - t) + sum_;
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Generalised binomial coefficients C(r, i), i = 0..count-1.
std::vector<double> binomials(double r, int count) {
    std::vector<double> c(static_cast<std::size_t>(count));
    c[0] = 1.0;
    for (int i = 1; i < count; ++i) c[i] = c[i - 1] * (r - i + 1) / i;
    return c;
}

constexpr int kSeriesTerms = 80;

}  // namespace

const char* to_string(SolveMode mode) {
    switch (mode) {
    case SolveMode::Direct: return "direct";
    case SolveMode::Regularized: return "regularized";
    case SolveMode::Handoff: return "handoff";
    }
    return "?";
}

std::vector<double> rectangle_weights(double alpha, int count) {
    std::vector<double> w(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        if (k == 0) w[0] = 1.0;
        else w[k] = std::pow(k, alpha) * std::expm1(alpha * std::log1p(1.0 / k));
    }
    return w;
}

std::vector<double> trapezoid_weights(double alpha, int count) {
    const double beta = alpha + 1.0;
    const std::vector<double> binom = binomials(beta, kSeriesTerms);
    std::vector<double> w(static_cast<std::size_t>(count) + 1, 0.0);
    for (int k = 1; k <= count; ++k) {
        if (k == 1) {
            w[1] = std::pow(2.0, beta) - 2.0;
            continue;
        }
        // k^beta ((1 + 1/k)^beta - 2 + (1 - 1/k)^beta) = 2 k^beta sum_{i even >= 2} C(beta, i) k^-i
        const double inv2 = 1.0 / (static_cast<double>(k) * k);
        double sum = 0.0, power = inv2;
        for (int i = 2; i < kSeriesTerms; i += 2) {
            const double term = binom[i] * power;
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
            power *= inv2;
        }
        w[k] = 2.0 * std::pow(k, beta) * sum;
    }
    return w;
}

double trapezoid_first_weight(double alpha, int k) {
    if (k == 0) return alpha;
    if (k == 1) return 1.0 - (1.0 - alpha) * std::pow(2.0, alpha);
    // k^alpha sum_{i>=1} k^-i (alpha C(alpha, i) - C(alpha, i+1))
    const std::vector<double> binom = binomials(alpha, kSeriesTerms + 1);
    const double inv = 1.0 / k;
    double sum = 0.0, power = inv;
    for (int i = 1; i < kSeriesTerms; ++i) {
        const double term = (alpha * binom[i] - binom[i + 1]) * power;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        power *= inv;
    }
    return std::pow(k, alpha) * sum;
}

SolveResult solve(const SolveConfig& cfg, const Expr& f) {
    const auto started = std::chrono::steady_clock::now();
    if (!(cfg.t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (cfg.steps < 2) throw ConfigError("steps must be at least 2");
    if (cfg.steps > cfg.max_steps)
        throw ConfigError("steps " + std::to_string(cfg.steps) + " exceeds the cap " + std::to_string(cfg.max_steps));
    if (cfg.corrector_iterations < 1) throw ConfigError("corrector_iterations must be positive");

    const int N = cfg.steps;
    const double alpha = cfg.alpha.value();
    const double h = cfg.t_end / N;
    const bool handoff = cfg.mode == SolveMode::Handoff;
    // true while the unknown is z = y - S; a handoff solve flips it once
    bool regularized = cfg.mode == SolveMode::Regularized || handoff;
    if (handoff && !(cfg.handoff_time > 0.0)) throw ConfigError("handoff mode needs handoff_time > 0");

    // base(x) is the non-integral part of the fixed-point map; integrand(x, u) the
    // part that goes through product integration; to_y maps the unknown to y.
    std::function<double(double)> base = [&](double) { return cfg.c0; };
    std::function<double(double, double)> integrand = [&](double x, double u) { return eval(f, x, u); };
    std::function<double(double)> s_of = [&](double) { return cfg.c0; };

    std::optional<GenSeries> taylor, q;
    if (regularized) {
        if (!cfg.expansion) throw ConfigError("regularized mode needs a singular expansion");
        const SingularExpansion& e = *cfg.expansion;
        if (!(e.alpha == cfg.alpha) || e.c0 != cfg.c0)
            throw ConfigError("expansion alpha/c0 do not match the solver configuration");
        const DerivTable table = derivative_table(f, std::max(1, e.n - 1), cfg.c0);
        const SingularWeight w = e.weight();
        const Exponent cutoff = full_q_cutoff(w, e.alpha, e.n) - Exponent(0, 1, e.alpha);
        taylor = taylor_integrand(table, w, e.alpha, e.n, cutoff);
        q = frac_integrate(*taylor, e.alpha);
        s_of = [&e](double x) { return eval_S(e, x); };
        base = [&e, &q](double x) { return q->evaluate(x) - (eval_S(e, x) - e.c0); };
        integrand = [&f, &e, &taylor](double x, double z) {
            return eval(f, x, z + eval_S(e, x)) - taylor->evaluate(x);
        };
    }

    SolveResult r;
    r.mode = cfg.mode;
    r.x.resize(N + 1);
    for (int k = 0; k <= N; ++k) r.x[k] = k == N ? cfg.t_end : k * h;
    std::vector<double> u(N + 1), g(N + 1);
    u[0] = regularized ? 0.0 : cfg.c0;
    g[0] = integrand(0.0, u[0]);

    const std::vector<double> rect = rectangle_weights(alpha, N);
    const std::vector<double> trap = trapezoid_weights(alpha, N);
    const double pred_scale = std::pow(h, alpha) / gamma_fn(alpha + 1.0);
    const double corr_scale = std::pow(h, alpha) / gamma_fn(alpha + 2.0);

    auto check = [&](int step, double y) {
        if (!std::isfinite(y)) throw DomainError("non-finite iterate at step " + std::to_string(step));
        if (std::abs(y - cfg.c0) > cfg.b)
            throw DomainError("iterate left [c0-b, c0+b] at step " + std::to_string(step));
    };

    for (int k = 0; k < N; ++k) {
        const double xn = r.x[k + 1];
        if (handoff && regularized && xn > cfg.handoff_time) {
            // restart the direct scheme; the regularized y values become its history
            regularized = false;
            for (int j = 0; j <= k; ++j) {
                u[j] = j == 0 ? cfg.c0 : u[j] + s_of(r.x[j]);
                g[j] = eval(f, r.x[j], u[j]);
            }
            base = [&](double) { return cfg.c0; };
            integrand = [&](double x, double y) { return eval(f, x, y); };
        }
        const double b_next = base(xn);
        CompensatedSum pred, corr;
        for (int j = 0; j <= k; ++j) pred.add(rect[k - j] * g[j]);
        corr.add(trapezoid_first_weight(alpha, k) * g[0]);
        for (int j = 1; j <= k; ++j) corr.add(trap[k - j + 1] * g[j]);
        double un = b_next + pred_scale * pred.value();
        check(k + 1, regularized ? un + s_of(xn) : un);
        for (int it = 0; it < cfg.corrector_iterations; ++it) {
            un = b_next + corr_scale * (corr.value() + integrand(xn, un));
            check(k + 1, regularized ? un + s_of(xn) : un);
        }
        u[k + 1] = un;
        g[k + 1] = integrand(xn, un);
    }

    r.S.resize(N + 1);
    r.y.resize(N + 1);
    const bool uses_S = cfg.mode != SolveMode::Direct;
    for (int k = 0; k <= N; ++k) r.S[k] = uses_S ? s_of(r.x[k]) : cfg.c0;
    if (regularized) {
        r.z = u;
        for (int k = 0; k <= N; ++k) r.y[k] = u[k] + r.S[k];
        r.y[0] = cfg.c0;
    } else {
        r.y = u;
        if (uses_S) {
            r.z.resize(N + 1);
            for (int k = 0; k <= N; ++k) r.z[k] = r.y[k] - r.S[k];
            r.z[0] = 0.0;
        }
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return r;
}

double mittag_leffler(double alpha, double x, double tol) {
    if (!(alpha > 0.0)) throw DomainError("mittag_leffler: alpha must be positive");
    if (!(tol > 0.0)) throw DomainError("mittag_leffler: tol must be positive");
    if (std::abs(x) > 5.0) throw DomainError("mittag_leffler: |x| > 5 is outside the series regime");
    double sum = 0.0;
    int extra = -1;
    for (int k = 0; k < 4000; ++k) {
        double term;
        if (x == 0.0) {
            term = k == 0 ? 1.0 : 0.0;
        } else {
            const double mag = std::exp(k * std::log(std::abs(x)) - std::lgamma(alpha * k + 1.0));
            term = (x < 0.0 && k % 2 == 1) ? -mag : mag;
        }
        sum += term;
        if (extra < 0 && std::abs(term) < tol) extra = 0;
        if (extra >= 0 && ++extra > 5) return sum;
    }
    throw DomainError("mittag_leffler: series did not converge");
}

double mittag_leffler(const Alpha& alpha, double x, double tol) { return mittag_leffler(alpha.value(), x, tol); }

double empirical_order(double coarse_error, double fine_error) {
    if (fine_error <= kExactErrorFloor) return std::numeric_limits<double>::infinity();
    return std::log2(coarse_error / fine_error);
}

OrderReport estimate_order(const Expr& f, const SolveConfig& cfg, const Reference& reference) {
    OrderReport rep;
    const int N = cfg.steps;
    rep.steps = {N, 2 * N, 4 * N};
    if (const double* v = std::get_if<double>(&reference)) {
        rep.reference_value = *v;
    } else {
        const auto& fine = std::get<FineGridReference>(reference);
        if (fine.factor < 8) throw ConfigError("fine-grid reference needs at least 8x the finest steps");
        SolveConfig ref_cfg = cfg;
        ref_cfg.steps = fine.factor * 4 * N;
        ref_cfg.max_steps = std::max(cfg.max_steps, ref_cfg.steps);
        rep.reference_value = solve(ref_cfg, f).y.back();
    }
    for (int i = 0; i < 3; ++i) {
        SolveConfig c = cfg;
        c.steps = rep.steps[i];
        rep.errors[i] = std::abs(solve(c, f).y.back() - rep.reference_value);
    }
    rep.orders = {empirical_order(rep.errors[0], rep.errors[1]), empirical_order(rep.errors[1], rep.errors[2])};
    return rep;
}

}  // namespace fracsmooth
