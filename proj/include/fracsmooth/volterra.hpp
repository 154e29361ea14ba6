#pragma once

#include "fracsmooth/expansion.hpp"
#include "fracsmooth/expr.hpp"
#include "fracsmooth/lattice.hpp"

#include <array>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

namespace fracsmooth {

/// Handoff runs the regularized scheme up to handoff_time and then restarts the
/// direct scheme on the same grid, reusing the regularized y values as history.
enum class SolveMode { Direct, Regularized, Handoff };

const char* to_string(SolveMode mode);

struct SolveConfig {
    Alpha alpha{1, 2};
    double c0 = 0.0;
    double t_end = 1.0;
    int steps = 64;
    SolveMode mode = SolveMode::Direct;
    /// Required in regularized mode; must share alpha and c0.
    std::optional<SingularExpansion> expansion;
    int corrector_iterations = 1;
    /// Handoff mode only: nodes with x <= handoff_time are solved regularized.
    double handoff_time = 0.0;
    /// Iterates must stay in [c0 - b, c0 + b].
    double b = std::numeric_limits<double>::infinity();
    int max_steps = 100000;
};

struct SolveResult {
    SolveMode mode = SolveMode::Direct;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;  // regularized and handoff modes: y - S
    std::vector<double> S;  // S(x_k); c0 in direct mode
    double wall_seconds = 0.0;
};

/// Fractional Adams predictor-corrector for
///   y(x) = c0 + J^alpha f(., y)(x)                          (direct)
///   z(x) = c0 - S(x) + J^alpha f(., z + S)(x)               (regularized)
/// In regularized mode the integrand is split as f(t, z+S) = T(t) + g(t) with
/// T the degree-(n-1) Taylor polynomial of f at (0, c0) along S. J^alpha T = Q
/// is added in closed form and only the remainder g goes through product
/// integration.
SolveResult solve(const SolveConfig& cfg, const Expr& f);

/// Predictor weights (k+1)^alpha - k^alpha, k = 0..count-1.
std::vector<double> rectangle_weights(double alpha, int count);

/// Corrector weights (k+1)^(alpha+1) - 2 k^(alpha+1) + (k-1)^(alpha+1), k = 1..count;
/// element 0 is unused.
std::vector<double> trapezoid_weights(double alpha, int count);

/// Corrector weight of the initial node: k^(alpha+1) - (k-alpha)(k+1)^alpha.
double trapezoid_first_weight(double alpha, int k);

/// E_alpha(x) = sum_k x^k / Gamma(alpha k + 1) for |x| <= 5.
double mittag_leffler(double alpha, double x, double tol = 1e-15);
double mittag_leffler(const Alpha& alpha, double x, double tol = 1e-15);

struct FineGridReference {
    int factor = 8;  // reference steps = factor * finest steps
};

using Reference = std::variant<double, FineGridReference>;

struct OrderReport {
    std::array<int, 3> steps{};
    std::array<double, 3> errors{};
    /// log2(e_N / e_2N), log2(e_2N / e_4N); +infinity marks an exact method.
    std::array<double, 2> orders{};
    double reference_value = 0.0;
};

/// Errors at or below this are treated as exact when estimating orders.
inline constexpr double kExactErrorFloor = 1e-12;

double empirical_order(double coarse_error, double fine_error);

/// Solves with N, 2N and 4N steps (N = cfg.steps) and compares y(t_end).
/// A fine-grid reference reuses cfg at factor * 4N steps.
OrderReport estimate_order(const Expr& f, const SolveConfig& cfg, const Reference& reference);

}  // namespace fracsmooth
