#pragma once

#include "fracsmooth/expansion.hpp"
#include "fracsmooth/expr.hpp"
#include "fracsmooth/lattice.hpp"
#include "fracsmooth/volterra.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fracsmooth::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kConfigError = 1, kDomainError = 2, kInternalError = 3 };

/// Where the exact solution comes from, if known.
struct ReferenceSpec {
    std::optional<double> value;           // y(t_end)
    std::optional<std::string> expr;       // y(x) as an expression in x
    std::optional<double> mittag_leffler;  // y = c0 E_alpha(lambda x^alpha), valid for f = lambda y
};

struct SolverSettings {
    double t_end = 0.0;  // 0 means "use h*"
    int steps = 64;
    std::vector<SolveMode> modes{SolveMode::Direct};
    int corrector_iterations = 1;
    int max_steps = 100000;
    /// handoff mode: switch from regularized to direct after this x (0 means t_end / 8)
    double handoff_time = 0.0;
    ReferenceSpec reference;
};

struct BudgetSettings {
    double C0 = 1.0;
    double C1 = 1.0;
    double K = 1.0;
};

struct ProblemConfig {
    std::string f_text;
    Expr f;
    std::string alpha_text;
    Alpha alpha{1, 2};
    double c0 = 0.0;
    double a = 1.0;
    double b = 1.0;
    int n = 1;
    SolverSettings solver;
    std::string output = "out";
    Tolerances tolerances;
    int bound_grid = 33;
    std::optional<BudgetSettings> budget;
};

/// Parses the YAML config text. Throws ConfigError / ParseError.
ProblemConfig parse_config(const std::string& yaml_text);
ProblemConfig load_config(const std::string& path);

/// "%.15g", with "inf" / "-inf" / "nan" spelled out.
std::string format_number(double v);

/// Each command prints a human-readable report to `out` and writes its
/// files under cfg.output.
void cmd_expand(const ProblemConfig& cfg, std::ostream& out);
void cmd_check(const ProblemConfig& cfg, std::ostream& out);
void cmd_solve(const ProblemConfig& cfg, std::ostream& out);
void cmd_order(const ProblemConfig& cfg, std::ostream& out);
void cmd_hstar(const ProblemConfig& cfg, std::ostream& out);

/// CSV body for a solve result (header included).
std::string solve_csv(const SolveResult& result, const std::optional<std::vector<double>>& reference);

/// Full command line entry point; maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fracsmooth::cli
