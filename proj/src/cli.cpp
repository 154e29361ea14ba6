#include "fracsmooth/cli.hpp"

#include "fracsmooth/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fracsmooth::cli {

namespace {

using nlohmann::ordered_json;

// Rounds to 15 significant digits so the JSON writer emits at most 15.
double round15(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::strtod(buf, nullptr);
}

template <class T>
T get_or(const YAML::Node& node, const char* key, T fallback) {
    const YAML::Node v = node[key];
    if (!v || v.IsNull()) return fallback;
    try {
        return v.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

SolveMode parse_mode(const std::string& s) {
    if (s == "direct") return SolveMode::Direct;
    if (s == "regularized") return SolveMode::Regularized;
    if (s == "handoff") return SolveMode::Handoff;
    throw ConfigError("mode must be direct, regularized, handoff or both (got '" + s + "')");
}

std::vector<SolveMode> parse_modes(const std::string& s) {
    if (s == "both") return {SolveMode::Direct, SolveMode::Regularized};
    return {parse_mode(s)};
}

void validate(const ProblemConfig& c) {
    if (!(c.a > 0.0)) throw ConfigError("a must be positive");
    if (!(c.b > 0.0)) throw ConfigError("b must be positive");
    if (c.n < 1) throw ConfigError("n must be a positive integer");
    if (c.n > kMaxDiffOrder) throw ConfigError("n exceeds the supported differentiation depth");
    if (c.solver.steps < 2) throw ConfigError("solver.steps must be at least 2");
    if (c.solver.t_end < 0.0) throw ConfigError("solver.t_end must be positive");
    if (c.solver.handoff_time < 0.0) throw ConfigError("solver.handoff_time must not be negative");
    if (c.solver.corrector_iterations < 1) throw ConfigError("solver.corrector_iterations must be positive");
    if (c.bound_grid < 2) throw ConfigError("bound_grid must be at least 2");
}

struct ExpansionBundle {
    LatticeSummary lattice;
    DerivTable table;
    SingularExpansion recursion;
    SingularExpansion series;
    double discrepancy = 0.0;
    bool zero_regularity = false;
};

ExpansionBundle compute_expansion(const ProblemConfig& cfg) {
    ExpansionBundle b;
    b.table = derivative_table(cfg.f, cfg.n, cfg.c0);
    try {
        b.lattice = build_lattice(cfg.alpha, cfg.n);
    } catch (const ZeroRegularity&) {
        b.lattice = build_lattice_allow_empty(cfg.alpha, cfg.n);
        b.zero_regularity = true;
    }
    b.recursion = coefficients_by_recursion(b.table, b.lattice);
    b.series = coefficients_by_series_match(b.table, b.lattice, ExpandMode::DynamicProgramming, cfg.tolerances);
    b.discrepancy = max_coefficient_gap(b.recursion, b.series);
    if (!(b.discrepancy <= cfg.tolerances.route_agreement))
        throw InconsistencyError("recursion and series-match coefficients differ by " +
                                 format_number(b.discrepancy));
    return b;
}

ordered_json exponent_json(const Exponent& e) {
    return {{"i", e.i()}, {"j", e.j()}, {"value", round15(e.value())}};
}

ordered_json expansion_json(const SingularExpansion& e) {
    ordered_json terms = ordered_json::array();
    for (std::size_t k = 0; k < e.J(); ++k)
        terms.push_back({{"i", e.gammas[k].i()},
                         {"j", e.gammas[k].j()},
                         {"exponent", round15(e.gammas[k].value())},
                         {"coefficient", round15(e.coeffs[k])},
                         {"singular", !e.gammas[k].is_integer()}});
    return {{"alpha", {{"p", e.alpha.p()}, {"q", e.alpha.q()}}},
            {"c0", round15(e.c0)},
            {"m", e.m},
            {"J", e.J()},
            {"terms", terms}};
}

ordered_json series_json(const GenSeries& s) {
    ordered_json terms = ordered_json::array();
    for (const auto& [e, a] : s.terms())
        terms.push_back({{"i", e.i()}, {"j", e.j()}, {"exponent_value", round15(e.value())}, {"coefficient", round15(a)}});
    return terms;
}

std::filesystem::path prepare_output(const ProblemConfig& cfg) {
    std::filesystem::path dir(cfg.output);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + cfg.output + "': " + ec.message());
    return dir;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    os << body;
}

double resolve_t_end(const ProblemConfig& cfg, std::ostream& out) {
    const double M = estimate_bound_M(cfg.f, cfg.n, cfg.a, cfg.c0, cfg.b, cfg.bound_grid);
    const double hs = M > 0.0 ? h_star(cfg.alpha, cfg.a, cfg.b, M) : cfg.a;
    if (cfg.solver.t_end == 0.0) return hs;
    if (cfg.solver.t_end > hs)
        out << "note: t_end = " << format_number(cfg.solver.t_end) << " exceeds the guaranteed interval h* = "
            << format_number(hs) << "\n";
    return cfg.solver.t_end;
}

SolveConfig make_solve_config(const ProblemConfig& cfg, double t_end, SolveMode mode,
                              const std::optional<SingularExpansion>& expansion) {
    SolveConfig sc;
    sc.alpha = cfg.alpha;
    sc.c0 = cfg.c0;
    sc.t_end = t_end;
    sc.steps = cfg.solver.steps;
    sc.mode = mode;
    sc.corrector_iterations = cfg.solver.corrector_iterations;
    sc.b = cfg.b;
    sc.max_steps = cfg.solver.max_steps;
    if (mode != SolveMode::Direct) sc.expansion = expansion;
    if (mode == SolveMode::Handoff)
        sc.handoff_time = cfg.solver.handoff_time > 0.0 ? cfg.solver.handoff_time : t_end / 8.0;
    return sc;
}

// Exact y at each node when the config supplies a closed form.
std::optional<std::vector<double>> reference_values(const ProblemConfig& cfg, const std::vector<double>& xs) {
    const ReferenceSpec& ref = cfg.solver.reference;
    if (ref.expr) {
        const Expr g = parse(*ref.expr);
        std::vector<double> v;
        for (double x : xs) v.push_back(eval(g, x, 0.0));
        return v;
    }
    if (ref.mittag_leffler) {
        std::vector<double> v;
        for (double x : xs)
            v.push_back(cfg.c0 * mittag_leffler(cfg.alpha, *ref.mittag_leffler * std::pow(x, cfg.alpha.value())));
        return v;
    }
    if (ref.value) {
        std::vector<double> v(xs.size(), std::nan(""));
        v.back() = *ref.value;
        return v;
    }
    return std::nullopt;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

ProblemConfig parse_config(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!root.IsMap()) throw ConfigError("config must be a mapping");
    ProblemConfig c;
    c.f_text = get_or<std::string>(root, "f", "");
    if (c.f_text.empty()) throw ConfigError("config needs an expression 'f'");
    c.f = parse(c.f_text);
    c.alpha_text = get_or<std::string>(root, "alpha", "");
    if (c.alpha_text.empty()) throw ConfigError("config needs 'alpha'");
    c.alpha = Alpha::parse(c.alpha_text);
    c.c0 = get_or<double>(root, "c0", 0.0);
    c.a = get_or<double>(root, "a", 1.0);
    c.b = get_or<double>(root, "b", 1.0);
    c.n = get_or<int>(root, "n", 1);
    c.output = get_or<std::string>(root, "output", "out");
    c.bound_grid = get_or<int>(root, "bound_grid", 33);
    if (const YAML::Node s = root["solver"]; s && s.IsMap()) {
        c.solver.t_end = get_or<double>(s, "t_end", 0.0);
        c.solver.steps = get_or<int>(s, "steps", 64);
        c.solver.modes = parse_modes(get_or<std::string>(s, "mode", "direct"));
        c.solver.corrector_iterations = get_or<int>(s, "corrector_iterations", 1);
        c.solver.max_steps = get_or<int>(s, "max_steps", 100000);
        c.solver.handoff_time = get_or<double>(s, "handoff_time", 0.0);
        if (const YAML::Node r = s["reference"]; r && r.IsMap()) {
            if (r["value"]) c.solver.reference.value = get_or<double>(r, "value", 0.0);
            if (r["expr"]) c.solver.reference.expr = get_or<std::string>(r, "expr", "");
            if (r["mittag_leffler"]) c.solver.reference.mittag_leffler = get_or<double>(r, "mittag_leffler", 1.0);
        }
    }
    if (const YAML::Node t = root["tolerances"]; t && t.IsMap()) {
        c.tolerances.coefficient_zero = get_or<double>(t, "coefficient_zero", c.tolerances.coefficient_zero);
        c.tolerances.route_agreement = get_or<double>(t, "route_agreement", c.tolerances.route_agreement);
        c.tolerances.derivative_zero = get_or<double>(t, "derivative_zero", c.tolerances.derivative_zero);
    }
    if (const YAML::Node t = root["budget"]; t && t.IsMap()) {
        BudgetSettings bs;
        bs.C0 = get_or<double>(t, "C0", 1.0);
        bs.C1 = get_or<double>(t, "C1", 1.0);
        bs.K = get_or<double>(t, "K", 1.0);
        c.budget = bs;
    }
    validate(c);
    return c;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

void cmd_expand(const ProblemConfig& cfg, std::ostream& out) {
    const ExpansionBundle b = compute_expansion(cfg);
    const SingularExpansion& e = b.recursion;
    const Exponent cutoff = Exponent::integer(e.m + 1, cfg.alpha);
    const GenSeries q = expand_Q(b.table, e.weight(), cfg.alpha, cfg.n, cutoff);

    out << "alpha = " << cfg.alpha.to_string() << " (" << format_number(cfg.alpha.value()) << ")"
        << "  c0 = " << format_number(cfg.c0) << "  n = " << cfg.n << "  m = " << e.m << "  J = " << e.J() << "\n";
    if (b.zero_regularity) out << "m = 0: no singular expansion needed below C^0\n";
    out << "  j  exponent        c_j (recursion)        c_j (series match)     singular\n";
    for (std::size_t k = 0; k < e.J(); ++k) {
        char line[160];
        std::snprintf(line, sizeof line, "%3zu  %-14s  %-21s  %-21s  %s\n", k + 1, e.gammas[k].to_string().c_str(),
                      format_number(e.coeffs[k]).c_str(), format_number(b.series.coeffs[k]).c_str(),
                      e.gammas[k].is_integer() ? "no" : "yes");
        out << line;
    }
    out << "max route discrepancy = " << format_number(b.discrepancy) << "\n";

    ordered_json doc = expansion_json(e);
    doc["alpha"]["text"] = cfg.alpha_text;
    doc["n"] = cfg.n;
    ordered_json rec = ordered_json::array(), ser = ordered_json::array();
    for (double c : e.coeffs) rec.push_back(round15(c));
    for (double c : b.series.coeffs) ser.push_back(round15(c));
    doc["routes"] = {{"recursion", rec}, {"series_match", ser}, {"max_discrepancy", round15(b.discrepancy)}};
    doc["Q"] = {{"cutoff", exponent_json(cutoff)}, {"truncated", q.truncated()}, {"terms", series_json(q)}};
    const auto dir = prepare_output(cfg);
    write_file(dir / "expansion.json", doc.dump(2) + "\n");
    out << "wrote " << (dir / "expansion.json").string() << "\n";
}

void cmd_check(const ProblemConfig& cfg, std::ostream& out) {
    const ExpansionBundle b = compute_expansion(cfg);
    const SmoothnessReport r = check_smoothness(b.table, b.recursion, cfg.tolerances);
    out << "m = " << b.recursion.m << "\n";
    out << "condition d^i/dx^i f(0,c0) = 0 for 0 <= i < m: " << (r.condition_holds ? "holds" : "fails") << "\n";
    if (r.first_violating_i)
        out << "first violating i = " << *r.first_violating_i << " (value "
            << format_number(b.table.at(*r.first_violating_i, 0)) << ")\n";
    out << "verdict: solution is " << (r.condition_holds ? "" : "NOT ") << "C^" << b.recursion.m
        << " near 0\n";
    for (const auto& [g, c] : r.singular_coeffs)
        out << "singular term: c = " << format_number(c) << " at exponent " << g.to_string() << "\n";
    out << "all coefficients zero: " << (r.all_coeffs_zero ? "yes" : "no") << "\n";
    if (!r.corollary_consistent) throw InconsistencyError("smoothness verdict and singular coefficients disagree");

    ordered_json singular = ordered_json::array();
    for (const auto& [g, c] : r.singular_coeffs) {
        ordered_json t = exponent_json(g);
        t["coefficient"] = round15(c);
        singular.push_back(t);
    }
    ordered_json doc = {{"alpha", {{"p", cfg.alpha.p()}, {"q", cfg.alpha.q()}}},
                        {"m", b.recursion.m},
                        {"condition_holds", r.condition_holds},
                        {"first_violating_i", r.first_violating_i ? ordered_json(*r.first_violating_i) : ordered_json()},
                        {"singular_coeffs", singular},
                        {"all_coeffs_zero", r.all_coeffs_zero}};
    const auto dir = prepare_output(cfg);
    write_file(dir / "smoothness.json", doc.dump(2) + "\n");
}

std::string solve_csv(const SolveResult& result, const std::optional<std::vector<double>>& reference) {
    std::string body = "step_index,x,y,z,S_of_x,abs_err_vs_reference\n";
    const bool reg = !result.z.empty();
    for (std::size_t k = 0; k < result.x.size(); ++k) {
        body += std::to_string(k) + "," + format_number(result.x[k]) + "," + format_number(result.y[k]) + ",";
        if (reg) body += format_number(result.z[k]);
        body += "," + format_number(result.S[k]) + ",";
        if (reference && !std::isnan((*reference)[k])) body += format_number(std::abs(result.y[k] - (*reference)[k]));
        body += "\n";
    }
    return body;
}

void cmd_solve(const ProblemConfig& cfg, std::ostream& out) {
    const double t_end = resolve_t_end(cfg, out);
    std::optional<SingularExpansion> expansion;
    const auto dir = prepare_output(cfg);
    for (const SolveMode mode : cfg.solver.modes) {
        if (mode != SolveMode::Direct && !expansion) expansion = compute_expansion(cfg).recursion;
        const SolveResult r = solve(make_solve_config(cfg, t_end, mode, expansion), cfg.f);
        const auto ref = reference_values(cfg, r.x);
        const std::string name = std::string("solve_") + to_string(mode) + ".csv";
        write_file(dir / name, solve_csv(r, ref));
        out << to_string(mode) << ": N = " << cfg.solver.steps << ", y(" << format_number(t_end)
            << ") = " << format_number(r.y.back());
        if (ref && !std::isnan(ref->back())) out << ", abs error = " << format_number(std::abs(r.y.back() - ref->back()));
        out << "  -> " << (dir / name).string() << "\n";
    }
}

void cmd_order(const ProblemConfig& cfg, std::ostream& out) {
    const double t_end = resolve_t_end(cfg, out);
    std::optional<SingularExpansion> expansion;
    std::string body = "mode,steps,error,order\n";
    const auto ref_values = reference_values(cfg, {0.0, t_end});
    for (const SolveMode mode : cfg.solver.modes) {
        if (mode != SolveMode::Direct && !expansion) expansion = compute_expansion(cfg).recursion;
        const SolveConfig sc = make_solve_config(cfg, t_end, mode, expansion);
        Reference ref = FineGridReference{};
        if (ref_values) ref = ref_values->back();
        const OrderReport rep = estimate_order(cfg.f, sc, ref);
        for (int i = 0; i < 3; ++i) {
            body += std::string(to_string(mode)) + "," + std::to_string(rep.steps[i]) + "," +
                    format_number(rep.errors[i]) + ",";
            if (i > 0) body += format_number(rep.orders[i - 1]);
            body += "\n";
        }
        out << to_string(mode) << ": errors " << format_number(rep.errors[0]) << ", " << format_number(rep.errors[1])
            << ", " << format_number(rep.errors[2]) << "; orders " << format_number(rep.orders[0]) << ", "
            << format_number(rep.orders[1]) << "\n";
    }
    const auto dir = prepare_output(cfg);
    write_file(dir / "order.csv", body);
    out << "wrote " << (dir / "order.csv").string() << "\n";
}

void cmd_hstar(const ProblemConfig& cfg, std::ostream& out) {
    const double M = estimate_bound_M(cfg.f, cfg.n, cfg.a, cfg.c0, cfg.b, cfg.bound_grid);
    out << "M (sampled, grid " << cfg.bound_grid << ") = " << format_number(M) << "\n";
    if (!(M > 0.0)) {
        out << "h* = " << format_number(cfg.a) << " (all sampled derivatives vanish)\n";
        return;
    }
    const double hs = h_star(cfg.alpha, cfg.a, cfg.b, M);
    out << "h* = " << format_number(hs) << "\n";
    if (cfg.budget) {
        const ExpansionBundle b = compute_expansion(cfg);
        if (b.recursion.m < 1) {
            out << "theorem budget: not applicable for m = 0\n";
            return;
        }
        const GenSeries qs = q_minus_s(b.table, b.recursion);
        TheoremBudget t;
        t.C0 = cfg.budget->C0;
        t.C1 = cfg.budget->C1;
        t.K = cfg.budget->K;
        t.m = b.recursion.m;
        t.alpha = cfg.alpha;
        const double h = largest_budget_h(qs, t, hs);
        out << "largest h with the budget satisfied (C0 = " << format_number(t.C0) << ", C1 = "
            << format_number(t.C1) << ", K = " << format_number(t.K) << "): " << format_number(h) << "\n";
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Singular expansions and regularized solvers for Caputo fractional ODEs"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::string> output, mode;
    std::optional<int> steps;
    std::optional<double> t_end;
    app.add_option("--config", config_path, "YAML problem file")->required();
    app.add_option("--output", output, "output directory");
    app.add_option("--mode", mode, "direct | regularized | handoff | both");
    app.add_option("--steps", steps, "number of solver steps N");
    app.add_option("--t-end", t_end, "end of the solve interval");
    app.fallthrough();
    auto* expand = app.add_subcommand("expand", "compute the singular expansion S");
    auto* check = app.add_subcommand("check", "decide the C^m smoothness criterion");
    auto* solve_cmd = app.add_subcommand("solve", "solve the Volterra equation on a uniform grid");
    auto* order = app.add_subcommand("order", "empirical convergence order with N, 2N, 4N steps");
    auto* hstar = app.add_subcommand("hstar", "estimate M and the existence interval h*");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        ProblemConfig cfg = load_config(config_path);
        if (output) cfg.output = *output;
        if (mode) cfg.solver.modes = parse_modes(*mode);
        if (steps) cfg.solver.steps = *steps;
        if (t_end) cfg.solver.t_end = *t_end;
        validate(cfg);
        if (*expand) cmd_expand(cfg, out);
        else if (*check) cmd_check(cfg, out);
        else if (*solve_cmd) cmd_solve(cfg, out);
        else if (*order) cmd_order(cfg, out);
        else if (*hstar) cmd_hstar(cfg, out);
        return kOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DomainError& e) {
        err << "math domain error: " << e.what() << "\n";
        return kDomainError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
}

}  // namespace fracsmooth::cli
