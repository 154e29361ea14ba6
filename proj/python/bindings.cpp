#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracsmooth/error.hpp"
#include "fracsmooth/expansion.hpp"
#include "fracsmooth/expr.hpp"
#include "fracsmooth/lattice.hpp"
#include "fracsmooth/series.hpp"
#include "fracsmooth/volterra.hpp"

#include <limits>
#include <optional>
#include <string>

namespace py = pybind11;
using namespace fracsmooth;

namespace {

Alpha to_alpha(const py::object& a) {
    if (py::isinstance<Alpha>(a)) return a.cast<Alpha>();
    if (py::isinstance<py::str>(a)) return Alpha::parse(a.cast<std::string>());
    if (py::isinstance<py::tuple>(a)) {
        const auto t = a.cast<std::pair<std::int64_t, std::int64_t>>();
        return {t.first, t.second};
    }
    return Alpha::from_decimal(a.cast<double>());
}

Expr to_expr(const py::object& f) {
    if (py::isinstance<Expr>(f)) return f.cast<Expr>();
    return parse(f.cast<std::string>());
}

py::dict exponent_dict(const Exponent& e) {
    py::dict d;
    d["i"] = e.i();
    d["j"] = e.j();
    d["value"] = e.value();
    return d;
}

SingularExpansion expand(const py::object& f, const py::object& alpha, int n, double c0, const std::string& route) {
    const Alpha a = to_alpha(alpha);
    const DerivTable t = derivative_table(to_expr(f), n, c0);
    const LatticeSummary lat = build_lattice_allow_empty(a, n);
    if (route == "recursion") return coefficients_by_recursion(t, lat);
    if (route == "series") return coefficients_by_series_match(t, lat);
    throw ConfigError("route must be 'recursion' or 'series'");
}

SolveMode to_mode(const std::string& s) {
    if (s == "direct") return SolveMode::Direct;
    if (s == "regularized") return SolveMode::Regularized;
    if (s == "handoff") return SolveMode::Handoff;
    throw ConfigError("mode must be direct, regularized or handoff");
}

SolveConfig make_config(const py::object& f, const py::object& alpha, double c0, double t_end, int steps,
                        const std::string& mode, int n, int corrector_iterations, double b, double handoff_time) {
    SolveConfig c;
    c.alpha = to_alpha(alpha);
    c.c0 = c0;
    c.t_end = t_end;
    c.steps = steps;
    c.mode = to_mode(mode);
    c.corrector_iterations = corrector_iterations;
    c.b = b;
    c.handoff_time = handoff_time;
    if (c.mode != SolveMode::Direct) c.expansion = expand(f, alpha, n, c0, "recursion");
    return c;
}

}  // namespace

PYBIND11_MODULE(_fracsmooth, m) {
    m.doc() = "Singular expansions and regularized solvers for Caputo fractional ODEs";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<InconsistencyError>(m, "InconsistencyError", base.ptr());
    py::register_exception<ZeroRegularity>(m, "ZeroRegularity", base.ptr());

    py::class_<Expr>(m, "Expr")
        .def("__call__", [](const Expr& f, double x, double y) { return eval(f, x, y); })
        .def("__str__", [](const Expr& f) { return to_string(f); })
        .def("__repr__", [](const Expr& f) { return "Expr('" + to_string(f) + "')"; })
        .def("__eq__", [](const Expr& a, const Expr& b) { return a == b; })
        .def("diff", [](const Expr& f, const std::string& v) {
            if (v != "x" && v != "y") throw ConfigError("variable must be 'x' or 'y'");
            return differentiate(f, v == "x" ? Var::X : Var::Y);
        });

    m.def("parse", &parse, py::arg("source"));
    m.def("eval", [](const py::object& f, double x, double y) { return eval(to_expr(f), x, y); }, py::arg("f"),
          py::arg("x"), py::arg("y"));
    m.def("mixed_partial",
          [](const py::object& f, int p, int q, double x, double y) { return mixed_partial(to_expr(f), p, q, x, y); },
          py::arg("f"), py::arg("p"), py::arg("q"), py::arg("x"), py::arg("y"));
    m.def("derivative_table",
          [](const py::object& f, int n, double c0) { return derivative_table(to_expr(f), n, c0).entries(); },
          py::arg("f"), py::arg("n"), py::arg("c0"), "dict (p, q) -> d^p_x d^q_y f(0, c0)");
    m.def("estimate_bound_M",
          [](const py::object& f, int n, double a, double c0, double b, int grid) {
              return estimate_bound_M(to_expr(f), n, a, c0, b, grid);
          },
          py::arg("f"), py::arg("n"), py::arg("a"), py::arg("c0"), py::arg("b"), py::arg("grid") = 33);

    py::class_<Alpha>(m, "Alpha")
        .def(py::init<std::int64_t, std::int64_t>(), py::arg("p"), py::arg("q"))
        .def_static("parse", &Alpha::parse)
        .def_static("from_decimal", &Alpha::from_decimal, py::arg("value"), py::arg("max_den") = 1000000)
        .def_property_readonly("p", &Alpha::p)
        .def_property_readonly("q", &Alpha::q)
        .def_property_readonly("value", &Alpha::value)
        .def("__eq__", [](const Alpha& a, const Alpha& b) { return a == b; })
        .def("__str__", &Alpha::to_string)
        .def("__repr__", [](const Alpha& a) { return "Alpha(" + std::to_string(a.p()) + ", " + std::to_string(a.q()) + ")"; });

    py::class_<LatticeSummary>(m, "LatticeSummary")
        .def_readonly("m", &LatticeSummary::m)
        .def_readonly("n", &LatticeSummary::n)
        .def_property_readonly("gammas",
                               [](const LatticeSummary& l) {
                                   py::list out;
                                   for (const Exponent& e : l.gammas) out.append(exponent_dict(e));
                                   return out;
                               })
        .def_readonly("theta", &LatticeSummary::theta)
        .def_property_readonly("J", &LatticeSummary::J);

    m.def("build_lattice", [](const py::object& alpha, int n) { return build_lattice(to_alpha(alpha), n); },
          py::arg("alpha"), py::arg("n"));

    py::class_<SingularExpansion>(m, "SingularExpansion")
        .def_readonly("c0", &SingularExpansion::c0)
        .def_readonly("m", &SingularExpansion::m)
        .def_readonly("n", &SingularExpansion::n)
        .def_readonly("coeffs", &SingularExpansion::coeffs)
        .def_readonly("theta", &SingularExpansion::theta)
        .def_property_readonly("J", &SingularExpansion::J)
        .def_property_readonly("gammas",
                               [](const SingularExpansion& e) {
                                   py::list out;
                                   for (const Exponent& g : e.gammas) out.append(exponent_dict(g));
                                   return out;
                               })
        .def("S", [](const SingularExpansion& e, double x) { return eval_S(e, x); })
        .def("S_prime", [](const SingularExpansion& e, double x) { return eval_S_prime(e, x); });

    m.def("expand", &expand, py::arg("f"), py::arg("alpha"), py::arg("n"), py::arg("c0") = 0.0,
          py::arg("route") = "recursion");

    m.def(
        "check_smoothness",
        [](const py::object& f, const py::object& alpha, int n, double c0) {
            const DerivTable t = derivative_table(to_expr(f), n, c0);
            const SingularExpansion e = coefficients_by_recursion(t, build_lattice_allow_empty(to_alpha(alpha), n));
            const SmoothnessReport r = check_smoothness(t, e);
            py::dict d;
            d["condition_holds"] = r.condition_holds;
            d["first_violating_i"] = r.first_violating_i ? py::cast(*r.first_violating_i) : py::none();
            py::list sing;
            for (const auto& [g, c] : r.singular_coeffs) {
                py::dict s = exponent_dict(g);
                s["coefficient"] = c;
                sing.append(s);
            }
            d["singular_coeffs"] = sing;
            d["all_coeffs_zero"] = r.all_coeffs_zero;
            return d;
        },
        py::arg("f"), py::arg("alpha"), py::arg("n"), py::arg("c0") = 0.0);

    m.def("h_star", [](const py::object& alpha, double a, double b, double M) { return h_star(to_alpha(alpha), a, b, M); },
          py::arg("alpha"), py::arg("a"), py::arg("b"), py::arg("M"));
    m.def(
        "theorem_budget_holds",
        [](double C0, double C1, double K, double h, double norm, int mm, const py::object& alpha) {
            TheoremBudget t;
            t.C0 = C0;
            t.C1 = C1;
            t.K = K;
            t.h = h;
            t.norm_QS_prime = norm;
            t.m = mm;
            t.alpha = to_alpha(alpha);
            return theorem_budget_holds(t);
        },
        py::arg("C0"), py::arg("C1"), py::arg("K"), py::arg("h"), py::arg("norm_QS_prime"), py::arg("m"),
        py::arg("alpha"));

    m.def("gamma_fn", &gamma_fn);
    m.def("beta_fn", &beta_fn);
    m.def("mittag_leffler", py::overload_cast<double, double, double>(&mittag_leffler), py::arg("alpha"),
          py::arg("x"), py::arg("tol") = 1e-15);

    py::class_<SolveResult>(m, "SolveResult")
        .def_property_readonly("mode", [](const SolveResult& r) { return std::string(to_string(r.mode)); })
        .def_readonly("x", &SolveResult::x)
        .def_readonly("y", &SolveResult::y)
        .def_readonly("z", &SolveResult::z)
        .def_readonly("S", &SolveResult::S)
        .def_readonly("wall_seconds", &SolveResult::wall_seconds);

    m.def(
        "solve",
        [](const py::object& f, const py::object& alpha, double c0, double t_end, int steps, const std::string& mode,
           int n, int corrector_iterations, double b, double handoff_time) {
            const SolveConfig c = make_config(f, alpha, c0, t_end, steps, mode, n, corrector_iterations, b,
                                              handoff_time);
            const Expr fx = to_expr(f);
            py::gil_scoped_release release;
            return solve(c, fx);
        },
        py::arg("f"), py::arg("alpha"), py::arg("c0"), py::arg("t_end"), py::arg("steps"),
        py::arg("mode") = "direct", py::arg("n") = 5, py::arg("corrector_iterations") = 1,
        py::arg("b") = std::numeric_limits<double>::infinity(), py::arg("handoff_time") = 0.0);

    m.def(
        "estimate_order",
        [](const py::object& f, const py::object& alpha, double c0, double t_end, int steps, const std::string& mode,
           std::optional<double> reference, int n, int corrector_iterations) {
            const SolveConfig c = make_config(f, alpha, c0, t_end, steps, mode, n, corrector_iterations,
                                              std::numeric_limits<double>::infinity(), t_end / 8);
            const Reference ref = reference ? Reference{*reference} : Reference{FineGridReference{}};
            const OrderReport r = estimate_order(to_expr(f), c, ref);
            py::dict d;
            d["steps"] = r.steps;
            d["errors"] = r.errors;
            d["orders"] = r.orders;
            d["reference"] = r.reference_value;
            return d;
        },
        py::arg("f"), py::arg("alpha"), py::arg("c0"), py::arg("t_end"), py::arg("steps"),
        py::arg("mode") = "direct", py::arg("reference") = py::none(), py::arg("n") = 5,
        py::arg("corrector_iterations") = 1);
}
