"""Singular expansions and regularized solvers for Caputo fractional ODEs.

Thin wrapper over the C++ core. Expressions may be passed as text or as
parsed ``Expr`` objects; ``alpha`` accepts ``"p/q"``, a ``(p, q)`` tuple, an
``Alpha`` or a decimal.
"""

from ._fracsmooth import (
    Alpha,
    ConfigError,
    DomainError,
    Error,
    Expr,
    InconsistencyError,
    LatticeSummary,
    ParseError,
    SingularExpansion,
    SolveResult,
    ZeroRegularity,
    beta_fn,
    build_lattice,
    check_smoothness,
    derivative_table,
    estimate_bound_M,
    estimate_order,
    eval,
    expand,
    gamma_fn,
    h_star,
    mittag_leffler,
    mixed_partial,
    parse,
    solve,
    theorem_budget_holds,
)

__all__ = [
    "Alpha",
    "ConfigError",
    "DomainError",
    "Error",
    "Expr",
    "InconsistencyError",
    "LatticeSummary",
    "ParseError",
    "SingularExpansion",
    "SolveResult",
    "ZeroRegularity",
    "beta_fn",
    "build_lattice",
    "check_smoothness",
    "derivative_table",
    "estimate_bound_M",
    "estimate_order",
    "eval",
    "expand",
    "gamma_fn",
    "h_star",
    "mittag_leffler",
    "mixed_partial",
    "parse",
    "solve",
    "theorem_budget_holds",
]
