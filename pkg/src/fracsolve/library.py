"""Benchmark problem catalog.

Each case bundles a ready-to-solve problem with (when available) its
analytical solution, so work-precision sweeps can measure true errors.
`exact` callables accept a scalar time or a 1-D mesh and return a state
row (d,) or a trajectory (len(t), d).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import LengthMismatch, NoExactSolution, NonPositiveExponent
from .multiterm import oscillator_problem, solve_multiterm
from .problems import (
    FodeProblem,
    MultiTermProblem,
    Solution,
    SolverConfig,
    make_fode_problem,
    make_multiterm_problem,
)
from .solvers import solve as solve_fode
from .specfun import MittagLefflerParams, mittag_leffler

__all__ = [
    "BenchmarkCase",
    "CASES",
    "get_case",
    "run_case",
    "applicable_methods",
    "exact_error",
    "case_linear_singleterm",
    "case_nonlinear_singleterm",
    "case_nonstiff_system",
    "case_stiff_system",
    "case_chua",
    "case_bagley_torvik",
    "case_multiterm_oscillation",
    "case_oscillator",
    "case_fermentation",
]


@dataclass(frozen=True)
class BenchmarkCase:
    id: str
    kind: str  # "fode" or "multiterm"
    problem: Union[FodeProblem, MultiTermProblem]
    exact: Optional[Callable]
    description: str


def _columns(t, *comps):
    """Stack per-component values into (d,) for scalar t or (N, d) for a mesh."""
    t = np.asarray(t, dtype=float)
    cols = [np.broadcast_to(np.asarray(c, dtype=float), t.shape) for c in comps]
    if t.ndim == 0:
        return np.array([float(c) for c in cols])
    return np.stack(cols, axis=-1)


def case_linear_singleterm(alpha: float = 0.5) -> BenchmarkCase:
    """Single-term equation with the closed-form solution

        u(t) = t^8 - 3 t^{4+alpha/2} + (9/4) t^alpha  on [0, 1], u(0) = 0.

    The forcing carries a cubic term that cancels u^{3/2} exactly along the
    solution, so despite the power nonlinearity the problem is benign.
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    c8 = 40320.0 / math.gamma(9.0 - alpha)
    c4 = 3.0 * math.gamma(5.0 + alpha / 2.0) / math.gamma(5.0 - alpha / 2.0)
    c0 = 2.25 * math.gamma(alpha + 1.0)

    def rhs(t, y, p):
        u = y[0]
        cube = 1.5 * t ** (alpha / 2.0) - t**4
        return (
            c8 * t ** (8.0 - alpha)
            - c4 * t ** (4.0 - alpha / 2.0)
            + c0
            + cube**3
            - u**1.5
        )

    def exact(t):
        t = np.asarray(t, dtype=float)
        return _columns(t, t**8 - 3.0 * t ** (4.0 + alpha / 2.0) + 2.25 * t**alpha)

    problem = make_fode_problem(rhs, alpha, 0.0, (0.0, 1.0))
    return BenchmarkCase(
        id="linear1",
        kind="fode",
        problem=problem,
        exact=exact,
        description="single-term equation, polynomial closed-form solution",
    )


def case_nonlinear_singleterm(alpha: float = 0.5) -> BenchmarkCase:
    """Fractional relaxation D^alpha u = -10 u, u(0) = 1, on [0, 1]."""
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    ml = MittagLefflerParams(alpha=alpha, beta=1.0, gamma=1.0)

    def rhs(t, y, p):
        return -10.0 * y

    def _point(tt: float) -> float:
        return mittag_leffler(ml, -10.0 * tt**alpha)

    def exact(t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return np.array([_point(float(t))])
        return np.array([[_point(float(tt))] for tt in t])

    problem = make_fode_problem(rhs, alpha, 1.0, (0.0, 1.0))
    return BenchmarkCase(
        id="nonlinear1",
        kind="fode",
        problem=problem,
        exact=exact,
        description="fractional relaxation with Mittag-Leffler solution",
    )


def case_nonstiff_system() -> BenchmarkCase:
    """Non-stiff incommensurate 3-state model on [0, 5].

    Orders [0.5, 0.2, 0.6]; the solution [t+1, t^1.2+0.5, t^1.8+0.3] makes
    each right-hand side a clean fractional monomial derivative.
    """
    g22 = math.gamma(2.2)
    g28 = math.gamma(2.8)
    rt_pi = math.sqrt(math.pi)

    def rhs(t, y, p):
        u1, u2, u3 = y
        prod = (u2 - 0.5) * (u3 - 0.3)
        return np.array(
            [
                (prod ** (1.0 / 6.0) + math.sqrt(t)) / rt_pi,
                g22 * (u1 - 1.0),
                (g28 / g22) * (u2 - 0.5),
            ]
        )

    def exact(t):
        t = np.asarray(t, dtype=float)
        return _columns(t, t + 1.0, t**1.2 + 0.5, t**1.8 + 0.3)

    problem = make_fode_problem(rhs, [0.5, 0.2, 0.6], [1.0, 0.5, 0.3], (0.0, 5.0))
    return BenchmarkCase(
        id="nonstiff3",
        kind="fode",
        problem=problem,
        exact=exact,
        description="non-stiff incommensurate 3-state model",
    )


_STIFF_A = np.array(
    [
        [-10000.0, 0.0, 1.0],
        [-0.05, -0.08, -0.2],
        [1.0, 0.0, -1.0],
    ]
)
_STIFF_B = np.array(
    [
        [-0.6, 0.0, 0.2],
        [-0.1, -0.2, 0.0],
        [0.0, -0.5, -0.8],
    ]
)


def case_stiff_system(a_coeffs=None, sigma_exponents=None) -> BenchmarkCase:
    """Stiff commensurate linear system (order 0.5) on [0, 1].

    D^0.5 u = (A + B) u + g(t) with a -10000 entry in A.  The forcing g is
    manufactured so that

        u_i(t) = u0_i + a_{2i-1} G_{2i-1} t^{s_{2i-1}} + a_{2i} G_{2i} t^{s_{2i}}

    is exact for ANY six (a_k, s_k) pairs, where G_k = Gamma(s_k+1) /
    Gamma(s_k+1-0.5).  Defaults: a_k = 1, s_k = k/2.
    """
    beta = 0.5
    a = np.ones(6) if a_coeffs is None else np.asarray(a_coeffs, dtype=float)
    sig = (
        0.5 * np.arange(1, 7)
        if sigma_exponents is None
        else np.asarray(sigma_exponents, dtype=float)
    )
    if a.shape != (6,) or sig.shape != (6,):
        raise LengthMismatch("six (a_k, sigma_k) pairs are required")
    if np.any(sig <= 0.0) or not np.all(np.isfinite(sig)):
        raise NonPositiveExponent(f"exponents must be positive, got {sig}")
    gk = np.array([math.gamma(s + 1.0) / math.gamma(s + 1.0 - beta) for s in sig])
    M = _STIFF_A + _STIFF_B
    u0 = np.ones(3)

    def exact(t):
        t = np.asarray(t, dtype=float)
        comps = []
        for i in range(3):
            k1, k2 = 2 * i, 2 * i + 1
            comps.append(
                u0[i]
                + a[k1] * gk[k1] * t ** sig[k1]
                + a[k2] * gk[k2] * t ** sig[k2]
            )
        return _columns(t, *comps)

    def _caputo_of_exact(t: float) -> np.ndarray:
        out = np.empty(3)
        for i in range(3):
            k1, k2 = 2 * i, 2 * i + 1
            out[i] = (
                a[k1] * gk[k1] ** 2 * t ** (sig[k1] - beta)
                + a[k2] * gk[k2] ** 2 * t ** (sig[k2] - beta)
            )
        return out

    def forcing(t: float) -> np.ndarray:
        return _caputo_of_exact(t) - M @ exact(t)

    def rhs(t, y, p):
        return M @ y + forcing(t)

    problem = make_fode_problem(rhs, [beta] * 3, u0, (0.0, 1.0))
    return BenchmarkCase(
        id="stiff3",
        kind="fode",
        problem=problem,
        exact=exact,
        description="stiff commensurate linear system, manufactured solution",
    )


def case_chua() -> BenchmarkCase:
    """Fractional Chua circuit, orders [0.93, 0.99, 0.92], on [0, 100]."""

    def rhs(t, y, p):
        a, b, c, m0, m1 = p
        x1, x2, x3 = y
        f = m1 * x1 + m0 * (abs(x1 + 1.0) - abs(x1 - 1.0))
        return np.array([a * (x2 - x1 - f), x1 - x2 + x3, -b * x2 - c * x3])

    problem = make_fode_problem(
        rhs,
        [0.93, 0.99, 0.92],
        [0.2, -0.1, 0.1],
        (0.0, 100.0),
        params=(10.725, 10.593, 0.268, -0.1927, -0.7872),
    )
    return BenchmarkCase(
        id="chua",
        kind="fode",
        problem=problem,
        exact=None,
        description="chaotic Chua circuit with piecewise-linear nonlinearity",
    )


def case_bagley_torvik() -> BenchmarkCase:
    """Bagley-Torvik plate equation with a rectangular pulse forcing:

        u'' + (1/2) D^1.5 u + (1/2) u = 8 on [0, 1], 0 afterwards,

    u(0) = u'(0) = 0, integrated to T = 20.  No closed-form reference.
    """

    def forcing(t, y, p):
        return 8.0 if t <= 1.0 else 0.0

    problem = make_multiterm_problem(
        lambdas=[1.0, 0.5, 0.5],
        orders=[2.0, 1.5, 0.0],
        rhs=forcing,
        init=[0.0, 0.0],
        tspan=(0.0, 20.0),
    )
    return BenchmarkCase(
        id="bagley",
        kind="multiterm",
        problem=problem,
        exact=None,
        description="plate-in-fluid equation with half-order damping",
    )


def case_multiterm_oscillation() -> BenchmarkCase:
    """Five-term driven oscillation

        u''' + D^2.5 u + u'' + 4 u' + D^0.5 u + 4 u = 6 cos t

    with u(0) = 1, u'(0) = 1, u''(0) = -1 on [0, 100]; the fractional terms
    cancel along u(t) = sqrt(2) sin(t + pi/4), which solves the equation.
    """

    problem = make_multiterm_problem(
        lambdas=[1.0, 1.0, 1.0, 4.0, 1.0, 4.0],
        orders=[3.0, 2.5, 2.0, 1.0, 0.5, 0.0],
        rhs=lambda t, y, p: 6.0 * math.cos(t),
        init=[1.0, 1.0, -1.0],
        tspan=(0.0, 100.0),
    )
    root2 = math.sqrt(2.0)

    def exact(t):
        t = np.asarray(t, dtype=float)
        return _columns(t, root2 * np.sin(t + 0.25 * math.pi))

    return BenchmarkCase(
        id="mtosc",
        kind="multiterm",
        problem=problem,
        exact=exact,
        description="five-term oscillation with sinusoidal solution",
    )


def case_oscillator(theta: float = 0.81695, a: float = -1.0, b: float = 1.2,
                    g: float = 4.0) -> BenchmarkCase:
    """Harmonic oscillator with fractional damping order theta on [0, 80]."""
    problem = oscillator_problem(theta, a=a, b=b, g=g)
    return BenchmarkCase(
        id="oscillator",
        kind="multiterm",
        problem=problem,
        exact=None,
        description="oscillator with tunable fractional damping order",
    )


def case_fermentation(init=(0.5, 100.0, 0.0)) -> BenchmarkCase:
    """Fermentation kinetics (biomass B, substrate S, product P) on [0, 48].

    Orders and rate constants come from a fitted fractional model; the
    initial concentrations are a constructor argument because no source
    values are available -- the defaults are a smoke-test placeholder only.
    """

    def rhs(t, y, p):
        kc, km, ks, kp = p
        B, S, P = y
        return np.array([kc * B * S - km * B, -ks * B * S, kp * B * S])

    problem = make_fode_problem(
        rhs,
        [0.775347, 0.873674, 0.976698],
        list(init),
        (0.0, 48.0),
        params=(0.004265, 0.000499, 0.055166, 0.015805),
    )
    return BenchmarkCase(
        id="ferment",
        kind="fode",
        problem=problem,
        exact=None,
        description="fermentation kinetics with fitted fractional orders",
    )


CASES = {
    "linear1": case_linear_singleterm,
    "nonlinear1": case_nonlinear_singleterm,
    "nonstiff3": case_nonstiff_system,
    "stiff3": case_stiff_system,
    "chua": case_chua,
    "bagley": case_bagley_torvik,
    "mtosc": case_multiterm_oscillation,
    "oscillator": case_oscillator,
    "ferment": case_fermentation,
}

_FODE_METHODS = ("piex", "pirect", "pitrap", "pece")
_FLMM_METHODS = ("bdf2", "trapezoid", "newtongregory")
_MT_METHODS = ("mtpiex", "mtpirect", "mtpitrap", "mtpece")


def get_case(case_id: str, **kwargs) -> BenchmarkCase:
    try:
        factory = CASES[case_id]
    except KeyError:
        valid = ", ".join(sorted(CASES))
        raise ValueError(f"unknown case {case_id!r}; expected one of: {valid}") from None
    return factory(**kwargs)


def applicable_methods(case: BenchmarkCase) -> tuple[str, ...]:
    """Method tokens that can run this case."""
    if case.kind == "multiterm":
        return _MT_METHODS
    if case.problem.orders.is_commensurate():
        return _FODE_METHODS + _FLMM_METHODS
    return _FODE_METHODS


def run_case(case: BenchmarkCase, method: str, config: SolverConfig) -> Solution:
    """Solve a case with a method token valid for its kind."""
    if case.kind == "multiterm":
        return solve_multiterm(case.problem, method, config)
    return solve_fode(case.problem, method, config)


def exact_error(solution: Solution, case: BenchmarkCase, metric: str = "final_time") -> float:
    """Error of a trajectory against the case's analytical solution.

    final_time: infinity norm of the last state row's error.
    sup_norm: worst componentwise error over the whole mesh.
    """
    if case.exact is None:
        raise NoExactSolution(f"case {case.id!r} has no analytical solution")
    if metric == "final_time":
        ref = case.exact(float(solution.t[-1]))
        return float(np.max(np.abs(solution.final_state() - ref)))
    if metric == "sup_norm":
        ref = case.exact(solution.t)
        return float(np.max(np.abs(solution.states - ref)))
    raise ValueError(f"unknown metric {metric!r}; use final_time or sup_norm")
