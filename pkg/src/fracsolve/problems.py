"""Problem containers, solver configuration and the uniform time mesh.

A fractional initial value problem couples Caputo derivatives of possibly
distinct orders alpha_i with a right-hand side f(t, y, p).  Each component
carries ceil(alpha_i) initial derivative values; those feed the polynomial
"Taylor part" that every product-integration formula starts from.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyTimeSpan,
    LengthMismatch,
    MissingInitialConditions,
    NonPositiveOrder,
    ZeroLeadingCoefficient,
)

RhsFn = Callable[[float, np.ndarray, Any], Any]

#: orders closer than this are treated as equal (commensurate check, merging)
_ORDER_TOL = 1e-14


class Retcode(enum.Enum):
    Success = "Success"
    NewtonFailed = "NewtonFailed"
    Diverged = "Diverged"


@dataclass(frozen=True)
class FractionalOrderVec:
    """Vector of differentiation orders with the derived integer data."""

    alphas: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.alphas:
            raise DimensionMismatch("orders vector is empty")
        for a in self.alphas:
            if not (a > 0.0 and math.isfinite(a)):
                raise NonPositiveOrder(f"order {a!r} is not a positive finite real")

    def __len__(self) -> int:
        return len(self.alphas)

    def is_commensurate(self) -> bool:
        """True when all orders coincide within 1e-14."""
        lo, hi = min(self.alphas), max(self.alphas)
        return hi - lo <= _ORDER_TOL

    def m_ceil(self) -> tuple[int, ...]:
        """Number of initial derivative values each component requires."""
        return tuple(math.ceil(a) for a in self.alphas)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.alphas, dtype=float)


def _normalize_init(init, orders: FractionalOrderVec) -> tuple[np.ndarray, ...]:
    """Coerce user initial data into one Taylor row per component.

    Accepted forms: scalar (single component, first order <= 1), flat vector
    (one value per component when all m_i == 1, or the m values of a single
    component), or an explicit row per component.
    """
    m = orders.m_ceil()
    d = len(orders)
    if np.isscalar(init):
        init = [init]
    rows: list[np.ndarray]
    arr = None
    try:
        arr = np.asarray(init, dtype=float)
    except (TypeError, ValueError):
        arr = None
    if arr is not None and arr.ndim == 1:
        if d == 1:
            rows = [arr]
        elif len(arr) == d and all(mi == 1 for mi in m):
            rows = [arr[i : i + 1] for i in range(d)]
        else:
            raise DimensionMismatch(
                f"flat init of length {len(arr)} does not match {d} components "
                f"with derivative counts {m}"
            )
    elif arr is not None and arr.ndim == 2:
        if arr.shape[0] != d:
            raise DimensionMismatch(
                f"init has {arr.shape[0]} rows for {d} components"
            )
        rows = [arr[i] for i in range(d)]
    else:
        # ragged per-component rows
        if len(init) != d:
            raise DimensionMismatch(f"init has {len(init)} rows for {d} components")
        rows = [np.atleast_1d(np.asarray(r, dtype=float)) for r in init]
    out = []
    for i, row in enumerate(rows):
        if row.ndim != 1 or len(row) != m[i]:
            raise DimensionMismatch(
                f"component {i} needs {m[i]} initial value(s) "
                f"(order {orders.alphas[i]}), got {len(np.atleast_1d(row))}"
            )
        out.append(np.array(row, dtype=float))
    return tuple(out)


def _check_tspan(tspan) -> tuple[float, float]:
    t0, tf = float(tspan[0]), float(tspan[1])
    if not (tf > t0):
        raise EmptyTimeSpan(f"tspan ({t0}, {tf}) is empty or inverted")
    return t0, tf


@dataclass(frozen=True)
class FodeProblem:
    """System of Caputo FODEs D^{alpha_i} y_i = f_i(t, y, p)."""

    rhs: RhsFn
    orders: FractionalOrderVec
    init: tuple[np.ndarray, ...]
    tspan: tuple[float, float]
    params: Any = None

    @property
    def dimension(self) -> int:
        return len(self.orders)

    def y0(self) -> np.ndarray:
        """State value at t0 (the zeroth Taylor coefficient per component)."""
        return np.array([row[0] for row in self.init])


def make_fode_problem(rhs: RhsFn, orders, init, tspan, params: Any = None) -> FodeProblem:
    """Validate and freeze a fractional initial value problem.

    `orders` may be a scalar, a sequence of positive reals, or an existing
    FractionalOrderVec; `init` supplies ceil(alpha_i) derivative values per
    component (see _normalize_init for accepted layouts).
    """
    if not callable(rhs):
        raise TypeError("rhs must be callable (t, y, p) -> dy")
    if isinstance(orders, FractionalOrderVec):
        ov = orders
    elif np.isscalar(orders):
        ov = FractionalOrderVec((float(orders),))
    else:
        ov = FractionalOrderVec(tuple(float(a) for a in orders))
    rows = _normalize_init(init, ov)
    span = _check_tspan(tspan)
    return FodeProblem(rhs=rhs, orders=ov, init=rows, tspan=span, params=params)


@dataclass(frozen=True)
class MultiTermProblem:
    """Linear combination sum_k lambda_k D^{alpha_k} y = f(t, y, p), scalar y.

    Stored in normalized form: orders strictly ascending and positive,
    duplicate orders merged, zero coefficients dropped, and any order-zero
    term folded into the right-hand side as -lambda_0 * y (recorded in
    zero_order_coeff).  `init` holds y(0), y'(0), ... up to ceil(max order).
    """

    lambdas: tuple[float, ...]
    orders: tuple[float, ...]
    rhs: Callable[[float, float, Any], float]
    init: tuple[float, ...]
    tspan: tuple[float, float]
    params: Any = None
    zero_order_coeff: float = 0.0

    @property
    def max_order(self) -> float:
        return self.orders[-1]


def make_multiterm_problem(
    lambdas, orders, rhs, init, tspan, params: Any = None
) -> MultiTermProblem:
    """Normalize a scalar multi-term equation.

    Terms are sorted by order; equal orders (within 1e-14) have their
    coefficients summed; zero-coefficient terms are dropped; an order-zero
    term lambda_0 * y moves to the right-hand side with flipped sign.
    """
    lam = [float(x) for x in lambdas]
    ords = [float(a) for a in orders]
    if len(lam) != len(ords):
        raise LengthMismatch(
            f"{len(lam)} coefficients paired with {len(ords)} orders"
        )
    if not lam:
        raise LengthMismatch("empty multi-term equation")
    for a in ords:
        if a < 0.0 or not math.isfinite(a):
            raise NonPositiveOrder(f"order {a!r} is negative or non-finite")
    pairs = sorted(zip(ords, lam))
    merged: list[list[float]] = []
    for a, l in pairs:
        if merged and a - merged[-1][0] <= _ORDER_TOL:
            merged[-1][1] += l
        else:
            merged.append([a, l])
    positive = [(a, l) for a, l in merged if a > _ORDER_TOL]
    if not positive:
        raise NonPositiveOrder("multi-term equation needs at least one positive order")
    if positive[-1][1] == 0.0:
        raise ZeroLeadingCoefficient(
            f"coefficient of highest order {positive[-1][0]} is zero"
        )
    lam0 = sum(l for a, l in merged if a <= _ORDER_TOL)
    kept = [(a, l) for a, l in positive if l != 0.0]
    # the leading term survives by the check above
    t0, tf = _check_tspan(tspan)
    m = math.ceil(kept[-1][0])
    init_t = tuple(float(v) for v in np.atleast_1d(np.asarray(init, dtype=float)))
    if len(init_t) != m:
        raise MissingInitialConditions(
            f"highest order {kept[-1][0]} needs {m} initial value(s), got {len(init_t)}"
        )
    if lam0 != 0.0:
        user_rhs = rhs

        def folded(t: float, y: float, p: Any) -> float:
            return user_rhs(t, y, p) - lam0 * y

        rhs_fn = folded
    else:
        rhs_fn = rhs
    return MultiTermProblem(
        lambdas=tuple(l for _, l in kept),
        orders=tuple(a for a, _ in kept),
        rhs=rhs_fn,
        init=init_t,
        tspan=(t0, tf),
        params=params,
        zero_order_coeff=lam0,
    )


@dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by every marching scheme."""

    dt: float
    newton_abs_tol: float = 1e-10
    newton_max_iters: int = 100
    corrector_iters: int = 1
    use_fft_history: bool = False
    fft_block_threshold: int = 128

    def __post_init__(self) -> None:
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be a positive finite real, got {self.dt!r}")
        if self.newton_max_iters < 1:
            raise ValueError("newton_max_iters must be >= 1")
        if self.corrector_iters < 1:
            raise ValueError("corrector_iters must be >= 1")
        if self.fft_block_threshold < 8:
            raise ValueError("fft_block_threshold must be >= 8")


@dataclass
class Solution:
    """Mesh, trajectory and bookkeeping returned by every solver.

    states has shape (N+1, d); after a divergence or Newton failure the
    remaining rows stay NaN and retcode says why.  stats always carries
    rhs_evals, newton_iters_total, wall_time and a (possibly empty) list of
    warnings, e.g. when dt does not divide the time span exactly.
    """

    t: np.ndarray
    states: np.ndarray
    retcode: Retcode
    stats: dict = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.retcode is Retcode.Success

    def final_state(self) -> np.ndarray:
        return self.states[-1]


def uniform_mesh(tspan, dt: float) -> np.ndarray:
    """Equispaced mesh t0 + n*dt covering tspan with N = round(span/dt) steps."""
    t0, tf = _check_tspan(tspan)
    if not (dt > 0.0 and math.isfinite(dt)):
        raise ValueError(f"dt must be positive, got {dt!r}")
    n_steps = int(round((tf - t0) / dt))
    if n_steps < 1:
        raise EmptyTimeSpan(f"dt={dt} does not fit into tspan ({t0}, {tf})")
    return t0 + dt * np.arange(n_steps + 1)


def mesh_misfit(tspan, dt: float) -> float:
    """|t0 + N*dt - tf| for the mesh uniform_mesh would build."""
    t0, tf = _check_tspan(tspan)
    n_steps = int(round((tf - t0) / dt))
    return abs(t0 + n_steps * dt - tf)


def taylor_initial_part(init: Sequence[np.ndarray], t: float, t0: float) -> np.ndarray:
    """Polynomial initial part sum_k (t-t0)^k / k! * y_i^(k)(t0) per component."""
    dt = t - t0
    out = np.empty(len(init))
    for i, row in enumerate(init):
        acc = 0.0
        fact = 1.0
        for k, c in enumerate(row):
            if k > 0:
                fact *= k
            acc += c * dt**k / fact
        out[i] = acc
    return out


def taylor_on_mesh(init: Sequence[np.ndarray], t: np.ndarray, t0: float) -> np.ndarray:
    """taylor_initial_part evaluated on a whole mesh, shape (len(t), d)."""
    dt = np.asarray(t, dtype=float) - t0
    out = np.zeros((len(dt), len(init)))
    for i, row in enumerate(init):
        fact = 1.0
        for k, c in enumerate(row):
            if k > 0:
                fact *= k
            out[:, i] += c * dt**k / fact
    return out
