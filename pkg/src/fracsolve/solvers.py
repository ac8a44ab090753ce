"""Marching schemes for Caputo fractional systems.

Every method advances the Volterra form

    y(t_n) = T(t_n) + sum of weighted history f-values (+ implicit f_n term)

where T is the polynomial initial part.  The lagged sums are organised as
"streams": a weight table plus an index convention.  One driver walks the
mesh either directly (one kernel dot per step) or with the divide-and-
conquer blocked-FFT decomposition, in which completed spans push their
contribution onto later steps with a single FFT convolution; the per-step
logic never knows which mode is active.
"""
from __future__ import annotations

import enum
import math
import time
from typing import Callable

import numpy as np

from . import backends
from .errors import NewtonFailed, NonCommensurate, SingularJacobian
from .problems import (
    FodeProblem,
    Retcode,
    Solution,
    SolverConfig,
    mesh_misfit,
    taylor_on_mesh,
    uniform_mesh,
)
from .weights import flmm_weights, pi_coefficients

__all__ = [
    "MethodId",
    "newton_step",
    "solve",
    "solve_pi_explicit",
    "solve_pi_implicit",
    "solve_pece",
    "solve_flmm",
]

_SQRT_EPS = math.sqrt(np.finfo(float).eps)


class MethodId(enum.Enum):
    PIEX = "piex"
    PIRect = "pirect"
    PITrap = "pitrap"
    PECE = "pece"
    FLMM_BDF2 = "bdf2"
    FLMM_Trapezoidal = "trapezoid"
    FLMM_NewtonGregory = "newtongregory"


_FLMM_TABLE = {
    MethodId.FLMM_BDF2: "bdf2",
    MethodId.FLMM_Trapezoidal: "trapezoidal",
    MethodId.FLMM_NewtonGregory: "newton_gregory",
}


def method_from_token(token) -> MethodId:
    if isinstance(token, MethodId):
        return token
    try:
        return MethodId(str(token).lower())
    except ValueError:
        valid = ", ".join(m.value for m in MethodId)
        raise ValueError(f"unknown method {token!r}; expected one of: {valid}") from None


# --------------------------------------------------------------------------
# Newton iteration for y = g + c * f(t, y)
# --------------------------------------------------------------------------

def _fd_jacobian(f: Callable, t: float, y: np.ndarray, fy: np.ndarray) -> np.ndarray:
    d = len(y)
    J = np.empty((d, d))
    for j in range(d):
        h = _SQRT_EPS * max(1.0, abs(y[j]))
        yp = y.copy()
        yp[j] += h
        J[:, j] = (f(t, yp) - fy) / h
    return J


def newton_step(f: Callable, t: float, g: np.ndarray, c: np.ndarray, y_guess: np.ndarray,
                tol: float = 1e-10, max_iters: int = 100):
    """Solve y = g + c * f(t, y) by damped-free Newton with an FD Jacobian.

    Returns (y, f(t, y), iterations).  Raises NewtonFailed when the residual
    does not drop below `tol` within `max_iters`, SingularJacobian when the
    linearized system cannot be factorized.
    """
    y = np.array(y_guess, dtype=float)
    c = np.asarray(c, dtype=float)
    eye = np.eye(len(y))
    fy = f(t, y)
    for it in range(1, max_iters + 1):
        res = y - g - c * fy
        rnorm = np.max(np.abs(res))
        if not math.isfinite(rnorm):
            raise NewtonFailed(f"non-finite residual at t={t!r}")
        if rnorm <= tol:
            return y, fy, it - 1
        J = _fd_jacobian(f, t, y, fy)
        M = eye - c[:, None] * J
        try:
            delta = np.linalg.solve(M, -res)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(f"singular Newton matrix at t={t!r}") from exc
        y = y + delta
        fy = f(t, y)
    raise NewtonFailed(f"no convergence in {max_iters} iterations at t={t!r}")


def _newton_system(res_fn: Callable, x0: np.ndarray, tol: float, max_iters: int):
    """Plain FD Newton on a stacked residual (used by the FLMM starting block)."""
    x = np.array(x0, dtype=float)
    n = len(x)
    r = res_fn(x)
    for it in range(1, max_iters + 1):
        rnorm = np.max(np.abs(r))
        if not math.isfinite(rnorm):
            raise NewtonFailed("non-finite residual in starting block")
        if rnorm <= tol:
            return x, it - 1
        J = np.empty((n, n))
        for j in range(n):
            h = _SQRT_EPS * max(1.0, abs(x[j]))
            xp = x.copy()
            xp[j] += h
            J[:, j] = (res_fn(xp) - r) / h
        try:
            delta = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian("singular Jacobian in starting block") from exc
        x = x + delta
        r = res_fn(x)
    raise NewtonFailed(f"starting block stalled after {max_iters} iterations")


# --------------------------------------------------------------------------
# history streams and the march driver
# --------------------------------------------------------------------------

class _Stream:
    """One lagged sum  sum_{i=lo0/ancestors}^{n-1} w[n-i-c] * F[i]."""

    __slots__ = ("w", "c", "lo0", "lag", "two_d")

    def __init__(self, w: np.ndarray, c: int, lo0: int, n_steps: int, d: int):
        self.w = np.ascontiguousarray(w)
        self.c = c
        self.lo0 = lo0
        self.lag = np.zeros((n_steps + 1, d))
        self.two_d = self.w.ndim == 2

    def seed(self, F: np.ndarray, n0: int, n_steps: int) -> None:
        """Fold rows i < n0 (known before the march starts) into the lag."""
        for i in range(self.lo0, n0):
            idx = np.arange(n0, n_steps + 1) - i - self.c
            if self.two_d:
                self.lag[n0:] += self.w[:, idx].T * F[i]
            else:
                self.lag[n0:] += self.w[idx][:, None] * F[i][None, :]

    def direct(self, F: np.ndarray, a: int, n: int) -> np.ndarray:
        h = self.lag[n]
        if n > a:
            if self.two_d:
                h = h + backends.hist_dot_multi(self.w, F, a, n, n - self.c)
            else:
                h = h + backends.hist_dot(self.w, F, a, n, n - self.c)
        return h

    def push(self, F: np.ndarray, a: int, m: int, b: int) -> None:
        """FFT-add contributions of i in [a, m) onto steps [m, b)."""
        seg = m - a
        if seg <= 0 or m >= b:
            return
        idx_min = 1 - self.c
        idx_max = b - 1 - a - self.c
        klen = idx_max - idx_min + 1
        nfft = 1 << int(math.ceil(math.log2(max(klen + seg - 1, 2))))
        gf = np.fft.rfft(F[a:m], nfft, axis=0)
        if self.two_d:
            kf = np.fft.rfft(self.w[:, idx_min : idx_max + 1], nfft, axis=1).T
        else:
            kf = np.fft.rfft(self.w[idx_min : idx_max + 1], nfft)[:, None]
        conv = np.fft.irfft(kf * gf, nfft, axis=0)
        rows = np.arange(m, b) - a - 1
        self.lag[m:b] += conv[rows]


def _march(n_steps: int, n0: int, streams: list[_Stream], F: np.ndarray,
           step_fn: Callable, block: int) -> bool:
    """Walk steps n0..n_steps; step_fn(n, hists) returns False to abort."""
    for st in streams:
        st.seed(F, n0, n_steps)

    def process(a: int, b: int) -> bool:
        if b - a <= block:
            for n in range(a, b):
                hists = [st.direct(F, a, n) for st in streams]
                if not step_fn(n, hists):
                    return False
            return True
        m = (a + b) // 2
        if not process(a, m):
            return False
        for st in streams:
            st.push(F, a, m, b)
        return process(m, b)

    return process(n0, n_steps + 1)


# --------------------------------------------------------------------------
# shared setup
# --------------------------------------------------------------------------

class _Workspace:
    def __init__(self, problem: FodeProblem, config: SolverConfig):
        self.problem = problem
        self.config = config
        self.t = uniform_mesh(problem.tspan, config.dt)
        self.n_steps = len(self.t) - 1
        self.d = problem.dimension
        self.alphas = problem.orders.as_array()
        self.T_mesh = taylor_on_mesh(problem.init, self.t, problem.tspan[0])
        self.Y = np.full((self.n_steps + 1, self.d), np.nan)
        self.F = np.zeros((self.n_steps + 1, self.d))
        self.Y[0] = problem.y0()
        self.rhs_evals = 0
        self.newton_iters = 0
        self.warnings: list[str] = []
        misfit = mesh_misfit(problem.tspan, config.dt)
        if misfit > 1e-9:
            self.warnings.append(
                f"dt={config.dt} does not divide the time span exactly; "
                f"final mesh point misses tf by {misfit:.3e}"
            )

    def f(self, t: float, y: np.ndarray) -> np.ndarray:
        self.rhs_evals += 1
        return np.atleast_1d(
            np.asarray(self.problem.rhs(t, y, self.problem.params), dtype=float)
        )

    def block_size(self) -> int:
        if self.config.use_fft_history:
            return max(8, int(self.config.fft_block_threshold))
        return self.n_steps + 1

    def finish(self, retcode: Retcode, started: float) -> Solution:
        stats = {
            "rhs_evals": self.rhs_evals,
            "newton_iters_total": self.newton_iters,
            "wall_time": time.perf_counter() - started,
            "warnings": list(self.warnings),
        }
        return Solution(t=self.t, states=self.Y, retcode=retcode, stats=stats)


def _per_component(alphas: np.ndarray, table_attr: str, n_steps: int):
    """Stack one weight row per component, shared when orders coincide."""
    cache: dict[float, object] = {}
    rows = []
    for a in alphas:
        if a not in cache:
            cache[a] = pi_coefficients(float(a), n_steps)
        rows.append(getattr(cache[a], table_attr))
    if len(cache) == 1:
        return rows[0], False
    return np.vstack(rows), True


def _commensurate_alpha(problem: FodeProblem) -> float:
    if not problem.orders.is_commensurate():
        raise NonCommensurate(
            f"method requires equal orders, got {problem.orders.alphas}"
        )
    return float(problem.orders.alphas[0])


def _store_step(ws: _Workspace, n: int, y: np.ndarray) -> bool:
    if not np.all(np.isfinite(y)):
        return False
    ws.Y[n] = y
    return True


# --------------------------------------------------------------------------
# the marching schemes
# --------------------------------------------------------------------------

def solve_pi_explicit(problem: FodeProblem, config: SolverConfig) -> Solution:
    """Explicit rectangular product integration (first order)."""
    started = time.perf_counter()
    ws = _Workspace(problem, config)
    g1 = np.array([math.gamma(a + 1.0) for a in ws.alphas])
    c1 = config.dt**ws.alphas / g1
    b, _ = _per_component(ws.alphas, "b", ws.n_steps)
    st = _Stream(b, c=1, lo0=0, n_steps=ws.n_steps, d=ws.d)
    ws.F[0] = ws.f(ws.t[0], ws.Y[0])
    state = {"retcode": Retcode.Diverged}

    def step(n, hists):
        y = ws.T_mesh[n] + c1 * hists[0]
        if not _store_step(ws, n, y):
            return False
        if n < ws.n_steps:
            ws.F[n] = ws.f(ws.t[n], y)
            if not np.all(np.isfinite(ws.F[n])):
                state["retcode"] = Retcode.Diverged
                # poison the next step instead of stopping here: the state
                # row is still finite, so the trajectory ends at n
                ws.Y[n + 1 :] = np.nan
                return False
        return True

    with np.errstate(all="ignore"):
        ok = _march(ws.n_steps, 1, [st], ws.F, step, ws.block_size())
    return ws.finish(Retcode.Success if ok else state["retcode"], started)


def _solve_pi_implicit(problem: FodeProblem, config: SolverConfig, rule: str) -> Solution:
    started = time.perf_counter()
    ws = _Workspace(problem, config)
    if rule == "rectangular":
        gam = np.array([math.gamma(a + 1.0) for a in ws.alphas])
        table = "b"
    elif rule == "trapezoidal":
        gam = np.array([math.gamma(a + 2.0) for a in ws.alphas])
        table = "a"
    else:
        raise ValueError(f"unknown implicit PI rule {rule!r}")
    cw = config.dt**ws.alphas / gam
    w, _ = _per_component(ws.alphas, table, ws.n_steps)
    if rule == "trapezoidal":
        at, at_multi = _per_component(ws.alphas, "a_tilde", ws.n_steps)
    st = _Stream(w, c=0, lo0=1, n_steps=ws.n_steps, d=ws.d)
    ws.F[0] = ws.f(ws.t[0], ws.Y[0])
    state = {"retcode": Retcode.Diverged}

    def step(n, hists):
        g = ws.T_mesh[n] + cw * hists[0]
        if rule == "trapezoidal":
            first = (at[:, n] if at_multi else at[n]) * ws.F[0]
            g = g + cw * first
        if not np.all(np.isfinite(g)):
            return False
        try:
            y, fy, iters = newton_step(
                ws.f, ws.t[n], g, cw, ws.Y[n - 1],
                tol=config.newton_abs_tol, max_iters=config.newton_max_iters,
            )
        except (NewtonFailed, SingularJacobian):
            state["retcode"] = Retcode.NewtonFailed
            return False
        ws.newton_iters += iters
        if not _store_step(ws, n, y):
            return False
        ws.F[n] = fy
        return True

    with np.errstate(all="ignore"):
        ok = _march(ws.n_steps, 1, [st], ws.F, step, ws.block_size())
    return ws.finish(Retcode.Success if ok else state["retcode"], started)


def solve_pi_implicit(problem: FodeProblem, config: SolverConfig, rule: str = "rectangular") -> Solution:
    """Implicit product integration; rule is 'rectangular' or 'trapezoidal'."""
    return _solve_pi_implicit(problem, config, rule)


def solve_pece(problem: FodeProblem, config: SolverConfig) -> Solution:
    """Adams-type predict-evaluate-correct-evaluate scheme."""
    started = time.perf_counter()
    ws = _Workspace(problem, config)
    g1 = np.array([math.gamma(a + 1.0) for a in ws.alphas])
    g2 = np.array([math.gamma(a + 2.0) for a in ws.alphas])
    c1 = config.dt**ws.alphas / g1
    c2 = config.dt**ws.alphas / g2
    b, _ = _per_component(ws.alphas, "b", ws.n_steps)
    a, _ = _per_component(ws.alphas, "a", ws.n_steps)
    at, at_multi = _per_component(ws.alphas, "a_tilde", ws.n_steps)
    st_pred = _Stream(b, c=1, lo0=0, n_steps=ws.n_steps, d=ws.d)
    st_corr = _Stream(a, c=0, lo0=1, n_steps=ws.n_steps, d=ws.d)
    ws.F[0] = ws.f(ws.t[0], ws.Y[0])

    def step(n, hists):
        y_pred = ws.T_mesh[n] + c1 * hists[0]
        first = (at[:, n] if at_multi else at[n]) * ws.F[0]
        base = ws.T_mesh[n] + c2 * (first + hists[1])
        y = y_pred
        for _ in range(config.corrector_iters):
            fp = ws.f(ws.t[n], y)
            y = base + c2 * fp
        if not _store_step(ws, n, y):
            return False
        ws.F[n] = ws.f(ws.t[n], y)
        return True

    with np.errstate(all="ignore"):
        ok = _march(ws.n_steps, 1, [st_pred, st_corr], ws.F, step, ws.block_size())
    return ws.finish(Retcode.Success if ok else Retcode.Diverged, started)


def solve_flmm(problem: FodeProblem, config: SolverConfig, method: str = "bdf2") -> Solution:
    """Fractional linear multistep method (convolution quadrature).

    Requires commensurate orders.  The first s steps (s+1 = number of
    starting exponents) are solved as one coupled implicit block; afterwards
    each step is implicit only in its own f_n term.
    """
    started = time.perf_counter()
    alpha = _commensurate_alpha(problem)
    ws = _Workspace(problem, config)
    fw = flmm_weights(method, alpha, ws.n_steps)
    s = fw.s
    if ws.n_steps < s + 1:
        raise ValueError(
            f"mesh with {ws.n_steps} steps is too coarse for the {s}-step starting block"
        )
    ha = config.dt**alpha
    omega = fw.omega
    wst = fw.starting
    ws.F[0] = ws.f(ws.t[0], ws.Y[0])
    d = ws.d

    # coupled starting block: unknowns y_1..y_s stacked
    def block_residual(x):
        Yb = x.reshape(s, d)
        Fb = np.empty((s + 1, d))
        Fb[0] = ws.F[0]
        for i in range(1, s + 1):
            Fb[i] = ws.f(ws.t[i], Yb[i - 1])
        res = np.empty((s, d))
        for n in range(1, s + 1):
            acc = wst[n, : s + 1] @ Fb
            for i in range(0, n + 1):
                acc = acc + omega[n - i] * Fb[i]
            res[n - 1] = Yb[n - 1] - ws.T_mesh[n] - ha * acc
        return res.ravel()

    x0 = np.tile(ws.Y[0], s)
    try:
        x, iters = _newton_system(
            block_residual, x0, config.newton_abs_tol, config.newton_max_iters
        )
    except (NewtonFailed, SingularJacobian):
        return ws.finish(Retcode.NewtonFailed, started)
    ws.newton_iters += iters
    Yb = x.reshape(s, d)
    for i in range(1, s + 1):
        if not np.all(np.isfinite(Yb[i - 1])):
            return ws.finish(Retcode.Diverged, started)
        ws.Y[i] = Yb[i - 1]
        ws.F[i] = ws.f(ws.t[i], ws.Y[i])

    st = _Stream(omega, c=0, lo0=0, n_steps=ws.n_steps, d=d)
    cvec = np.full(d, ha * omega[0])
    state = {"retcode": Retcode.Diverged}

    def step(n, hists):
        g = ws.T_mesh[n] + ha * (wst[n, : s + 1] @ ws.F[: s + 1] + hists[0])
        if not np.all(np.isfinite(g)):
            return False
        try:
            y, fy, iters = newton_step(
                ws.f, ws.t[n], g, cvec, ws.Y[n - 1],
                tol=config.newton_abs_tol, max_iters=config.newton_max_iters,
            )
        except (NewtonFailed, SingularJacobian):
            state["retcode"] = Retcode.NewtonFailed
            return False
        ws.newton_iters += iters
        if not _store_step(ws, n, y):
            return False
        ws.F[n] = fy
        return True

    with np.errstate(all="ignore"):
        ok = _march(ws.n_steps, s + 1, [st], ws.F, step, ws.block_size())
    return ws.finish(Retcode.Success if ok else state["retcode"], started)


_DISPATCH = {
    MethodId.PIEX: lambda p, c: solve_pi_explicit(p, c),
    MethodId.PIRect: lambda p, c: solve_pi_implicit(p, c, "rectangular"),
    MethodId.PITrap: lambda p, c: solve_pi_implicit(p, c, "trapezoidal"),
    MethodId.PECE: lambda p, c: solve_pece(p, c),
    MethodId.FLMM_BDF2: lambda p, c: solve_flmm(p, c, "bdf2"),
    MethodId.FLMM_Trapezoidal: lambda p, c: solve_flmm(p, c, "trapezoidal"),
    MethodId.FLMM_NewtonGregory: lambda p, c: solve_flmm(p, c, "newton_gregory"),
}


def solve(problem: FodeProblem, method, config: SolverConfig) -> Solution:
    """Dispatch on a MethodId (or its string token)."""
    return _DISPATCH[method_from_token(method)](problem, config)
