"""Companion-system reduction for linear multi-term equations.

A scalar equation  sum_j lambda_j D^{alpha_j} y = f(t, y)  becomes an
incommensurate first-order-style system over the exponent ladder

    0 = sigma_0 < sigma_1 < ... < sigma_P = alpha_Q,

where every increment beta_i = sigma_i - sigma_{i-1} lies in (0, 1] and
every alpha_j sits on the ladder (gaps larger than one are bridged with
unit stages).  Stage i holds z_i = D^{sigma_{i-1}} y, so

    D^{beta_i} z_i = z_{i+1},             i < P,
    D^{beta_P} z_P = (f - sum_{j<Q} lambda_j z_{idx_j}) / lambda_Q.

A stage starts from the matching initial derivative when its exponent is an
integer and from zero otherwise.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .problems import (
    FodeProblem,
    MultiTermProblem,
    Solution,
    SolverConfig,
    make_fode_problem,
    make_multiterm_problem,
)
from .solvers import MethodId, solve as _solve_fode

__all__ = [
    "MultiTermMethodId",
    "CompanionSystem",
    "to_companion",
    "solve_multiterm",
    "oscillator_problem",
]

_LADDER_TOL = 1e-12
_INT_TOL = 1e-9


class MultiTermMethodId(enum.Enum):
    MTPIEX = "mtpiex"
    MTPIRect = "mtpirect"
    MTPITrap = "mtpitrap"
    MTPECE = "mtpece"


_MT_DISPATCH = {
    MultiTermMethodId.MTPIEX: MethodId.PIEX,
    MultiTermMethodId.MTPIRect: MethodId.PIRect,
    MultiTermMethodId.MTPITrap: MethodId.PITrap,
    MultiTermMethodId.MTPECE: MethodId.PECE,
}


def mt_method_from_token(token) -> MultiTermMethodId:
    if isinstance(token, MultiTermMethodId):
        return token
    try:
        return MultiTermMethodId(str(token).lower())
    except ValueError:
        valid = ", ".join(m.value for m in MultiTermMethodId)
        raise ValueError(f"unknown method {token!r}; expected one of: {valid}") from None


@dataclass(frozen=True)
class CompanionSystem:
    """The reduced system plus the bookkeeping linking it back to y."""

    fode: FodeProblem
    stage_orders: tuple[float, ...]
    stage_init: tuple[float, ...]
    sigma: tuple[float, ...]
    lower_terms: tuple[tuple[float, int], ...]
    lam_top: float

    @property
    def n_stages(self) -> int:
        return len(self.stage_orders)


def _exponent_ladder(orders: tuple[float, ...]):
    sigma = [0.0]
    pos = {}
    for a in orders:
        while a - sigma[-1] > 1.0 + _LADDER_TOL:
            sigma.append(sigma[-1] + 1.0)
        if a - sigma[-1] > _LADDER_TOL:
            sigma.append(a)
        else:
            sigma[-1] = a
        pos[a] = len(sigma) - 1
    return sigma, pos


def to_companion(problem: MultiTermProblem) -> CompanionSystem:
    """Build the stage system for a normalized multi-term problem."""
    sigma, pos = _exponent_ladder(problem.orders)
    betas = [min(sigma[i + 1] - sigma[i], 1.0) for i in range(len(sigma) - 1)]
    n_stages = len(betas)
    init = []
    for i in range(n_stages):
        s = sigma[i]
        k = round(s)
        if abs(s - k) <= _INT_TOL:
            init.append(float(problem.init[k]))
        else:
            init.append(0.0)
    lam_top = problem.lambdas[-1]
    lower = tuple(
        (problem.lambdas[j], pos[problem.orders[j]])
        for j in range(len(problem.orders) - 1)
    )
    mt_rhs = problem.rhs

    def rhs(t, z, p):
        dz = np.empty(n_stages)
        dz[:-1] = z[1:]
        acc = mt_rhs(t, z[0], p)
        for lam, idx in lower:
            acc = acc - lam * z[idx]
        dz[-1] = acc / lam_top
        return dz

    fode = make_fode_problem(
        rhs,
        betas,
        [[v] for v in init],
        problem.tspan,
        params=problem.params,
    )
    return CompanionSystem(
        fode=fode,
        stage_orders=tuple(betas),
        stage_init=tuple(init),
        sigma=tuple(sigma),
        lower_terms=lower,
        lam_top=lam_top,
    )


def solve_multiterm(problem: MultiTermProblem, method, config: SolverConfig) -> Solution:
    """March the companion system and return the y = z_1 trajectory."""
    mt = mt_method_from_token(method)
    comp = to_companion(problem)
    sol = _solve_fode(comp.fode, _MT_DISPATCH[mt], config)
    return Solution(
        t=sol.t,
        states=np.ascontiguousarray(sol.states[:, :1]),
        retcode=sol.retcode,
        stats=sol.stats,
    )


def oscillator_problem(theta: float, a: float = -1.0, b: float = 1.2, g: float = 4.0,
                       tspan=(0.0, 80.0), init=(-0.5, -0.5)) -> MultiTermProblem:
    """Oscillator with fractional damping of adjustable order theta in (0, 1]:

        y'' + a y' + b D^theta y + g y = 0.

    Around theta ~ 0.8 (for the default a, b, g) the D^theta term's damping
    balances the destabilizing a y' term; smaller theta gives growing
    oscillations, larger theta decaying ones.
    """
    return make_multiterm_problem(
        lambdas=[g, b, a, 1.0],
        orders=[0.0, theta, 1.0, 2.0],
        rhs=lambda t, y, p: 0.0,
        init=init,
        tspan=tspan,
    )
