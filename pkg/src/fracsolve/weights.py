"""Quadrature weight generation for the fractional marching schemes.

Two families:

* product-integration coefficients (rectangular b, trapezoidal a/a-tilde)
  from piecewise constant/linear interpolation of the integrand under the
  weakly singular kernel;
* convolution-quadrature weights omega for the linear multistep methods,
  i.e. power-series coefficients of delta(xi)^(-alpha), plus the Lubich
  starting weights that restore full order in presence of the t^(k alpha)
  initial layer.

All recurrences here were validated against brute-force extended-precision
series expansion (see the weight tests).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backends
from .errors import NonPositiveOrder, SingularMomentSystem

FLMM_METHODS = ("bdf2", "trapezoidal", "newton_gregory")


@dataclass(frozen=True)
class PiCoefficients:
    """Rectangular and trapezoidal product-integration weight tables.

    b[n] = (n+1)^a - n^a feeds the rectangular rules and the predictor;
    a[j] (with a[0] = 1 for the current node) and a_tilde[n] (weight of the
    t0 node at step n, stored with slot 0 unused) feed the trapezoidal rule.
    """

    alpha: float
    b: np.ndarray
    a: np.ndarray
    a_tilde: np.ndarray


def pi_coefficients(alpha: float, n: int) -> PiCoefficients:
    """Weight tables for meshes with n steps (arrays sized n+1)."""
    if not (alpha > 0.0 and math.isfinite(alpha)):
        raise NonPositiveOrder(f"alpha must be positive, got {alpha!r}")
    if n < 0:
        raise ValueError("n must be >= 0")
    k = np.arange(n + 1, dtype=float)
    b = (k + 1.0) ** alpha - k**alpha
    ap1 = alpha + 1.0
    a = np.empty(n + 1)
    a[0] = 1.0
    if n >= 1:
        j = k[1:]
        a[1:] = (j + 1.0) ** ap1 - 2.0 * j**ap1 + (j - 1.0) ** ap1
    a_tilde = np.zeros(n + 1)
    if n >= 1:
        j = k[1:]
        a_tilde[1:] = (j - 1.0) ** ap1 - j**alpha * (j - alpha - 1.0)
    return PiCoefficients(alpha=alpha, b=b, a=a, a_tilde=a_tilde)


def miller_series_pow(coeffs, exponent: float, n: int) -> np.ndarray:
    """Power-series coefficients of (sum_k c_k xi^k)^exponent, c_0 != 0.

    J.C.P. Miller recurrence, from f' p = exponent p' f:
        w_m = (1 / (m c_0)) sum_k ((exponent+1) k - m) c_k w_{m-k}.
    """
    d = np.asarray(coeffs, dtype=float)
    if d[0] == 0.0:
        raise ValueError("leading series coefficient must be nonzero")
    w = np.zeros(n + 1)
    w[0] = d[0] ** exponent
    deg = len(d) - 1
    for m in range(1, n + 1):
        acc = 0.0
        for k in range(1, min(m, deg) + 1):
            acc += ((exponent + 1.0) * k - m) * d[k] * w[m - k]
        w[m] = acc / (m * d[0])
    return w


def _omega_bdf2(alpha: float, n: int) -> np.ndarray:
    return miller_series_pow([1.5, -2.0, 0.5], -alpha, n)


def _omega_trapezoidal(alpha: float, n: int) -> np.ndarray:
    # omega(xi) = ((1+xi) / (2(1-xi)))^alpha satisfies (1-xi^2) w' = 2 alpha w,
    # giving a stable three-term recurrence.
    w = np.zeros(n + 1)
    w[0] = 0.5**alpha
    if n >= 1:
        w[1] = 2.0 * alpha * w[0]
    for m in range(1, n):
        w[m + 1] = ((m - 1.0) * w[m - 1] + 2.0 * alpha * w[m]) / (m + 1.0)
    return w


def _omega_newton_gregory(alpha: float, n: int) -> np.ndarray:
    # omega(xi) = (1-xi)^(-alpha) * (1 - alpha/2 + (alpha/2) xi)
    g = np.zeros(n + 2)
    g[0] = 1.0
    for k in range(n + 1):
        g[k + 1] = g[k] * (k + alpha) / (k + 1.0)
    w = np.empty(n + 1)
    c0 = 1.0 - 0.5 * alpha
    c1 = 0.5 * alpha
    w[0] = c0 * g[0]
    for m in range(1, n + 1):
        w[m] = c0 * g[m] + c1 * g[m - 1]
    return w


_OMEGA = {
    "bdf2": _omega_bdf2,
    "trapezoidal": _omega_trapezoidal,
    "newton_gregory": _omega_newton_gregory,
}


def flmm_omega(method: str, alpha: float, n: int) -> np.ndarray:
    """Convolution weights omega_0..omega_n for one of FLMM_METHODS."""
    if method not in _OMEGA:
        raise ValueError(f"unknown FLMM method {method!r}; expected one of {FLMM_METHODS}")
    if not (alpha > 0.0 and math.isfinite(alpha)):
        raise NonPositiveOrder(f"alpha must be positive, got {alpha!r}")
    return _OMEGA[method](alpha, n)


def starting_exponents(alpha: float) -> np.ndarray:
    """Exponents nu of the initial layer: {k alpha <= 1} union {1}."""
    nus = [0.0]
    k = 1
    while k * alpha <= 1.0 + 1e-14:
        v = k * alpha
        nus.append(1.0 if abs(v - 1.0) <= 1e-14 else v)
        k += 1
    if 1.0 not in nus:
        nus.append(1.0)
    return np.array(sorted(set(nus)))


def _conv_full_truncated(w: np.ndarray, g: np.ndarray, n: int) -> np.ndarray:
    """First n+1 coefficients of the linear convolution w * g."""
    if n + 1 <= 2048:
        return np.convolve(w[: n + 1], g[: n + 1])[: n + 1]
    nfft = 1 << int(math.ceil(math.log2(2 * n + 1)))
    out = np.fft.irfft(np.fft.rfft(w[: n + 1], nfft) * np.fft.rfft(g[: n + 1], nfft), nfft)
    return out[: n + 1]


def starting_weights(method: str, alpha: float, n: int, omega: np.ndarray | None = None):
    """Lubich starting weight matrix w[n_step, i], i = 0..s, plus exponents.

    Row n solves    sum_i w[n, i] i^nu = G(nu+1)/G(nu+1+alpha) n^(nu+alpha)
                                         - sum_{j<=n} omega_{n-j} j^nu
    for every exponent nu, making the combined quadrature exact on t^nu.
    """
    if omega is None:
        omega = flmm_omega(method, alpha, n)
    nus = starting_exponents(alpha)
    s = len(nus) - 1
    nodes = np.arange(s + 1, dtype=float)
    V = np.empty((s + 1, s + 1))
    for r, nu in enumerate(nus):
        if nu == 0.0:
            V[r] = 1.0  # 0^0 := 1
        else:
            V[r] = nodes**nu
    steps = np.arange(n + 1, dtype=float)
    rhs = np.empty((s + 1, n + 1))
    for r, nu in enumerate(nus):
        jnu = steps**nu if nu > 0.0 else np.ones(n + 1)
        conv = _conv_full_truncated(omega, jnu, n)
        exact = (
            math.gamma(nu + 1.0)
            / math.gamma(nu + 1.0 + alpha)
            * steps ** (nu + alpha)
        )
        rhs[r] = exact - conv
    try:
        sol = np.linalg.solve(V, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMomentSystem(
            f"moment system singular for method={method}, alpha={alpha}"
        ) from exc
    return sol.T.copy(), nus


@dataclass(frozen=True)
class FlmmWeights:
    """Everything a fractional linear multistep march needs."""

    method: str
    alpha: float
    omega: np.ndarray
    starting: np.ndarray
    exponents: np.ndarray

    @property
    def s(self) -> int:
        return len(self.exponents) - 1


def flmm_weights(method: str, alpha: float, n: int) -> FlmmWeights:
    omega = flmm_omega(method, alpha, n)
    w, nus = starting_weights(method, alpha, n, omega=omega)
    return FlmmWeights(method=method, alpha=alpha, omega=omega, starting=w, exponents=nus)


def history_sum(weights: np.ndarray, fvals: np.ndarray, n: int, mode: str = "direct", block: int = 128):
    """Lagged sum  sum_{i=0}^{n-1} weights[n-1-i] * fvals[i].

    mode "direct" runs the kernel dot; "fft_blocked" splits the history into
    blocks of length `block` and evaluates each block's contribution with an
    FFT linear convolution.  Both agree to roundoff.
    """
    w = np.ascontiguousarray(weights, dtype=float)
    F = np.asarray(fvals, dtype=float)
    scalar = F.ndim == 1
    if scalar:
        F = F[:, None]
    F = np.ascontiguousarray(F)
    if n < 0 or n > F.shape[0]:
        raise ValueError(f"n={n} outside the stored history of {F.shape[0]} values")
    if n > len(w):
        raise ValueError(f"n={n} exceeds the {len(w)} available weights")
    if n == 0:
        out = np.zeros(F.shape[1])
        return float(out[0]) if scalar else out
    if mode == "direct":
        out = backends.hist_dot(w, F, 0, n, n - 1)
    elif mode == "fft_blocked":
        out = np.zeros(F.shape[1])
        for p in range(0, n, block):
            q = min(p + block, n)
            seg = q - p
            ws = w[n - q : n - p]
            nfft = 1 << int(math.ceil(math.log2(max(2 * seg - 1, 2))))
            conv = np.fft.irfft(
                np.fft.rfft(ws, nfft)[:, None] * np.fft.rfft(F[p:q], nfft, axis=0),
                nfft,
                axis=0,
            )
            out += conv[seg - 1]
    else:
        raise ValueError(f"unknown mode {mode!r}; expected 'direct' or 'fft_blocked'")
    return float(out[0]) if scalar else out
