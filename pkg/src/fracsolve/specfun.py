"""Gamma and Mittag-Leffler evaluation.

The three-parameter Mittag-Leffler function

    E_{alpha,beta}^{gamma}(z) = sum_k (gamma)_k z^k / (k! Gamma(alpha k + beta))

is evaluated by one of three regimes chosen from the argument magnitude:

* plain double-precision series for |z| <= 1,
* the same series in adaptively raised precision (mpmath) while the
  cancellation budget stays affordable,
* parabolic-contour Laplace inversion otherwise (small alpha with very
  large |z|), with residue corrections for any poles of the integrand that
  lie right of the contour.

Real input yields real output; a larger-than-roundoff imaginary residue
raises NonConvergence instead of being silently dropped.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.special import rgamma

from .errors import NonConvergence, NonPositiveExponent, PoleError

__all__ = ["gamma_fn", "MittagLefflerParams", "mittag_leffler", "mittleff"]


def gamma_fn(x: float) -> float:
    """Euler gamma on the real line; PoleError at non-positive integers."""
    try:
        return math.gamma(x)
    except ValueError as exc:
        raise PoleError(f"gamma pole at x={x!r}") from exc


@dataclass(frozen=True)
class MittagLefflerParams:
    alpha: float
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise NonPositiveExponent(f"alpha must be positive, got {self.alpha!r}")
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise NonPositiveExponent(f"gamma must be positive, got {self.gamma!r}")
        if not math.isfinite(self.beta):
            raise NonPositiveExponent(f"beta must be finite, got {self.beta!r}")


# --- regime A: double precision series ------------------------------------

_SERIES_CAP = 600


def _ml_series_double(alpha: float, beta: float, gamma: float, z: complex):
    """Truncated series in doubles; returns None if it fails to settle."""
    acc = 0.0 + 0.0j
    coeff = 1.0  # (gamma)_k / k!
    zk = 1.0 + 0.0j
    settled = 0
    for k in range(_SERIES_CAP):
        term = coeff * zk * rgamma(alpha * k + beta)
        acc += term
        if abs(term) <= 1e-18 * max(abs(acc), 1e-290):
            settled += 1
            if settled >= 3:
                return acc
        else:
            settled = 0
        zk *= z
        coeff *= (gamma + k) / (k + 1.0)
    return None


# --- regime B: extended precision series ----------------------------------

#: scan until terms sit this far (in nats) below the running peak / unity
_TAIL_MARGIN = 30.0 * math.log(10.0)


def _series_log_terms(alpha: float, beta: float, gamma: float, R: float,
                      budget_log: float | None = None):
    """Float log|term_k| profile used to size precision and truncation.

    The scan runs until the tail drops below the eventual truncation cutoff.
    When `budget_log` is given, it stops as soon as the running peak exceeds
    it: the caller switches to the contour regime at that point and only the
    peak estimate matters.
    """
    lg = math.log(R) if R > 0 else -math.inf
    lgam_g = math.lgamma(gamma)
    logs = []
    log_max = -math.inf
    k = 0
    while k <= 2_000_000:
        x = alpha * k + beta
        # |1/Gamma(x)| for x <= 0 via reflection; poles give -inf -> term 0
        if x > 0:
            lrg = -math.lgamma(x)
        else:
            s = math.sin(math.pi * x)
            if s == 0.0:
                logs.append(-math.inf)
                k += 1
                continue
            lrg = math.log(abs(s) / math.pi) + math.lgamma(1.0 - x)
        lt = k * lg + math.lgamma(gamma + k) - lgam_g - math.lgamma(k + 1) + lrg
        logs.append(lt)
        log_max = max(log_max, lt)
        if budget_log is not None and log_max > budget_log:
            break
        # past the reflection zone the profile is unimodal, so once a term
        # falls below the cutoff the remaining tail is negligible
        if x > 1.0 and k >= 8 and lt < min(0.0, log_max) - _TAIL_MARGIN:
            break
        k += 1
    return np.array(logs)


def _ml_series_mp(alpha: float, beta: float, gamma: float, z: complex, logs):
    log_max = float(np.max(logs))
    digits_span = max(0.0, log_max) / math.log(10.0)
    dps = int(digits_span) + 35
    # truncate once terms sit far below the peak (tail is then negligible
    # relative to the worst cancellation level)
    cutoff = log_max - (digits_span + 30.0) * math.log(10.0)
    below = np.nonzero(logs < cutoff)[0]
    kpeak = int(np.argmax(logs))
    k_end = len(logs) - 1
    for idx in below:
        if idx > kpeak:
            k_end = int(idx)
            break
    with mp.workdps(dps):
        # every term must be formed in working precision: a double-rounded
        # Gamma argument alone leaves O(peak * 1e-16) debris after the
        # cancellation, which can dwarf the result
        aa, bb, gg = mp.mpf(alpha), mp.mpf(beta), mp.mpf(gamma)
        zz = mp.mpmathify(z)
        acc = mp.mpc(0)
        coeff = mp.mpf(1)
        zk = mp.mpc(1)
        for k in range(k_end + 1):
            acc += coeff * zk * mp.rgamma(aa * k + bb)
            zk *= zz
            coeff *= (gg + k) / mp.mpf(k + 1)
        return complex(acc)


# --- regime C: parabolic contour ------------------------------------------

_CONTOUR_MU = 6.0


def _contour_poles(alpha: float, z: complex):
    """Roots of s^alpha = z with |arg s| < pi (principal sheet)."""
    theta = cmath.phase(z)
    radius = abs(z) ** (1.0 / alpha)
    poles = []
    kmax = int(alpha) + 2
    for k in range(-kmax, kmax + 1):
        ang = (theta + 2.0 * math.pi * k) / alpha
        if abs(ang) < math.pi - 1e-12:
            poles.append(radius * cmath.exp(1j * ang))
    return poles


def _quad_parabola(alpha: float, beta: float, gamma: float, z: complex, hu: float, width: float):
    mu = _CONTOUR_MU
    m = int(math.ceil(width / hu))
    u = hu * np.arange(-m, m + 1)
    iu1 = 1.0 + 1j * u
    s = mu * iu1 * iu1
    integ = np.exp(s) * s ** (alpha * gamma - beta) * (s**alpha - z) ** (-gamma)
    # ds = 2 i mu (1+iu) du ; divide by 2 pi i
    vals = integ * iu1
    return complex(hu * mu / math.pi * np.sum(vals))


def _ml_contour(alpha: float, beta: float, gamma: float, z: complex):
    poles = _contour_poles(alpha, z)
    residue = 0.0 + 0.0j
    for s in poles:
        # the parabola Re = mu - Im^2/(4 mu); demand clear separation
        boundary = _CONTOUR_MU - (s.imag**2) / (4.0 * _CONTOUR_MU)
        if s.real < boundary + 1.0:
            raise NonConvergence(
                f"Mittag-Leffler contour: pole {s:.3g} too close to the "
                f"integration parabola (alpha={alpha}, z={z:.3g})"
            )
        if gamma != 1.0:
            raise NonConvergence(
                "Mittag-Leffler contour supports gamma != 1 only when the "
                f"integrand is pole-free (alpha={alpha}, z={z:.3g})"
            )
        try:
            residue += (1.0 / alpha) * s ** (1.0 - beta) * cmath.exp(s)
        except OverflowError:
            return complex(math.inf, 0.0)
    coarse = _quad_parabola(alpha, beta, gamma, z, 0.09, 2.7)
    fine = _quad_parabola(alpha, beta, gamma, z, 0.06, 2.82)
    if abs(fine - coarse) > 1e-9 * max(abs(fine + residue), 1e-280):
        raise NonConvergence(
            f"Mittag-Leffler contour failed its two-grid check at alpha={alpha}, "
            f"beta={beta}, z={z:.3g}"
        )
    return fine + residue


# --- dispatch --------------------------------------------------------------

#: cancellation budget (decimal digits) before the series hands over to the contour
_MP_DIGIT_BUDGET = 150.0


def _ml_value(alpha: float, beta: float, gamma: float, z: complex) -> complex:
    if z == 0:
        return complex(rgamma(beta))
    if abs(z) <= 1.0:
        val = _ml_series_double(alpha, beta, gamma, z)
        if val is not None:
            return val
    logs = _series_log_terms(
        alpha, beta, gamma, abs(z), budget_log=_MP_DIGIT_BUDGET * math.log(10.0)
    )
    digits = max(0.0, float(np.max(logs))) / math.log(10.0)
    if digits <= _MP_DIGIT_BUDGET:
        return _ml_series_mp(alpha, beta, gamma, z, logs)
    return _ml_contour(alpha, beta, gamma, z)


def mittag_leffler(params: MittagLefflerParams, z) -> float | complex:
    """Evaluate E^gamma_{alpha,beta}(z); real input gives real output."""
    real_input = not isinstance(z, complex)
    zc = complex(z)
    val = _ml_value(params.alpha, params.beta, params.gamma, zc)
    if not real_input:
        return val
    if math.isinf(val.real):
        return val.real
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise NonConvergence(
            f"imaginary residue {val.imag:.3e} for real argument z={z!r} "
            f"(alpha={params.alpha}, beta={params.beta}, gamma={params.gamma})"
        )
    return val.real


def mittleff(*args) -> float | complex:
    """Positional convenience: (alpha, z), (alpha, beta, z) or (alpha, beta, gamma, z)."""
    if len(args) == 2:
        a, z = args
        p = MittagLefflerParams(a)
    elif len(args) == 3:
        a, b, z = args
        p = MittagLefflerParams(a, b)
    elif len(args) == 4:
        a, b, g, z = args
        p = MittagLefflerParams(a, b, g)
    else:
        raise TypeError("mittleff takes (alpha[, beta[, gamma]], z)")
    return mittag_leffler(p, z)
