"""Mittag-Leffler evaluation against independent reference values.

The frozen table below was produced by two oracle routes that share no code
with the implementation: naive Taylor summation of the defining series in
multiprecision arithmetic (precision raised far past the cancellation
budget), and, for the two far-negative arguments where that sum needs tens
of thousands of digits, the classical |z| -> inf inverse-power expansion
-sum_{k>=1} z^(-k)/Gamma(beta - alpha k) truncated at k = 12.  Both anchors
agree with the closed form E_{1/2}(-x) = exp(x^2) erfc(x) where it applies.
"""
import math

import numpy as np
import pytest

from fracsolve.errors import NonPositiveExponent, PoleError
from fracsolve.specfun import MittagLefflerParams, gamma_fn, mittag_leffler, mittleff

# (alpha, beta, gamma, z, reference)
REFERENCE = [
    (0.5, 1.0, 1.0, 0.5, 1.952360489182557),
    (0.8, 0.9, 1.0, -0.95, 0.3399242172721008),
    (1.5, 1.0, 1.0, 0.9, 1.8269097531916447),
    (0.3, 1.2, 2.0, -0.7, 0.34639564854406124),
    (0.5, 1.0, 1.0, -10.0, 0.05614099274382259),
    (0.8, 0.9, 1.0, -30.0, 0.0037803287768744505),
    (2.5, 1.5, 1.0, 40.0, 15.172513207179557),
    (0.6, 0.8, 1.3, -15.0, 0.001333948057708395),
    (1.0, 1.0, 2.0, -5.0, -0.026951787996341868),
    (0.5, 1.0, 1.0, -25.0, 0.02254957243264136),
    (1.2, 1.0, 1.0, -8.0, -0.040900391072296934),
    (0.9, 1.1, 1.0, 12.0, 6230874.964625743),
    (0.7, 0.6, 1.0, -60.0, -0.0015092324470167581),
    (0.5, 1.0, 1.0, -50.0, 0.011281536265323772),
    (0.4, 1.0, 1.0, -95.0, 0.007044140628968422),
]


@pytest.mark.parametrize("alpha,beta,gamma,z,want", REFERENCE)
def test_reference_values(alpha, beta, gamma, z, want):
    got = mittleff(alpha, beta, gamma, z)
    assert got == pytest.approx(want, rel=1e-10)


def test_half_order_erfc_closed_form():
    # E_{1/2}(-x) = exp(x^2) erfc(x)
    from scipy.special import erfcx

    for x in (0.3, 1.0, 4.0, 9.0):
        assert mittleff(0.5, -x) == pytest.approx(erfcx(x), rel=1e-11)


# ---------------------------------------------------------------------------
# classical identities
# ---------------------------------------------------------------------------

def test_exponential_identity():
    z = np.linspace(-5.0, 5.0, 50)
    for zi in z:
        assert mittleff(1.0, zi) == pytest.approx(math.exp(zi), rel=1e-10)


def test_cosine_identity():
    z = np.linspace(0.0, 10.0, 50)
    for zi in z:
        want = math.cos(zi)
        got = mittleff(2.0, -zi * zi)
        assert got == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_cosh_identity():
    for zi in np.linspace(0.0, 5.0, 20):
        assert mittleff(2.0, zi * zi) == pytest.approx(math.cosh(zi), rel=1e-11)


def test_expm1_over_z_identity():
    z = np.concatenate([np.linspace(-5.0, -0.2, 25), np.linspace(0.2, 5.0, 25)])
    for zi in z:
        want = math.expm1(zi) / zi
        assert mittleff(1.0, 2.0, zi) == pytest.approx(want, rel=1e-10)


def test_value_at_zero_is_reciprocal_gamma():
    for beta in (0.3, 0.7, 1.0, 1.5, 2.0, 3.7):
        for alpha in (0.4, 1.0, 1.9):
            assert mittleff(alpha, beta, 0.0) == pytest.approx(1.0 / math.gamma(beta), rel=1e-14)


def test_three_parameter_gamma_one_reduction():
    for alpha, beta, z in [(0.7, 1.0, -3.0), (0.5, 1.2, 0.8), (1.3, 0.9, -7.0)]:
        assert mittleff(alpha, beta, 1.0, z) == pytest.approx(mittleff(alpha, beta, z), rel=1e-13)


def test_prabhakar_gamma_recurrence():
    # a gamma E^{g+1}_{a,b} = E^g_{a,b-1} + (1 - b + a g) E^g_{a,b}
    for alpha, beta, gamma in [(0.7, 1.1, 1.4), (0.5, 0.8, 2.0), (1.1, 1.6, 1.25)]:
        for z in (-6.0, -2.0, -0.5, 0.3, 2.0):
            lhs = alpha * gamma * mittleff(alpha, beta + 1.0, gamma + 1.0, z)
            rhs = mittleff(alpha, beta, gamma, z) + (1.0 - (beta + 1.0) + alpha * gamma) * mittleff(
                alpha, beta + 1.0, gamma, z
            )
            scale = max(abs(lhs), abs(rhs), 1e-30)
            assert abs(lhs - rhs) <= 1e-9 * scale


def test_derivative_recurrence_alpha_one():
    # d/dz E_1(z) = E_1(z); check via E_{1,1} vs finite differences
    h = 1e-6
    for z in (-2.0, 0.5, 3.0):
        fd = (mittleff(1.0, z + h) - mittleff(1.0, z - h)) / (2 * h)
        assert fd == pytest.approx(mittleff(1.0, z), rel=1e-8)


# ---------------------------------------------------------------------------
# interface behavior
# ---------------------------------------------------------------------------

def test_real_input_real_output():
    v = mittleff(0.5, -30.0)
    assert isinstance(v, float)
    w = mittleff(0.8, 0.9, -30.0)
    assert isinstance(w, float)


def test_arity_dispatch():
    z = -2.5
    assert mittleff(0.6, z) == mittleff(0.6, 1.0, z)
    assert mittleff(0.6, 1.0, z) == mittleff(0.6, 1.0, 1.0, z)
    with pytest.raises(TypeError):
        mittleff(0.6)
    with pytest.raises(TypeError):
        mittleff(0.6, 1.0, 1.0, 1.0, -1.0)


def test_params_object_entry_point():
    p = MittagLefflerParams(alpha=0.5)
    assert mittag_leffler(p, -10.0) == pytest.approx(0.05614099274382259, rel=1e-10)


def test_parameter_validation():
    with pytest.raises(NonPositiveExponent):
        MittagLefflerParams(alpha=0.0)
    with pytest.raises(NonPositiveExponent):
        MittagLefflerParams(alpha=-1.0)
    with pytest.raises(NonPositiveExponent):
        MittagLefflerParams(alpha=0.5, gamma=0.0)
    with pytest.raises(NonPositiveExponent):
        MittagLefflerParams(alpha=0.5, beta=float("inf"))


def test_gamma_fn():
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma_fn(5.0) == 24.0
    with pytest.raises(PoleError):
        gamma_fn(0.0)
    with pytest.raises(PoleError):
        gamma_fn(-3.0)


def test_monotone_decay_on_negative_axis():
    # E_alpha(-t^alpha) is completely monotone for 0 < alpha <= 1
    alpha = 0.6
    t = np.linspace(0.1, 40.0, 120)
    vals = np.array([mittleff(alpha, -ti**alpha) for ti in t])
    assert np.all(vals > 0.0)
    assert np.all(np.diff(vals) < 0.0)
