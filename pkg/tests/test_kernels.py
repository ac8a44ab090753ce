"""History-kernel backends: contract, cross-backend agreement, FFT paths."""
import numpy as np
import pytest

from fracsolve import backends
from fracsolve.weights import history_sum


def naive_hist_dot(w, F, lo, hi, base):
    d = F.shape[1]
    out = np.zeros(d)
    for i in range(lo, hi):
        out += w[base - i] * F[i]
    return out


def naive_hist_dot_multi(W, F, lo, hi, base):
    d = F.shape[1]
    out = np.zeros(d)
    for k in range(d):
        for i in range(lo, hi):
            out[k] += W[k, base - i] * F[i, k]
    return out


def test_backend_identifies_itself():
    assert backends.BACKEND in ("compiled", "python")
    table = backends.backend_table()
    assert "python" in table
    if backends.BACKEND == "compiled":
        assert "compiled" in table


def test_hist_dot_contract():
    rng = np.random.default_rng(21)
    w = rng.standard_normal(64)
    F = np.ascontiguousarray(rng.standard_normal((64, 3)))
    for lo, hi, base in [(0, 10, 9), (0, 10, 10), (3, 17, 20), (5, 5, 10), (0, 64, 63)]:
        got = backends.hist_dot(w, F, lo, hi, base)
        np.testing.assert_allclose(got, naive_hist_dot(w, F, lo, hi, base), atol=1e-13)


def test_hist_dot_multi_contract():
    rng = np.random.default_rng(22)
    W = np.ascontiguousarray(rng.standard_normal((4, 64)))
    F = np.ascontiguousarray(rng.standard_normal((64, 4)))
    for lo, hi, base in [(0, 12, 11), (1, 30, 30), (4, 4, 8), (0, 64, 63)]:
        got = backends.hist_dot_multi(W, F, lo, hi, base)
        np.testing.assert_allclose(got, naive_hist_dot_multi(W, F, lo, hi, base), atol=1e-13)


@pytest.mark.skipif(backends.BACKEND != "compiled", reason="single backend available")
def test_backends_agree():
    from fracsolve import _kernels, _kernels_py

    rng = np.random.default_rng(23)
    w = rng.standard_normal(512)
    W = np.ascontiguousarray(rng.standard_normal((5, 512)))
    F = np.ascontiguousarray(rng.standard_normal((512, 5)))
    for lo, hi, base in [(0, 100, 99), (50, 511, 511), (0, 512, 511), (17, 18, 40)]:
        a = _kernels.hist_dot(w, F, lo, hi, base)
        b = _kernels_py.hist_dot(w, F, lo, hi, base)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)
        am = _kernels.hist_dot_multi(W, F, lo, hi, base)
        bm = _kernels_py.hist_dot_multi(W, F, lo, hi, base)
        np.testing.assert_allclose(am, bm, rtol=0, atol=1e-12)


def test_random_convolutions_fft_vs_direct():
    # long-history agreement between the two history_sum evaluation paths
    rng = np.random.default_rng(24)
    for n in (33, 257, 1000, 4096):
        w = rng.standard_normal(n + 1)
        F = rng.standard_normal((n, 2))
        direct = history_sum(w, F, n, mode="direct")
        for block in (64, 128, 512):
            fft = history_sum(w, F, n, mode="fft_blocked", block=block)
            assert np.max(np.abs(fft - direct)) <= 1e-12 * max(1.0, np.max(np.abs(direct)))


def test_empty_history_returns_zero():
    w = np.ones(4)
    F = np.ones((4, 2))
    np.testing.assert_array_equal(backends.hist_dot(w, F, 2, 2, 3), [0.0, 0.0])
    assert history_sum(w, F, 0) == pytest.approx(0.0) or np.all(history_sum(w, F, 0) == 0.0)
