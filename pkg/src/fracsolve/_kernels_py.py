"""Pure-numpy history convolution kernels.

Drop-in fallback for the compiled extension; backends.py picks whichever
imports.  Both compute the lagged dot products that dominate the cost of
every product-integration march:

    out[k] = sum_{i=lo}^{hi-1} w[base - i] * F[i, k]

with either one shared weight vector or one weight row per component.
"""
from __future__ import annotations

import numpy as np


def hist_dot(w: np.ndarray, F: np.ndarray, lo: int, hi: int, base: int) -> np.ndarray:
    if hi <= lo:
        return np.zeros(F.shape[1])
    ws = w[base - hi + 1 : base - lo + 1][::-1]
    return ws @ F[lo:hi]


def hist_dot_multi(W: np.ndarray, F: np.ndarray, lo: int, hi: int, base: int) -> np.ndarray:
    if hi <= lo:
        return np.zeros(F.shape[1])
    ws = W[:, base - hi + 1 : base - lo + 1][:, ::-1]
    return np.einsum("ki,ik->k", ws, F[lo:hi])
