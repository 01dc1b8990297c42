"""Top eigenvalue of GUE matrices via a real-symmetric embedding and power iteration."""
from __future__ import annotations

import math

import numpy as np

from ..errors import ModelConsistencyError

GUE_STREAM = 1 << 20  # keeps GUE draws off the field streams


def sample_gue(size: int, variance: float, seed: int, stream_id: int = GUE_STREAM) -> np.ndarray:
    """Hermitian ``size x size`` matrix: real diagonal Normal(0, variance), off-diagonal
    entries with independent Normal(0, variance/2) real and imaginary parts."""
    rng = np.random.Generator(np.random.SFC64(np.random.SeedSequence(seed, spawn_key=(stream_id,))))
    h = np.zeros((size, size), dtype=complex)
    iu = np.triu_indices(size, 1)
    s = math.sqrt(variance / 2.0)
    re = rng.standard_normal(iu[0].size) * s
    im = rng.standard_normal(iu[0].size) * s
    h[iu] = re + 1j * im
    h = h + h.conj().T
    h[np.diag_indices(size)] = rng.standard_normal(size) * math.sqrt(variance)
    return h


def real_embedding(h: np.ndarray) -> np.ndarray:
    """``[[X, -Y], [Y, X]]`` for ``h = X + iY``; its spectrum is that of ``h``, doubled."""
    x, y = h.real, h.imag
    return np.block([[x, -y], [y, x]])


def top_eigenvalue(a: np.ndarray, tol: float = 1e-10, max_iter: int = 200_000) -> float:
    """Largest eigenvalue of a real symmetric matrix by shifted power iteration.

    The shift is the Gershgorin radius, making the spectrum non-negative so the top
    eigenvalue dominates in modulus.  Iteration stops once the eigen-residual
    ``|b v - lam v|`` is below ``tol`` times the shifted scale; the Rayleigh-quotient
    error is then quadratically small.  The start vector is fixed, so the result is
    a deterministic function of ``a``.
    """
    a = np.asarray(a, dtype=float)
    m = a.shape[0]
    shift = float(np.max(np.sum(np.abs(a), axis=1)))
    b = a + shift * np.eye(m)
    v = np.linspace(1.0, 2.0, m)
    v /= np.linalg.norm(v)
    scale = max(1.0, 2.0 * shift)
    for _ in range(max_iter):
        w = b @ v
        lam = v @ w
        if np.linalg.norm(w - lam * v) <= tol * scale:
            return float(lam - shift)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return -shift
        v = w / nrm
    raise ModelConsistencyError("power iteration did not converge")


def gue_top(size: int, variance: float, seed: int, stream_id: int = GUE_STREAM) -> float:
    return top_eigenvalue(real_embedding(sample_gue(size, variance, seed, stream_id)))
