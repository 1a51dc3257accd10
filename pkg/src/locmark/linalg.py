"""Dense complex linear algebra: unitarity checks and a normal-matrix eigensolver.

The eigensolver reduces to upper Hessenberg form with Householder reflections
and then runs Wilkinson-shifted QR sweeps with deflation. It is meant for the
small (d <= 64) unitaries that appear here, not as a general solver.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NumericError

EPS_UNITARY = 1e-9
EIG_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DimensionError("matrix has non-finite entries")
    return a


def validate_unitary(m, tol: float = EPS_UNITARY) -> bool:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"unitary must be square, got shape {a.shape}")
    err = np.abs(a.conj().T @ a - np.eye(a.shape[0]))
    return bool(err.max(initial=0.0) <= tol)


def hessenberg(a: np.ndarray) -> np.ndarray:
    h = np.array(a, dtype=complex)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
    return h


def _wilkinson_shift(a, b, c, d) -> complex:
    # eigenvalue of [[a, b], [c, d]] closest to d
    tr = a + d
    det = a * d - b * c
    disc = np.sqrt(tr * tr / 4.0 - det)
    l1 = tr / 2.0 + disc
    l2 = tr / 2.0 - disc
    return l1 if abs(l1 - d) < abs(l2 - d) else l2


def eigvals_normal(m, tol: float = EIG_TOL, max_sweeps: int | None = None) -> np.ndarray:
    """Eigenvalues of a normal matrix by shifted Hessenberg QR.

    Raises :class:`NumericError` carrying the largest remaining subdiagonal
    entry when the iteration budget (``100 * d`` sweeps by default) runs out.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if n != a.shape[1]:
        raise DimensionError(f"matrix must be square, got shape {a.shape}")
    if n == 0:
        return np.zeros(0, dtype=complex)
    h = hessenberg(a)
    budget = max_sweeps if max_sweeps is not None else 100 * n
    scale = max(np.abs(a).max(), 1.0)
    out = np.zeros(n, dtype=complex)
    hi = n - 1
    sweeps = 0
    stall = 0
    while hi >= 0:
        if hi == 0:
            out[0] = h[0, 0]
            break
        # find the start of the unreduced block ending at hi
        lo = hi
        while lo > 0 and abs(h[lo, lo - 1]) > tol * scale * 1e-2:
            lo -= 1
        if lo == hi:
            out[hi] = h[hi, hi]
            h[hi, hi - 1] = 0.0
            hi -= 1
            stall = 0
            continue
        if sweeps >= budget:
            residual = float(np.abs(np.diag(h, -1)).max())
            raise NumericError(
                f"QR iteration did not converge in {budget} sweeps", residual=residual
            )
        blk = h[lo:hi + 1, lo:hi + 1]
        if stall and stall % 11 == 0:
            mu = blk[-1, -1] + abs(blk[-1, -2]) * (0.75 + 0.5j)
        else:
            mu = _wilkinson_shift(blk[-2, -2], blk[-2, -1], blk[-1, -2], blk[-1, -1])
        k = blk.shape[0]
        q, r = np.linalg.qr(blk - mu * np.eye(k))
        h[lo:hi + 1, lo:hi + 1] = r @ q + mu * np.eye(k)
        # keep the rest of H consistent so later blocks see the similarity
        h[:lo, lo:hi + 1] = h[:lo, lo:hi + 1] @ q
        h[lo:hi + 1, hi + 1:] = q.conj().T @ h[lo:hi + 1, hi + 1:]
        sweeps += 1
        stall += 1
    return out


def eigphases_dense(m, tol: float = EIG_TOL) -> np.ndarray:
    """Eigenphases in [0, 2*pi) of a dense unitary."""
    vals = eigvals_normal(m, tol=tol)
    ph = np.angle(vals)
    ph = np.where(ph < 0.0, ph + 2.0 * np.pi, ph)
    ph = np.where(ph >= 2.0 * np.pi, 0.0, ph)
    return ph
