"""Independent reference computations used by the tests.

Nothing here calls into the gap-based hull code or the simplex solver.
"""

import itertools

import numpy as np


def grid_min_norm(thetas, step=1e-3):
    """Smallest |sum_k w_k e^{i theta_k}| over a grid of convex weights.

    In the plane every hull point lies in a triangle spanned by three of the
    points, so it is enough to scan triangles (and segments, for K = 2). One
    weight runs over a grid of the given step; the remaining segment is
    minimized in closed form. The result is an upper bound on the true
    minimum and exceeds it by at most about ``2 * step``.
    """
    z = np.exp(1j * np.asarray(thetas, dtype=float))
    if z.size == 1:
        return 1.0
    n = int(round(1.0 / step))
    w = np.arange(n + 1) / n
    best = np.inf
    idx = range(z.size)
    triples = list(itertools.combinations(idx, 3)) or [(0, 1, 1)]
    for a, b, c in triples:
        # point = w*a + (1 - w) * ((1 - t) c + t b), t in [0, 1]
        p = w * z[a] + (1 - w) * z[c]
        d = (1 - w) * (z[b] - z[c])
        dd = np.abs(d) ** 2
        t = np.where(dd > 0, -np.real(np.conj(p) * d) / np.where(dd > 0, dd, 1.0), 0.0)
        t = np.clip(t, 0.0, 1.0)
        best = min(best, float(np.abs(p + t * d).min()))
    return best


def random_unitary(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def circular_distance(a, b):
    return abs((a - b + np.pi) % (2 * np.pi) - np.pi)


def match_phases(got, want, tol):
    """True if the two multisets of angles match pairwise within ``tol`` (mod 2 pi)."""
    got = list(np.asarray(got, dtype=float))
    if len(got) != len(want):
        return False
    for x in want:
        k = min(range(len(got)), key=lambda i: circular_distance(got[i], x))
        if circular_distance(got[k], x) > tol:
            return False
        got.pop(k)
    return True
