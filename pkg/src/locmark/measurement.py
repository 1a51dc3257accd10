"""Projective measurements built from evolved probe states."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .operators import StateVector

EPS_OVERLAP = 1e-10


@dataclass(frozen=True, eq=False)
class Measurement:
    """Projectors ``elements``; ``classes[i]`` lists the state indices that
    survive outcome ``i`` (empty for the complement outcome)."""

    elements: tuple[np.ndarray, ...]
    classes: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def completeness_error(self) -> float:
        total = sum(self.elements)
        return float(np.abs(total - np.eye(self.dim)).max())

    def min_eigenvalue(self) -> float:
        return float(min(np.linalg.eigvalsh(e).min() for e in self.elements))

    def probabilities(self, state: np.ndarray) -> np.ndarray:
        return np.array([float(np.real(np.vdot(state, e @ state))) for e in self.elements])


def _vectors(states) -> list[np.ndarray]:
    return [s.amplitudes if isinstance(s, StateVector) else np.asarray(s, dtype=complex) for s in states]


def gram_moduli(states) -> np.ndarray:
    vs = np.array(_vectors(states))
    return np.abs(vs.conj() @ vs.T)


def components(gram: np.ndarray, tol: float = EPS_OVERLAP) -> list[tuple[int, ...]]:
    """Connected components of the non-orthogonality graph, in first-index order."""
    n = gram.shape[0]
    label = [-1] * n
    out = []
    for s in range(n):
        if label[s] >= 0:
            continue
        stack = [s]
        label[s] = len(out)
        comp = []
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.nonzero(gram[i] > tol)[0]:
                if label[j] < 0:
                    label[j] = len(out)
                    stack.append(int(j))
        out.append(tuple(sorted(comp)))
    return out


def _span_projector(vectors: list[np.ndarray], tol: float = 1e-9) -> np.ndarray:
    a = np.array(vectors).T
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    basis = u[:, s > tol * max(s.max(), 1.0)]
    return basis @ basis.conj().T


def _with_complement(projectors, classes, dim) -> Measurement:
    rest = np.eye(dim) - sum(projectors)
    # clean round-off so the complement is exactly Hermitian
    rest = (rest + rest.conj().T) / 2.0
    elements = list(projectors)
    cls = list(classes)
    if np.linalg.eigvalsh(rest).max() > 1e-9:
        elements.append(rest)
        cls.append(())
    else:
        # absorb a numerically-zero remainder into the last projector
        elements[-1] = elements[-1] + rest
    return Measurement(tuple(elements), tuple(cls))


def orthogonal_partition_measurement(states: Sequence, tol: float = EPS_OVERLAP) -> Measurement | None:
    """Projectors onto each distinct state plus the complement.

    Only defined when every pairwise overlap modulus is 0 or 1 (within
    ``tol``); otherwise returns ``None``.
    """
    vs = _vectors(states)
    if not vs:
        return None
    g = gram_moduli(vs)
    off = g[~np.eye(len(vs), dtype=bool)]
    if np.any((off > tol) & (off < 1.0 - tol)):
        return None
    classes = components(g, tol)
    projectors = []
    for cls in classes:
        v = vs[cls[0]]
        projectors.append(np.outer(v, v.conj()))
    return _with_complement(projectors, classes, vs[0].size)


def cluster_measurement(states: Sequence, tol: float = EPS_OVERLAP) -> Measurement:
    """Projectors onto the spans of mutually orthogonal clusters.

    Generalizes :func:`orthogonal_partition_measurement`: states inside one
    cluster may overlap arbitrarily, different clusters are orthogonal, so the
    outcome identifies the cluster with certainty.
    """
    vs = _vectors(states)
    classes = components(gram_moduli(vs), tol)
    projectors = [_span_projector([vs[i] for i in cls]) for cls in classes]
    return _with_complement(projectors, classes, vs[0].size)
