"""Probe states: models, candidate pools, optimization and impossibility proofs.

A probe is fed into one party's boxes. Under ``single_system`` it may be any
state of those boxes, under ``product_probe`` it factors across the boxes,
under ``ancilla_assisted`` it may be entangled with an idle register of the
same dimension. Ancillas larger than the system are never needed: a pure
probe on system + ancilla has Schmidt rank at most the system dimension, and
every overlap depends only on the reduced system state.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .geometry import FeasibilityProblem, compress_support, find_weights, simplex_feasible
from .operators import LocalFactor, StateVector

DEFAULT_SEED = 0xC0FFEE
OBJECTIVE_TOL = 1e-18  # squared overlaps; keeps each overlap below the 1e-8 orthogonality check


class ProbeModel(str, Enum):
    SINGLE = "single_system"
    PRODUCT = "product_probe"
    ANCILLA = "ancilla_assisted"

    @classmethod
    def parse(cls, value) -> "ProbeModel":
        if isinstance(value, ProbeModel):
            return value
        aliases = {"single": cls.SINGLE, "product": cls.PRODUCT, "ancilla": cls.ANCILLA}
        if value in aliases:
            return aliases[value]
        return cls(value)

    def probe_dim(self, system_dim: int) -> int:
        return system_dim * system_dim if self is ProbeModel.ANCILLA else system_dim


@dataclass(frozen=True, eq=False)
class Probe:
    """A candidate probe: a product of per-box vectors or one joint vector.

    Joint vectors are shaped ``(system_dim, ancilla_dim)`` once flattened in
    row-major order; ``ancilla_dim`` is 1 without an ancilla.
    """

    origin: str
    boxes: tuple[np.ndarray, ...] | None = None
    joint: np.ndarray | None = None
    ancilla_dim: int = 1

    def vector(self) -> np.ndarray:
        if self.joint is not None:
            return self.joint
        v = reduce(np.kron, self.boxes)
        if self.ancilla_dim > 1:
            anc = np.zeros(self.ancilla_dim, dtype=complex)
            anc[0] = 1.0
            v = np.kron(v, anc)
        return v

    def state(self, dims: Sequence[int]) -> StateVector:
        d = tuple(dims) + ((self.ancilla_dim,) if self.ancilla_dim > 1 else ())
        return StateVector.normalized(self.vector(), d)


def set_partitions(items: Sequence) -> list[list[tuple]]:
    """All set partitions, finest first, ties in generation order."""
    items = list(items)
    if not items:
        return [[]]
    out = []

    def rec(i, blocks):
        if i == len(items):
            out.append([tuple(b) for b in blocks])
            return
        for b in blocks:
            b.append(items[i])
            rec(i + 1, blocks)
            b.pop()
        blocks.append([items[i]])
        rec(i + 1, blocks)
        blocks.pop()

    rec(0, [])
    out.sort(key=lambda p: -len(p))
    return out


def target_partitions(n: int) -> list[list[tuple]]:
    """Partitions of ``range(n)`` into at least two blocks worth probing for."""
    if n <= 4:
        return [p for p in set_partitions(range(n)) if len(p) >= 2]
    full = [tuple([i]) for i in range(n)]
    cuts = [[(i,), tuple(j for j in range(n) if j != i)] for i in range(n)]
    return [full] + cuts


def diag_pair_problem(factors: Sequence[LocalFactor], pairs: Iterable[tuple[int, int]]) -> FeasibilityProblem:
    """Moment constraints ``<psi| f_a^dagger f_b |psi> = 0`` over the diagonal basis."""
    phases = [f.diag_phases() for f in factors]
    rows = []
    labels = []
    for a, b in pairs:
        rows.append(tuple(pb - pa for pa, pb in zip(phases[a], phases[b])))
        labels.append(f"{a}-{b}")
    return FeasibilityProblem(len(phases[0]), tuple(rows), tuple(labels))


def lp_probe(factors: Sequence[LocalFactor], partition: Sequence[tuple]) -> np.ndarray | None:
    """Real-amplitude probe making every cross-block pair orthogonal, if one exists."""
    block = {}
    for k, blk in enumerate(partition):
        for i in blk:
            block[i] = k
    pairs = [(a, b) for a, b in itertools.combinations(range(len(factors)), 2) if block[a] != block[b]]
    if not pairs:
        return None
    prob = diag_pair_problem(factors, pairs)
    small, members = compress_support(prob)
    w = find_weights(small)
    if w is None:
        return None
    amp = np.zeros(prob.support_size, dtype=complex)
    for weight, grp in zip(w, members):
        amp[grp[0]] = math.sqrt(max(float(weight), 0.0))
    n = np.linalg.norm(amp)
    if n == 0.0:
        return None
    amp /= n
    if max(abs(np.vdot(amp, (f.to_matrix().conj().T @ g.to_matrix()) @ amp)) for f, g in
           ((factors[a], factors[b]) for a, b in pairs)) > 1e-9:
        return None
    return amp


def _dedupe(vectors: Iterable[np.ndarray]) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for v in vectors:
        v = np.asarray(v, dtype=complex)
        n = np.linalg.norm(v)
        if n < 1e-12:
            continue
        v = v / n
        if any(abs(abs(np.vdot(u, v)) - 1.0) < 1e-10 for u in out):
            continue
        out.append(v)
    return out


def box_pool(factors: Sequence[LocalFactor]) -> list[np.ndarray]:
    """Deterministic single-box probes for telling ``factors`` apart."""
    d = factors[0].dim
    vecs: list[np.ndarray] = []
    if len(factors) >= 2 and all(f.is_diagonal for f in factors):
        for part in target_partitions(len(factors)):
            v = lp_probe(factors, part)
            if v is not None:
                vecs.append(v)
    eye = np.eye(d, dtype=complex)
    vecs.extend(eye)
    vecs.append(np.ones(d) / math.sqrt(d))
    if d == 2:
        s = 1 / math.sqrt(2)
        vecs += [np.array([s, -s]), np.array([s, 1j * s]), np.array([s, -1j * s])]
    else:
        omega = np.exp(2j * math.pi / d)
        vecs += [omega ** (k * np.arange(d)) / math.sqrt(d) for k in range(1, d)]
    if not all(f.is_diagonal for f in factors):
        for f, g in itertools.combinations(factors, 2):
            rel = f.to_matrix().conj().T @ g.to_matrix()
            _, ev = np.linalg.eig(rel)
            for i, j in itertools.combinations(range(d), 2):
                for ph in (1, -1, 1j, -1j):
                    vecs.append((ev[:, i] + ph * ev[:, j]) / math.sqrt(2))
            vecs.extend(ev.T)
    return _dedupe(vecs)


def max_entangled_vector(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex).reshape(-1) / math.sqrt(d)


# ---------------------------------------------------------------------------
# gradient search for a common probe


def _objective(psi, mats):
    vals = [np.vdot(psi, m @ psi) for m in mats]
    return sum(abs(v) ** 2 for v in vals), vals


def gradient_probe(
    relatives: Sequence[np.ndarray],
    dim: int,
    starts: int = 64,
    iterations: int = 500,
    seed: int = DEFAULT_SEED,
) -> tuple[np.ndarray | None, float]:
    """Minimize ``sum |<psi|R|psi>|^2`` over unit vectors by multi-start
    projected gradient descent with backtracking.

    Start ``k`` uses the generator seeded with ``(seed, k)``, so results do
    not depend on evaluation order. Returns the best vector when it reaches
    the objective tolerance, else ``None``, plus the best objective seen.
    """
    mats = [np.asarray(r, dtype=complex) for r in relatives]
    best_val = math.inf
    for k in range(starts):
        rng = np.random.default_rng([seed, k])
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi /= np.linalg.norm(psi)
        val, vals = _objective(psi, mats)
        step = 0.5
        for _ in range(iterations):
            if val <= OBJECTIVE_TOL:
                break
            grad = sum(np.conj(v) * (m @ psi) + v * (m.conj().T @ psi) for v, m in zip(vals, mats))
            grad = grad - np.vdot(psi, grad) * psi
            if np.linalg.norm(grad) < 1e-15:
                break
            for _ in range(30):
                cand = psi - step * grad
                cand /= np.linalg.norm(cand)
                cval, cvals = _objective(cand, mats)
                if cval < val:
                    psi, val, vals = cand, cval, cvals
                    step *= 1.5
                    break
                step *= 0.5
            else:
                break
        best_val = min(best_val, val)
        if val <= OBJECTIVE_TOL:
            return psi, val
    return None, best_val


# ---------------------------------------------------------------------------
# impossibility certificates


_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def qubit_single_system_certificate(relatives: Sequence[np.ndarray], labels=None) -> dict:
    """Decide single-qubit common-probe feasibility analytically.

    Write each relative operator as ``e^{i phi}(cos a + i sin a n.sigma)``.
    Then ``<psi|R|psi> = e^{i phi}(cos a + i sin a n.r)`` for the Bloch vector
    ``r``: it vanishes iff ``cos a = 0`` and ``n.r = 0``. A pure probe exists
    iff every relative operator is traceless and the axes ``n`` leave a unit
    vector orthogonal to all of them, i.e. span at most a plane.
    """
    labels = list(labels or range(len(relatives)))
    axes = []
    for lab, r in zip(labels, relatives):
        r = np.asarray(r, dtype=complex)
        tr = np.trace(r) / 2.0
        if abs(tr) > 1e-10:
            return {
                "kind": "analytic-bloch",
                "feasible": False,
                "reason": f"relative operator {lab} is not traceless (|tr|/2 = {abs(tr):.6g})",
            }
        glob = np.sqrt(np.linalg.det(r))
        n = np.array([np.trace(r @ s) / (2j * glob) for s in _PAULI])
        axes.append(np.real(n))
    mat = np.array(axes)
    rank = int(np.linalg.matrix_rank(mat, tol=1e-9)) if len(axes) else 0
    cert = {"kind": "analytic-bloch", "axes": mat.tolist(), "rank": rank}
    if rank >= 3:
        cert.update(feasible=False, reason="required <n.sigma> = 0 for axes spanning R^3 forces a zero Bloch vector")
        return cert
    _, _, vt = np.linalg.svd(mat if len(axes) else np.zeros((1, 3)))
    bloch = vt[-1]
    cert.update(feasible=True, bloch=bloch.tolist(), probe=_bloch_state(bloch).tolist())
    return cert


def _bloch_state(r) -> np.ndarray:
    x, y, z = r
    theta = math.acos(max(-1.0, min(1.0, z)))
    phi = math.atan2(y, x)
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def bloch_grid_min(relatives: Sequence[np.ndarray], step_deg: float = 1.0) -> dict:
    """Minimum of ``sum |<psi|R|psi>|^2`` over a Bloch-sphere grid.

    ``|<R>|`` is 1-Lipschitz in the Bloch vector, so the objective is
    ``2P``-Lipschitz for ``P`` operators and every sphere point lies within
    chord distance ``step`` of a grid point; ``lower_bound`` holds everywhere.
    """
    step = math.radians(step_deg)
    thetas = np.arange(0.0, 180.0 + 1e-9, step_deg) * math.pi / 180.0
    phis = np.arange(0.0, 360.0, step_deg) * math.pi / 180.0
    t, p = np.meshgrid(thetas, phis, indexing="ij")
    a = np.cos(t / 2).ravel()
    b = (np.exp(1j * p) * np.sin(t / 2)).ravel()
    total = np.zeros_like(a, dtype=float)
    for r in relatives:
        r = np.asarray(r, dtype=complex)
        val = (np.conj(a) * (r[0, 0] * a + r[0, 1] * b) + np.conj(b) * (r[1, 0] * a + r[1, 1] * b))
        total += np.abs(val) ** 2
    gmin = float(total.min())
    lip = 2.0 * len(relatives)
    return {"kind": "bloch-grid", "step_deg": step_deg, "grid_min": gmin,
            "lipschitz": lip, "lower_bound": gmin - lip * step}


def lp_certificate(problem: FeasibilityProblem) -> dict:
    """Smallest infeasible set of constraints (one or two), compressed.

    Returns the reduced problem, its diagnostics and which original
    constraints it came from. Falls back to the whole problem.
    """
    n = len(problem.constraints)
    labels = problem.labels or tuple(str(i) for i in range(n))

    def sub(idx):
        return compress_support(FeasibilityProblem(problem.support_size, tuple(problem.constraints[i] for i in idx)))

    for i in range(n):
        small, _ = sub([i])
        if find_weights(small) is None:
            verdict = simplex_feasible(small)
            return {"kind": "LP", "constraints": [labels[i]], "problem": small.to_json(), "verdict": verdict.to_json()}
    found = []
    for i, j in itertools.combinations(range(n), 2):
        small, _ = sub([i, j])
        if find_weights(small) is None:
            rows = [tuple(sorted(p.sort_key() for p in row)) for row in small.constraints]
            order = sorted(range(2), key=lambda k: rows[k])
            found.append((small.support_size, [rows[k] for k in order], [(i, j)[k] for k in order]))
    if found:
        found.sort(key=lambda item: (item[0], item[1]))
        idx = found[0][2]
        small, _ = sub(idx)
        verdict = simplex_feasible(small)
        return {"kind": "LP", "constraints": [labels[k] for k in idx], "problem": small.to_json(),
                "verdict": verdict.to_json()}
    small, _ = compress_support(problem)
    verdict = simplex_feasible(small)
    return {"kind": "LP", "constraints": list(labels), "problem": small.to_json(), "verdict": verdict.to_json()}
