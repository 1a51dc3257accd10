"""Convex geometry of unit-circle points and simplex moment feasibility.

Two kernels live here. :func:`hull_contains_origin` decides whether the
convex hull of a phase multiset contains the origin using the circular-gap
rule (largest gap between consecutive sorted phases at most pi), exactly when
every phase is a rational multiple of pi. :func:`simplex_feasible` decides
whether some probability vector makes every complex moment vanish.

Boundary convention: a largest gap of exactly pi (an antipodal pair on the
hull boundary) counts as containing the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import lp
from .errors import DomainError, StructureError
from .phases import Phase, PhaseSet, cos_pi

EPS_HULL = 1e-9
EPS_MOMENT = 1e-10
BOUNDARY_CONVENTION = "largest gap == pi counts as containing the origin"


@dataclass(frozen=True)
class HullVerdict:
    contains_origin: bool
    min_norm: float
    exact: bool
    max_gap: float
    weights: tuple[float, ...] | None = None
    point: complex | None = None
    normal: Phase | None = None
    phases: PhaseSet | None = field(default=None, compare=False)
    convention: str = BOUNDARY_CONVENTION

    @property
    def on_boundary(self) -> bool:
        return self.contains_origin and abs(self.max_gap - math.pi) <= EPS_HULL

    def to_json(self) -> dict:
        out = {
            "contains_origin": self.contains_origin,
            "min_norm": self.min_norm,
            "exact": self.exact,
            "max_gap": self.max_gap,
            "convention": self.convention,
        }
        if self.weights is not None:
            out["weights"] = list(self.weights)
        if self.normal is not None:
            out["separating_normal"] = self.normal.to_json()
        if self.phases is not None:
            out["phases"] = self.phases.to_json()
        return out


def _as_phaseset(p) -> PhaseSet:
    return p if isinstance(p, PhaseSet) else PhaseSet.of(p)


def _gaps(values, full):
    """Indices sorted by angle and the gap after each sorted element."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    gaps = []
    for k, i in enumerate(order):
        nxt = values[order[(k + 1) % len(order)]]
        g = nxt - values[i]
        if k == len(order) - 1:
            g += full
        gaps.append(g)
    return order, gaps


def hull_contains_origin(p) -> HullVerdict:
    ps = _as_phaseset(p)
    n = len(ps)
    if n == 0:
        raise DomainError("hull of an empty phase set")
    exact = ps.is_exact
    if exact:
        values = [ph.pi_frac for ph in ps]
        order, gaps = _gaps(values, Fraction(2))
    else:
        values = [ph.radians for ph in ps]
        order, gaps = _gaps(values, 2.0 * math.pi)
    k = max(range(n), key=lambda i: gaps[i])
    gmax = gaps[k]
    start = ps[order[(k + 1) % n]]
    if exact:
        width = 2 - gmax
        contains = gmax <= 1
        min_norm = 0.0 if contains else cos_pi(width / 2)
        max_gap = float(gmax) * math.pi
    else:
        width = 2.0 * math.pi - gmax
        min_norm = max(0.0, math.cos(width / 2.0))
        contains = gmax <= math.pi or min_norm <= EPS_HULL
        if contains:
            min_norm = 0.0
        max_gap = float(gmax)
    if not contains:
        half = Phase.pi(width / 2) if exact else Phase.rad(width / 2.0)
        return HullVerdict(False, float(min_norm), exact, max_gap, normal=start + half, phases=ps)
    weights = _witness(ps, order)
    pts = ps.points()
    point = complex(np.dot(weights, pts))
    return HullVerdict(True, 0.0, exact, max_gap, weights=tuple(weights), point=point, phases=ps)


def _witness(ps: PhaseSet, order) -> list[float]:
    n = len(ps)
    w = [0.0] * n
    # antipodal pair first: weights 1/2, 1/2
    if ps.is_exact:
        where = {}
        for i, ph in enumerate(ps):
            where.setdefault(ph.pi_frac, i)
        for i, ph in enumerate(ps):
            j = where.get((ph + Phase.pi(1)).pi_frac)
            if j is not None:
                w[i] = w[j] = 0.5
                return w
    else:
        rad = ps.radians()
        diff = np.abs(((rad[:, None] - rad[None, :]) % (2 * math.pi)) - math.pi)
        i, j = np.unravel_index(np.argmin(diff), diff.shape)
        if diff[i, j] <= EPS_HULL:
            w[int(i)] = w[int(j)] = 0.5
            return w
    # otherwise a triangle: first point, last point before its antipode, first after
    a = order[0]
    base = ps[a]
    rel = [(ps[i] - base) for i in range(n)]
    half = Phase.pi(1) if ps.is_exact else Phase.rad(math.pi)
    before = [i for i in order if Phase.pi(0).sort_key() < rel[i].sort_key() < half.sort_key()]
    after = [i for i in order if rel[i].sort_key() > half.sort_key()]
    b = max(before, key=lambda i: rel[i].sort_key())
    c = min(after, key=lambda i: rel[i].sort_key())
    ta, tb, tc = ps[a], ps[b], ps[c]
    raw = [(tc - tb).sin(), (ta - tc).sin(), (tb - ta).sin()]
    total = sum(raw)
    for idx, val in zip((a, b, c), raw):
        w[idx] = val / total
    return w


def min_hull_norm(p) -> float:
    return hull_contains_origin(p).min_norm


def difference_phases(p) -> PhaseSet:
    ps = _as_phaseset(p)
    return PhaseSet(tuple(a - b for a in ps for b in ps), source=f"diff({ps.source})")


def sum_phases(a, b) -> PhaseSet:
    pa, pb = _as_phaseset(a), _as_phaseset(b)
    if not len(pa) or not len(pb):
        raise DomainError("sum of empty phase sets")
    return PhaseSet(tuple(x + y for x in pa for y in pb), source=f"sum({pa.source},{pb.source})")


# ---------------------------------------------------------------------------
# simplex moment feasibility


@dataclass(frozen=True)
class FeasibilityProblem:
    """Find w on the probability simplex with ``sum_k w_k exp(i phi_jk) = 0`` for all j."""

    support_size: int
    constraints: tuple[tuple[Phase, ...], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        rows = tuple(tuple(Phase.coerce(c) for c in row) for row in self.constraints)
        object.__setattr__(self, "constraints", rows)
        for j, row in enumerate(rows):
            if len(row) != self.support_size:
                raise StructureError(
                    f"constraint {j} has {len(row)} coefficients, support size is {self.support_size}"
                )

    @property
    def exact_rational(self) -> bool:
        # real and imaginary parts rational exactly for multiples of pi/2
        return all(c.is_exact and (c.pi_frac * 2).denominator == 1 for row in self.constraints for c in row)

    def matrix(self) -> np.ndarray:
        return np.array([[c.unit() for c in row] for row in self.constraints], dtype=complex).reshape(
            len(self.constraints), self.support_size
        )

    def moduli(self, weights) -> np.ndarray:
        return np.abs(self.matrix() @ np.asarray(weights, dtype=float))

    def to_json(self) -> dict:
        return {
            "support_size": self.support_size,
            "constraints": [[c.to_json() for c in row] for row in self.constraints],
        }


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool | None
    weights: tuple[float, ...] | None = None
    residual: float | None = None
    exact: bool = False
    forced_point: tuple[float, ...] | None = None
    forced_residual: float | None = None
    kind: str = "LP"
    certificate: dict | None = None

    def to_json(self) -> dict:
        out = {"feasible": self.feasible, "exact": self.exact, "kind": self.kind}
        if self.weights is not None:
            out["weights"] = list(self.weights)
        if self.residual is not None:
            out["residual"] = self.residual
        if self.forced_point is not None:
            out["forced_point"] = list(self.forced_point)
            out["forced_residual"] = self.forced_residual
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


def _real_rows(f: FeasibilityProblem, exact: bool):
    rows, rhs = [], []
    for row in f.constraints:
        if exact:
            re = [Fraction(round(c.cos())) for c in row]
            im = [Fraction(round(c.sin())) for c in row]
        else:
            re = [c.cos() for c in row]
            im = [c.sin() for c in row]
        rows += [re, im]
        rhs += [0, 0]
    rows.append([1] * f.support_size)
    rhs.append(1)
    return rows, rhs


def find_weights(f: FeasibilityProblem):
    """Phase-1 only: a feasible simplex point or ``None``."""
    exact = f.exact_rational
    rows, rhs = _real_rows(f, exact)
    res = lp.solve([0] * f.support_size, rows, rhs, exact=exact)
    if res.status != "optimal":
        return None
    return res.x


def _minimax_residual(f: FeasibilityProblem, directions: int = 64):
    """min over the simplex of max_j |moment_j|, by a polygonal LP.

    The polygon underestimates the modulus by at most a factor cos(pi/N); the
    returned value is the true max modulus at the LP optimum.
    """
    k = f.support_size
    mat = f.matrix()
    angles = 2.0 * math.pi * np.arange(directions) / directions
    ineq = []
    for row in mat:
        for phi in angles:
            ineq.append(np.real(np.exp(-1j * phi) * row))
    m = len(ineq)
    # variables: w (k), t, slacks (m);  a.w - t + s = 0, sum w = 1
    n = k + 1 + m
    a_eq = np.zeros((m + 1, n))
    for i, coeffs in enumerate(ineq):
        a_eq[i, :k] = coeffs
        a_eq[i, k] = -1.0
        a_eq[i, k + 1 + i] = 1.0
    a_eq[m, :k] = 1.0
    b = np.zeros(m + 1)
    b[m] = 1.0
    c = np.zeros(n)
    c[k] = 1.0
    res = lp.solve(c, a_eq, b)
    w = np.array(res.x[:k])
    return float(np.abs(mat @ w).max()), tuple(float(x) for x in w)


def _unique_point(f: FeasibilityProblem):
    exact = f.exact_rational
    rows, rhs = _real_rows(f, exact)
    k = f.support_size
    lo, hi = [], []
    for i in range(k):
        c = [0] * k
        c[i] = 1
        r1 = lp.solve(c, rows, rhs, exact=exact)
        c[i] = -1
        r2 = lp.solve(c, rows, rhs, exact=exact)
        if r1.status != "optimal" or r2.status != "optimal":
            return None
        lo.append(float(r1.value))
        hi.append(-float(r2.value))
    if max(h - l for l, h in zip(lo, hi)) > 1e-9:
        return None
    return tuple(lo)


def simplex_feasible(f: FeasibilityProblem, diagnostics: bool = True) -> FeasibilityVerdict:
    if f.support_size < 1 or not f.constraints:
        raise StructureError("need at least one weight and one constraint")
    exact = f.exact_rational
    x = find_weights(f)
    if x is not None:
        weights = tuple(float(v) for v in x)
        mods = f.moduli(weights)
        if mods.max() <= EPS_MOMENT:
            return FeasibilityVerdict(True, weights=weights, residual=float(mods.max()), exact=exact)
    if not diagnostics:
        return FeasibilityVerdict(False, exact=exact)
    residual, _ = _minimax_residual(f)
    forced = forced_res = None
    if len(f.constraints) > 1:
        first = FeasibilityProblem(f.support_size, f.constraints[:1])
        forced = _unique_point(first)
        if forced is not None:
            rest = FeasibilityProblem(f.support_size, f.constraints[1:])
            forced_res = float(rest.moduli(forced).max())
    return FeasibilityVerdict(
        False, residual=residual, exact=exact, forced_point=forced, forced_residual=forced_res
    )


def compress_support(f: FeasibilityProblem) -> tuple[FeasibilityProblem, list[list[int]]]:
    """Merge support points whose coefficient columns coincide.

    Feasibility is unchanged: weights on merged points simply add up.
    Returns the reduced problem and, for each new point, the old indices.
    """
    groups: dict = {}
    order = []
    for k in range(f.support_size):
        col = tuple(row[k].key() for row in f.constraints)
        if col not in groups:
            groups[col] = []
            order.append(col)
        groups[col].append(k)
    members = [groups[c] for c in order]
    rows = tuple(tuple(row[g[0]] for g in members) for row in f.constraints)
    return FeasibilityProblem(len(members), rows, f.labels), members


def single_constraint_problem(phases: Sequence) -> FeasibilityProblem:
    ps = _as_phaseset(phases)
    return FeasibilityProblem(len(ps), (ps.phases,))
