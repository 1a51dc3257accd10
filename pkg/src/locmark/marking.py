"""Local marking: identify every member of a known r-subset via LOCC.

The r unknown unitaries sit in r boxes. Party k holds the k-th factor of each
box, so the task is LOCC discrimination of the r! regrouped products, one per
assignment of subset members to boxes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapacityError, DomainError, StructureError
from .geometry import difference_phases, hull_contains_origin, sum_phases
from .locc import Verdict, locc_search, replay
from .operators import LocalFactor, ProductUnitary, adjoint_compose
from .phases import Phase, PhaseSet
from .probes import DEFAULT_SEED, ProbeModel

MAX_SET = 6
MAX_R = 4


def permutation_ensemble(base: Sequence[ProductUnitary], subset: Sequence[int] | None = None) -> list[ProductUnitary]:
    """All assignments of ``subset`` members to boxes, in lexicographic order.

    Member labels join the box contents with dashes, e.g. ``"W1-W3-W2"``.
    """
    subset = list(range(len(base))) if subset is None else list(subset)
    if len(set(subset)) != len(subset):
        raise StructureError(f"duplicate indices in subset {subset}")
    for i in subset:
        if not 0 <= i < len(base):
            raise StructureError(f"subset index {i} out of range for {len(base)} unitaries")
    parties = base[0].parties
    for u in base:
        if u.structure() != base[0].structure():
            raise StructureError(f"{u.label!r} does not share the party structure of {base[0].label!r}")
    out = []
    for perm in itertools.permutations(subset):
        if len(perm) == 1:
            u = base[perm[0]]
            out.append(ProductUnitary(parties, u.factors, u.label, (u.label,)))
            continue
        factors = tuple(LocalFactor.tensor_of([base[i].factor(p) for i in perm]) for p in parties)
        labels = tuple(base[i].label for i in perm)
        out.append(ProductUnitary(parties, factors, "-".join(labels), labels))
    return out


@dataclass
class MarkingInstance:
    base_set: list
    r: int

    def __post_init__(self):
        m = len(self.base_set)
        if not 1 <= self.r <= m:
            raise DomainError(f"r must lie in 1..{m}, got {self.r}")
        if m > MAX_SET or self.r > MAX_R:
            raise CapacityError(f"marking limited to m <= {MAX_SET} and r <= {MAX_R} (got m={m}, r={self.r})")
        labels = [u.label for u in self.base_set]
        if len(set(labels)) != len(labels):
            raise StructureError("unitary labels must be unique")

    @property
    def subsets(self) -> list[tuple[int, ...]]:
        return list(itertools.combinations(range(len(self.base_set)), self.r))

    def ensemble(self, subset) -> list[ProductUnitary]:
        return permutation_ensemble(self.base_set, subset)

    def subset_labels(self, subset) -> tuple[str, ...]:
        return tuple(self.base_set[i].label for i in subset)


@dataclass
class MarkingVerdict:
    r: int
    markable: bool | None
    per_subset: dict = field(default_factory=dict)
    failing_subset: tuple | None = None
    probe_model: ProbeModel = ProbeModel.SINGLE

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "markable": self.markable,
            "probe_model": self.probe_model.value,
            "failing_subset": list(self.failing_subset) if self.failing_subset else None,
            "subsets": [{"subset": list(k), **v.to_json()} for k, v in self.per_subset.items()],
        }


def mark_check(base: Sequence[ProductUnitary], r: int, probe_model=ProbeModel.SINGLE, max_rounds: int = 1,
               user_probes: dict | None = None, seed: int = DEFAULT_SEED) -> MarkingVerdict:
    """Decide r-markability subset by subset.

    The subset is known, so ``r = 1`` needs no measurement. Every ``yes``
    tree is replayed before it is accepted.
    """
    model = ProbeModel.parse(probe_model)
    inst = MarkingInstance(list(base), r)
    per = {}
    for sub in inst.subsets:
        ens = inst.ensemble(sub)
        v = locc_search(ens, model, max_rounds=max_rounds, user_probes=user_probes, seed=seed)
        if v.outcome == "yes":
            replay(v.tree, ens)
        per[inst.subset_labels(sub)] = v
    outcomes = [v.outcome for v in per.values()]
    failing = next((k for k, v in per.items() if v.outcome != "yes"), None)
    if "no" in outcomes:
        markable = False
        failing = next(k for k, v in per.items() if v.outcome == "no")
    elif "unknown" in outcomes:
        markable = None
    else:
        markable = True
    return MarkingVerdict(r, markable, per, failing, model)


def locally_distinguishable(base: Sequence[ProductUnitary], probe_model=ProbeModel.SINGLE, max_rounds: int = 1,
                            user_probes: dict | None = None, seed: int = DEFAULT_SEED) -> Verdict:
    """LOCC discrimination of the base set itself (one unknown, no marking)."""
    return locc_search(list(base), probe_model, max_rounds=max_rounds, user_probes=user_probes, seed=seed)


# ---------------------------------------------------------------------------
# closed-form criteria


def _relative_phases(u: ProductUnitary, v: ProductUnitary, party: str) -> PhaseSet:
    return u.factor(party).adjoint().compose(v.factor(party)).eigenphases()


def theorem2_criteria(v1: ProductUnitary, v2: ProductUnitary) -> dict:
    """Bipartite pair: global distinguishability versus 2-markability.

    With ``theta`` and ``Theta`` the relative eigenphases at the two
    parties, the pair is markable iff the differences ``theta_i - theta_j``
    (or ``Theta_i - Theta_j``) have the origin in their hull, and globally
    distinguishable iff the sums ``theta_i + Theta_j`` do.
    """
    if len(v1.parties) != 2 or v1.structure() != v2.structure():
        raise StructureError("theorem2_criteria needs two bipartite unitaries of equal structure")
    a, b = v1.parties
    theta = _relative_phases(v1, v2, a)
    big = _relative_phases(v1, v2, b)
    hull_a = hull_contains_origin(difference_phases(theta))
    hull_b = hull_contains_origin(difference_phases(big))
    hull_sum = hull_contains_origin(sum_phases(theta, big))
    cond_i = hull_a.contains_origin or hull_b.contains_origin
    cond_ii = not hull_sum.contains_origin
    return {
        "distinguishable": hull_sum.contains_origin,
        "markable": cond_i,
        "condition_i": cond_i,
        "condition_ii": cond_ii,
        "markable_while_indistinguishable": cond_i and cond_ii,
        "marking_party": a if hull_a.contains_origin else (b if hull_b.contains_origin else None),
        "hulls": {a: hull_a.to_json(), b: hull_b.to_json(), "sum": hull_sum.to_json()},
    }


def _as_pi_multiple(x) -> Fraction | float:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and x == 0:
        return Fraction(0)
    if isinstance(x, Phase):
        return x.pi_frac if x.is_exact else x.radians / math.pi
    return float(x) / math.pi


def theorem4_family_check(betas: Sequence) -> dict:
    """Tripartite pair ``W'_1 = diag(1, e^{i b_k})``, ``W'_2 = diag(1, e^{-i b_{k+3}})``.

    Betas are radians, or ``Fraction`` multiples of pi for exact arithmetic.
    """
    if len(betas) != 6:
        raise DomainError(f"need six betas, got {len(betas)}")
    fr = [_as_pi_multiple(b) for b in betas]
    if any(f < 0 for f in fr):
        raise DomainError("betas must be non-negative")
    exact = all(isinstance(f, Fraction) for f in fr)

    def lt(x, y):
        return x < y if exact else x < y - 1e-12

    violated = []
    total = sum(fr)
    if not (total == 1 if exact else abs(total - 1) <= 1e-12):
        violated.append("sum of betas equals pi")
    for k in range(3):
        if not lt(fr[k] + fr[k + 3], Fraction(1, 2) if exact else 0.5):
            violated.append(f"beta{k + 1} + beta{k + 4} < pi/2")

    def ph(f, sign=1):
        return Phase.pi(sign * f) if exact else Phase.rad(sign * f * math.pi)

    parties = ("A", "B", "C")
    w1 = ProductUnitary(parties, tuple(LocalFactor.diag([Phase.pi(0), ph(fr[k])]) for k in range(3)), "W'1")
    w2 = ProductUnitary(parties, tuple(LocalFactor.diag([Phase.pi(0), ph(fr[k + 3], -1)]) for k in range(3)), "W'2")
    glob = hull_contains_origin(adjoint_compose(w1, w2).eigenphases())
    per_party = {}
    for p in parties:
        rel = _relative_phases(w1, w2, p)
        per_party[p] = hull_contains_origin(difference_phases(rel))
    return {
        "constraints_ok": not violated,
        "violated": violated,
        "distinguishable": glob.contains_origin,
        "markable_any_party": any(v.contains_origin for v in per_party.values()),
        "exact": exact,
        "global_hull": glob.to_json(),
        "party_hulls": {p: v.to_json() for p, v in per_party.items()},
        "unitaries": (w1, w2),
    }


# ---------------------------------------------------------------------------
# group structure and monotonicity


@dataclass
class GroupDecomposition:
    pivot: str
    residual: list

    def to_json(self) -> dict:
        return {"pivot": self.pivot, "residual": [u.label for u in self.residual]}


def group_decompose(ensemble: Sequence[ProductUnitary], pivot_position: int = 0) -> list[GroupDecomposition]:
    """Group a permutation ensemble by the unitary sitting in one box.

    Each residual is the permutation ensemble of the other labels over the
    remaining boxes.
    """
    if not ensemble or any(u.components is None for u in ensemble):
        raise StructureError("group_decompose needs members built by permutation_ensemble")
    comps = [u.components for u in ensemble]
    labels = sorted(comps[0])
    r = len(labels)
    if sorted(comps) != sorted(itertools.permutations(labels)) or len(set(comps)) != len(comps):
        raise StructureError("ensemble is not a complete permutation ensemble")
    if not 0 <= pivot_position < r:
        raise StructureError(f"pivot position {pivot_position} out of range")
    groups: dict[str, list] = {}
    for u in ensemble:
        pivot = u.components[pivot_position]
        rest = [i for i in range(r) if i != pivot_position]
        comp = tuple(u.components[i] for i in rest)
        if r == 1:
            residual = u
        else:
            factors = []
            for p in u.parties:
                boxes = u.factor(p).boxes
                factors.append(LocalFactor.tensor_of([boxes[i] for i in rest]))
            residual = ProductUnitary(u.parties, tuple(factors), "-".join(comp), comp)
        groups.setdefault(pivot, []).append(residual)
    order = [c[pivot_position] for c in comps]
    seen = list(dict.fromkeys(order))
    return [GroupDecomposition(p, groups[p]) for p in seen]


def monotonicity_check(verdicts: dict) -> list[dict]:
    """Violations of "r-markable implies s-markable for s < r".

    ``verdicts`` maps r to ``True``, ``False`` or ``None`` (unknown).
    """
    out = []
    for r, v in verdicts.items():
        if v is not True:
            continue
        for s, w in verdicts.items():
            if s < r and w is False:
                out.append({"r": r, "s": s, "detail": f"{r}-markable but not {s}-markable"})
    return out


# ---------------------------------------------------------------------------
# samplers


def random_diagonal_factor(rng: np.random.Generator, d: int, grid: int | None = None) -> LocalFactor:
    """Diagonal unitary with independent phases, uniform on [0, 2 pi) or on a
    grid of ``grid`` points (exact multiples of pi)."""
    if grid is None:
        return LocalFactor.diag([Phase.rad(x) for x in rng.uniform(0.0, 2 * math.pi, size=d)])
    return LocalFactor.diag([Phase.pi(2 * int(k), grid) for k in rng.integers(0, grid, size=d)])


def random_diagonal_unitary(rng, dims, label: str, grid: int | None = None, parties=("A", "B")) -> ProductUnitary:
    return ProductUnitary(tuple(parties), tuple(random_diagonal_factor(rng, d, grid) for d in dims), label)


def random_diagonal_pair(rng: np.random.Generator) -> tuple[ProductUnitary, ProductUnitary]:
    dims = tuple(int(x) for x in rng.choice([2, 3], size=2))
    return random_diagonal_unitary(rng, dims, "U1"), random_diagonal_unitary(rng, dims, "U2")


def random_ld_triple(rng: np.random.Generator, grid: int = 8, max_tries: int = 20000):
    """Rejection-sample three qubit-qubit diagonal unitaries that are LOCC
    distinguishable, with phases on a ``2 pi / grid`` lattice."""
    for _ in range(max_tries):
        triple = [random_diagonal_unitary(rng, (2, 2), f"U{i + 1}", grid) for i in range(3)]
        if len({tuple(f.key for f in u.factors) for u in triple}) < 3:
            continue
        if locally_distinguishable(triple).outcome == "yes":
            return triple
    raise DomainError("no locally distinguishable triple found")
