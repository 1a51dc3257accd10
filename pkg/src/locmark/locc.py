"""Adaptive one-way LOCC search over parties holding product unitaries.

Each party feeds a probe through its boxes, measures with projectors onto the
spans of mutually orthogonal clusters of the evolved probes, and broadcasts
the outcome. Later parties adapt to everything announced so far. A strategy
is a tree; a branch closes when one candidate is left.

Search is depth-first with memoization on ``(candidate set, party usage)``.
Parties are tried in sorted label order and by default each party acts once
with all of its boxes. With ``max_rounds > 1`` a party may come back, each
visit spending some of its still unused boxes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import CapacityError, CertificateError, StructureError
from .geometry import hull_contains_origin
from . import measurement as _measurement
from .measurement import Measurement, cluster_measurement, components
from .operators import LocalFactor, ProductUnitary, StateVector
from .probes import (
    DEFAULT_SEED,
    Probe,
    ProbeModel,
    box_pool,
    diag_pair_problem,
    gradient_probe,
    lp_certificate,
    lp_probe,
    max_entangled_vector,
    qubit_single_system_certificate,
    target_partitions,
)

MAX_MEMBERS = 24
PRODUCT_CAP = 4096
GRADIENT_MAX_DIM = 16
EVALUATION_BUDGET = 400_000


@dataclass(eq=False)
class LoccNode:
    party: str
    boxes: tuple[int, ...]
    candidates: tuple[str, ...]
    probe: Probe
    probe_state: StateVector
    measurement: Measurement
    # one entry per outcome: (surviving labels, child); child is a node, a leaf
    # label, or None for an outcome no candidate can produce
    outcomes: list = field(default_factory=list)
    hull: dict | None = None

    def to_json(self) -> dict:
        out = {
            "party": self.party,
            "boxes": list(self.boxes),
            "candidates": list(self.candidates),
            "probe": {"origin": self.probe.origin, "dims": list(self.probe_state.dims),
                      "amplitudes": self.probe_state.to_json()},
            "measurement": {"outcomes": len(self.measurement.elements),
                            "completeness_error": self.measurement.completeness_error()},
            "outcomes": [],
        }
        for members, child in self.outcomes:
            if isinstance(child, LoccNode):
                c = child.to_json()
            elif child is None:
                c = None
            else:
                c = {"leaf": child}
            out["outcomes"].append({"members": list(members), "child": c})
        if self.hull is not None:
            out["hull"] = self.hull
        return out

    def depth(self) -> int:
        sub = [c.depth() for _, c in self.outcomes if isinstance(c, LoccNode)]
        return 1 + max(sub, default=0)


@dataclass(eq=False)
class StrategyTree:
    root: LoccNode | None
    labels: tuple[str, ...]
    probe_model: ProbeModel
    max_rounds: int = 1
    # set when the ensemble has a single member: nothing to do
    trivial_leaf: str | None = None

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "probe_model": self.probe_model.value,
            "max_rounds": self.max_rounds,
            "root": self.root.to_json() if self.root else {"leaf": self.trivial_leaf},
        }


@dataclass
class Verdict:
    outcome: str  # "yes" | "no" | "unknown"
    tree: StrategyTree | None = None
    certificate: dict | None = None
    reason: str = ""
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"outcome": self.outcome, "reason": self.reason, "stats": dict(self.stats)}
        if self.tree is not None:
            out["tree"] = self.tree.to_json()
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


# ---------------------------------------------------------------------------
# helpers on factors


def box_factors(u: ProductUnitary, party: str) -> tuple[LocalFactor, ...]:
    return u.factor(party).boxes


def joint_factor(u: ProductUnitary, party: str, boxes: Sequence[int]) -> LocalFactor:
    parts = box_factors(u, party)
    return LocalFactor.tensor_of([parts[b] for b in boxes])


def bob_final_check(a: LocalFactor, b: LocalFactor, probe_model=ProbeModel.SINGLE) -> dict:
    """Can one party tell ``a`` from ``b`` with one probe?

    With a free joint probe (single system or ancilla) the answer is the
    eigenphase hull test on ``a^dagger b``. A product probe over boxes gives
    an overlap that is the product of per-box overlaps, so some single box
    must pass the hull test.
    """
    model = ProbeModel.parse(probe_model)
    rel = a.adjoint().compose(b)
    if model is ProbeModel.PRODUCT and len(rel.boxes) > 1:
        per_box = [hull_contains_origin(p.eigenphases()) for p in rel.boxes]
        ok = any(v.contains_origin for v in per_box)
        return {"kind": "hull-per-box", "contains_origin": ok,
                "boxes": [v.to_json() for v in per_box]}
    v = hull_contains_origin(rel.eigenphases())
    return {"kind": "hull", "contains_origin": v.contains_origin, **v.to_json()}


def is_product_vector(v, dims: Sequence[int], tol: float = 1e-9) -> bool:
    """True when ``v`` has Schmidt rank one across every box cut."""
    v = np.asarray(v, dtype=complex)
    if v.size != int(np.prod(dims)):
        return False
    for k in range(1, len(dims)):
        m = v.reshape(int(np.prod(dims[:k])), -1)
        s = np.linalg.svd(m, compute_uv=False)
        if s.size > 1 and s[1] > tol * s[0]:
            return False
    return True


def _unit(v):
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# probe pools


class _PartyView:
    """The distinct local operators that a set of candidates applies."""

    def __init__(self, members: Sequence[ProductUnitary], cands, party, boxes):
        self.party = party
        self.boxes = tuple(boxes)
        first = box_factors(members[cands[0]], party)
        self.box_dims = tuple(first[b].dim for b in self.boxes)
        self.dim = int(np.prod(self.box_dims))
        per_box = []
        for b in self.boxes:
            reps, idx = [], []
            seen = {}
            for c in cands:
                f = box_factors(members[c], party)[b]
                k = f.key
                if k not in seen:
                    seen[k] = len(reps)
                    reps.append(f)
                idx.append(seen[k])
            per_box.append((reps, np.array(idx)))
        self.per_box = per_box
        jseen = {}
        self.joint_reps: list[LocalFactor] = []
        jidx = []
        for pos in range(len(cands)):
            k = tuple(int(idx[pos]) for _, idx in per_box)
            if k not in jseen:
                jseen[k] = len(self.joint_reps)
                self.joint_reps.append(LocalFactor.tensor_of([per_box[i][0][j] for i, j in enumerate(k)]))
            jidx.append(jseen[k])
        self.joint_idx = np.array(jidx)
        self._joint_mats = None

    @property
    def distinct(self) -> int:
        return len(self.joint_reps)

    @property
    def all_diagonal(self) -> bool:
        return all(f.is_diagonal for f in self.joint_reps)

    def joint_mats(self):
        if self._joint_mats is None:
            self._joint_mats = [f.to_matrix() for f in self.joint_reps]
        return self._joint_mats

    def gram(self, probe: Probe) -> np.ndarray:
        if probe.boxes is not None:
            g = np.ones((len(self.joint_idx),) * 2)
            for vec, (reps, idx) in zip(probe.boxes, self.per_box):
                ev = np.array([f.apply_vec(vec) for f in reps])
                o = np.abs(ev.conj() @ ev.T)
                g = g * o[np.ix_(idx, idx)]
            return g
        ev = self.evolve_distinct(probe)
        o = np.abs(ev.conj() @ ev.T)
        return o[np.ix_(self.joint_idx, self.joint_idx)]

    def evolve_distinct(self, probe: Probe) -> np.ndarray:
        p = probe.vector().reshape(self.dim, -1)
        return np.array([(m @ p).reshape(-1) for m in self.joint_mats()])

    def evolved(self, probe: Probe) -> list[np.ndarray]:
        ev = self.evolve_distinct(probe)
        return [ev[i] for i in self.joint_idx]


def _probe_groups(view: _PartyView, model: ProbeModel, user: Sequence[StateVector], full_boxes: bool, seed: int,
                  gradient_starts: int):
    """Yield lists of probes, most promising first."""
    d = view.dim
    if user and full_boxes:
        grp = []
        for s in user:
            if model is ProbeModel.PRODUCT and not is_product_vector(s.amplitudes, view.box_dims):
                continue
            if s.dim == d:
                grp.append(Probe("user", joint=_unit(s.amplitudes)))
            elif s.dim == d * d and model is ProbeModel.ANCILLA:
                grp.append(Probe("user", joint=_unit(s.amplitudes), ancilla_dim=d))
        if grp:
            yield grp
    if model is not ProbeModel.PRODUCT and view.all_diagonal and len(view.boxes) > 1:
        grp = []
        for part in target_partitions(view.distinct):
            v = lp_probe(view.joint_reps, part)
            if v is not None:
                grp.append(Probe("lp-joint", joint=v))
        if grp:
            yield grp
    pools = [box_pool(reps) for reps, _ in view.per_box]
    grp = []
    width = min(len(p) for p in pools)
    for i in range(width):
        grp.append(Probe("product", boxes=tuple(p[i] for p in pools)))
    yield grp
    if len(pools) > 1:
        sizes = [len(p) for p in pools]
        k = max(sizes)
        while k > 1 and math.prod(min(s, k) for s in sizes) > PRODUCT_CAP:
            k -= 1
        trimmed = [p[:k] for p in pools]
        yield [Probe("product", boxes=combo) for combo in itertools.product(*trimmed)]
    if model is ProbeModel.ANCILLA:
        yield [Probe("max-entangled", joint=max_entangled_vector(d), ancilla_dim=d)]
    if model is not ProbeModel.PRODUCT and not view.all_diagonal and d <= GRADIENT_MAX_DIM and view.distinct > 1:
        mats = view.joint_mats()
        rels = [a.conj().T @ b for a, b in itertools.combinations(mats, 2)]
        if model is ProbeModel.ANCILLA:
            rels = [np.kron(r, np.eye(d)) for r in rels]
            dim = d * d
        else:
            dim = d
        v, _ = gradient_probe(rels, dim, starts=gradient_starts, seed=seed)
        if v is not None:
            yield [Probe("gradient", joint=v, ancilla_dim=d if model is ProbeModel.ANCILLA else 1)]


def probe_pool(factors: Sequence[LocalFactor], probe_model=ProbeModel.SINGLE, user=(), seed: int = DEFAULT_SEED,
               gradient_starts: int = 4) -> list[Probe]:
    """Every probe the search would try to tell ``factors`` (one party) apart."""
    parties = ("P",)
    members = [ProductUnitary(parties, (f,), str(i)) for i, f in enumerate(factors)]
    nb = len(factors[0].boxes)
    view = _PartyView(members, list(range(len(members))), "P", range(nb))
    return [p for g in _probe_groups(view, ProbeModel.parse(probe_model), list(user), True, seed, gradient_starts)
            for p in g]


# ---------------------------------------------------------------------------
# search


class _Search:
    def __init__(self, members, model, max_rounds, user_probes, seed, gradient_starts, budget):
        self.members = list(members)
        self.model = model
        self.max_rounds = max_rounds
        self.user = {k: list(v) for k, v in (user_probes or {}).items()}
        self.seed = seed
        self.gradient_starts = gradient_starts
        self.budget = budget
        self.evaluations = 0
        self.nodes = 0
        self.parties = sorted(members[0].parties)
        self.nboxes = {p: len(box_factors(members[0], p)) for p in self.parties}
        self.memo = {}

    def initial_state(self):
        return tuple((p, frozenset(range(self.nboxes[p])), 0) for p in self.parties)

    def _box_choices(self, avail):
        avail = sorted(avail)
        if self.max_rounds <= 1:
            return [tuple(avail)]
        out = []
        for k in range(len(avail), 0, -1):
            out.extend(itertools.combinations(avail, k))
        return out

    def solve(self, cands: tuple[int, ...], state):
        if len(cands) == 1:
            return self.members[cands[0]].label
        key = (frozenset(cands), state)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = None  # guards against revisiting while in progress
        result = None
        for pi, (party, avail, visits) in enumerate(state):
            if not avail or visits >= self.max_rounds:
                continue
            for boxes in self._box_choices(avail):
                view = _PartyView(self.members, cands, party, boxes)
                if view.distinct < 2:
                    continue
                left = frozenset(avail) - set(boxes)
                new_state = state[:pi] + ((party, left, visits + 1),) + state[pi + 1:]
                result = self._try_party(cands, view, new_state, len(boxes) == self.nboxes[party])
                if result is not None:
                    break
            if result is not None:
                break
        self.memo[key] = result
        return result

    def _try_party(self, cands, view, new_state, full_boxes):
        tried = set()
        for grp in _probe_groups(view, self.model, self.user.get(view.party, ()), full_boxes, self.seed,
                                 self.gradient_starts):
            parts = []
            for probe in grp:
                self.evaluations += 1
                if self.evaluations > self.budget:
                    raise CapacityError(f"search exceeded {self.budget} probe evaluations")
                comps = components(view.gram(probe), _measurement.EPS_OVERLAP)
                if len(comps) < 2:
                    continue
                pkey = frozenset(comps)
                if pkey in tried:
                    continue
                tried.add(pkey)
                parts.append((comps, probe))
            parts.sort(key=lambda item: -len(item[0]))
            for comps, probe in parts:
                children = []
                for comp in sorted(comps, key=len):
                    sub = tuple(cands[i] for i in comp)
                    child = self.solve(sub, new_state)
                    if child is None:
                        break
                    children.append((comp, child))
                else:
                    return self._node(cands, view, probe, comps, dict(children))
        return None

    def _node(self, cands, view, probe, comps, child_of):
        self.nodes += 1
        vecs = view.evolved(probe)
        meas = cluster_measurement(vecs)
        labels = [self.members[c].label for c in cands]
        outcomes = []
        for cls in meas.classes:
            if not cls:
                outcomes.append(((), None))
                continue
            comp = next(c for c in comps if c[0] == cls[0])
            outcomes.append((tuple(labels[i] for i in comp), child_of[comp]))
        hull = None
        if len(cands) == 2:
            a, b = (f for f in (view.joint_reps[view.joint_idx[0]], view.joint_reps[view.joint_idx[1]]))
            hull = bob_final_check(a, b, self.model)
        dims = view.box_dims + ((probe.ancilla_dim,) if probe.ancilla_dim > 1 else ())
        state = StateVector.normalized(probe.vector(), dims)
        return LoccNode(view.party, view.boxes, tuple(labels), probe, state, meas, outcomes, hull)


def _check_members(members: Sequence[ProductUnitary]):
    if not members:
        raise StructureError("empty ensemble")
    if len(members) > MAX_MEMBERS:
        raise CapacityError(f"{len(members)} candidates exceed the search limit of {MAX_MEMBERS}")
    base = members[0]
    for m in members[1:]:
        if sorted(m.parties) != sorted(base.parties):
            raise StructureError(f"{m.label!r} has parties {m.parties}, expected {base.parties}")
        for p in base.parties:
            a, b = box_factors(base, p), box_factors(m, p)
            if tuple(f.dim for f in a) != tuple(f.dim for f in b):
                raise StructureError(f"box dimensions of party {p!r} differ between {base.label!r} and {m.label!r}")
    labels = [m.label for m in members]
    if len(set(labels)) != len(labels):
        raise StructureError("ensemble labels must be unique")


def locc_search(
    members: Sequence[ProductUnitary],
    probe_model=ProbeModel.SINGLE,
    max_rounds: int = 1,
    user_probes: dict | None = None,
    seed: int = DEFAULT_SEED,
    gradient_starts: int = 4,
    budget: int = EVALUATION_BUDGET,
    certify: bool = True,
) -> Verdict:
    """Look for a perfect LOCC strategy identifying which member is present.

    Returns ``yes`` with a strategy tree, ``no`` with a certificate when one
    of the impossibility arguments applies, ``unknown`` otherwise.
    """
    model = ProbeModel.parse(probe_model)
    _check_members(members)
    if len(members) == 1:
        tree = StrategyTree(None, (members[0].label,), model, max_rounds, trivial_leaf=members[0].label)
        return Verdict("yes", tree, reason="single candidate")
    if certify:
        # cheap and sound: a pair no party can separate rules out any strategy
        cert = pair_certificate(members, model)
        if cert is not None:
            return Verdict("no", certificate=cert, reason=cert["reason"])
    search = _Search(members, model, max_rounds, user_probes, seed, gradient_starts, budget)
    try:
        root = search.solve(tuple(range(len(members))), search.initial_state())
    except CapacityError as exc:
        return Verdict("unknown", reason=str(exc), stats={"evaluations": search.evaluations})
    stats = {"evaluations": search.evaluations, "nodes": search.nodes}
    labels = tuple(m.label for m in members)
    if root is not None:
        return Verdict("yes", StrategyTree(root, labels, model, max_rounds), reason="strategy found", stats=stats)
    if certify:
        cert = impossibility_certificate(members, model, max_rounds)
        if cert is not None:
            return Verdict("no", certificate=cert, reason=cert["reason"], stats=stats)
    return Verdict("unknown", reason="search exhausted within the probe pool and measurement family", stats=stats)


# ---------------------------------------------------------------------------
# impossibility


def pair_certificate(members: Sequence[ProductUnitary], probe_model=ProbeModel.SINGLE) -> dict | None:
    """A pair no party can separate with one probe.

    Every strategy ends in product states across parties; their overlap is
    the product of the per-party overlaps, so a pair is only separable if
    some party makes its own overlap vanish.
    """
    model = ProbeModel.parse(probe_model)
    parties = sorted(members[0].parties)
    for a, b in itertools.combinations(members, 2):
        checks = {}
        for p in parties:
            c = bob_final_check(a.factor(p), b.factor(p), model)
            if c["contains_origin"]:
                break
            checks[p] = c
        else:
            return {"kind": "per-party-hull", "pair": [a.label, b.label], "parties": checks,
                    "reason": f"no party can make {a.label} and {b.label} orthogonal"}
    return None


def single_party_certificate(factors: Sequence[LocalFactor], probe_model=ProbeModel.SINGLE,
                             labels=None) -> dict | None:
    """One party, one measurement: every pair needs a common zero-overlap probe."""
    model = ProbeModel.parse(probe_model)
    labels = list(labels or range(len(factors)))
    distinct, names = [], []
    for f, lab in zip(factors, labels):
        if all(f.key != g.key for g in distinct):
            distinct.append(f)
            names.append(str(lab))
    if len(distinct) < len(factors):
        return {"kind": "identical", "reason": "two candidates apply the same operator"}
    pairs = list(itertools.combinations(range(len(distinct)), 2))
    if all(f.is_diagonal for f in distinct):
        prob = diag_pair_problem(distinct, pairs)
        prob = type(prob)(prob.support_size, prob.constraints, tuple(f"{names[a]}/{names[b]}" for a, b in pairs))
        cert = lp_certificate(prob)
        if cert["verdict"]["feasible"] is False:
            cert["reason"] = "no common probe makes every pair orthogonal (moment LP infeasible)"
            return cert
        return None
    if distinct[0].dim == 2:
        rels = [distinct[a].adjoint().compose(distinct[b]).to_matrix() for a, b in pairs]
        if model is ProbeModel.ANCILLA:
            bad = [i for i, r in enumerate(rels) if abs(np.trace(r)) > 1e-10]
            if bad:
                a, b = pairs[bad[0]]
                return {"kind": "analytic-bloch", "reason": f"{names[a]}^dagger {names[b]} is not traceless"}
            return None
        cert = qubit_single_system_certificate(rels, [f"{names[a]}/{names[b]}" for a, b in pairs])
        if cert["feasible"] is False:
            return cert
    return None


def impossibility_certificate(members, probe_model=ProbeModel.SINGLE, max_rounds: int = 1) -> dict | None:
    model = ProbeModel.parse(probe_model)
    cert = pair_certificate(members, model)
    if cert is not None:
        return cert
    active = [p for p in sorted(members[0].parties) if len({m.factor(p).key for m in members}) > 1]
    if len(active) == 1:
        p = active[0]
        nb = len(box_factors(members[0], p))
        if max_rounds <= 1 or nb == 1:
            c = single_party_certificate([m.factor(p) for m in members], model, [m.label for m in members])
            if c is not None:
                c["party"] = p
                c.setdefault("reason", "single active party cannot separate all candidates")
                return c
    return None


# ---------------------------------------------------------------------------
# replay


def _evolve_member(node: LoccNode, member: ProductUnitary) -> np.ndarray:
    op = joint_factor(member, node.party, node.boxes).to_matrix()
    p = node.probe_state.amplitudes.reshape(op.shape[0], -1)
    return (op @ p).reshape(-1)


def replay(tree: StrategyTree, members: Sequence[ProductUnitary], tol: float = 1e-9) -> dict:
    """Run the strategy against each member independently of the search.

    Checks that every measurement is a valid projective measurement and that
    each member reaches its own leaf with probability one. Returns the path
    taken by each member. Raises :class:`CertificateError` otherwise.
    """
    paths = {}
    for m in members:
        if tree.root is None:
            if tree.trivial_leaf != m.label:
                raise CertificateError(f"trivial tree does not end in {m.label!r}")
            paths[m.label] = []
            continue
        node, path = tree.root, []
        while True:
            meas = node.measurement
            if meas.completeness_error() > tol or meas.min_eigenvalue() < -tol:
                raise CertificateError(f"invalid measurement at party {node.party}")
            probs = meas.probabilities(_evolve_member(node, m))
            hit = [i for i, pr in enumerate(probs) if pr > tol]
            if len(hit) != 1 or abs(probs[hit[0]] - 1.0) > 1e-8:
                raise CertificateError(f"{m.label!r} spreads over outcomes {hit} at party {node.party}")
            path.append((node.party, hit[0]))
            child = node.outcomes[hit[0]][1]
            if isinstance(child, LoccNode):
                node = child
                continue
            if child != m.label:
                raise CertificateError(f"{m.label!r} ends at leaf {child!r}")
            break
        paths[m.label] = path
    return paths


def tensor_probe(vectors: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, vectors)
