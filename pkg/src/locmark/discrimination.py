"""Distinguishability of product unitaries: pairs, common probes, partitions."""

from __future__ import annotations

import itertools
from functools import reduce
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CapacityError, StructureError
from .geometry import FeasibilityVerdict, HullVerdict, compress_support, find_weights, hull_contains_origin
from .locc import Verdict, is_product_vector, locc_search, replay
from .measurement import gram_moduli
from .operators import LocalFactor, ProductUnitary, StateVector, adjoint_compose, apply
from .probes import (
    DEFAULT_SEED,
    ProbeModel,
    bloch_grid_min,
    box_pool,
    diag_pair_problem,
    gradient_probe,
    lp_certificate,
    max_entangled_vector,
    qubit_single_system_certificate,
    set_partitions,
)

MAX_PARTIES = 4
ORTHOGONALITY_TOL = 1e-8

__all__ = [
    "ProbeModel",
    "DiscriminationInstance",
    "PartitionStrategy",
    "pairwise_distinguishable",
    "common_probe_set_distinguishable",
    "evolved_ensemble",
    "partition_strategy_search",
    "bloch_grid_min",
]


@dataclass
class DiscriminationInstance:
    candidates: list
    probe_model: ProbeModel = ProbeModel.SINGLE
    acting_parties: tuple[str, ...] | None = None

    def __post_init__(self):
        self.probe_model = ProbeModel.parse(self.probe_model)
        if not self.candidates:
            raise StructureError("no candidates")
        base = self.candidates[0].structure()
        for c in self.candidates[1:]:
            if c.structure() != base:
                raise StructureError(f"{c.label!r} has structure {c.structure()}, expected {base}")
        parties = self.candidates[0].parties
        if self.acting_parties is None:
            self.acting_parties = tuple(parties)
        unknown = set(self.acting_parties) - set(parties)
        if unknown:
            raise StructureError(f"unknown acting parties {sorted(unknown)}")

    def local_factors(self) -> list[LocalFactor]:
        """Each candidate's operator on the acting parties, as one factor."""
        return [LocalFactor.tensor_of([c.factor(p) for p in self.acting_parties]) for c in self.candidates]


def pairwise_distinguishable(u: ProductUnitary, v: ProductUnitary) -> HullVerdict:
    """Perfect discrimination of ``u`` and ``v`` with an arbitrary probe.

    Equivalent to the eigenphases of ``u^dagger v`` having the origin in
    their convex hull.
    """
    return hull_contains_origin(adjoint_compose(u, v).eigenphases())


def evolved_ensemble(candidates: Sequence, probe: StateVector) -> list[StateVector]:
    return [apply(c, probe) for c in candidates]


def _verdict(feasible, probe: np.ndarray | None = None, dims=(), kind: str = "LP", **cert) -> FeasibilityVerdict:
    if probe is not None:
        cert["probe"] = {"dims": list(dims), "amplitudes": StateVector.normalized(probe, dims).to_json()}
    return FeasibilityVerdict(feasible, kind=kind, certificate=cert or None)


def _orthogonal(vectors: Sequence[np.ndarray]) -> bool:
    g = gram_moduli(vectors)
    np.fill_diagonal(g, 0.0)
    return bool(g.max(initial=0.0) <= ORTHOGONALITY_TOL)


def _evolve_all(factors, probe, system_dim):
    p = probe.reshape(system_dim, -1)
    return [(f.to_matrix() @ p).reshape(-1) for f in factors]


def common_probe_set_distinguishable(inst: DiscriminationInstance, seed: int = DEFAULT_SEED,
                                     starts: int = 64) -> FeasibilityVerdict:
    """Is there one probe that sends every candidate to mutually orthogonal states?

    Infeasibility is only ever reported with a proof: an infeasible moment LP
    (diagonal factors) or the Bloch-vector argument (one qubit). Otherwise a
    failed numerical search gives ``feasible=None``.
    """
    model = inst.probe_model
    factors = inst.local_factors()
    d = factors[0].dim
    dims = tuple(f.dim for f in factors[0].boxes)
    anc_dims = dims + ((d,) if model is ProbeModel.ANCILLA else ())
    if len(factors) == 1:
        v = np.zeros(d, dtype=complex)
        v[0] = 1.0
        return _verdict(True, v, dims, kind="trivial")
    keys = [f.key for f in factors]
    if len(set(keys)) < len(keys):
        return _verdict(False, kind="identical", reason="two candidates apply the same operator")
    pairs = list(itertools.combinations(range(len(factors)), 2))
    labels = [c.label for c in inst.candidates]

    if all(f.is_diagonal for f in factors):
        prob = diag_pair_problem(factors, pairs)
        prob = type(prob)(prob.support_size, prob.constraints, tuple(f"{labels[a]}/{labels[b]}" for a, b in pairs))
        small, members = compress_support(prob)
        w = find_weights(small)
        if w is None:
            cert = lp_certificate(prob)
            return FeasibilityVerdict(False, exact=prob.exact_rational, kind="LP", certificate=cert)
        amp = np.zeros(d, dtype=complex)
        for weight, grp in zip(w, members):
            amp[grp[0]] = np.sqrt(max(float(weight), 0.0))
        amp /= np.linalg.norm(amp)
        if model is not ProbeModel.PRODUCT or is_product_vector(amp, dims):
            if model is ProbeModel.ANCILLA:
                amp = np.kron(amp, np.eye(d)[0])
            return _verdict(True, amp, anc_dims, kind="LP", weights=[float(x) for x in w])
        found = _product_search(factors, dims)
        if found is not None:
            return _verdict(True, found, dims, kind="product-pool")
        return _verdict(None, kind="product-pool", reason="joint probe exists but no product probe found")

    if d == 2:
        rels = [factors[a].adjoint().compose(factors[b]).to_matrix() for a, b in pairs]
        names = [f"{labels[a]}/{labels[b]}" for a, b in pairs]
        if model is ProbeModel.ANCILLA:
            traces = [abs(np.trace(r)) / 2 for r in rels]
            if max(traces) > 1e-10:
                return _verdict(False, kind="analytic-bloch",
                                reason="a relative operator has nonzero trace; no reduced state zeroes it")
            return _verdict(True, max_entangled_vector(2), (2, 2), kind="max-entangled")
        cert = qubit_single_system_certificate(rels, names)
        cert["grid"] = bloch_grid_min(rels)
        probe = np.array(cert.pop("probe")) if cert.get("feasible") else None
        feasible = cert.pop("feasible")
        cert.pop("kind")
        return _verdict(feasible, probe, dims, kind="analytic-bloch", **cert)

    mats = [f.to_matrix() for f in factors]
    if model is ProbeModel.ANCILLA:
        phi = max_entangled_vector(d)
        if _orthogonal(_evolve_all(factors, phi, d)):
            return _verdict(True, phi, anc_dims, kind="max-entangled")
    if model is ProbeModel.PRODUCT:
        found = _product_search(factors, dims)
        if found is not None:
            return _verdict(True, found, dims, kind="product-pool")
        return _verdict(None, kind="product-pool", reason="no product probe found; no proof of impossibility")
    rels = [mats[a].conj().T @ mats[b] for a, b in pairs]
    dim = d
    if model is ProbeModel.ANCILLA:
        rels = [np.kron(r, np.eye(d)) for r in rels]
        dim = d * d
    v, best = gradient_probe(rels, dim, starts=starts, seed=seed)
    if v is not None and _orthogonal(_evolve_all(factors, v, d)):
        return _verdict(True, v, anc_dims, kind="gradient", objective=best)
    return _verdict(None, kind="gradient", objective=best, reason="gradient search did not reach the tolerance")


def _product_search(factors, dims):
    per_box = []
    for b in range(len(dims)):
        per_box.append(box_pool(_distinct([f.boxes[b] for f in factors])))
    sizes = [len(p) for p in per_box]
    k = max(sizes)
    while k > 1 and np.prod([min(s, k) for s in sizes]) > 4096:
        k -= 1
    for combo in itertools.product(*[p[:k] for p in per_box]):
        v = reduce(np.kron, combo)
        if _orthogonal(_evolve_all(factors, v, int(np.prod(dims)))):
            return v
    return None


def _distinct(factors):
    out = []
    for f in factors:
        if all(f.key != g.key for g in out):
            out.append(f)
    return out


# ---------------------------------------------------------------------------
# partition strategies


@dataclass
class PartitionStrategy:
    blocks: tuple[tuple[str, ...], ...]
    verdict: Verdict
    tried: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"blocks": [list(b) for b in self.blocks], "verdict": self.verdict.to_json(), "tried": self.tried}


def _collapse(f: LocalFactor) -> LocalFactor:
    if len(f.boxes) == 1:
        return f
    if f.is_diagonal:
        return LocalFactor.diag(f.diag_phases())
    return LocalFactor.dense(f.to_matrix())


def partition_strategy_search(candidates: Sequence[ProductUnitary], probe_model=ProbeModel.SINGLE,
                              seed: int = DEFAULT_SEED) -> PartitionStrategy:
    """Try every grouping of the parties into blocks acting one after another.

    Blocks with more parts are tried first; which block moves next adapts to
    earlier outcomes. Failure without a proof is reported as ``unknown``
    because only cluster-projective measurements are searched.
    """
    model = ProbeModel.parse(probe_model)
    parties = sorted(candidates[0].parties)
    if len(parties) > MAX_PARTIES:
        raise CapacityError(f"{len(parties)} parties exceed the limit of {MAX_PARTIES}")
    tried = []
    for blocks in set_partitions(parties):
        blocks = tuple(tuple(b) for b in blocks)
        merged = _merge_blocks(candidates, blocks, model)
        inner = ProbeModel.PRODUCT if model is not ProbeModel.ANCILLA else model
        v = locc_search(merged, inner, seed=seed, certify=False)
        tried.append({"blocks": [list(b) for b in blocks], "outcome": v.outcome})
        if v.outcome == "yes":
            replay(v.tree, merged)
            return PartitionStrategy(blocks, v, tried)
    reason = "no grouping of parties succeeded (within measurement family)"
    return PartitionStrategy((), Verdict("unknown", reason=reason), tried)


def _merge_blocks(candidates, blocks, model):
    names = tuple("+".join(b) for b in blocks)
    out = []
    for c in candidates:
        fs = []
        for b in blocks:
            if model is ProbeModel.SINGLE:
                # one box per member party; each box may be any state of that party
                fs.append(LocalFactor("tensor", parts=tuple(_collapse(c.factor(p)) for p in b))
                          if len(b) > 1 else _collapse(c.factor(b[0])))
            elif model is ProbeModel.ANCILLA:
                fs.append(_collapse(LocalFactor.tensor_of([c.factor(p) for p in b])))
            else:
                fs.append(LocalFactor.tensor_of([c.factor(p) for p in b]))
        out.append(ProductUnitary(names, tuple(fs), c.label))
    return out
