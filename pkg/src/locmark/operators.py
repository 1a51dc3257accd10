"""Local factors, product unitaries and pure states.

Factors stay in factored form for as long as possible: diagonal factors keep
their eigenphases (exact when given as rational multiples of pi), tensor
factors keep their parts. Only dense factors and mixed compositions fall back
to explicit matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Sequence

import numpy as np

from .errors import DimensionError, StructureError
from .linalg import EPS_UNITARY, as_matrix, eigphases_dense, validate_unitary
from .phases import Phase, PhaseSet

EPS_NORM = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LocalFactor:
    """One party's (or one box's) unitary.

    ``kind`` is ``"diag"`` (``phases`` set), ``"dense"`` (``matrix`` set) or
    ``"tensor"`` (``parts`` set). ``name`` is a display tag such as ``"X"``.
    """

    kind: str
    phases: tuple[Phase, ...] | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)
    parts: tuple["LocalFactor", ...] | None = None
    name: str | None = None
    exact_eigenphases: tuple[Phase, ...] | None = field(default=None, repr=False)

    # constructors -------------------------------------------------------
    @classmethod
    def diag(cls, phases: Sequence, name: str | None = None) -> "LocalFactor":
        ph = tuple(Phase.coerce(p) for p in phases)
        if not ph:
            raise DimensionError("diagonal factor needs at least one phase")
        return cls("diag", phases=ph, name=name)

    @classmethod
    def dense(cls, m, name: str | None = None, tol: float = EPS_UNITARY) -> "LocalFactor":
        a = as_matrix(m)
        if not validate_unitary(a, tol):
            raise DimensionError("dense factor is not unitary within tolerance")
        return cls("dense", matrix=_frozen(a), name=name)

    @classmethod
    def tensor_of(cls, parts: Sequence["LocalFactor"]) -> "LocalFactor":
        flat: list[LocalFactor] = []
        for p in parts:
            flat.extend(p.parts if p.kind == "tensor" else (p,))
        if not flat:
            raise DimensionError("tensor of zero factors")
        if len(flat) == 1:
            return flat[0]
        return cls("tensor", parts=tuple(flat))

    # structure ----------------------------------------------------------
    @cached_property
    def dim(self) -> int:
        if self.kind == "diag":
            return len(self.phases)
        if self.kind == "dense":
            return self.matrix.shape[0]
        return int(np.prod([p.dim for p in self.parts]))

    @property
    def boxes(self) -> tuple["LocalFactor", ...]:
        return self.parts if self.kind == "tensor" else (self,)

    @cached_property
    def is_diagonal(self) -> bool:
        if self.kind == "diag":
            return True
        if self.kind == "tensor":
            return all(p.is_diagonal for p in self.parts)
        return False

    def diag_phases(self) -> tuple[Phase, ...]:
        """Diagonal entries' phases, in computational-basis order."""
        if self.kind == "diag":
            return self.phases
        if self.kind == "tensor" and self.is_diagonal:
            return reduce(
                lambda acc, part: tuple(a + b for a in acc for b in part.diag_phases()),
                self.parts[1:],
                self.parts[0].diag_phases(),
            )
        raise StructureError("factor is not diagonal")

    @cached_property
    def _dense(self) -> np.ndarray:
        if self.kind == "diag":
            return _frozen(np.diag(self._units))
        if self.kind == "dense":
            return self.matrix
        return _frozen(reduce(np.kron, [p.to_matrix() for p in self.parts]))

    def to_matrix(self) -> np.ndarray:
        return self._dense

    @cached_property
    def key(self):
        """Hashable identity used to group equal factors."""
        if self.kind == "diag":
            return ("diag", tuple(p.key() for p in self.phases))
        if self.kind == "dense":
            m = np.round(self.matrix, 10) + 0.0
            return ("dense", m.shape, m.tobytes())
        return ("tensor", tuple(p.key for p in self.parts))

    # algebra -------------------------------------------------------------
    def adjoint(self) -> "LocalFactor":
        if self.kind == "diag":
            return LocalFactor.diag([-p for p in self.phases])
        if self.kind == "tensor":
            return LocalFactor("tensor", parts=tuple(p.adjoint() for p in self.parts))
        adj = LocalFactor("dense", matrix=_frozen(self.matrix.conj().T))
        if self.exact_eigenphases is not None:
            object.__setattr__(adj, "exact_eigenphases", tuple(-p for p in self.exact_eigenphases))
        if self.name in ("X",):
            object.__setattr__(adj, "name", self.name)
        return adj

    def compose(self, other: "LocalFactor") -> "LocalFactor":
        """Matrix product ``self @ other``."""
        if self.dim != other.dim:
            raise DimensionError(f"cannot compose dims {self.dim} and {other.dim}")
        if self.kind == "diag" and other.kind == "diag":
            return LocalFactor.diag([a + b for a, b in zip(self.phases, other.phases)])
        if (
            self.kind == "tensor"
            and other.kind == "tensor"
            and [p.dim for p in self.parts] == [p.dim for p in other.parts]
        ):
            return LocalFactor("tensor", parts=tuple(a.compose(b) for a, b in zip(self.parts, other.parts)))
        if self.is_identity():
            return other
        if other.is_identity():
            return self
        return LocalFactor("dense", matrix=_frozen(self.to_matrix() @ other.to_matrix()))

    def is_identity(self) -> bool:
        if self.kind == "diag":
            return all(p.is_exact and p.pi_frac == 0 for p in self.phases)
        if self.kind == "tensor":
            return all(p.is_identity() for p in self.parts)
        return False

    def eigenphases(self) -> PhaseSet:
        if self.kind == "diag":
            return PhaseSet(self.phases, source=self.label())
        if self.kind == "tensor":
            sets = [p.eigenphases().phases for p in self.parts]
            out = reduce(lambda acc, s: tuple(a + b for a in acc for b in s), sets[1:], sets[0])
            return PhaseSet(out, source=self.label())
        if self.exact_eigenphases is not None:
            return PhaseSet(self.exact_eigenphases, source=self.label())
        return PhaseSet(tuple(Phase.rad(x) for x in eigphases_dense(self.matrix)), source=self.label())

    def apply_vec(self, v: np.ndarray) -> np.ndarray:
        if self.kind == "diag":
            return self._units * v
        return self.to_matrix() @ v

    @cached_property
    def _units(self) -> np.ndarray:
        return np.array([p.unit() for p in self.phases])

    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "tensor":
            return "(" + "⊗".join(p.label() for p in self.parts) + ")"
        if self.kind == "diag":
            return "diag(" + ",".join(_phase_label(p) for p in self.phases) + ")"
        return f"dense{self.dim}"

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalFactor) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


def _phase_label(p: Phase) -> str:
    if p.is_exact:
        if p.pi_frac == 0:
            return "0"
        return f"{p.pi_frac}π"
    return f"{p.radians:.6g}"


# named gates ------------------------------------------------------------
def identity(d: int = 2) -> LocalFactor:
    return LocalFactor.diag([Phase.pi(0)] * d, name="I")


def pauli_z() -> LocalFactor:
    return LocalFactor.diag([Phase.pi(0), Phase.pi(1)], name="Z")


def pauli_x() -> LocalFactor:
    f = LocalFactor("dense", matrix=_frozen([[0, 1], [1, 0]]), name="X")
    object.__setattr__(f, "exact_eigenphases", (Phase.pi(0), Phase.pi(1)))
    return f


def phase_gate(theta) -> LocalFactor:
    th = Phase.coerce(theta)
    return LocalFactor.diag([Phase.pi(0), th], name=f"P({_phase_label(th)})")


GATES = {"I": identity, "X": pauli_x, "Z": pauli_z}


@dataclass(frozen=True, eq=False)
class ProductUnitary:
    """An n-partite unitary given as one local factor per party."""

    parties: tuple[str, ...]
    factors: tuple[LocalFactor, ...]
    label: str = ""
    components: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "parties", tuple(self.parties))
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.parties) != len(self.factors):
            raise StructureError(
                f"{len(self.factors)} factors for {len(self.parties)} parties in {self.label!r}"
            )
        if len(set(self.parties)) != len(self.parties):
            raise StructureError(f"duplicate party labels in {self.label!r}")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def factor(self, party: str) -> LocalFactor:
        try:
            return self.factors[self.parties.index(party)]
        except ValueError:
            raise StructureError(f"unknown party {party!r}") from None

    def to_matrix(self) -> np.ndarray:
        return reduce(np.kron, [f.to_matrix() for f in self.factors])

    def eigenphases(self) -> PhaseSet:
        return LocalFactor.tensor_of(self.factors).eigenphases()

    def restrict(self, parties: Sequence[str]) -> "ProductUnitary":
        return ProductUnitary(tuple(parties), tuple(self.factor(p) for p in parties), self.label, self.components)

    def reorder(self, parties: Sequence[str]) -> "ProductUnitary":
        if sorted(parties) != sorted(self.parties):
            raise StructureError("reorder needs a permutation of the party labels")
        return self.restrict(parties)

    def structure(self) -> tuple:
        return tuple(zip(self.parties, self.dims))

    def __repr__(self) -> str:
        body = " ⊗ ".join(f"{p}:{f.label()}" for p, f in zip(self.parties, self.factors))
        return f"ProductUnitary({self.label!r}: {body})"


def tensor(a, b):
    """Kronecker product; factored operands stay factored."""
    if isinstance(a, ProductUnitary) and isinstance(b, ProductUnitary):
        overlap = set(a.parties) & set(b.parties)
        if overlap:
            raise StructureError(f"parties {sorted(overlap)} appear on both sides")
        label = f"{a.label}⊗{b.label}" if a.label and b.label else a.label or b.label
        return ProductUnitary(a.parties + b.parties, a.factors + b.factors, label)
    if isinstance(a, LocalFactor) and isinstance(b, LocalFactor):
        return LocalFactor.tensor_of([a, b])
    if isinstance(a, (ProductUnitary, LocalFactor)) or isinstance(b, (ProductUnitary, LocalFactor)):
        raise StructureError("tensor operands must be of the same kind")
    return np.kron(as_matrix(a), as_matrix(b))


def adjoint_compose(u: ProductUnitary, v: ProductUnitary) -> ProductUnitary:
    """Factorwise ``u^dagger v``."""
    if u.structure() != v.structure():
        raise StructureError(f"party structure differs: {u.structure()} vs {v.structure()}")
    factors = tuple(a.adjoint().compose(b) for a, b in zip(u.factors, v.factors))
    return ProductUnitary(u.parties, factors, f"{u.label}†{v.label}")


def eigenphases(u) -> PhaseSet:
    if isinstance(u, (LocalFactor, ProductUnitary)):
        return u.eigenphases()
    a = as_matrix(u)
    if not validate_unitary(a):
        raise DimensionError("eigenphases needs a unitary matrix")
    return PhaseSet(tuple(Phase.rad(x) for x in eigphases_dense(a)), source="dense")


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray = field(repr=False)
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(amp)):
            raise DimensionError("state has non-finite amplitudes")
        dims = tuple(self.dims) or (amp.size,)
        if int(np.prod(dims)) != amp.size:
            raise DimensionError(f"dims {dims} do not match {amp.size} amplitudes")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > EPS_NORM:
            raise DimensionError(f"state is not normalized (norm {norm!r})")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, amplitudes, dims=()) -> "StateVector":
        amp = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = np.linalg.norm(amp)
        if n == 0.0:
            raise DimensionError("zero vector cannot be normalized")
        return cls(amp / n, tuple(dims))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(np.kron(self.amplitudes, other.amplitudes), self.dims + other.dims)

    def to_json(self) -> list:
        return [[float(z.real), float(z.imag)] for z in self.amplitudes]


_KET = {
    "0": np.array([1, 0]),
    "1": np.array([0, 1]),
    "+": np.array([1, 1]) / np.sqrt(2),
    "-": np.array([1, -1]) / np.sqrt(2),
    "r": np.array([1, 1j]) / np.sqrt(2),
    "l": np.array([1, -1j]) / np.sqrt(2),
}


def ket(spec: str) -> StateVector:
    """Qubit product state from characters ``0 1 + - r l`` (r/l are Y eigenstates)."""
    try:
        vecs = [_KET[c] for c in spec]
    except KeyError as exc:
        raise DimensionError(f"unknown ket symbol {exc.args[0]!r}") from None
    return StateVector(reduce(np.kron, vecs), (2,) * len(spec))


def basis_state(index: int, d: int) -> StateVector:
    v = np.zeros(d, dtype=complex)
    v[index] = 1.0
    return StateVector(v, (d,))


def max_entangled(d: int) -> StateVector:
    """``sum_i |i>|i> / sqrt(d)``; the system is the first factor."""
    v = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return StateVector(v, (d, d))


def apply(u, s: StateVector) -> StateVector:
    """Apply ``u`` to the leading subsystems of ``s`` (identity on the rest)."""
    if isinstance(u, ProductUnitary):
        m = u.to_matrix()
    elif isinstance(u, LocalFactor):
        m = u.to_matrix()
    else:
        m = as_matrix(u)
    du = m.shape[0]
    if s.dim % du:
        raise DimensionError(f"operator dim {du} does not divide state dim {s.dim}")
    out = (m @ s.amplitudes.reshape(du, -1)).reshape(-1)
    return StateVector.normalized(out, s.dims)
