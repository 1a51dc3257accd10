from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locmark.errors import DimensionError, StructureError
from locmark.operators import (
    LocalFactor,
    ProductUnitary,
    adjoint_compose,
    apply,
    eigenphases,
    identity,
    ket,
    max_entangled,
    pauli_x,
    pauli_z,
    phase_gate,
    tensor,
)
from locmark.phases import Phase
from locmark.scenario import load_builtin

from oracles import match_phases, random_unitary

pi = Phase.pi
V = phase_gate(pi(1, 2))


def fracs(ps):
    return sorted(p.pi_frac for p in ps)


def test_identity_tensor_identity():
    assert np.array_equal(tensor(identity(), identity()).to_matrix(), np.eye(4))


def test_diag_tensor_order():
    m = tensor(LocalFactor.diag([pi(0), pi(1, 2)]), LocalFactor.diag([pi(0), pi(1)])).to_matrix()
    assert np.allclose(np.diag(m), [1, -1, 1j, -1j])
    assert np.allclose(m, np.diag(np.diag(m)))


def test_tensor_of_matrices():
    assert np.array_equal(tensor(np.eye(2), np.array([[0, 1], [1, 0]])), np.kron(np.eye(2), [[0, 1], [1, 0]]))


def test_tensor_rejects_mixed_operands():
    with pytest.raises(StructureError):
        tensor(identity(), np.eye(2))


def test_product_tensor_rejects_shared_party():
    u = ProductUnitary(("A",), (identity(),), "u")
    with pytest.raises(StructureError):
        tensor(u, u)


def test_adjoint_compose_self_is_identity():
    u = ProductUnitary(("A", "B"), (pauli_x(), V), "u")
    w = adjoint_compose(u, u)
    for f in w.factors:
        assert np.allclose(f.to_matrix(), np.eye(2))


def test_adjoint_compose_primed_pair():
    s = load_builtin("theorem2_vprime")
    v1, v2 = s.unitaries
    w = adjoint_compose(v1, v2)
    assert fracs(w.factor("A").diag_phases()) == [0, Fraction(7, 5)]  # -(a1 + a3) = -3/5 pi
    assert fracs(w.factor("B").diag_phases()) == [0, Fraction(9, 5)]  # -(a2 + a4) = -1/5 pi


def test_adjoint_compose_phase_gate():
    z1 = LocalFactor.diag([pi(0), pi(1, 2)])
    assert fracs(identity().adjoint().compose(z1).diag_phases()) == [0, Fraction(1, 2)]


def test_adjoint_compose_structure_mismatch():
    u = ProductUnitary(("A", "B"), (identity(), identity()))
    v = ProductUnitary(("A", "B"), (identity(), identity(3)))
    with pytest.raises(StructureError):
        adjoint_compose(u, v)


def test_eigenphases_examples():
    assert fracs(eigenphases(identity(4))) == [0] * 4
    assert fracs(eigenphases(pauli_x())) == [0, 1]
    assert fracs(eigenphases(V)) == [0, Fraction(1, 2)]


def test_eigenphases_of_dense_rejects_non_unitary():
    with pytest.raises(DimensionError):
        eigenphases(np.array([[2, 0], [0, 1]]))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([2, 3]), st.sampled_from([2, 3]), st.integers(0, 2**32 - 1))
def test_tensor_law_for_dense_factors(da, db, seed):
    rng = np.random.default_rng(seed)
    a = LocalFactor.dense(random_unitary(rng, da))
    b = LocalFactor.dense(random_unitary(rng, db))
    pa, pb = eigenphases(a).radians(), eigenphases(b).radians()
    want = (pa[:, None] + pb[None, :]).ravel()
    got = eigenphases(tensor(a, b).to_matrix()).radians()
    assert match_phases(got, want, 1e-8)


def test_apply_collision_state():
    s = ket("0+0")
    for u in ((identity(), pauli_x(), pauli_z()), (pauli_z(), pauli_x(), identity())):
        out = apply(ProductUnitary(("1", "2", "3"), u), s)
        assert abs(out.overlap(s)) == pytest.approx(1.0)


def test_apply_x_on_bell_gives_orthogonal_bell():
    phi = max_entangled(2)
    psi = apply(pauli_x(), phi)
    assert np.allclose(psi.amplitudes, np.array([0, 1, 1, 0]) / np.sqrt(2))
    assert abs(psi.overlap(phi)) < 1e-15


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply(identity(3), ket("00"))


def test_ket_rejects_unknown_symbol():
    with pytest.raises(DimensionError):
        ket("0x")


def test_reorder_is_a_permutation():
    u = ProductUnitary(("A", "B"), (pauli_x(), V), "u")
    r = u.reorder(("B", "A"))
    assert r.factor("A") is u.factor("A")
    with pytest.raises(StructureError):
        u.reorder(("A", "C"))


def test_dense_rejects_non_unitary():
    with pytest.raises(DimensionError):
        LocalFactor.dense([[1, 1], [0, 1]])
