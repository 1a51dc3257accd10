import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locmark.errors import CapacityError, CertificateError, DimensionError, StructureError
from locmark.locc import LoccNode, bob_final_check, locc_search, replay
from locmark.marking import permutation_ensemble, random_diagonal_pair, theorem4_family_check
from locmark.operators import LocalFactor, ProductUnitary, identity, pauli_x, phase_gate
from locmark.phases import Phase
from locmark.probes import ProbeModel
from locmark.scenario import load_builtin

pi = Phase.pi
I, X = identity(), pauli_x()
V = phase_gate(pi(1, 2))


def T(*fs):
    return LocalFactor.tensor_of(fs)


def pu(label, *factors, parties=None):
    return ProductUnitary(parties or tuple("AB"[: len(factors)]), factors, label)


def test_bob_final_check_collision_pair():
    c = bob_final_check(T(I, I, V), T(V, I, I))
    assert c["contains_origin"]
    # V^dagger x 1 x V: each of {0, 0, pi/2, 3pi/2} twice
    assert sorted(Fraction(*p["pi_frac"]) for p in c["phases"]) == [0] * 4 + [Fraction(1, 2)] * 2 + [Fraction(3, 2)] * 2


def test_bob_final_check_identical():
    assert not bob_final_check(T(I, V), T(I, V))["contains_origin"]


def test_bob_final_check_antipodal_sum():
    c = bob_final_check(T(I, I), T(V, V))
    assert c["contains_origin"]
    assert sorted(Fraction(*p["pi_frac"]) for p in c["phases"]) == [0, Fraction(1, 2), Fraction(1, 2), 1]


def test_bob_final_check_product_probe_needs_one_box():
    # the joint hull contains the origin, but neither box does on its own
    assert not bob_final_check(T(I, I, V), T(V, I, I), ProbeModel.PRODUCT)["contains_origin"]


def test_bob_final_check_length_mismatch():
    with pytest.raises(DimensionError):
        bob_final_check(T(I, I), T(V, V, V))


def test_two_members_orthogonal_at_first_party():
    ens = [pu("II", I, I), pu("XI", X, I)]
    v = locc_search(ens)
    assert v.outcome == "yes"
    assert v.tree.root.depth() == 1
    paths = replay(v.tree, ens)
    assert paths["XI"][0][0] == "A"


def test_depth_one_tree_on_single_qubit():
    ens = [pu("I", I, parties=("A",)), pu("X", X, parties=("A",))]
    v = locc_search(ens)
    assert np.allclose(v.tree.root.probe_state.amplitudes, [1, 0])
    paths = replay(v.tree, ens)
    assert len(paths["X"]) == 1 and paths["X"] != paths["I"]


def test_single_member_is_trivial():
    v = locc_search([pu("only", I)])
    assert v.outcome == "yes" and v.tree.trivial_leaf == "only"
    assert replay(v.tree, [pu("only", I)]) == {"only": []}


def test_collision_tree_shape_and_replay():
    w = load_builtin("theorem7_wset")
    ens = permutation_ensemble(w.unitaries)
    v = locc_search(ens, ProbeModel.SINGLE, user_probes=w.probes)
    assert v.outcome == "yes"
    root = v.tree.root
    assert root.party == "A"
    assert np.allclose(root.probe_state.amplitudes, np.kron(np.kron([1, 0], [1, 1]), [1, 0]) / np.sqrt(2))
    inner = [(m, c) for m, c in root.outcomes if isinstance(c, LoccNode)]
    leaves = [c for _, c in root.outcomes if isinstance(c, str)]
    assert len(leaves) == 4 and len(inner) == 1
    members, bob = inner[0]
    assert sorted(members) == ["W1-W3-W2", "W2-W3-W1"]
    assert bob.party == "B"
    paths = replay(v.tree, ens)
    assert len(paths) == 6
    assert [p for p, _ in paths["W2-W3-W1"]] == ["A", "B"]
    assert all(len(paths[k]) == 1 for k in paths if k not in members)


def test_unmarkable_pair_has_three_hull_certificates():
    fam = theorem4_family_check([Fraction(1, 6)] * 6)
    v = locc_search(permutation_ensemble(fam["unitaries"]))
    assert v.outcome == "no"
    assert v.certificate["kind"] == "per-party-hull"
    assert set(v.certificate["parties"]) == {"A", "B", "C"}
    for h in v.certificate["parties"].values():
        assert h["min_norm"] == 0.5 and h["exact"]


def test_tampered_tree_fails_replay():
    ens = [pu("I", I, parties=("A",)), pu("X", X, parties=("A",))]
    v = locc_search(ens)
    outs = v.tree.root.outcomes
    outs[0], outs[1] = (outs[0][0], outs[1][1]), (outs[1][0], outs[0][1])
    with pytest.raises(CertificateError):
        replay(v.tree, ens)


def test_capacity_guard():
    ens = [pu(f"u{k}", LocalFactor.diag([pi(0), pi(k, 32)]), parties=("A",)) for k in range(25)]
    with pytest.raises(CapacityError):
        locc_search(ens)


def test_structure_checks():
    with pytest.raises(StructureError):
        locc_search([])
    with pytest.raises(StructureError):
        locc_search([pu("a", I, I), pu("a", X, I)])


def test_identical_members_are_unmarkable():
    v = locc_search([pu("a", V, I), pu("b", V, I)])
    assert v.outcome == "no"


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_verdict_invariant_under_relabeling_and_party_order(seed):
    a, b = random_diagonal_pair(np.random.default_rng(seed))
    ens = permutation_ensemble([a, b])
    base = locc_search(ens).outcome
    relabeled = [ProductUnitary(u.parties, u.factors, f"m{k}") for k, u in enumerate(reversed(ens))]
    assert locc_search(relabeled).outcome == base
    swapped = [u.reorder(tuple(reversed(u.parties))) for u in ens]
    assert locc_search(swapped).outcome == base
    if base == "yes":
        replay(locc_search(ens).tree, ens)


@pytest.mark.parametrize("name", ["theorem7_wset", "theorem6_zset"])
def test_sub_ensembles_of_solved_ensembles_are_solved(name):
    s = load_builtin(name)
    if name == "theorem6_zset":
        groups = [permutation_ensemble(s.unitaries, p) for p in ([0, 1], [0, 2], [1, 2])]
    else:
        groups = [permutation_ensemble(s.unitaries)]
    for ens in groups:
        assert locc_search(ens, user_probes=s.probes).outcome == "yes"
        for k in range(2, len(ens)):
            for sub in itertools.combinations(ens, k):
                v = locc_search(list(sub), user_probes=s.probes)
                assert v.outcome == "yes"
                replay(v.tree, list(sub))
