from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locmark.lp import solve


def test_exact_simplex_point():
    r = solve([0, 0, 0], [[1, 1, 1], [1, -1, 0]], [1, 0], exact=True)
    assert r.status == "optimal"
    assert sum(r.x) == 1 and r.x[0] == r.x[1]
    assert all(isinstance(v, Fraction) for v in r.x)


def test_infeasible():
    assert solve([0, 0], [[1, 1], [1, 1]], [1, 2]).status == "infeasible"


def test_unbounded():
    assert solve([-1, 0], [[1, -1]], [0]).status == "unbounded"


def test_minimum_value():
    # min x0 + 2 x1 with x0 + x1 = 1 -> 1 at (1, 0)
    r = solve([1, 2], [[1, 1]], [1], exact=True)
    assert r.value == 1 and r.x == [1, 0]


def test_negative_right_hand_side():
    r = solve([0, 0], [[-1, -1]], [-2])
    assert r.status == "optimal"
    assert sum(r.x) == pytest.approx(2)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_float_and_exact_agree(m, n, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(-3, 4, size=(m, n))
    x0 = rng.integers(0, 3, size=n)
    b = a @ x0  # feasible by construction
    c = rng.integers(0, 5, size=n)  # bounded below on x >= 0
    ex = solve(c, a.tolist(), b.tolist(), exact=True)
    fl = solve(c, a.tolist(), b.tolist())
    assert ex.status == fl.status == "optimal"
    assert float(ex.value) == pytest.approx(fl.value, abs=1e-9)
    assert np.allclose(a @ np.array([float(v) for v in ex.x]), b)
    assert min(ex.x) >= 0
