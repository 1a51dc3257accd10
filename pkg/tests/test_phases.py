import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from locmark.phases import Phase, PhaseSet, cos_pi, exact_cos_expr, phase_from_json, sin_pi


fractions = st.fractions(min_value=-8, max_value=8, max_denominator=24)


def test_exact_phase_is_normalized():
    assert Phase.pi(5, 2).pi_frac == Fraction(1, 2)
    assert Phase.pi(-1, 2).pi_frac == Fraction(3, 2)
    assert Phase.pi(2).pi_frac == 0


def test_float_phase_is_normalized():
    assert Phase.rad(-math.pi / 2).radians == pytest.approx(3 * math.pi / 2)
    assert 0 <= Phase.rad(-1e-300).radians < 2 * math.pi


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        Phase.rad(float("nan"))


def test_coerce_keeps_integer_zero_exact():
    assert Phase.coerce(0).is_exact
    assert not Phase.coerce(0.0).is_exact
    assert Phase.coerce(Fraction(1, 3)) == Phase.pi(1, 3)


def test_exact_and_float_never_compare_equal():
    assert Phase.pi(1) != Phase.rad(math.pi)


@pytest.mark.parametrize("frac,value", [
    (Fraction(0), 1.0), (Fraction(1, 2), 0.0), (Fraction(1), -1.0), (Fraction(1, 3), 0.5),
    (Fraction(3, 4), -math.sqrt(2) / 2), (Fraction(5, 6), -math.sqrt(3) / 2),
])
def test_cos_pi_special_angles(frac, value):
    assert cos_pi(frac) == value


def test_sin_pi_quarter_turns():
    assert sin_pi(Fraction(1, 2)) == 1.0
    assert sin_pi(Fraction(3, 2)) == -1.0


def test_exact_cos_expr():
    assert exact_cos_expr(Fraction(1, 4)) == "sqrt(2)/2"
    assert exact_cos_expr(Fraction(2, 3)) == "-1/2"


@given(fractions, fractions)
def test_exact_addition_matches_float(a, b):
    s = Phase.pi(a) + Phase.pi(b)
    assert s.is_exact
    f = Phase.rad(math.pi * float(a)) + Phase.rad(math.pi * float(b))
    d = abs(s.radians - f.radians)
    assert min(d, 2 * math.pi - d) < 1e-9


@given(fractions)
def test_negation_is_inverse(a):
    p = Phase.pi(a)
    assert (p + (-p)) == Phase.pi(0)


@given(fractions)
def test_unit_point_has_modulus_one(a):
    assert abs(Phase.pi(a).unit()) == pytest.approx(1.0, abs=1e-15)


def test_json_round_trip():
    for p in (Phase.pi(3, 7), Phase.rad(1.25)):
        assert phase_from_json(p.to_json()) == p


def test_phase_set_sorted_and_points():
    ps = PhaseSet.of([Phase.pi(3, 2), Phase.pi(0), Phase.pi(1, 2)])
    assert [p.pi_frac for p in ps.sorted()] == [0, Fraction(1, 2), Fraction(3, 2)]
    assert ps.is_exact
    assert abs(ps.points().sum()) == pytest.approx(1.0)
