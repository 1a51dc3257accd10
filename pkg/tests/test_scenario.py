import copy
import json
from fractions import Fraction

import pytest

from locmark.errors import ScenarioError, StructureError
from locmark.scenario import builtin_names, load_builtin, load_scenario, parse_scenario, scenario_digest, scenario_to_dict

DOC = {
    "parties": [{"label": "A", "dim": 2}, {"label": "B", "dim": 2}],
    "unitaries": [
        {"label": "U1", "factors": [{"gate": "I"}, {"phase_diag": {"phases": [{"pi_frac": [0, 1]}, {"pi_frac": [1, 2]}]}}]},
        {"label": "U2", "factors": [{"gate": "X"}, {"phase_gate": {"rad": 0.25}}]},
    ],
    "task": "check-pair",
    "params": {"probe_model": "product", "probes": [{"party": "A", "ket": "+"}]},
}


def broken(**changes):
    doc = copy.deepcopy(DOC)
    for path, value in changes.items():
        target = doc
        keys = path.split("/")
        for k in keys[:-1]:
            target = target[int(k) if k.isdigit() else k]
        last = keys[-1]
        target[int(last) if last.isdigit() else last] = value
    return doc


def test_parse_basic():
    s = parse_scenario(DOC)
    assert [u.label for u in s.unitaries] == ["U1", "U2"]
    assert s.probe_model.value == "product_probe"
    assert s.unitaries[0].factor("B").diag_phases()[1].pi_frac == Fraction(1, 2)
    assert s.probes["A"][0].dims == (2,)


def test_shipped_wset():
    s = load_builtin("theorem7_wset")
    assert len(s.unitaries) == 3
    assert [d for _, d in s.parties] == [2, 2]


def test_builtin_names():
    assert builtin_names() == ["theorem2_vprime", "theorem4_wprime", "theorem6_zset", "theorem7_wset"]


@pytest.mark.parametrize("name", ["theorem2_vprime", "theorem4_wprime", "theorem6_zset", "theorem7_wset"])
def test_round_trip_keeps_digest(name):
    s = load_builtin(name)
    doc = json.loads(json.dumps(scenario_to_dict(s)))
    again = parse_scenario(doc)
    assert scenario_digest(again) == scenario_digest(s)
    for a, b in zip(s.unitaries, again.unitaries):
        assert all(f.key == g.key for f, g in zip(a.factors, b.factors))


def test_digest_changes_with_content():
    other = broken(**{"unitaries/1/label": "U3"})
    assert scenario_digest(parse_scenario(other)) != scenario_digest(parse_scenario(DOC))


@pytest.mark.parametrize("doc,path", [
    (broken(unitaries=[]), "$.unitaries"),
    (broken(task="dance"), "$.task"),
    (broken(**{"parties/0/dim": 0}), "$.parties[0].dim"),
    (broken(**{"unitaries/0/factors/0": {"gate": "H"}}), "$.unitaries[0].factors[0]"),
    (broken(**{"unitaries/0/factors": [{"gate": "I"}]}), "$.unitaries[0].factors"),
    (broken(**{"unitaries/1/label": "U1"}), "$.unitaries"),
    (broken(**{"params/probes/0/party": "Q"}), "$.params.probes[0].party"),
    (broken(**{"unitaries/0/factors/1/phase_diag/phases/0/pi_frac": [1, 0]}),
     "$.unitaries[0].factors[1].phase_diag.phases[0]"),
])
def test_errors_name_the_path(doc, path):
    with pytest.raises(ScenarioError) as err:
        parse_scenario(doc)
    assert err.value.path == path
    assert str(err.value).startswith(path)


def test_dimension_mismatch_is_a_structure_error():
    doc = broken(**{"unitaries/0/factors/1": {"phase_diag": {"phases": [{"rad": 0}] * 3}}})
    with pytest.raises(StructureError) as err:
        parse_scenario(doc)
    assert err.value.path == "$.unitaries[0].factors[1]"


def test_dense_factor_must_be_unitary():
    doc = broken(**{"unitaries/0/factors/0": {"dense": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]}})
    with pytest.raises(ScenarioError):
        parse_scenario(doc)


def test_load_from_file(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(DOC))
    assert load_scenario(p).digest() == parse_scenario(DOC).digest()


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ScenarioError, match="invalid JSON"):
        load_scenario(bad)
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario(tmp_path / "missing.json")
    with pytest.raises(ScenarioError, match="no shipped scenario"):
        load_scenario("nonesuch")
