"""Scenario documents: JSON in, validated unitaries out, and back."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .errors import DimensionError, ScenarioError, StructureError
from .operators import GATES, LocalFactor, ProductUnitary, StateVector, ket
from .phases import Phase, phase_from_json
from .probes import ProbeModel

PHASE = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"pi_frac": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}},
            "required": ["pi_frac"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"rad": {"type": "number"}},
            "required": ["rad"],
            "additionalProperties": False,
        },
    ]
}

COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

FACTOR = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "phase_diag": {
                    "type": "object",
                    "properties": {"phases": {"type": "array", "items": PHASE, "minItems": 1}},
                    "required": ["phases"],
                    "additionalProperties": False,
                }
            },
            "required": ["phase_diag"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"gate": {"enum": sorted(GATES)}},
            "required": ["gate"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"phase_gate": PHASE},
            "required": ["phase_gate"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"dense": {"type": "array", "items": {"type": "array", "items": COMPLEX}, "minItems": 1}},
            "required": ["dense"],
            "additionalProperties": False,
        },
    ]
}

PROBE = {
    "type": "object",
    "properties": {
        "party": {"type": "string"},
        "ket": {"type": "string", "pattern": "^[01+\\-rl]+$"},
        "amplitudes": {"type": "array", "items": COMPLEX, "minItems": 1},
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 1}},
    },
    "required": ["party"],
    "oneOf": [{"required": ["ket"]}, {"required": ["amplitudes"]}],
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "parties": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {"label": {"type": "string", "minLength": 1}, "dim": {"type": "integer", "minimum": 1}},
                "required": ["label", "dim"],
                "additionalProperties": False,
            },
        },
        "unitaries": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "label": {"type": "string", "minLength": 1},
                    "factors": {"type": "array", "items": FACTOR},
                },
                "required": ["label", "factors"],
                "additionalProperties": False,
            },
        },
        "task": {"enum": ["check-pair", "check-set", "mark", "verify", "verify-theorem"]},
        "params": {
            "type": "object",
            "properties": {
                "probe_model": {"enum": [m.value for m in ProbeModel] + ["single", "product", "ancilla"]},
                "r": {"type": "integer", "minimum": 1},
                "max_rounds": {"type": "integer", "minimum": 1},
                "probes": {"type": "array", "items": PROBE},
            },
        },
        "notes": {},
    },
    "required": ["parties", "unitaries", "task"],
    "additionalProperties": False,
}


class ScenarioStructureError(ScenarioError, StructureError):
    """Well-formed document whose operators do not fit the declared parties."""


@dataclass
class Scenario:
    parties: list[tuple[str, int]]
    unitaries: list[ProductUnitary]
    task: str
    params: dict = field(default_factory=dict)
    notes: object = None
    probes: dict = field(default_factory=dict)

    @property
    def probe_model(self) -> ProbeModel:
        return ProbeModel.parse(self.params.get("probe_model", ProbeModel.SINGLE.value))

    def digest(self) -> str:
        return scenario_digest(self)


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _phase(obj, path) -> Phase:
    if "pi_frac" in obj and obj["pi_frac"][1] == 0:
        raise ScenarioError("pi_frac denominator must be nonzero", path)
    return phase_from_json(obj)


def _factor(obj, dim: int, path: str) -> LocalFactor:
    if "gate" in obj:
        f = GATES[obj["gate"]]()
    elif "phase_gate" in obj:
        f = LocalFactor.diag([Phase.pi(0), _phase(obj["phase_gate"], path + ".phase_gate")])
    elif "phase_diag" in obj:
        f = LocalFactor.diag([_phase(p, f"{path}.phase_diag.phases[{i}]")
                              for i, p in enumerate(obj["phase_diag"]["phases"])])
    else:
        rows = obj["dense"]
        if any(len(r) != len(rows) for r in rows):
            raise ScenarioError("dense matrix must be square", path + ".dense")
        m = np.array([[complex(a, b) for a, b in r] for r in rows])
        try:
            f = LocalFactor.dense(m)
        except DimensionError as exc:
            raise ScenarioError(str(exc), path + ".dense") from None
    if f.dim != dim:
        raise ScenarioStructureError(f"factor has dimension {f.dim}, party dimension is {dim}", path)
    return f


def parse_scenario(doc: dict) -> Scenario:
    """Validate ``doc`` and build the unitaries; errors carry a JSON path."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        raise ScenarioError(err.message, _json_path(err.absolute_path))
    parties = [(p["label"], p["dim"]) for p in doc["parties"]]
    labels = [p for p, _ in parties]
    if len(set(labels)) != len(labels):
        raise ScenarioError("duplicate party label", "$.parties")
    us = []
    for i, u in enumerate(doc["unitaries"]):
        path = f"$.unitaries[{i}]"
        if len(u["factors"]) != len(parties):
            raise ScenarioError(f"{len(u['factors'])} factors for {len(parties)} parties", path + ".factors")
        fs = tuple(_factor(f, d, f"{path}.factors[{k}]") for k, (f, (_, d)) in enumerate(zip(u["factors"], parties)))
        us.append(ProductUnitary(tuple(labels), fs, u["label"]))
    names = [u.label for u in us]
    if len(set(names)) != len(names):
        raise ScenarioError("duplicate unitary label", "$.unitaries")
    params = dict(doc.get("params", {}))
    probes: dict[str, list[StateVector]] = {}
    for i, p in enumerate(params.get("probes", [])):
        path = f"$.params.probes[{i}]"
        if p["party"] not in labels:
            raise ScenarioError(f"unknown party {p['party']!r}", path + ".party")
        if "ket" in p:
            s = ket(p["ket"])
        else:
            amp = np.array([complex(a, b) for a, b in p["amplitudes"]])
            if np.linalg.norm(amp) == 0:
                raise ScenarioError("zero probe vector", path + ".amplitudes")
            s = StateVector.normalized(amp, tuple(p.get("dims", (amp.size,))))
        probes.setdefault(p["party"], []).append(s)
    return Scenario(parties, us, doc["task"], params, doc.get("notes"), probes)


def _factor_json(f: LocalFactor) -> dict:
    if f.name in GATES and f.key == GATES[f.name]().key:
        return {"gate": f.name}
    if f.kind == "diag":
        return {"phase_diag": {"phases": [p.to_json() for p in f.phases]}}
    m = f.to_matrix()
    return {"dense": [[[float(z.real), float(z.imag)] for z in row] for row in m]}


def scenario_to_dict(s: Scenario) -> dict:
    """Canonical document; ``parse_scenario`` of it rebuilds the same scenario."""
    out = {
        "parties": [{"label": p, "dim": d} for p, d in s.parties],
        "unitaries": [{"label": u.label, "factors": [_factor_json(f) for f in u.factors]} for u in s.unitaries],
        "task": s.task,
    }
    if s.params:
        out["params"] = s.params
    if s.notes is not None:
        out["notes"] = s.notes
    return out


def scenario_digest(s: Scenario) -> str:
    text = json.dumps(scenario_to_dict(s), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def load_scenario(source) -> Scenario:
    """Load from a path, or a shipped scenario by bare name."""
    path = Path(source)
    if not path.exists() and not path.suffix:
        return load_builtin(str(source))
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from None
    except OSError as exc:
        raise ScenarioError(f"cannot read {source}: {exc.strerror}") from None
    return parse_scenario(doc)


def builtin_names() -> list[str]:
    root = resources.files("locmark") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_builtin(name: str) -> Scenario:
    root = resources.files("locmark") / "scenarios"
    f = root / f"{name}.json"
    if not f.is_file():
        raise ScenarioError(f"no shipped scenario named {name!r} (have {', '.join(builtin_names())})")
    return parse_scenario(json.loads(f.read_text()))

