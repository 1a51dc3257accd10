"""Acceptance gate: nine criteria, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed in the
terminal summary (and to stdout with ``-s``). Marking verdicts are shared
through one module-level context so criterion 8 can check the ladders built
by criteria 4 to 7 without recomputing them.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from locmark import verify
from locmark.geometry import hull_contains_origin, min_hull_norm, sum_phases
from locmark.linalg import eigphases_dense
from locmark.locc import replay
from locmark.marking import mark_check, permutation_ensemble
from locmark.phases import Phase, PhaseSet
from locmark.probes import ProbeModel
from locmark.scenario import load_builtin
from locmark.geometry import single_constraint_problem, simplex_feasible

from oracles import grid_min_norm, match_phases, random_unitary

SEED = 0xC0FFEE


@pytest.fixture(scope="module")
def ctx():
    return verify.VerifyContext(SEED)


def _record(log, number, title, ok, elapsed, budget, detail=""):
    within = elapsed <= budget
    status = "PASS" if ok and within else "FAIL"
    line = f"criterion {number}: {status}  {title}  ({elapsed * 1e3:.1f} ms, budget {budget * 1e3:.0f} ms)"
    if detail:
        line += f"  {detail}"
    log.append(line)
    print(line)
    return ok and within


def _failed(checks):
    return [c["name"] for c in checks if not c["passed"]]


def test_criterion_1_hull_kernel(acceptance_log):
    p3 = PhaseSet.of([Phase.pi(0), Phase.pi(1, 2), Phase.pi(3, 2)])
    p2 = PhaseSet.of([Phase.pi(0), Phase.pi(1, 2)])
    hull_contains_origin(p3)  # warm the exact-trig cache once
    t0 = time.perf_counter()
    h = hull_contains_origin(p3)
    norm = min_hull_norm(p2)
    elapsed = time.perf_counter() - t0
    ok = (h.contains_origin and h.exact and h.weights == (0.0, 0.5, 0.5)
          and abs(norm - math.sqrt(2) / 2) <= 1e-10)
    assert _record(acceptance_log, 1, "hull kernel", ok, elapsed, 1e-3,
                   f"weights {h.weights}, segment norm {norm!r}")


def test_criterion_2_indistinguishable_markable_pair(ctx, acceptance_log):
    t0 = time.perf_counter()
    checks = verify.section_2(ctx)
    elapsed = time.perf_counter() - t0
    assert _record(acceptance_log, 2, "indistinguishable but markable pair", not _failed(checks), elapsed, 0.1,
                   ", ".join(_failed(checks)))


def test_criterion_3_distinguishable_unmarkable_family(ctx, acceptance_log):
    t0 = time.perf_counter()
    checks = verify.section_4(ctx)
    elapsed = time.perf_counter() - t0
    cert = checks[-1].get("certificate", {})
    exact = all(h.get("exact") for h in cert.get("parties", {}).values())
    ok = not _failed(checks) and exact
    assert _record(acceptance_log, 3, "distinguishable but unmarkable family", ok, elapsed, 0.1,
                   ", ".join(_failed(checks)) or "three exact party hulls, min norm 1/2")


def test_criterion_4_two_but_not_three_markable(ctx, acceptance_log):
    t0 = time.perf_counter()
    checks = verify.section_6(ctx)
    elapsed = time.perf_counter() - t0
    res = checks[1]["certificate"]["verdict"]["forced_residual"]
    assert _record(acceptance_log, 4, "2-markable, not 3-markable", not _failed(checks), elapsed, 1.0,
                   ", ".join(_failed(checks)) or f"forced residual {res!r}")


def test_criterion_5_unentangled_probe_set(ctx, acceptance_log):
    t0 = time.perf_counter()
    checks = verify.section_7(ctx)
    elapsed = time.perf_counter() - t0
    # the replay is also checked here directly so a quiet tree change cannot slip by
    w = load_builtin("theorem7_wset")
    tree = next(iter(ctx.marks[("wset", 3, "single_system")].per_subset.values())).tree
    paths = replay(tree, permutation_ensemble(w.unitaries))
    ok = not _failed(checks) and len(paths) == 6
    # reported, not gated: with a probe that is a product across Bob's two
    # boxes his final overlap factorizes and cannot vanish, so the stricter
    # per-box model stays undecided
    per_box = mark_check(w.unitaries, 3, ProbeModel.PRODUCT, user_probes=w.probes, seed=SEED).markable
    per_box = "unknown" if per_box is None else per_box
    assert _record(acceptance_log, 5, "ancilla, single-system and product-probe checks", ok, elapsed, 5.0,
                   ", ".join(_failed(checks)) or f"six labels replayed; per-box product probes {per_box}")


def test_criterion_6_random_pairs(ctx, acceptance_log):
    t0 = time.perf_counter()
    checks = verify.section_3(ctx)
    elapsed = time.perf_counter() - t0
    assert _record(acceptance_log, 6, "random bipartite pairs", not _failed(checks), elapsed, 10.0,
                   checks[0]["summary"])


def test_criterion_7_random_triples(ctx, acceptance_log):
    t0 = time.perf_counter()
    checks = verify.section_1(ctx)
    elapsed = time.perf_counter() - t0
    assert _record(acceptance_log, 7, "random locally distinguishable triples", not _failed(checks), elapsed, 20.0,
                   checks[0]["summary"])


def test_criterion_8_monotonicity(ctx, acceptance_log):
    t0 = time.perf_counter()
    checks = verify.section_5(ctx)
    elapsed = time.perf_counter() - t0
    ladder = ctx.ladder()
    # suites 4 to 7 must all have contributed before this runs
    enough = len(ladder) >= 2 + verify.THEOREM1_SAMPLES + verify.THEOREM3_SAMPLES
    assert _record(acceptance_log, 8, "monotone marking ladders", not _failed(checks) and enough, elapsed, 1.0,
                   checks[0]["summary"])


def _random_phase_set(rng, kmax):
    k = int(rng.integers(1, kmax + 1))
    if rng.random() < 0.3:
        return PhaseSet.of([Phase.pi(int(n), 8) for n in rng.integers(0, 16, size=k)])
    return PhaseSet.of(rng.uniform(0, 2 * math.pi, size=k))


def test_criterion_9_oracle_equivalences(acceptance_log):
    rng = np.random.default_rng([SEED, 9])
    margin = 2e-3
    t0 = time.perf_counter()

    grid_bad = []
    for i in range(1000):
        ps = _random_phase_set(rng, 4)
        h = hull_contains_origin(ps)
        g = grid_min_norm(ps.radians(), step=1e-3)
        if h.contains_origin and g > margin:
            grid_bad.append(i)
        elif not h.contains_origin and h.min_norm > margin and g <= margin:
            grid_bad.append(i)
        elif g < h.min_norm - 1e-9:
            grid_bad.append(i)

    tensor_bad = []
    for i in range(200):
        da, db = rng.choice([2, 3], size=2)
        a, b = random_unitary(rng, int(da)), random_unitary(rng, int(db))
        pa, pb = eigphases_dense(a), eigphases_dense(b)
        want = sum_phases(PhaseSet.of(pa), PhaseSet.of(pb)).radians()
        if not match_phases(eigphases_dense(np.kron(a, b)), want, 1e-8):
            tensor_bad.append(i)

    lp_bad = []
    for i in range(500):
        ps = _random_phase_set(rng, 6)
        feasible = simplex_feasible(single_constraint_problem(list(ps)), diagnostics=False).feasible
        if feasible != hull_contains_origin(ps).contains_origin:
            lp_bad.append(i)

    elapsed = time.perf_counter() - t0
    ok = not grid_bad and not tensor_bad and not lp_bad
    assert _record(acceptance_log, 9, "oracle equivalences", ok, elapsed, 10.0,
                   f"grid {len(grid_bad)}/1000, tensor {len(tensor_bad)}/200, simplex {len(lp_bad)}/500 disagreements")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
