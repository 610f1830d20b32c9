"""Acceptance criteria 1-11.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
``CRITERION k: PASS/FAIL`` line per criterion.
"""

import json
import random
import sys
import time
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from edgepattern.bounds import bound_report, demaine_bound, mean_thickness, scale_separation
from edgepattern.cli import main
from edgepattern.corners import (
    AXIS_MIRRORS,
    contraction_check,
    contraction_verdicts,
    corner_survivors,
    enumerate_corner_placements,
    filter_line_trees,
    filter_self_symmetric,
    staircase_counterexample,
)
from edgepattern.edge_path import canonical_forms, canonical_keys, path_to_tree, path_validate, turn_word
from edgepattern.enumeration import EnumerationBudget, cross_check, tier1_brute_force, tier2_path_growing
from edgepattern.geometry import SYMMETRIES, Symmetry, apply_symmetry, board_spec
from edgepattern.records import PathRecord, build_records

criterion = pytest.mark.criterion


# 1 -----------------------------------------------------------------------


@criterion(1)
@pytest.mark.parametrize("n,count", [(2, 1), (4, 4), (6, 192), (8, 100352), (10, 557568000)])
def test_matrix_tree_counts(n, count, capsys):
    t0 = time.perf_counter()
    assert main(["count", "--n", str(n)]) == 0
    elapsed = time.perf_counter() - t0
    assert capsys.readouterr().out.strip() == str(count)
    assert elapsed < 1.0


# 2 -----------------------------------------------------------------------


@criterion(2)
def test_tier3_emits_every_tree_as_a_valid_path(corpus8):
    assert len(corpus8.masks) == len(set(corpus8.masks)) == 100352
    bad = [k for k, p in enumerate(corpus8.paths) if not path_validate(p).ok]
    assert bad == []


@criterion(2)
def test_pipeline_through_dedup_under_a_minute(corpus8):
    assert corpus8.seconds < 60.0


# 3 -----------------------------------------------------------------------


@criterion(3)
def test_orbit_counts(corpus8):
    assert len(set(corpus8.keys)) == 12600
    assert cross_check(board_spec(4), tiers=(3,)).orbits[3] == 1


@criterion(3)
def test_orbit_stabilizer_balance(corpus8):
    # orbit-stabilizer: each orbit holds 8 / |stabilizer| distinct loops
    sizes = {}
    for k, s in zip(corpus8.keys, corpus8.stabilizers):
        sizes.setdefault(k, [0, len(s)])[0] += 1
    assert all(count * stab == 8 for count, stab in sizes.values())


# 4 -----------------------------------------------------------------------


@criterion(4)
@pytest.mark.parametrize("n,expected", [(2, 0), (4, 0), (6, 11)])
def test_corner_survivors_small(n, expected, capsys, tmp_path):
    path = tmp_path / "c.jsonl"
    assert main(["enumerate", "--n", str(n), "--dedup", "--out", str(path)]) == 0
    assert main(["filter", "--in", str(path), "--corners"]) == 0
    out = capsys.readouterr().out
    assert len(out.splitlines()) == expected


@criterion(4)
def test_corner_survivors_n8(reps8):
    assert len(corner_survivors(reps8)) == 3924


# 5 -----------------------------------------------------------------------


@pytest.fixture(scope="module")
def survivors8(reps8):
    return corner_survivors(reps8)


@criterion(5)
def test_self_symmetric_survivors(survivors8):
    paths = [p for p, _ in survivors8]
    _, stabs = canonical_forms(paths, 8)
    # independent of the label: any axis mirror in the stabilizer
    axis = [(p, pl, s) for (p, pl), s in zip(survivors8, stabs) if any(m in s for m in AXIS_MIRRORS)]
    assert len(axis) == 26
    for p, pl, s in axis:
        assert len(pl) == 2
        assert len(s) == 2  # identity and one axis mirror, nothing else
    assert len(filter_self_symmetric(paths, 8).axis_symmetric) == 26


# 6 -----------------------------------------------------------------------


@criterion(6)
def test_line_tree_survivors(survivors8):
    lines = filter_line_trees([p for p, _ in survivors8], 8)
    assert len(lines) == 3
    for p in lines:
        verdicts = contraction_verdicts(p, enumerate_corner_placements(p))
        assert verdicts and all(verdicts)


# 7 -----------------------------------------------------------------------


@criterion(7)
def test_all_survivor_placements_contract(survivors8):
    failures = []
    placements = 0
    for p, pl in survivors8:
        verdicts = contraction_verdicts(p, pl)
        placements += len(verdicts)
        failures += [(p, c) for c, ok in zip(pl, verdicts) if not ok]
    assert placements >= 3924
    assert failures == []


@criterion(7)
@pytest.mark.parametrize("n", [6, 8])
def test_staircase_counterexample(n):
    _, layout = staircase_counterexample(n)
    rep = contraction_check(layout)
    assert not rep.passed
    w = rep.worst_pair
    # (2*sqrt(2), sqrt(10)) compared as exact squares
    assert (w.unfolded_sq, w.folded_sq) == (8, 10)
    assert rep.comparisons_performed == (9 * n**4 - 5 * n**2) // 2


# 8 -----------------------------------------------------------------------


@criterion(8)
def test_cross_check_n4_n6():
    r4 = cross_check(board_spec(4), tiers=(1, 2, 3))
    assert r4.ok and r4.counts == {1: 4, 2: 4, 3: 4}
    r6 = cross_check(board_spec(6), tiers=(2, 3))
    assert r6.ok and r6.counts == {2: 192, 3: 192}


@criterion(8)
def test_cross_check_n8(corpus8):
    run = tier2_path_growing(board_spec(8))
    keys2 = canonical_keys(run, 8)
    assert run.result.complete
    assert len(keys2) == 100352
    assert sorted(keys2) == sorted(corpus8.keys)


# 9 -----------------------------------------------------------------------


@criterion(9)
def test_tier1_n8_aborts_cleanly(tmp_path, capsys):
    run = tier1_brute_force(board_spec(8), EnumerationBudget())
    assert run.collect() == []
    assert run.result.aborted and not run.result.complete and run.result.solutions == 0
    out = tmp_path / "t1.jsonl"
    assert main(["enumerate", "--n", "8", "--tier", "1", "--out", str(out)]) == 3
    assert not out.exists()
    manifest = json.loads((tmp_path / "t1.manifest.json").read_text())
    assert manifest["aborted"] and manifest["reason"]


# 10 ----------------------------------------------------------------------


@criterion(10)
def test_bounds():
    for n in range(2, 42, 2):
        r = bound_report(n)
        assert r.edge_bound == n * n
        assert r.demaine_bound == Fraction(n * n, 2) + 8 * n + 8 - 5 * (n % 4)
    first = min(n for n in range(2, 42, 2) if bound_report(n).crossover)
    assert first > 16
    assert demaine_bound(18) < 18 * 18


@criterion(10)
def test_scale_separation_and_thickness():
    s6, s8 = scale_separation(6), scale_separation(8)
    assert s6.m == (3,) and s6.a == (18,)
    assert s8.m == (6, 7) and s8.a == (30, 34)
    assert mean_thickness(8, 66, 8) == Fraction(825, 100)
    assert mean_thickness(32, 32, 8) == 16


# 11 ----------------------------------------------------------------------


@criterion(11)
@given(st.sampled_from(SYMMETRIES), st.sampled_from(SYMMETRIES), st.sampled_from(SYMMETRIES))
def test_symmetry_group_laws(a, b, c):
    assert a.compose(b).compose(c) == a.compose(b.compose(c))
    assert a.compose(Symmetry.IDENTITY) == a
    assert a.compose(a.inverse()) == Symmetry.IDENTITY
    for x in range(9):
        for y in range(9):
            assert apply_symmetry(a.compose(b), (x, y), 8) == apply_symmetry(a, apply_symmetry(b, (x, y), 8), 8)


@criterion(11)
def test_tree_path_round_trip_n6(corpus6):
    spec = board_spec(6)
    assert len(corpus6.paths) == 192
    for mask, p in zip(corpus6.masks, corpus6.paths):
        assert path_to_tree(p, spec).mask == mask


@criterion(11)
@pytest.mark.parametrize("n", [6, 8])
def test_perpendicular_steps_and_full_coverage(n, corpus6, corpus8):
    corpus = corpus6 if n == 6 else corpus8
    for p in corpus.paths:
        squares = {(s.i, s.j) for s in p.steps}
        assert len(p.steps) == len(squares) == n * n
        w = turn_word(p)  # raises on any non-perpendicular pair
        assert w.count("L") - w.count("R") == 4


@criterion(11)
def test_json_round_trip_sample(corpus8):
    rng = random.Random(2024)
    idx = sorted(rng.sample(range(len(corpus8.paths)), 1000))
    recs = build_records([corpus8.paths[k] for k in idx], 8)
    for r in recs:
        assert PathRecord.from_json(r.to_json()) == r
    # with contraction flags attached
    flagged = [PathRecord(**{**r.__dict__, "contraction_pass": tuple(True for _ in r.corner_offsets)}) for r in recs]
    assert all(PathRecord.from_json(r.to_json()) == r for r in flagged)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
