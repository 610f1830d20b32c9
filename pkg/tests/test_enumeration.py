import csv
import io

import pytest

from edgepattern.edge_path import canonical_keys, path_validate
from edgepattern.enumeration import (
    BENCH_COLUMNS,
    EnumerationBudget,
    benchmark,
    cross_check,
    rows_to_csv,
    tier1_brute_force,
    tier2_path_growing,
    tier3_tree_enumeration,
    tier_paths,
)
from edgepattern.geometry import board_spec
from edgepattern.grid_graph import build_grid_graph, is_spanning_tree


def test_budget_validation():
    with pytest.raises(ValueError):
        EnumerationBudget(max_candidates=0)
    with pytest.raises(ValueError):
        EnumerationBudget(max_wall_time=-1)


@pytest.mark.parametrize("n,candidates,solutions", [(2, 16, 1), (4, 65536, 4)])
def test_tier1_counts(n, candidates, solutions):
    run = tier1_brute_force(board_spec(n))
    paths = run.collect()
    assert run.result.candidates_examined == candidates
    assert run.result.solutions == len(paths) == solutions
    assert run.result.complete and not run.result.aborted
    assert all(path_validate(p).ok for p in paths)


def test_tier1_aborts_without_partial_output():
    run = tier1_brute_force(board_spec(4), EnumerationBudget(max_candidates=1000))
    assert run.collect() == []
    assert run.result.aborted and not run.result.complete
    assert "max_candidates" in run.result.reason


def test_tier1_time_abort_discards_buffered_solutions():
    run = tier1_brute_force(board_spec(4), EnumerationBudget(max_wall_time=1e-9), chunk=256)
    assert run.collect() == []
    assert run.result.aborted
    assert 0 < run.result.candidates_examined < 65536


@pytest.mark.parametrize("n,leaves,solutions", [(4, 16, 4), (6, 4096, 192)])
def test_tier2_without_pruning_threads_every_leaf(n, leaves, solutions):
    run = tier2_path_growing(board_spec(n), prune=False)
    run.drain()
    assert run.result.candidates_examined == leaves
    assert run.result.solutions == solutions


def test_tier2_pruning_only_removes_failures():
    spec = board_spec(6)
    full = canonical_keys(tier2_path_growing(spec, prune=False), 6)
    pruned_run = tier2_path_growing(spec)
    pruned = canonical_keys(pruned_run, 6)
    assert sorted(full) == sorted(pruned)
    assert pruned_run.result.candidates_examined == 192


def test_tier2_budget_abort():
    run = tier2_path_growing(board_spec(6), prune=False, budget=EnumerationBudget(max_candidates=100))
    run.drain()
    assert run.result.aborted
    assert run.result.solutions < 192


def test_tier3_trees_are_distinct_spanning_trees():
    spec = board_spec(6)
    g = build_grid_graph(spec)
    masks = [t.mask for t in tier3_tree_enumeration(spec)]
    assert len(masks) == len(set(masks)) == 192
    assert all(is_spanning_tree(g, m) for m in masks)


def test_tier3_count_only_and_budget():
    run = tier3_tree_enumeration(board_spec(10), count_only=True)
    assert run.collect() == []
    assert run.result.solutions == 557568000
    run = tier3_tree_enumeration(board_spec(8), budget=EnumerationBudget(max_candidates=50))
    assert len(run.collect()) == 50
    assert run.result.aborted


def test_tier_run_is_single_use():
    run = tier3_tree_enumeration(board_spec(4))
    run.drain()
    with pytest.raises(RuntimeError):
        run.drain()


def test_tier_paths_rejects_unknown_tier():
    with pytest.raises(ValueError):
        tier_paths(board_spec(4), 5)


def test_cross_check_small():
    rep = cross_check(board_spec(4))
    assert rep.ok
    assert rep.counts == {1: 4, 2: 4, 3: 4}
    assert rep.orbits == {1: 1, 2: 1, 3: 1}
    rep6 = cross_check(board_spec(6))
    assert rep6.ok and rep6.counts == {2: 192, 3: 192} and rep6.orbits[3] == 28


def test_benchmark_csv():
    budget = EnumerationBudget()
    rows = benchmark(board_spec(2), (1, 2, 3), budget) + benchmark(board_spec(6), (1,), budget)
    text = rows_to_csv(rows)
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert tuple(parsed[0].keys()) == BENCH_COLUMNS
    assert parsed[0]["candidates"] == "16" and parsed[0]["solutions"] == "1"
    assert parsed[-1]["aborted"] == "true" and parsed[-1]["solutions"] == "0"


def test_benchmark_counts_large_tier3():
    rows = benchmark(board_spec(10), (3,), EnumerationBudget())
    assert rows[0]["solutions"] == 557568000
