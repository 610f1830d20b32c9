"""Three enumerators of generalized edge patterns, from brute force to trees.

* tier 1 tries every diagonal choice per square (2 ** n**2 candidates);
* tier 2 grows the loop junction by junction with backtracking
  (2 ** (n**2/2 - n) leaves at most);
* tier 3 enumerates spanning trees of the coarse grid graph.

Each tier returns a :class:`TierRun`: iterate it to pull solutions, then read
``run.result``.
"""

from __future__ import annotations

import csv
import io
import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

import numpy as np

from .edge_path import EdgePath, Step, canonical_keys, thread_loops, tree_to_path
from .geometry import BoardSpec
from .grid_graph import SpanningTree, build_grid_graph, kirchhoff_count


@dataclass(frozen=True)
class EnumerationBudget:
    """Limits on candidates examined and on elapsed time since the run started.

    The time limit counts consumer time too, so a slow consumer can trip it.
    """

    max_candidates: int = 1 << 24
    max_wall_time: float = 60.0

    def __post_init__(self):
        if self.max_candidates <= 0 or self.max_wall_time <= 0:
            raise ValueError("budget values must be positive")


DEFAULT_BUDGET = EnumerationBudget()


class _BudgetExceeded(Exception):
    pass


class _BudgetGuard:
    """Raises :class:`_BudgetExceeded` once a candidate or time limit is passed."""

    def __init__(self, res: "TierResult", budget: EnumerationBudget | None):
        self.res = res
        self.budget = budget
        self.t0 = time.perf_counter()

    def tick(self) -> None:
        b = self.budget
        if b is None:
            return
        c = self.res.candidates_examined
        if c > b.max_candidates:
            self.res.reason = f"candidates exceed max_candidates={b.max_candidates}"
        elif c % 1024 == 0 and time.perf_counter() - self.t0 > b.max_wall_time:
            self.res.reason = f"wall time exceeded {b.max_wall_time}s"
        else:
            return
        self.res.aborted = True
        raise _BudgetExceeded


@dataclass
class TierResult:
    tier: int
    n: int
    candidates_examined: int = 0
    solutions: int = 0
    wall_time: float = 0.0
    aborted: bool = False
    reason: str = ""
    complete: bool = False


class TierRun:
    """Pull-based stream of solutions with a result record filled as it runs."""

    def __init__(self, result: TierResult, gen_factory: Callable[[TierResult], Iterator]):
        self.result = result
        self._factory = gen_factory
        self._started = False

    def __iter__(self):
        if self._started:
            raise RuntimeError("a TierRun can only be iterated once")
        self._started = True
        gen = self._factory(self.result)
        clock = time.perf_counter
        # wall_time counts producer time only, not time spent by the consumer
        while True:
            t0 = clock()
            try:
                item = next(gen)
            except StopIteration:
                self.result.wall_time += clock() - t0
                break
            self.result.wall_time += clock() - t0
            self.result.solutions += 1
            yield item
        self.result.complete = not self.result.aborted

    def collect(self) -> list:
        return list(self)

    def drain(self) -> TierResult:
        for _ in self:
            pass
        return self.result


# --- tier 1 ---------------------------------------------------------------


def _point_index(x: int, y: int, n: int) -> int:
    return y * (n + 1) + x


def _diagonal_endpoints(i: int, j: int, bit: int, n: int) -> tuple[int, int]:
    # bit 0: the (i, j)-(i+1, j+1) diagonal, bit 1: the (i+1, j)-(i, j+1) one
    if bit == 0:
        return _point_index(i, j, n), _point_index(i + 1, j + 1, n)
    return _point_index(i + 1, j, n), _point_index(i, j + 1, n)


def _degree_filter(n: int, start: int, stop: int) -> np.ndarray:
    """Assignments in [start, stop) whose every lattice point has even degree."""
    L = n * n
    a = np.arange(start, stop, dtype=np.uint64)
    bits = ((a[:, None] >> np.arange(L, dtype=np.uint64)) & np.uint64(1)).astype(np.int8)
    deg = np.zeros((len(a), (n + 1) ** 2), dtype=np.int8)
    for s in range(L):
        i, j = s % n, s // n
        b = bits[:, s]
        p0, p1 = _diagonal_endpoints(i, j, 0, n)
        q0, q1 = _diagonal_endpoints(i, j, 1, n)
        deg[:, p0] += 1 - b
        deg[:, p1] += 1 - b
        deg[:, q0] += b
        deg[:, q1] += b
    ok = np.all(deg % 2 == 0, axis=1)
    return a[ok]


def _single_loop_threadings(n: int, assignment: int) -> list[EdgePath]:
    """All non-crossing threadings of a segment set that form one loop.

    At degree-4 points both non-crossing pairings are tried; the crossing
    pairing of opposite arms is never allowed.
    """
    L = n * n
    arms: dict[tuple[int, int], list[tuple[int, int, int, int]]] = {}
    for s in range(L):
        i, j = s % n, s // n
        if assignment >> s & 1:
            a, b = (i + 1, j), (i, j + 1)
        else:
            a, b = (i, j), (i + 1, j + 1)
        arms.setdefault(a, []).append((s, b[0] - a[0], b[1] - a[1], 0))
        arms.setdefault(b, []).append((s, a[0] - b[0], a[1] - b[1], 1))
    quad = sorted(p for p, lst in arms.items() if len(lst) == 4)
    results = []
    for choice in itertools.product((0, 1), repeat=len(quad)):
        partner: dict[tuple[tuple[int, int], int], int] = {}
        for p, lst in arms.items():
            if len(lst) == 2:
                partner[(p, lst[0][0])] = lst[1][0]
                partner[(p, lst[1][0])] = lst[0][0]
        for p, c in zip(quad, choice):
            by_dir = {(dx, dy): s for s, dx, dy, _ in arms[p]}
            ne, nw, sw, se = by_dir[(1, 1)], by_dir[(-1, 1)], by_dir[(-1, -1)], by_dir[(1, -1)]
            pairs = ((ne, nw), (sw, se)) if c == 0 else ((ne, se), (nw, sw))
            for u, v in pairs:
                partner[(p, u)] = v
                partner[(p, v)] = u
        # walk from square 0
        ends = {}
        for p, lst in arms.items():
            for s, _, _, _ in lst:
                ends.setdefault(s, []).append(p)
        s0 = 0
        p_from = ends[0][0]
        steps = []
        seen = set()
        s = s0
        while s not in seen:
            seen.add(s)
            a, b = ends[s]
            p_to = b if a == p_from else a
            i, j = s % n, s // n
            steps.append(Step(i, j, p_to[0] - p_from[0], p_to[1] - p_from[1]))
            s = partner[(p_to, s)]
            p_from = p_to
        if len(steps) == L:
            results.append(EdgePath(n, tuple(steps)).normalized())
    return results


def tier1_brute_force(spec: BoardSpec, budget: EnumerationBudget = DEFAULT_BUDGET, chunk: int = 1 << 14) -> TierRun:
    """Every diagonal assignment, an even-degree pre-filter, then a threading search.

    Solutions are held back until the run completes, so an aborted run never
    emits a partial solution set.
    """
    n = spec.n
    total = 1 << (n * n)
    res = TierResult(tier=1, n=n)

    def gen(res: TierResult):
        if total > budget.max_candidates:
            res.aborted = True
            res.reason = f"2^{n * n} candidates exceed max_candidates={budget.max_candidates}"
            return
        t0 = time.perf_counter()
        found: list[EdgePath] = []
        for start in range(0, total, chunk):
            stop = min(total, start + chunk)
            for a in _degree_filter(n, start, stop):
                found.extend(_single_loop_threadings(n, int(a)))
            res.candidates_examined = stop
            if time.perf_counter() - t0 > budget.max_wall_time:
                res.aborted = True
                res.reason = f"wall time exceeded {budget.max_wall_time}s"
                return
        yield from found

    return TierRun(res, gen)


# --- tier 2 ---------------------------------------------------------------


def tier2_path_growing(spec: BoardSpec, prune: bool = True, budget: EnumerationBudget | None = None) -> TierRun:
    """Depth-first decisions on junction states, then threading at each leaf.

    A Link decision that closes a cycle of linked cells encloses a hole, i.e.
    a second loop, and is pruned.  With ``prune`` a group of cells whose
    junctions are all decided without reaching every cell has closed a
    premature loop and is pruned too.  ``candidates_examined`` counts complete
    junction configurations that were threaded.
    """
    n = spec.n
    g = build_grid_graph(spec)
    arcs = g.arcs
    E = len(arcs)
    nu = spec.nu
    res = TierResult(tier=2, n=n)

    def gen(res: TierResult):
        guard = _BudgetGuard(res, budget)
        parent = list(range(nu))
        size = [1] * nu
        free = [0] * nu  # undecided junctions touching each cell group
        for a, b in arcs:
            free[a] += 1
            free[b] += 1

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        def rec(k: int, mask: int):
            if k == E:
                res.candidates_examined += 1
                guard.tick()
                loops = thread_loops(spec, mask)
                if len(loops) == 1:
                    yield EdgePath(n, tuple(loops[0]))
                return
            a, b = arcs[k]
            ra, rb = find(a), find(b)
            # Link
            if ra != rb:
                if size[ra] > size[rb]:
                    ra, rb = rb, ra
                fa, fb = free[ra], free[rb]
                parent[ra] = rb
                size[rb] += size[ra]
                free[rb] = fa + fb - 2
                if not (prune and free[rb] == 0 and size[rb] < nu):
                    yield from rec(k + 1, mask | (1 << k))
                parent[ra] = ra
                size[rb] -= size[ra]
                free[ra], free[rb] = fa, fb
            elif not prune:
                yield from rec(k + 1, mask | (1 << k))
            # Cut
            ra, rb = find(a), find(b)
            free[ra] -= 1
            free[rb] -= 1
            closed = prune and (
                (free[ra] == 0 and size[ra] < nu) or (free[rb] == 0 and size[rb] < nu)
            )
            if not closed:
                yield from rec(k + 1, mask)
            free[ra] += 1
            free[rb] += 1

        if E == 0:
            res.candidates_examined = 1
            yield EdgePath(n, tuple(thread_loops(spec, 0)[0]))
            return
        try:
            yield from rec(0, 0)
        except _BudgetExceeded:
            return

    return TierRun(res, gen)


# --- tier 3 ---------------------------------------------------------------


def _grow_trees(nu: int, arcs: tuple[tuple[int, int], ...]) -> Iterator[int]:
    """Spanning trees as arc bitmasks by backtracking growth from vertex 0.

    The tree grows one frontier arc at a time; after a branch is exhausted
    its arc is excluded, and the loop stops once that exclusion would leave
    the remaining graph disconnected.  Every call emits at least one tree.
    """
    adj: list[list[tuple[int, int]]] = [[] for _ in range(nu)]
    for k, (a, b) in enumerate(arcs):
        adj[a].append((k, b))
        adj[b].append((k, a))
    full = (1 << nu) - 1

    def reachable(excluded: int) -> bool:
        seen = 1
        stack = [0]
        while stack:
            v = stack.pop()
            for k, w in adj[v]:
                if not (excluded >> k & 1) and not (seen >> w & 1):
                    seen |= 1 << w
                    stack.append(w)
        return seen == full

    def grow(frontier: list[int], inside: int, tree: int, count: int, excluded: int):
        if count == nu - 1:
            yield tree
            return
        frontier = list(frontier)
        while frontier:
            k = frontier.pop()
            a, b = arcs[k]
            v = b if inside >> a & 1 else a
            new_inside = inside | (1 << v)
            nf = [f for f in frontier if not (new_inside >> arcs[f][0] & 1 and new_inside >> arcs[f][1] & 1)]
            for k2, w in adj[v]:
                if not (new_inside >> w & 1) and not (excluded >> k2 & 1):
                    nf.append(k2)
            yield from grow(nf, new_inside, tree | (1 << k), count + 1, excluded)
            excluded |= 1 << k
            if not reachable(excluded):
                return

    if nu == 1:
        yield 0
        return
    start = [k for k, _ in adj[0]]
    yield from grow(start, 1, 0, 0, 0)


def tier3_tree_enumeration(spec: BoardSpec, count_only: bool = False,
                           budget: EnumerationBudget | None = None) -> TierRun:
    """Every spanning tree of the grid graph, exactly once.

    With ``count_only`` nothing is streamed and the matrix-tree count is
    reported as the solution count (used for boards too large to list).
    """
    g = build_grid_graph(spec)
    res = TierResult(tier=3, n=spec.n)

    if count_only:
        def gen_count(res: TierResult):
            res.solutions = kirchhoff_count(g)
            return
            yield

        return TierRun(res, gen_count)

    def gen(res: TierResult):
        guard = _BudgetGuard(res, budget)
        try:
            for mask in _grow_trees(g.nu, g.arcs):
                res.candidates_examined += 1
                guard.tick()
                yield SpanningTree(spec.n, mask)
        except _BudgetExceeded:
            return

    return TierRun(res, gen)


# --- cross check and benchmark --------------------------------------------


class CrossCheckError(AssertionError):
    pass


@dataclass
class CrossCheckReport:
    n: int
    kirchhoff: int
    counts: dict[int, int] = field(default_factory=dict)
    orbits: dict[int, int] = field(default_factory=dict)
    key_sets_equal: bool = True
    first_difference: str | None = None

    @property
    def ok(self) -> bool:
        return self.key_sets_equal and all(c == self.kirchhoff for c in self.counts.values())


def tier_paths(spec: BoardSpec, tier: int, budget: EnumerationBudget = DEFAULT_BUDGET) -> tuple[TierRun, Iterator[EdgePath]]:
    """A tier run plus an iterator over its solutions as paths."""
    if tier == 1:
        run = tier1_brute_force(spec, budget)
        return run, iter(run)
    if tier == 2:
        run = tier2_path_growing(spec, budget=budget)
        return run, iter(run)
    if tier == 3:
        run = tier3_tree_enumeration(spec, budget=budget)
        return run, (tree_to_path(t, spec) for t in run)
    raise ValueError(f"unknown tier {tier}")


def cross_check(spec: BoardSpec, tiers: Iterable[int] | None = None,
                budget: EnumerationBudget = DEFAULT_BUDGET) -> CrossCheckReport:
    """Compare solution counts and canonical key multisets across tiers."""
    if tiers is None:
        tiers = (1, 2, 3) if spec.n <= 4 else (2, 3)
    rep = CrossCheckReport(n=spec.n, kirchhoff=kirchhoff_count(build_grid_graph(spec)))
    key_sets = {}
    for t in tiers:
        run, paths = tier_paths(spec, t, budget)
        keys = canonical_keys(paths, spec.n)
        if run.result.aborted:
            raise CrossCheckError(f"tier {t} aborted: {run.result.reason}")
        rep.counts[t] = len(keys)
        rep.orbits[t] = len(set(keys))
        # each loop once per tier: a path's own normalized form is unique
        key_sets[t] = sorted(keys)
    ref_tier = min(key_sets)
    ref = key_sets[ref_tier]
    for t, ks in key_sets.items():
        if ks != ref:
            rep.key_sets_equal = False
            a, b = set(ref), set(ks)
            diff = sorted(a ^ b) or [k for k, k2 in zip(ref, ks) if k != k2]
            rep.first_difference = diff[0].hex() if diff else f"multiplicities differ (tier {ref_tier} vs {t})"
            break
    return rep


BENCH_COLUMNS = ("n", "tier", "candidates", "solutions", "seconds", "aborted")


def benchmark(spec: BoardSpec, tiers: Iterable[int], budget: EnumerationBudget = DEFAULT_BUDGET) -> list[dict]:
    """One row per tier.  Tier 3 falls back to counting when listing would exceed the budget."""
    rows = []
    for t in tiers:
        if t == 3:
            too_many = kirchhoff_count(build_grid_graph(spec)) > budget.max_candidates
            run = tier3_tree_enumeration(spec, count_only=too_many, budget=budget)
        elif t == 2:
            run = tier2_path_growing(spec, budget=budget)
        else:
            run = tier1_brute_force(spec, budget)
        res = run.drain()
        rows.append(
            {
                "n": spec.n,
                "tier": t,
                "candidates": res.candidates_examined,
                "solutions": res.solutions,
                "seconds": f"{res.wall_time:.6f}",
                "aborted": str(res.aborted).lower(),
            }
        )
    return rows


def rows_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()
