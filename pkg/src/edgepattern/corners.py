"""Corner placement and the contraction condition on the folded boundary.

The unfolded sheet is a square of side n**2 / 2.  Each path step consumes two
units of its perimeter: arclength 2k is the start vertex of step k and 2k+1
the apex of its flap, which sits on one of the two off-diagonal corners of
the step's board square depending on the flap state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .edge_path import EdgePath, canonical_forms, path_to_tree
from .geometry import BoardSpec, ParityClass, Symmetry, board_spec, classify_point, square_corners
from .grid_graph import SpanningTree, build_grid_graph

AXIS_MIRRORS = (Symmetry.MIRROR_H, Symmetry.MIRROR_V)


class CornerPlacement(NamedTuple):
    offset: int
    corner_steps: tuple[int, int, int, int]


def corner_feasible_at(p: EdgePath, i: int) -> bool:
    """Switchback test: the steps around step i run in opposite directions."""
    steps = p.steps
    L = len(steps)
    a, b = steps[(i - 1) % L], steps[(i + 1) % L]
    return a.dx == -b.dx and a.dy == -b.dy


def placement_at(p: EdgePath, offset: int) -> CornerPlacement:
    q = len(p.steps) // 4
    return CornerPlacement(offset, tuple(offset + k * q for k in range(4)))


def enumerate_corner_placements(p: EdgePath) -> list[CornerPlacement]:
    L = len(p.steps)
    if L % 4:
        raise ValueError(f"path length {L} is not a multiple of 4")
    q = L // 4
    ok = [corner_feasible_at(p, i) for i in range(L)]
    return [placement_at(p, o) for o in range(q) if all(ok[o + k * q] for k in range(4))]


def corner_offsets_array(cd: np.ndarray) -> list[tuple[int, ...]]:
    """Feasible placement offsets per row of a (P, L) direction-code array.

    Opposite directions differ by 2 in code, so a switchback at step i is
    ``cd[i-1] ^ cd[i+1] == 2``.
    """
    P, L = cd.shape
    if L % 4:
        raise ValueError(f"path length {L} is not a multiple of 4")
    ok = (np.roll(cd, 1, axis=1) ^ np.roll(cd, -1, axis=1)) == 2
    good = ok.reshape(P, 4, L // 4).all(axis=1)
    return [tuple(int(o) for o in np.flatnonzero(row)) for row in good]


def degenerate_corners(n: int) -> bool:
    """True when the four corner steps would be consecutive on the path (n = 2).

    Such a board has no side mechanism between corners and is left out of
    the corner-feasible corpus.
    """
    return n * n // 4 < 2


def corner_survivors(paths: Iterable[EdgePath]) -> list[tuple[EdgePath, list[CornerPlacement]]]:
    """Paths with at least one corner placement, with those placements."""
    out = []
    for p in paths:
        if degenerate_corners(p.n):
            continue
        pl = enumerate_corner_placements(p)
        if pl:
            out.append((p, pl))
    return out


@dataclass
class SelfSymmetryResult:
    # fixed by exactly one axis mirror and nothing else
    axis_symmetric: list[EdgePath] = field(default_factory=list)
    # any other nontrivial stabilizer, including both axis mirrors at once
    other: list[tuple[EdgePath, tuple[Symmetry, ...]]] = field(default_factory=list)


SELF_SYMMETRY_LABELS = ("none", "horizontal", "vertical", "other")
AXIS_SYMMETRY_LABELS = ("horizontal", "vertical")


def self_symmetry_label(stab: Sequence[Symmetry]) -> str:
    """``horizontal`` or ``vertical`` when that mirror is the only nontrivial symmetry."""
    nontrivial = [s for s in stab if s is not Symmetry.IDENTITY]
    if not nontrivial:
        return "none"
    if nontrivial == [Symmetry.MIRROR_H]:
        return "horizontal"
    if nontrivial == [Symmetry.MIRROR_V]:
        return "vertical"
    return "other"


def filter_self_symmetric(paths: Sequence[EdgePath], n: int) -> SelfSymmetryResult:
    res = SelfSymmetryResult()
    if not paths:
        return res
    _, stabs = canonical_forms(list(paths), n)
    for p, stab in zip(paths, stabs):
        label = self_symmetry_label(stab)
        if label in AXIS_SYMMETRY_LABELS:
            res.axis_symmetric.append(p)
        elif label == "other":
            res.other.append((p, stab))
    return res


def is_line_tree(t: SpanningTree, spec: BoardSpec | None = None) -> bool:
    """Tree is a single line: exactly two leaves (a Hamiltonian path)."""
    g = build_grid_graph(spec or board_spec(t.n))
    return t.leaf_count(g) == 2


def filter_line_trees(paths: Iterable[EdgePath], n: int) -> list[EdgePath]:
    spec = board_spec(n)
    out = []
    for p in paths:
        if degenerate_corners(n) or not enumerate_corner_placements(p):
            continue
        if is_line_tree(path_to_tree(p, spec), spec):
            out.append(p)
    return out


# --- folded boundary and contraction --------------------------------------


def unfolded_boundary(n: int) -> np.ndarray:
    """Integer points at arclength u = 0 .. 2n^2-1 on the square of side n^2/2."""
    side = n * n // 2
    pts = []
    for u in range(4 * side):
        k, r = divmod(u, side)
        pts.append(((r, 0), (side, r), (side - r, side), (0, side - r))[k])
    return np.array(pts, dtype=np.int64)


@dataclass(frozen=True)
class FoldedBoundaryLayout:
    """Tracked boundary points, indexed by path arclength t.

    ``folded[t]`` holds two candidate positions (identical for even t) and
    ``unfolded[t]`` the position of the same point on the flat sheet.
    """

    n: int
    placement: CornerPlacement
    folded: np.ndarray  # (2 n^2, 2, 2)
    unfolded: np.ndarray  # (2 n^2, 2)

    @property
    def corner_arclengths(self) -> tuple[int, ...]:
        return tuple(2 * s + 1 for s in self.placement.corner_steps)


def folded_layout(p: EdgePath, c: CornerPlacement | int, allow_infeasible: bool = False) -> FoldedBoundaryLayout:
    """Map each tracked arclength to its folded candidates and unfolded point.

    The sheet corners are pinned to the flap apexes of the four corner steps.
    """
    n = p.n
    L = len(p.steps)
    if isinstance(c, int):
        c = placement_at(p, c)
    if not allow_infeasible and not all(corner_feasible_at(p, s) for s in c.corner_steps):
        raise ValueError(f"corner placement at offset {c.offset} is not feasible")
    folded = np.zeros((2 * L, 2, 2), dtype=np.int64)
    for k, st in enumerate(p.steps):
        a, b = st.start, st.end
        folded[2 * k, :] = (a.x, a.y)
        off = [q for q in square_corners((st.i, st.j)) if q != a and q != b]
        # odd-odd corner first, then even-even
        off.sort(key=lambda q: classify_point(q) is not ParityClass.ODD_ODD)
        folded[2 * k + 1, 0] = off[0]
        folded[2 * k + 1, 1] = off[1]
    shift = 2 * c.offset + 1
    unf = unfolded_boundary(n)
    unfolded = unf[(np.arange(2 * L) - shift) % (2 * L)]
    return FoldedBoundaryLayout(n=n, placement=c, folded=folded, unfolded=unfolded)


class WorstPair(NamedTuple):
    t_i: int
    t_j: int
    unfolded_sq: int
    folded_sq: int

    @property
    def unfolded(self) -> float:
        return float(np.sqrt(self.unfolded_sq))

    @property
    def folded(self) -> float:
        return float(np.sqrt(self.folded_sq))


@dataclass
class ContractionReport:
    passed: bool
    comparisons_performed: int
    worst_pair: WorstPair | None
    violations: list[WorstPair]


def max_folded_sq(folded: np.ndarray) -> np.ndarray:
    """Largest squared folded distance per pair over all flap-state combinations."""
    diff = folded[:, None, :, None, :] - folded[None, :, None, :, :]
    return (diff * diff).sum(axis=-1).max(axis=(2, 3))


def pair_sq(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return (diff * diff).sum(axis=-1)


def comparisons_for(n: int) -> int:
    """Distance comparisons made by :func:`contraction_check`: (9n^4 - 5n^2)/2."""
    L = n * n
    return (9 * L * L - 5 * L) // 2


def contraction_check(layout: FoldedBoundaryLayout, spec: BoardSpec | None = None,
                      folded_sq: np.ndarray | None = None) -> ContractionReport:
    """Every tracked pair must be at least as far apart unfolded as folded.

    Squared distances are integers, so the comparison is exact.  The worst
    pair maximizes folded/unfolded distance; ``folded_sq`` lets callers reuse
    :func:`max_folded_sq` across placements of one path.
    """
    n = layout.n
    D = max_folded_sq(layout.folded) if folded_sq is None else folded_sq
    U = pair_sq(layout.unfolded)
    M = len(U)
    iu, ju = np.triu_indices(M, k=1)
    d, u = D[iu, ju], U[iu, ju]
    bad = np.flatnonzero(d > u)
    violations = [WorstPair(int(iu[k]), int(ju[k]), int(u[k]), int(d[k])) for k in bad]
    # unfolded distance is positive for distinct boundary points
    ratio = d / u
    top = np.flatnonzero(ratio == ratio.max())
    # float ties resolved exactly by cross-multiplication
    best = top[0]
    for k in top[1:]:
        if d[k] * u[best] > d[best] * u[k]:
            best = k
    worst = WorstPair(int(iu[best]), int(ju[best]), int(u[best]), int(d[best]))
    return ContractionReport(
        passed=not violations,
        comparisons_performed=comparisons_for(n),
        worst_pair=worst,
        violations=violations,
    )


def contraction_verdicts(p: EdgePath, placements: Sequence[CornerPlacement]) -> list[bool]:
    """Pass/fail per placement, sharing the folded distance matrix."""
    if not placements:
        return []
    first = folded_layout(p, placements[0])
    D = max_folded_sq(first.folded)
    out = []
    for c in placements:
        lay = first if c == placements[0] else folded_layout(p, c)
        out.append(contraction_check(lay, folded_sq=D).passed)
    return out


def staircase_counterexample(n: int = 6) -> tuple[EdgePath, FoldedBoundaryLayout]:
    """First enumerated path with a placement where exactly one corner is a staircase.

    The other three corners are switchbacks, so any contraction failure comes
    from the staircase corner alone.
    """
    from .edge_path import tree_to_path
    from .enumeration import tier3_tree_enumeration

    spec = board_spec(n)
    q = spec.squares // 4
    for t in tier3_tree_enumeration(spec):
        p = tree_to_path(t, spec)
        ok = [corner_feasible_at(p, i) for i in range(len(p.steps))]
        for o in range(q):
            flags = [ok[o + k * q] for k in range(4)]
            if flags.count(False) == 1:
                return p, folded_layout(p, o, allow_infeasible=True)
    raise ValueError(f"no single-staircase placement for n={n}")


def comparison_count_formula(spec: BoardSpec) -> int:
    """The published comparison count (19/2)n^4 - (15/2)n^2 - 2 for even n."""
    n = spec.n
    return (19 * n**4 - 15 * n**2) // 2 - 2
