"""Fine-scale generalized edge patterns.

Every board square carries one fixed diagonal, the one joining its two
mixed-parity corners.  Traversed counterclockwise (interior on the left) each
diagonal has a fixed direction: the odd-odd corner of its square lies on the
left.  A loop is then fully described by the turn taken at every mixed point:

* boundary points have exactly two segments and always turn left;
* an interior junction turns right when the two adjacent diamond cells are
  linked (the grid-graph arc through it is in the tree) and left when cut.

Direction codes follow the counterclockwise order of the four diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .geometry import (
    SYMMETRIES,
    BoardSpec,
    LatticePoint,
    ParityClass,
    SquareId,
    Symmetry,
    board_spec,
    classify_point,
    interior_junctions,
    square_corners,
)
from .grid_graph import SpanningTree

DIRECTIONS: tuple[tuple[int, int], ...] = ((1, 1), (-1, 1), (-1, -1), (1, -1))
DIRECTION_CODE = {d: k for k, d in enumerate(DIRECTIONS)}


class Step(NamedTuple):
    """Traversal of the diagonal of square (i, j) along direction (dx, dy)."""

    i: int
    j: int
    dx: int
    dy: int

    @property
    def square(self) -> SquareId:
        return SquareId(self.i, self.j)

    @property
    def direction(self) -> tuple[int, int]:
        return self.dx, self.dy

    @property
    def start(self) -> LatticePoint:
        return LatticePoint(self.i if self.dx > 0 else self.i + 1, self.j if self.dy > 0 else self.j + 1)

    @property
    def end(self) -> LatticePoint:
        s = self.start
        return LatticePoint(s.x + self.dx, s.y + self.dy)

    def reversed(self) -> Step:
        return Step(self.i, self.j, -self.dx, -self.dy)


class LoopCountError(ValueError):
    """Threading a junction configuration did not produce exactly one loop."""

    def __init__(self, loop_count: int):
        super().__init__(f"threading produced {loop_count} loops, expected 1")
        self.loop_count = loop_count


class MalformedPathError(ValueError):
    pass


def square_index(i: int, j: int, n: int) -> int:
    return j * n + i


def _cross(a: tuple[int, int], b: tuple[int, int]) -> int:
    return a[0] * b[1] - a[1] * b[0]


@dataclass(frozen=True)
class EdgePath:
    """Cyclic sequence of steps; ``steps[k].end`` should equal ``steps[k+1].start``."""

    n: int
    steps: tuple[Step, ...]

    def __post_init__(self):
        steps = self.steps
        if not (type(steps) is tuple and all(type(s) is Step for s in steps)):
            object.__setattr__(self, "steps", tuple(Step(*s) for s in steps))

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def vertices(self) -> list[LatticePoint]:
        return [s.start for s in self.steps]

    @property
    def directions(self) -> list[tuple[int, int]]:
        return [(s.dx, s.dy) for s in self.steps]

    def doubled_area(self) -> int:
        """Twice the signed area enclosed (positive when counterclockwise)."""
        total = 0
        for s in self.steps:
            a, b = s.start, s.end
            total += a.x * b.y - b.x * a.y
        return total

    def reversed(self) -> EdgePath:
        return EdgePath(self.n, tuple(s.reversed() for s in reversed(self.steps)))

    def rotated(self, k: int) -> EdgePath:
        k %= max(len(self.steps), 1)
        return EdgePath(self.n, self.steps[k:] + self.steps[:k])

    def normalized(self) -> EdgePath:
        """Counterclockwise, starting at the step with the smallest square index."""
        p = self if self.doubled_area() >= 0 else self.reversed()
        n = self.n
        k = min(range(len(p.steps)), key=lambda t: square_index(p.steps[t].i, p.steps[t].j, n))
        return p.rotated(k)

    def transformed(self, s: Symmetry) -> EdgePath:
        return EdgePath(self.n, tuple(_transform_step(st, s, self.n) for st in self.steps))

    @classmethod
    def from_key(cls, key: bytes, n: int) -> EdgePath:
        """Decode a canonical key back into the path it encodes."""
        values = np.frombuffer(key, dtype=">u2").astype(np.int64)
        steps = []
        for v in values:
            sq, code = divmod(int(v), 4)
            j, i = divmod(sq, n)
            dx, dy = DIRECTIONS[code]
            steps.append(Step(i, j, dx, dy))
        return cls(n, tuple(steps))


def _transform_step(st: Step, s: Symmetry, n: int) -> Step:
    u, v = s.apply_vector((2 * st.i + 1 - n, 2 * st.j + 1 - n))
    dx, dy = s.apply_vector((st.dx, st.dy))
    return Step((u + n - 1) // 2, (v + n - 1) // 2, dx, dy)


def square_segment(sq: tuple[int, int], n: int | None = None) -> tuple[LatticePoint, LatticePoint]:
    """The fixed diagonal of a square, oriented counterclockwise.

    It joins the two mixed-parity corners, so it avoids the odd-odd and the
    even-even corner; the odd-odd corner lies on its left.
    """
    i, j = sq
    if n is not None and not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"square {tuple(sq)} outside the {n}x{n} board")
    st = ccw_step(i, j)
    return st.start, st.end


def ccw_step(i: int, j: int) -> Step:
    corners = square_corners((i, j))
    odd = next(c for c in corners if classify_point(c) is ParityClass.ODD_ODD)
    for dx, dy in DIRECTIONS:
        st = Step(i, j, dx, dy)
        mid2 = (2 * i + 1, 2 * j + 1)
        # left normal of (dx, dy) is (-dy, dx); it points from the midpoint to a corner
        left = ((mid2[0] - dy) // 2, (mid2[1] + dx) // 2)
        if left == (odd.x, odd.y):
            return st
    raise AssertionError("unreachable")


@lru_cache(maxsize=None)
def _junction_table(n: int) -> dict[tuple[int, int], int]:
    return {(p.x, p.y): k for k, p in enumerate(interior_junctions(n))}


@lru_cache(maxsize=None)
def _transitions(n: int) -> tuple[tuple[Step, ...], tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Counterclockwise step per square index and the successor tables.

    For square s: the junction index at the end of its step (-1 on the board
    boundary), and the successor square when that junction is cut or linked.
    """
    junctions = _junction_table(n)
    steps = tuple(ccw_step(s % n, s // n) for s in range(n * n))
    jidx, succ_cut, succ_link = [], [], []
    for st in steps:
        x, y = st.end
        jidx.append(junctions.get((x, y), -1))
        for (dx, dy), out in (((-st.dy, st.dx), succ_cut), ((st.dy, -st.dx), succ_link)):
            i, j = (x if dx > 0 else x - 1), (y if dy > 0 else y - 1)
            out.append(j * n + i if 0 <= i < n and 0 <= j < n else -1)
    return steps, tuple(jidx), tuple(succ_cut), tuple(succ_link)


def thread_squares(spec: BoardSpec, link_mask: int) -> list[list[int]]:
    """Square-index sequences of the loops produced by a junction configuration.

    Bit k of ``link_mask`` links junction k (interior junctions in (x, y)
    order, which is also the grid-graph arc order).  A linked junction turns
    right, a cut one or a boundary point turns left.  Loops start from the
    smallest unvisited square.
    """
    n = spec.n
    _, jidx, succ_cut, succ_link = _transitions(n)
    L = n * n
    visited = bytearray(L)
    loops = []
    for s0 in range(L):
        if visited[s0]:
            continue
        loop = []
        s = s0
        while not visited[s]:
            visited[s] = 1
            loop.append(s)
            k = jidx[s]
            s = succ_link[s] if k >= 0 and link_mask >> k & 1 else succ_cut[s]
        loops.append(loop)
    return loops


def thread_loops(spec: BoardSpec, link_mask: int) -> list[list[Step]]:
    steps = _transitions(spec.n)[0]
    return [[steps[s] for s in loop] for loop in thread_squares(spec, link_mask)]


def tree_to_path(t: SpanningTree | int, spec: BoardSpec) -> EdgePath:
    mask = t.mask if isinstance(t, SpanningTree) else int(t)
    loops = thread_loops(spec, mask)
    if len(loops) != 1:
        raise LoopCountError(len(loops))
    return EdgePath(spec.n, tuple(loops[0]))


def path_to_tree(p: EdgePath, spec: BoardSpec | None = None, validate: bool = True) -> SpanningTree:
    """Recover junction states from the turns of a valid path.

    ``validate=False`` skips :func:`path_validate` for paths already known
    to be valid; threading consistency is still checked.
    """
    spec = spec or board_spec(p.n)
    if validate:
        report = path_validate(p, spec)
        if not report.ok:
            raise MalformedPathError("; ".join(report.violations()))
    junctions = _junction_table(spec.n)
    geo = _step_geometry(spec.n)
    steps = p.steps
    L = len(steps)
    ends, codes = [], []
    for st in steps:
        g = geo[st]
        ends.append(g[2])
        codes.append(g[3])
    # +1 per left turn, -1 per right turn; the total is +4 counterclockwise
    turns = [1 if (codes[(k + 1) % L] - codes[k]) % 4 == 1 else -1 for k in range(L)]
    right = -1 if sum(turns) > 0 else 1
    states: dict[int, bool] = {}
    for k in range(L):
        end = ends[k]
        jk = junctions.get(end)
        if jk is None:
            if turns[k] == right:
                raise MalformedPathError(f"right turn at boundary point {end}")
            continue
        linked = turns[k] == right
        if states.setdefault(jk, linked) != linked:
            raise MalformedPathError(f"inconsistent threading at junction {end}")
    mask = 0
    for k, linked in states.items():
        if linked:
            mask |= 1 << k
    return SpanningTree(spec.n, mask)


@dataclass
class ValidationReport:
    n_steps: int
    expected_steps: int
    out_of_range: list[int] = field(default_factory=list)
    closure_breaks: list[int] = field(default_factory=list)
    missing_squares: list[SquareId] = field(default_factory=list)
    repeated_squares: list[SquareId] = field(default_factory=list)
    loop_count: int = 0
    crossings: list[LatticePoint] = field(default_factory=list)
    aligned_steps: list[int] = field(default_factory=list)

    @property
    def closed(self) -> bool:
        return not self.closure_breaks

    @property
    def covers_all(self) -> bool:
        return not self.missing_squares and not self.repeated_squares and self.n_steps == self.expected_steps

    @property
    def single_loop(self) -> bool:
        return self.loop_count == 1

    @property
    def ok(self) -> bool:
        return not self.violations()

    def violations(self) -> list[str]:
        out = []
        if self.out_of_range:
            out.append(f"steps outside the board at {self.out_of_range}")
        if self.closure_breaks:
            out.append(f"not closed: breaks after steps {self.closure_breaks}")
        if not self.covers_all:
            out.append(
                f"coverage: {self.n_steps} steps for {self.expected_steps} squares, "
                f"missing {len(self.missing_squares)}, repeated {len(self.repeated_squares)}"
            )
        if self.loop_count != 1:
            out.append(f"single loop: found {self.loop_count} loops")
        if self.crossings:
            out.append(f"crossing at {[tuple(p) for p in self.crossings]}")
        if self.aligned_steps:
            out.append(f"aligned consecutive steps after {self.aligned_steps}")
        return out


def _between(a: int, b: int, x: int) -> bool:
    """x strictly inside the counterclockwise arc from a to b (codes mod 4)."""
    return 0 < (x - a) % 4 < (b - a) % 4


# two passages (a1, a2) and (b1, b2) through a point cross when their arms interleave
_CROSSES = [
    len({a1, a2, b1, b2}) == 4 and _between(a1, a2, b1) != _between(a1, a2, b2)
    for a1 in range(4)
    for a2 in range(4)
    for b1 in range(4)
    for b2 in range(4)
]


@lru_cache(maxsize=None)
def _step_geometry(n: int) -> dict[Step, tuple[int, tuple[int, int], tuple[int, int], int]]:
    """(square index, start, end, direction code) for every in-range step."""
    out = {}
    for j in range(n):
        for i in range(n):
            for c, (dx, dy) in enumerate(DIRECTIONS):
                st = Step(i, j, dx, dy)
                s = st.start
                out[st] = (j * n + i, (s.x, s.y), (s.x + dx, s.y + dy), c)
    return out


def path_validate(p: EdgePath, spec: BoardSpec | None = None) -> ValidationReport:
    """Check closure, coverage, single loop, non-crossing and right angles.

    Each violation kind is reported separately; nothing is raised.
    """
    spec = spec or board_spec(p.n)
    n = spec.n
    steps = p.steps
    L = len(steps)
    rep = ValidationReport(n_steps=L, expected_steps=n * n)
    geo = _step_geometry(n)
    info = [geo.get(s) for s in steps]
    seen = [0] * (n * n)
    for k, g in enumerate(info):
        if g is None:
            rep.out_of_range.append(k)
        else:
            seen[g[0]] += 1
    for s, c in enumerate(seen):
        if c == 0:
            rep.missing_squares.append(SquareId(s % n, s // n))
        elif c > 1:
            rep.repeated_squares.append(SquareId(s % n, s // n))
    if L == 0:
        return rep

    passages: dict[tuple[int, int], list[tuple[int, int]]] = {}
    prev = info[-1]
    for k in range(L):
        cur = info[k]
        kp = k - 1 if k else L - 1
        if prev is None or cur is None or prev[2] != cur[1]:
            rep.closure_breaks.append(kp)
        else:
            if (prev[3] - cur[3]) % 2 == 0:
                rep.aligned_steps.append(kp)
            pt = cur[1]
            # incoming arm points back along the previous step: code + 2 mod 4
            if pt in passages:
                passages[pt].append((prev[3] ^ 2, cur[3]))
            else:
                passages[pt] = [(prev[3] ^ 2, cur[3])]
        prev = cur
    rep.closure_breaks.sort()
    rep.aligned_steps.sort()
    for point, ps in passages.items():
        if len(ps) < 2:
            continue
        if any(
            _CROSSES[ps[u][0] * 64 + ps[u][1] * 16 + ps[v][0] * 4 + ps[v][1]]
            for u in range(len(ps))
            for v in range(u + 1, len(ps))
        ):
            rep.crossings.append(LatticePoint(*point))
    rep.crossings.sort()

    # loops: maximal runs between breaks that close on themselves
    breaks = rep.closure_breaks
    if not breaks:
        rep.loop_count = 1
    else:
        loops = 0
        for t, b in enumerate(breaks):
            start = (breaks[t - 1] + 1) % L
            if info[b] is not None and info[start] is not None and info[b][2] == info[start][1]:
                loops += 1
        rep.loop_count = loops
    return rep


def turn_word(p: EdgePath) -> str:
    """Letter k is the turn (L or R) from step k to step k+1."""
    steps = p.steps
    L = len(steps)
    out = []
    for k in range(L):
        a, b = steps[k], steps[(k + 1) % L]
        c = _cross((a.dx, a.dy), (b.dx, b.dy))
        if c == 0:
            raise MalformedPathError(f"steps {k} and {(k + 1) % L} are not perpendicular")
        out.append("L" if c > 0 else "R")
    return "".join(out)


# --- canonical keys -------------------------------------------------------


@lru_cache(maxsize=None)
def _symmetry_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Per symmetry element: square index map (8, n*n) and direction code map (8, 4)."""
    sq_maps = np.zeros((len(SYMMETRIES), n * n), dtype=np.int64)
    code_maps = np.zeros((len(SYMMETRIES), 4), dtype=np.int64)
    for g, s in enumerate(SYMMETRIES):
        for j in range(n):
            for i in range(n):
                st = _transform_step(Step(i, j, 1, 1), s, n)
                sq_maps[g, square_index(i, j, n)] = square_index(st.i, st.j, n)
        for c, d in enumerate(DIRECTIONS):
            code_maps[g, c] = DIRECTION_CODE[s.apply_vector(d)]
    return sq_maps, code_maps


def path_arrays(paths: Sequence[EdgePath], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Square indices and direction codes as (P, n*n) integer arrays."""
    L = n * n
    geo = _step_geometry(n)
    flat = []
    for p in paths:
        if len(p.steps) != L:
            raise MalformedPathError(f"path has {len(p.steps)} steps, expected {L}")
        for s in p.steps:
            g = geo[s]
            flat.append(g[0] * 4 + g[3])
    enc = np.array(flat, dtype=np.int64).reshape(len(paths), L)
    return enc >> 2, enc & 3


def _candidates(sq: np.ndarray, cd: np.ndarray, n: int):
    """Yield (element, reversed, encoded sequence rotated to start at square 0)."""
    sq_maps, code_maps = _symmetry_tables(n)
    P, L = sq.shape
    base = (np.arange(P, dtype=np.int64) * (2 * L))[:, None] + np.arange(L)
    for g, s in enumerate(SYMMETRIES):
        tsq = sq_maps[g].astype(np.int32)[sq]
        enc = tsq * 4 + code_maps[g].astype(np.int32)[cd]
        for rev in (False, True):
            if rev:
                a = tsq[:, ::-1]
                e = enc[:, ::-1] ^ 2  # reversing negates directions: code + 2 mod 4
            else:
                a, e = tsq, enc
            # squares are visited once, so the least rotation starts at square 0
            start = np.argmin(a, axis=1)
            doubled = np.concatenate([e, e], axis=1).ravel()
            yield s, rev, doubled[base + start[:, None]]


def _lexmin_update(best: np.ndarray, cand: np.ndarray) -> None:
    diff = cand != best
    first = np.argmax(diff, axis=1)
    r = np.arange(len(best))
    less = diff.any(axis=1) & (cand[r, first] < best[r, first])
    best[less] = cand[less]


def canonical_forms(paths: Sequence[EdgePath], n: int) -> tuple[list[bytes], list[tuple[Symmetry, ...]]]:
    """Canonical keys and stabilizers for a batch of paths.

    The key is the lexicographic minimum, over the 8 symmetry images, both
    traversal directions and all start rotations, of the sequence of
    ``square_index * 4 + direction_code`` values serialized as big-endian
    uint16.  The stabilizer lists the elements mapping the loop onto itself.
    """
    if not paths:
        return [], []
    return canonical_forms_arrays(*path_arrays(paths, n), n)


def canonical_forms_arrays(sq: np.ndarray, cd: np.ndarray, n: int) -> tuple[list[bytes], list[tuple[Symmetry, ...]]]:
    """:func:`canonical_forms` on the arrays returned by :func:`path_arrays`."""
    P = len(sq)
    best = None
    base = None
    stab = [[] for _ in range(P)]
    by_elem = {}
    for s, rev, enc in _candidates(sq, cd, n):
        by_elem[(s, rev)] = enc
        if best is None:
            best = enc.copy()
            base = enc
        else:
            _lexmin_update(best, enc)
    for s in SYMMETRIES:
        # rotations keep the orientation, reflections reverse it
        enc = by_elem[(s, not s.is_rotation)]
        fixed = np.all(enc == base, axis=1)
        for r in np.flatnonzero(fixed):
            stab[r].append(s)
    raw = best.astype(">u2")
    keys = [raw[r].tobytes() for r in range(P)]
    return keys, [tuple(x) for x in stab]


def canonical_key(p: EdgePath) -> bytes:
    keys, _ = canonical_forms([p], p.n)
    return keys[0]


def stabilizer(p: EdgePath) -> tuple[Symmetry, ...]:
    _, stabs = canonical_forms([p], p.n)
    return stabs[0]


def canonical_keys(paths: Iterable[EdgePath], n: int, chunk: int = 20000) -> list[bytes]:
    out: list[bytes] = []
    buf: list[EdgePath] = []
    for p in paths:
        buf.append(p)
        if len(buf) >= chunk:
            out.extend(canonical_forms(buf, n)[0])
            buf = []
    if buf:
        out.extend(canonical_forms(buf, n)[0])
    return out
