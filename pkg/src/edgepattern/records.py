"""JSON Lines path records and run manifests."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import IO, Iterable, Iterator, Sequence

from . import __version__
from .corners import (
    AXIS_SYMMETRY_LABELS,
    SELF_SYMMETRY_LABELS,
    corner_offsets_array,
    degenerate_corners,
    self_symmetry_label,
)
from .edge_path import EdgePath, canonical_forms_arrays, path_arrays, path_to_tree
from .geometry import board_spec
from .grid_graph import SpanningTree, build_grid_graph

class RecordError(ValueError):
    pass


@dataclass(frozen=True)
class PathRecord:
    n: int
    canonical_key: str
    tree_arcs: tuple[tuple[int, int], ...]
    steps: tuple[tuple[int, int, int, int], ...]
    corner_offsets: tuple[int, ...]
    self_symmetry: str
    is_line_tree: bool
    contraction_pass: tuple[bool, ...] | None = None

    def path(self) -> EdgePath:
        return EdgePath(self.n, self.steps)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "canonical_key": self.canonical_key,
            "tree_arcs": [list(a) for a in self.tree_arcs],
            "steps": [list(s) for s in self.steps],
            "corner_offsets": list(self.corner_offsets),
            "self_symmetry": self.self_symmetry,
            "is_line_tree": self.is_line_tree,
            "contraction_pass": None if self.contraction_pass is None else list(self.contraction_pass),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> PathRecord:
        try:
            n = d["n"]
            if not isinstance(n, int) or isinstance(n, bool):
                raise RecordError("n must be an integer")
            board_spec(n)
            steps = tuple(tuple(int(v) for v in s) for s in d["steps"])
            if any(len(s) != 4 for s in steps):
                raise RecordError("each step must have 4 integers (i, j, dx, dy)")
            if len(steps) != n * n:
                raise RecordError(f"expected {n * n} steps, got {len(steps)}")
            arcs = tuple(tuple(int(v) for v in a) for a in d["tree_arcs"])
            if any(len(a) != 2 for a in arcs):
                raise RecordError("each tree arc must be a vertex-index pair")
            sym = d["self_symmetry"]
            if sym not in SELF_SYMMETRY_LABELS:
                raise RecordError(f"self_symmetry must be one of {SELF_SYMMETRY_LABELS}")
            cp = d.get("contraction_pass")
            key = d["canonical_key"]
            bytes.fromhex(key)
            return cls(
                n=n,
                canonical_key=key,
                tree_arcs=arcs,
                steps=steps,
                corner_offsets=tuple(int(o) for o in d["corner_offsets"]),
                self_symmetry=sym,
                is_line_tree=bool(d["is_line_tree"]),
                contraction_pass=None if cp is None else tuple(bool(x) for x in cp),
            )
        except RecordError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise RecordError(f"{type(exc).__name__}: {exc}") from exc

    @classmethod
    def from_json(cls, line: str) -> PathRecord:
        try:
            d = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordError(f"invalid JSON: {exc}") from exc
        if not isinstance(d, dict):
            raise RecordError("record must be a JSON object")
        return cls.from_dict(d)


def build_records(paths: Sequence[EdgePath], n: int, trees: Sequence[SpanningTree] | None = None,
                  validated: bool = False) -> list[PathRecord]:
    """Records for a batch of paths.

    Trees are recovered from the paths when not given; ``validated`` skips
    re-validating paths the caller has already checked.
    """
    if not paths:
        return []
    spec = board_spec(n)
    g = build_grid_graph(spec)
    sq, cd = path_arrays(paths, n)
    keys, stabs = canonical_forms_arrays(sq, cd, n)
    offsets_all = [()] * len(paths) if degenerate_corners(n) else corner_offsets_array(cd)
    out = []
    for r, p in enumerate(paths):
        t = trees[r] if trees is not None else path_to_tree(p, spec, validate=not validated)
        offsets = offsets_all[r]
        out.append(
            PathRecord(
                n=n,
                canonical_key=keys[r].hex(),
                tree_arcs=tuple(t.arc_pairs(g)),
                steps=p.steps,
                corner_offsets=offsets,
                self_symmetry=self_symmetry_label(stabs[r]),
                is_line_tree=t.leaf_count(g) == 2,
            )
        )
    return out


def read_records(fh: IO[str]) -> Iterator[tuple[int, PathRecord]]:
    """Yield (line number, record); blank lines are skipped."""
    for lineno, line in enumerate(fh, start=1):
        if not line.strip():
            continue
        try:
            yield lineno, PathRecord.from_json(line)
        except RecordError as exc:
            raise RecordError(f"line {lineno}: {exc}") from exc


def write_records(fh: IO[str], records: Iterable[PathRecord]) -> int:
    count = 0
    for rec in records:
        fh.write(rec.to_json())
        fh.write("\n")
        count += 1
    return count


@dataclass
class RunManifest:
    n: int
    tiers: list[int]
    counts: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    digests: dict = field(default_factory=dict)
    aborted: bool = False
    reason: str = ""
    tool_version: str = __version__

    def consistent(self) -> bool:
        c = self.counts
        try:
            return c["n_tilde"] <= c["orbits"] <= c["N"]
        except KeyError:
            return True

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class OrbitTally:
    """Aggregates per-orbit flags so counts are independent of dedup."""

    def __init__(self):
        self.total = 0
        self._orbits: dict[str, tuple[bool, bool, bool]] = {}

    def add(self, rec: PathRecord) -> None:
        self.total += 1
        if rec.canonical_key not in self._orbits:
            has_corner = bool(rec.corner_offsets)
            axis = rec.self_symmetry in AXIS_SYMMETRY_LABELS
            self._orbits[rec.canonical_key] = (has_corner, has_corner and axis, has_corner and rec.is_line_tree)

    def counts(self) -> dict:
        flags = list(self._orbits.values())
        return {
            "N": self.total,
            "orbits": len(flags),
            "n_tilde": sum(f[0] for f in flags),
            "self_symmetric": sum(f[1] for f in flags),
            "line_trees": sum(f[2] for f in flags),
        }
