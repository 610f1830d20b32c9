"""Command-line interface: count, enumerate, filter, render, bench, bounds.

Exit codes: 0 success, 2 invalid arguments or input, 3 budget abort,
4 internal cross-check failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Sequence

from . import __version__
from .bounds import bound_report, mean_thickness, scale_separation
from .corners import AXIS_SYMMETRY_LABELS, contraction_verdicts, placement_at
from .edge_path import EdgePath, path_validate, tree_to_path
from .enumeration import (
    EnumerationBudget,
    benchmark,
    rows_to_csv,
    tier1_brute_force,
    tier2_path_growing,
    tier3_tree_enumeration,
)
from .geometry import board_spec
from .grid_graph import build_grid_graph, kirchhoff_count
from .records import OrbitTally, PathRecord, RecordError, RunManifest, build_records, file_digest, read_records
from .render import render_files

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_CROSS_CHECK = 4

CHUNK = 20000


class UsageError(Exception):
    pass


def parse_n_list(text: str) -> list[int]:
    """Parse ``2,4,8`` or ``2..40`` (even values of the range) or a mix."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = (int(x) for x in part.split(".."))
                if lo > hi:
                    raise UsageError(f"empty range {part!r}")
                out.extend(range(lo + lo % 2, hi + 1, 2))
            else:
                out.append(int(part))
        except ValueError as exc:
            raise UsageError(f"bad n list entry {part!r}") from exc
    if not out:
        raise UsageError("empty n list")
    for n in out:
        try:
            board_spec(n)
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
    return out


def parse_tiers(text: str) -> list[int]:
    try:
        tiers = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad tier list {text!r}") from exc
    if not tiers or any(t not in (1, 2, 3) for t in tiers):
        raise UsageError("tiers must be drawn from 1, 2, 3")
    return tiers


def _spec(n: int):
    try:
        return board_spec(n)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _budget(args) -> EnumerationBudget:
    try:
        return EnumerationBudget(max_candidates=args.max_candidates, max_wall_time=args.max_seconds)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from exc
    with fh:
        yield fh


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


# --- count ----------------------------------------------------------------


def cmd_count(args) -> int:
    spec = _spec(args.n)
    t0 = time.perf_counter()
    count = kirchhoff_count(build_grid_graph(spec))
    print(count)
    _info(f"n={spec.n} spanning_trees={count} seconds={time.perf_counter() - t0:.6f}")
    return EXIT_OK


# --- enumerate ------------------------------------------------------------


def _tier_batches(spec, tier: int, budget: EnumerationBudget):
    """(run, iterator of (paths, trees or None) batches)."""
    if tier == 3:
        run = tier3_tree_enumeration(spec, budget=budget)

        def batches():
            paths, trees = [], []
            for t in run:
                trees.append(t)
                paths.append(tree_to_path(t, spec))
                if len(paths) == CHUNK:
                    yield paths, trees
                    paths, trees = [], []
            if paths:
                yield paths, trees

        return run, batches()
    run = tier1_brute_force(spec, budget) if tier == 1 else tier2_path_growing(spec, budget=budget)

    def batches():
        paths = []
        for p in run:
            paths.append(p)
            if len(paths) == CHUNK:
                yield paths, None
                paths = []
        if paths:
            yield paths, None

    return run, batches()


def _manifest_path(args) -> Path | None:
    if args.manifest:
        return Path(args.manifest)
    if args.out and args.out != "-":
        out = Path(args.out)
        return out.with_name(out.stem + ".manifest.json")
    return None


def _write_manifest(args, manifest: RunManifest) -> None:
    target = _manifest_path(args)
    if target is None:
        _info(manifest.to_json())
        return
    try:
        target.write_text(manifest.to_json() + "\n", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {target}: {exc.strerror}") from exc


def cmd_enumerate(args) -> int:
    spec = _spec(args.n)
    budget = _budget(args)
    n = spec.n
    tally = OrbitTally()
    t_start = time.perf_counter()
    record_time = 0.0
    run, batches = _tier_batches(spec, args.tier, budget)
    written = 0
    emitted: set[str] = set()
    with _output(args.out) as fh:
        for paths, trees in batches:
            t0 = time.perf_counter()
            recs = build_records(paths, n, trees)
            for r in recs:
                tally.add(r)
            if args.dedup:
                new_keys = []
                for r in recs:
                    if r.canonical_key not in emitted:
                        emitted.add(r.canonical_key)
                        new_keys.append(r.canonical_key)
                reps = [EdgePath.from_key(bytes.fromhex(k), n).normalized() for k in new_keys]
                recs = build_records(reps, n, validated=True)
            for r in recs:
                fh.write(r.to_json())
                fh.write("\n")
            written += len(recs)
            record_time += time.perf_counter() - t0
    res = run.result
    manifest = RunManifest(
        n=n,
        tiers=[args.tier],
        counts=tally.counts(),
        timings={
            "enumerate_seconds": round(res.wall_time, 6),
            "records_seconds": round(record_time, 6),
            "total_seconds": round(time.perf_counter() - t_start, 6),
        },
    )
    manifest.counts["candidates_examined"] = res.candidates_examined
    manifest.counts["records_written"] = written
    if res.aborted:
        manifest.aborted = True
        manifest.reason = res.reason
        manifest.counts["records_written"] = 0
        if args.out and args.out != "-":
            Path(args.out).unlink(missing_ok=True)
        _write_manifest(args, manifest)
        _info(f"aborted: {res.reason}")
        return EXIT_BUDGET
    if args.out and args.out != "-":
        manifest.digests["records_sha256"] = file_digest(args.out)
    expected = kirchhoff_count(build_grid_graph(spec))
    problems = []
    if tally.total != expected:
        problems.append(f"tier {args.tier} produced {tally.total} paths, matrix-tree count is {expected}")
    if not manifest.consistent():
        problems.append("counts violate n_tilde <= orbits <= N")
    _write_manifest(args, manifest)
    c = manifest.counts
    _info(f"n={n} tier={args.tier} N={c['N']} orbits={c['orbits']} n_tilde={c['n_tilde']} "
          f"written={written} seconds={manifest.timings['total_seconds']:.3f}")
    if problems:
        for p in problems:
            _info(f"cross-check failed: {p}")
        return EXIT_CROSS_CHECK
    return EXIT_OK


# --- filter ---------------------------------------------------------------


def _open_input(path: str):
    if path == "-":
        return sys.stdin
    try:
        return open(path, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _load_paths(path: str) -> Iterator[tuple[int, PathRecord, EdgePath]]:
    fh = _open_input(path)
    try:
        for lineno, rec in read_records(fh):
            try:
                p = rec.path()
            except ValueError as exc:
                raise RecordError(f"line {lineno}: {exc}") from exc
            rep = path_validate(p)
            if not rep.ok:
                raise RecordError(f"line {lineno}: invalid path: {'; '.join(rep.violations())}")
            yield lineno, rec, p
    finally:
        if fh is not sys.stdin:
            fh.close()


def cmd_filter(args) -> int:
    stages = {"input": 0}
    kept: list[PathRecord] = []
    pending: list[EdgePath] = []

    def flush():
        if not pending:
            return
        by_n: dict[int, list[int]] = {}
        for k, p in enumerate(pending):
            by_n.setdefault(p.n, []).append(k)
        fresh: list[PathRecord | None] = [None] * len(pending)
        for n, idx in by_n.items():
            for k, r in zip(idx, build_records([pending[k] for k in idx], n, validated=True)):
                fresh[k] = r
        for r, p in zip(fresh, pending):
            if args.corners or args.line_trees or args.contraction:
                if not r.corner_offsets:
                    continue
                stages["corners"] = stages.get("corners", 0) + 1
            if args.self_symmetric:
                if r.self_symmetry not in AXIS_SYMMETRY_LABELS:
                    continue
                stages["self_symmetric"] = stages.get("self_symmetric", 0) + 1
            if args.line_trees:
                if not r.is_line_tree:
                    continue
                stages["line_trees"] = stages.get("line_trees", 0) + 1
            if args.contraction:
                verdicts = contraction_verdicts(p, [placement_at(p, o) for o in r.corner_offsets])
                r = PathRecord(**{**r.__dict__, "contraction_pass": tuple(verdicts)})
                if not any(verdicts):
                    continue
                stages["contraction"] = stages.get("contraction", 0) + 1
            kept.append(r)
        pending.clear()

    with _output(args.out) as out:
        for _, _, p in _load_paths(args.inp):
            stages["input"] += 1
            pending.append(p)
            if len(pending) == CHUNK:
                flush()
                for r in kept:
                    out.write(r.to_json() + "\n")
                stages["output"] = stages.get("output", 0) + len(kept)
                kept.clear()
        flush()
        for r in kept:
            out.write(r.to_json() + "\n")
        stages["output"] = stages.get("output", 0) + len(kept)
    for name in ("corners", "self_symmetric", "line_trees", "contraction"):
        flag = {"corners": args.corners or args.line_trees or args.contraction}.get(name, getattr(args, name))
        if flag:
            stages.setdefault(name, 0)
    order = ["input", "corners", "self_symmetric", "line_trees", "contraction", "output"]
    _info(" ".join(f"{k}={stages[k]}" for k in order if k in stages))
    return EXIT_OK


# --- render ---------------------------------------------------------------


def cmd_render(args) -> int:
    items = [(p, list(rec.corner_offsets)) for _, rec, p in _load_paths(args.inp)]
    try:
        files = render_files(items, Path(args.svg_dir), marks=args.marks == "corners",
                             per_placement=args.per_placement)
    except OSError as exc:
        raise UsageError(f"cannot write to {args.svg_dir}: {exc.strerror}") from exc
    _info(f"wrote {len(files)} svg files to {args.svg_dir}")
    return EXIT_OK


# --- bench and bounds -----------------------------------------------------


def cmd_bench(args) -> int:
    ns = parse_n_list(args.n_list)
    tiers = parse_tiers(args.tiers)
    budget = _budget(args)
    rows = []
    for n in ns:
        rows.extend(benchmark(board_spec(n), tiers, budget))
    with _output(args.out) as fh:
        fh.write(rows_to_csv(rows))
    return EXIT_OK


BOUNDS_COLUMNS = (
    "n", "edge_bound", "demaine_bound", "best_known", "crossover",
    "edge_thickness", "feasible_square", "m", "a", "scale_thickness",
)


def cmd_bounds(args) -> int:
    """Thicknesses are exact rationals, written as p/q when not integral."""
    ns = parse_n_list(args.n_list)
    lines = [",".join(BOUNDS_COLUMNS)]
    for n in ns:
        r = bound_report(n)
        sep = scale_separation(n)
        side = Fraction(n * n, 2)
        row = (
            r.n, r.edge_bound, r.demaine_bound, r.best_known, str(r.crossover).lower(),
            mean_thickness(side, side, n), str(sep.feasible_square).lower(),
            ";".join(map(str, sep.m)), ";".join(map(str, sep.a)), sep.mean_thickness,
        )
        lines.append(",".join(map(str, row)))
    with _output(args.out) as fh:
        fh.write("\n".join(lines) + "\n")
    return EXIT_OK


# --- parser ---------------------------------------------------------------


def _add_budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-candidates", type=int, default=1 << 24, help="candidate limit (default 2^24)")
    p.add_argument("--max-seconds", type=float, default=60.0, help="wall-time limit in seconds")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="edgepattern", description="Edge patterns for n x n pixel-matrix folding.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="spanning-tree count by the matrix-tree theorem")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("enumerate", help="list edge paths as JSON Lines records")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tier", type=int, choices=(1, 2, 3), default=3)
    p.add_argument("--dedup", action="store_true", help="one canonical record per symmetry orbit")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--manifest", help="manifest path (default <out stem>.manifest.json)")
    _add_budget(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("filter", help="corner, symmetry, line-tree and contraction filters")
    p.add_argument("--in", dest="inp", required=True, help="input JSON Lines file, or - for stdin")
    p.add_argument("--corners", action="store_true", help="keep paths with a corner placement")
    p.add_argument("--self-symmetric", action="store_true", help="keep paths fixed by an axis mirror")
    p.add_argument("--line-trees", action="store_true", help="keep corner-feasible paths whose tree is a line")
    p.add_argument("--contraction", action="store_true",
                   help="evaluate every placement; keep paths with at least one passing")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("render", help="draw records as SVG files")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--svg-dir", required=True)
    p.add_argument("--marks", choices=("none", "corners"), default="none")
    p.add_argument("--per-placement", action="store_true", help="one file per corner placement")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("bench", help="tier timings as CSV")
    p.add_argument("--n-list", required=True, help="e.g. 2,4,6,8 or 2..8")
    p.add_argument("--tiers", default="1,2,3")
    p.add_argument("--out", help="CSV file (default stdout)")
    _add_budget(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("bounds", help="semiperimeter bounds table as CSV")
    p.add_argument("--n-list", required=True, help="even sizes, e.g. 2..40")
    p.add_argument("--out", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_bounds)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, RecordError) as exc:
        _info(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
