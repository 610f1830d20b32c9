"""Deterministic SVG 1.1 drawings of edge paths on the board."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

from .corners import enumerate_corner_placements, placement_at
from .edge_path import EdgePath, square_segment

UNIT = 32
MARGIN = 16
MARK_RADIUS = 5

PALETTE = {
    "background": "#ffffff",
    "lattice": "#c8c8c8",
    "interior": "#dbe9f6",
    "path": "#1f3b73",
    "marks": ("#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22"),
}


def _xy(x: int, y: int, n: int) -> tuple[int, int]:
    # board y points up, SVG y points down
    return MARGIN + UNIT * x, MARGIN + UNIT * (n - y)


def render_svg(p: EdgePath, placements: Sequence[int] = ()) -> str:
    """SVG text for path ``p`` with corner marks for each placement offset."""
    n = p.n
    size = 2 * MARGIN + UNIT * n
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="{PALETTE["background"]}"/>',
        f'<g stroke="{PALETTE["lattice"]}" stroke-width="1">',
    ]
    for j in range(n):
        for i in range(n):
            a, b = square_segment((i, j), n)
            (x1, y1), (x2, y2) = _xy(*a, n), _xy(*b, n)
            out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
    out.append("</g>")
    pts = " ".join("%d,%d" % _xy(v.x, v.y, n) for v in p.vertices)
    out.append(f'<polygon points="{pts}" fill="{PALETTE["interior"]}" fill-rule="evenodd" stroke="none"/>')
    out.append(
        f'<polygon points="{pts}" fill="none" stroke="{PALETTE["path"]}" stroke-width="3" '
        'stroke-linejoin="round"/>'
    )
    marks = PALETTE["marks"]
    for idx, offset in enumerate(placements):
        colour = marks[idx % len(marks)]
        out.append(f'<g fill="{colour}" stroke="none">')
        for s in placement_at(p, offset).corner_steps:
            st = p.steps[s]
            # midpoint of the step, in doubled coordinates to stay integral
            mx = MARGIN * 2 + UNIT * (st.start.x + st.end.x)
            my = MARGIN * 2 + UNIT * (2 * n - st.start.y - st.end.y)
            out.append(f'<circle cx="{mx // 2}" cy="{my // 2}" r="{MARK_RADIUS}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_files(items: Iterable[tuple[EdgePath, Sequence[int] | None]], out_dir: Path,
                 marks: bool = False, per_placement: bool = False) -> list[Path]:
    """Write one SVG per item, or one per placement with ``per_placement``.

    ``items`` pairs a path with its stored corner offsets; ``None`` means the
    offsets are recomputed.  Returns the written paths in order.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for idx, (p, offsets) in enumerate(items):
        if offsets is None:
            offsets = [c.offset for c in enumerate_corner_placements(p)]
        if per_placement:
            jobs = [(f"path{idx:06d}_c{o:03d}.svg", [o]) for o in offsets]
        else:
            jobs = [(f"path{idx:06d}.svg", list(offsets) if marks else [])]
        for name, pl in jobs:
            target = out_dir / name
            target.write_text(render_svg(p, pl), encoding="utf-8")
            written.append(target)
    return written
