"""Closed-form semiperimeter bounds, mean thickness and two-scale side lengths."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .geometry import board_spec


@dataclass(frozen=True)
class BoundReport:
    n: int
    edge_bound: int
    demaine_bound: int
    best_known: int
    crossover: bool


def edge_bound(n: int) -> int:
    return n * n


def demaine_bound(n: int) -> int:
    """s = n^2/2 + 8n + 8 - 5 (n mod 4), stated for even n only."""
    board_spec(n)
    return n * n // 2 + 8 * n + 8 - 5 * (n % 4)


def bound_report(n: int) -> BoundReport:
    e, d = edge_bound(n), demaine_bound(n)
    return BoundReport(n=n, edge_bound=e, demaine_bound=d, best_known=min(e, d), crossover=d < e)


def mean_thickness(paper_w, paper_h, n) -> Fraction:
    """Average layer count: sheet area over board area."""
    if paper_w <= 0 or paper_h <= 0 or n <= 0:
        raise ValueError("dimensions must be positive")
    return Fraction(paper_w) * Fraction(paper_h) / (Fraction(n) * Fraction(n))


def side_length(m: int) -> int:
    """Unfolded side providing two half-corner mechanisms and m edge pairs."""
    return 2 * 3 + 4 * m


@dataclass(frozen=True)
class ScaleSeparation:
    n: int
    feasible_square: bool
    m: tuple[int, ...]  # (m,) for a square coarse sheet, (m1, m2) otherwise
    a: tuple[int, ...]
    mean_thickness: Fraction
    degenerate: bool = False


def scale_separation(n: int) -> ScaleSeparation:
    board_spec(n)
    if n % 4 == 2:
        k = (n - 2) // 4
        m = 2 * k * (k + 1) - 1
        a = side_length(m)
        return ScaleSeparation(
            n=n,
            feasible_square=True,
            m=(m,),
            a=(a,),
            mean_thickness=Fraction(a * a, n * n),
            degenerate=m < 0,
        )
    k = n // 4
    m1, m2 = 2 * k * k - 2, 2 * k * k - 1
    a1, a2 = side_length(m1), side_length(m2)
    return ScaleSeparation(
        n=n,
        feasible_square=False,
        m=(m1, m2),
        a=(a1, a2),
        mean_thickness=Fraction(a1 * a2, n * n),
    )
