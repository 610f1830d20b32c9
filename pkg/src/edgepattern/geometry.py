"""Lattice primitives for an n x n board and the symmetry group of the square.

Coordinates live on the (n+1) x (n+1) lattice of board-square corners.  All
geometry is integer; the board center (n/2, n/2) is a lattice point because
n is even.
"""

from __future__ import annotations

import enum
from typing import NamedTuple


class BoardSpec(NamedTuple):
    """Board side and the lattice constants derived from it.

    nu is the vertex count of the coarse grid graph, e its arc count (also the
    number of interior junctions) and semiperimeter the edge length n**2.
    """

    n: int
    nu: int
    e: int
    semiperimeter: int

    @property
    def half(self) -> int:
        return self.n // 2

    @property
    def squares(self) -> int:
        return self.n * self.n


def board_spec(n: int) -> BoardSpec:
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError(f"board size must be an int, got {type(n).__name__}")
    if n < 2 or n % 2:
        raise ValueError(f"board size must be even and >= 2, got {n}")
    h = n // 2
    return BoardSpec(n=n, nu=h * h, e=n * (h - 1), semiperimeter=n * n)


class LatticePoint(NamedTuple):
    x: int
    y: int


class SquareId(NamedTuple):
    """Board square identified by its minimum corner (i, j)."""

    i: int
    j: int


class ParityClass(enum.Enum):
    ODD_ODD = "odd-odd"  # diamond centers (grid-graph vertices)
    EVEN_EVEN = "even-even"  # exterior cell centers
    MIXED = "mixed"  # segment endpoints and junctions


def check_point(p: tuple[int, int], n: int) -> None:
    x, y = p
    if not (0 <= x <= n and 0 <= y <= n):
        raise ValueError(f"point {tuple(p)} outside the [0, {n}]^2 lattice")


def classify_point(p: tuple[int, int], n: int | None = None) -> ParityClass:
    if n is not None:
        check_point(p, n)
    elif p[0] < 0 or p[1] < 0:
        raise ValueError(f"negative coordinates {tuple(p)}")
    ox, oy = p[0] % 2, p[1] % 2
    if ox and oy:
        return ParityClass.ODD_ODD
    if not ox and not oy:
        return ParityClass.EVEN_EVEN
    return ParityClass.MIXED


def square_corners(sq: tuple[int, int]) -> list[LatticePoint]:
    i, j = sq
    return [LatticePoint(i, j), LatticePoint(i + 1, j), LatticePoint(i, j + 1), LatticePoint(i + 1, j + 1)]


def interior_junctions(n: int) -> list[LatticePoint]:
    """Interior mixed-parity points, sorted by (x, y)."""
    return [
        LatticePoint(x, y)
        for x in range(1, n)
        for y in range(1, n)
        if (x + y) % 2 == 1
    ]


class Symmetry(enum.Enum):
    """The 8 isometries of the square, acting about the board center.

    Each value is the integer matrix (a, b, c, d) mapping the centered vector
    (u, v) to (a*u + b*v, c*u + d*v).
    """

    IDENTITY = (1, 0, 0, 1)
    ROT90 = (0, -1, 1, 0)
    ROT180 = (-1, 0, 0, -1)
    ROT270 = (0, 1, -1, 0)
    MIRROR_H = (1, 0, 0, -1)  # about the horizontal axis y = n/2
    MIRROR_V = (-1, 0, 0, 1)  # about the vertical axis x = n/2
    MIRROR_DIAG = (0, 1, 1, 0)  # about y = x
    MIRROR_ANTI = (0, -1, -1, 0)  # about y = n - x

    @property
    def matrix(self) -> tuple[int, int, int, int]:
        return self.value

    @property
    def is_rotation(self) -> bool:
        a, b, c, d = self.value
        return a * d - b * c == 1

    def apply_vector(self, v: tuple[int, int]) -> tuple[int, int]:
        a, b, c, d = self.value
        return a * v[0] + b * v[1], c * v[0] + d * v[1]

    def compose(self, other: Symmetry) -> Symmetry:
        """The element ``self o other`` (apply ``other`` first)."""
        a, b, c, d = self.value
        e, f, g, h = other.value
        return Symmetry((a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h))

    def inverse(self) -> Symmetry:
        # orthogonal matrices: inverse is the transpose
        a, b, c, d = self.value
        return Symmetry((a, c, b, d))


SYMMETRIES: tuple[Symmetry, ...] = tuple(Symmetry)
ROTATIONS: tuple[Symmetry, ...] = tuple(s for s in Symmetry if s.is_rotation)


def apply_symmetry(s: Symmetry, p: tuple[int, int], n: int) -> LatticePoint:
    check_point(p, n)
    # doubled centered coordinates keep everything integral for any n
    u, v = s.apply_vector((2 * p[0] - n, 2 * p[1] - n))
    return LatticePoint((u + n) // 2, (v + n) // 2)
