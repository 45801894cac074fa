"""Classical reference semantics over enumerated finite universes.

Everything here works by brute force on concrete points: pieces are plain
frozensets, functions are plain callables, and combining two piecewise
functions refines their partitions by exhaustive intersection.  Nothing in
this module touches the symbolic machinery; tests lean on that independence
to use it as ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, FrozenSet, Optional, Sequence, Tuple


Piece = Tuple[FrozenSet, Callable]


@dataclass(frozen=True)
class ClassicalPiecewise:
    """A function given by cases over a finite universe.

    Pieces must be pairwise disjoint and cover the universe; both are
    checked point by point at construction time.
    """

    universe: FrozenSet
    pieces: Tuple[Piece, ...]

    def __post_init__(self):
        object.__setattr__(self, "universe", frozenset(self.universe))
        object.__setattr__(
            self, "pieces", tuple((frozenset(ps), fn) for ps, fn in self.pieces)
        )
        seen = set()
        for ps, _ in self.pieces:
            overlap = seen & ps
            if overlap:
                raise ValueError(f"pieces overlap at {sorted(overlap)[:3]}")
            seen |= ps
        if seen != self.universe:
            missing = sorted(self.universe - seen)[:3]
            extra = sorted(seen - self.universe)[:3]
            raise ValueError(
                f"pieces do not partition the universe "
                f"(missing {missing}, outside {extra})"
            )

    def piece_index(self, x) -> Optional[int]:
        for i, (ps, _) in enumerate(self.pieces):
            if x in ps:
                return i
        return None


def classical_eval(f: ClassicalPiecewise, x):
    """Value of the unique piece containing x, or None outside the universe."""
    i = f.piece_index(x)
    if i is None:
        return None
    return f.pieces[i][1](x)


def restrict(f: ClassicalPiecewise, subset) -> ClassicalPiecewise:
    subset = frozenset(subset)
    if not subset <= f.universe:
        raise ValueError("restriction target is not inside the universe")
    pieces = tuple(
        (ps & subset, fn) for ps, fn in f.pieces if ps & subset
    )
    return ClassicalPiecewise(subset, pieces)


def classical_join(*fs: ClassicalPiecewise) -> ClassicalPiecewise:
    """Glue functions with pairwise disjoint universes into one."""
    universe = set()
    pieces = []
    for f in fs:
        if universe & f.universe:
            raise ValueError("universes overlap; the join is not a function")
        universe |= f.universe
        pieces.extend(f.pieces)
    return ClassicalPiecewise(frozenset(universe), tuple(pieces))


def classical_star(star: Callable, f: ClassicalPiecewise, g: ClassicalPiecewise) -> ClassicalPiecewise:
    """Pointwise star over the mutual refinement of both partitions.

    Every nonempty intersection of a piece of f with a piece of g becomes a
    piece of the result, so iterating this can multiply piece counts; that
    exhaustive growth is exactly what the symbolic layer avoids.
    """
    if f.universe != g.universe:
        raise ValueError("operands live on different universes")
    pieces = []
    for ps_f, fn_f in f.pieces:
        for ps_g, fn_g in g.pieces:
            common = ps_f & ps_g
            if common:
                pieces.append(
                    (common, (lambda a, b: lambda x: star(a(x), b(x)))(fn_f, fn_g))
                )
    return ClassicalPiecewise(f.universe, tuple(pieces))


def constant_piecewise(universe, value) -> ClassicalPiecewise:
    return ClassicalPiecewise(frozenset(universe), ((frozenset(universe), lambda x: value),))


def table(f: ClassicalPiecewise) -> dict:
    """The function as an explicit point -> value dict."""
    return {x: classical_eval(f, x) for x in f.universe}


def rational_grid_points(lo, hi, count: int, include_hi: bool = False) -> Tuple[Fraction, ...]:
    """count evenly spaced rationals from lo, stepping (hi-lo)/count."""
    lo, hi = Fraction(lo), Fraction(hi)
    if count < 1 or hi <= lo:
        raise ValueError("need count >= 1 and hi > lo")
    step = (hi - lo) / count
    pts = [lo + k * step for k in range(count)]
    if include_hi:
        pts.append(hi)
    return tuple(pts)


def integer_grid(rows: int, cols: int) -> FrozenSet[Tuple[int, int]]:
    return frozenset((i, j) for i in range(1, rows + 1) for j in range(1, cols + 1))


def block_quarters(rows: int, cols: int, row_split: int, col_split: int) -> Tuple[FrozenSet, ...]:
    """The four quadrants of an integer grid cut after row_split/col_split.

    Order: top-left, rows below the split, columns right of the split, and
    the remaining corner.
    """
    grid = integer_grid(rows, cols)
    a = frozenset(p for p in grid if p[0] <= row_split and p[1] <= col_split)
    b = frozenset(p for p in grid if p[0] > row_split and p[1] <= col_split)
    c = frozenset(p for p in grid if p[0] <= row_split and p[1] > col_split)
    d = frozenset(p for p in grid if p[0] > row_split and p[1] > col_split)
    return a, b, c, d


def block_matrix_piecewise(
    rows: int, cols: int, row_split: int, col_split: int, names: Sequence[str]
) -> ClassicalPiecewise:
    """Block labels as a piecewise function: each cell maps to its block name."""
    quarters = block_quarters(rows, cols, row_split, col_split)
    pieces = tuple(
        (ps, (lambda n: lambda x: frozenset([n]))(name))
        for ps, name in zip(quarters, names)
        if ps
    )
    return ClassicalPiecewise(integer_grid(rows, cols), pieces)


def segment_index(knots: Sequence[Fraction], x) -> Optional[int]:
    """Which knot interval contains x; ties at interior knots go left.

    Intervals are [k0,k1], (k1,k2], ..., so every point of [k0,kn] gets
    exactly one index.
    """
    ks = [Fraction(k) for k in knots]
    if x < ks[0] or x > ks[-1]:
        return None
    for i in range(len(ks) - 1):
        if x <= ks[i + 1]:
            return i
    return None


def spline_piecewise(knots: Sequence[Fraction], labels: Sequence[str]) -> ClassicalPiecewise:
    """Segment labels over a rational grid spanning the knots (denominator 100)."""
    ks = [Fraction(k) for k in knots]
    if len(labels) != len(ks) - 1:
        raise ValueError("need one label per knot interval")
    pts = rational_grid_points(ks[0], ks[-1], 100, include_hi=True)
    universe = frozenset(pts) | frozenset(ks)
    groups: dict = {}
    for x in universe:
        groups.setdefault(segment_index(ks, x), set()).add(x)
    pieces = tuple(
        (frozenset(groups[i]), (lambda lab: lambda x: lab)(labels[i]))
        for i in sorted(groups)
    )
    return ClassicalPiecewise(universe, pieces)
