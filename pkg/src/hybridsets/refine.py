"""Generalised partitions and their minimal common strict refinements.

Refining r partitions with n_1..n_r pieces needs (sum n_i) + 1 - r new
pieces: keep all but the last piece of each partition as independent
regions, and recover everything else from the universe by subtraction.
Which integer combinations to use is recorded in a unimodular choice
matrix whose first row (the universe row) is all ones; its exact integer
inverse yields the new pieces as combinations of universe and originals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import ContractError, RefinementError, UnimodularError
from .regions import Point, RegionAtom, SymbolicHybridSet


def bareiss_determinant(rows: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ContractError("determinant needs a square matrix")
    m = [list(map(int, r)) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pivot is None:
                return 0
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def exact_integer_inverse(rows: Sequence[Sequence[int]]) -> List[List[int]]:
    """Inverse of a unimodular integer matrix, computed exactly.

    Gauss-Jordan over Fractions; a non-integer entry in the result (only
    possible when the determinant is not +-1) is rejected.
    """
    det = bareiss_determinant(rows)
    if det not in (1, -1):
        raise UnimodularError(f"determinant is {det}, expected +1 or -1")
    n = len(rows)
    work = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if work[r][col] != 0)
        work[col], work[pivot] = work[pivot], work[col]
        inv = Fraction(1) / work[col][col]
        work[col] = [v * inv for v in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                factor = work[r][col]
                work[r] = [a - factor * b for a, b in zip(work[r], work[col])]
    out = []
    for row in work:
        tail = row[n:]
        assert all(v.denominator == 1 for v in tail)
        out.append([int(v) for v in tail])
    return out


def min_refinement_size(sizes: Sequence[int]) -> int:
    """(sum of sizes) + 1 - (number of partitions)."""
    sizes = list(sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ContractError(f"sizes must be positive, got {sizes!r}")
    return sum(sizes) + 1 - len(sizes)


@dataclass(frozen=True)
class ChoiceMatrix:
    """Unimodular matrix selecting a common refinement.

    Rows are labelled by the universe followed by the kept pieces of each
    partition; columns by the new refinement pieces.  The first row is all
    ones (the universe is the sum of all new pieces).
    """

    entries: Tuple[Tuple[int, ...], ...]
    row_labels: Tuple[str, ...]
    col_labels: Tuple[str, ...]

    def __post_init__(self):
        n = len(self.entries)
        if any(len(r) != n for r in self.entries):
            raise ContractError("choice matrix must be square")
        if len(self.row_labels) != n or len(self.col_labels) != n:
            raise ContractError("label count must match matrix size")
        if n and any(v != 1 for v in self.entries[0]):
            raise ContractError("first row of a choice matrix must be all ones")

    @property
    def size(self) -> int:
        return len(self.entries)

    def determinant(self) -> int:
        return bareiss_determinant(self.entries)

    def inverse(self) -> Tuple[Tuple[int, ...], ...]:
        """Exact integer inverse; row j says how new piece j combines the
        universe and kept originals, so it has no all-ones constraint."""
        return tuple(tuple(r) for r in exact_integer_inverse(self.entries))

    def render(self) -> str:
        width = max(len(str(v)) for row in self.entries for v in row)
        lines = []
        for label, row in zip(self.row_labels, self.entries):
            cells = " ".join(str(v).rjust(width) for v in row)
            lines.append(f"{label}: [{cells}]")
        return "\n".join(lines)


STYLE_ONES_TOP = "ones-top-row"
STYLE_UPPER_TRIANGLE = "full-upper-triangle"


def canonical_choice_matrix(
    sizes: Sequence[int],
    style: str = STYLE_ONES_TOP,
    row_labels: Optional[Sequence[str]] = None,
) -> ChoiceMatrix:
    """The two canonical unimodular choices.

    ``ones-top-row``: identity below an all-ones first row; its inverse has
    first row 1, -1, ..., -1.  ``full-upper-triangle``: ones on and above
    the diagonal; its inverse is the bidiagonal with a -1 band above the
    diagonal.
    """
    n = min_refinement_size(sizes)
    if style == STYLE_ONES_TOP:
        entries = tuple(
            tuple(1 if (i == 0 or i == j) else 0 for j in range(n)) for i in range(n)
        )
    elif style == STYLE_UPPER_TRIANGLE:
        entries = tuple(
            tuple(1 if j >= i else 0 for j in range(n)) for i in range(n)
        )
    else:
        raise ContractError(f"unknown choice-matrix style {style!r}")
    if row_labels is None:
        labels = ["U"]
        for k, size in enumerate(sizes, start=1):
            labels.extend(f"{k}.{i}" for i in range(1, size))
        row_labels = labels
    col_labels = tuple(f"P{j}" for j in range(1, n + 1))
    return ChoiceMatrix(entries, tuple(row_labels), col_labels)


def _default_labels(count: int) -> Tuple[str, ...]:
    return tuple(str(i) for i in range(1, count + 1))


@dataclass(frozen=True)
class GeneralisedPartition:
    """Pieces whose formal sum is the universe (or is assumed to be).

    With ``assumed`` set the formal identity is not required; it is then the
    caller's job to validate the partition by sampling, which is what the
    matrix blocks need (their pieces only cover the grid once the dimension
    parameters are ordered sensibly, which the formal layer cannot see).
    """

    name: str
    universe: RegionAtom
    pieces: Tuple[SymbolicHybridSet, ...]
    labels: Tuple[str, ...] = ()
    assumed: bool = False

    def __post_init__(self):
        if not self.pieces:
            raise ContractError("a partition needs at least one piece")
        if not self.labels:
            object.__setattr__(self, "labels", _default_labels(len(self.pieces)))
        if len(self.labels) != len(self.pieces):
            raise ContractError("piece labels must match piece count")
        if not self.assumed:
            total = SymbolicHybridSet.zero()
            for p in self.pieces:
                total = total + p
            if total != SymbolicHybridSet.from_atom(self.universe):
                raise ContractError(
                    f"pieces of {self.name!r} do not sum to the universe formally; "
                    "declare the partition assumed if that is intended"
                )

    @property
    def universe_set(self) -> SymbolicHybridSet:
        return SymbolicHybridSet.from_atom(self.universe)

    def validate_by_sampling(self, valuation, sample: Iterable[Point]) -> List[str]:
        """Points where the pieces do not sum to the universe indicator."""
        bad = []
        for p in sample:
            total = sum(piece.multiplicity(p, valuation) for piece in self.pieces)
            expect = self.universe.indicator(p, valuation)
            if total != expect:
                bad.append(f"at {p}: pieces sum to {total}, universe gives {expect}")
        return bad


@dataclass(frozen=True)
class Refinement:
    """A common refinement: new pieces plus rewrite data for every original.

    ``coefficients[k][i][j]`` is the coefficient of new piece j in the
    rewrite of piece i of partition k (rows for dropped pieces included).
    """

    universe: RegionAtom
    partitions: Tuple[GeneralisedPartition, ...]
    pieces: Tuple[SymbolicHybridSet, ...]
    labels: Tuple[str, ...]
    coefficients: Tuple[Tuple[Tuple[int, ...], ...], ...]
    choice: Optional[ChoiceMatrix] = None

    @property
    def size(self) -> int:
        return len(self.pieces)

    def rewrite(self, k: int, i: int) -> SymbolicHybridSet:
        """Piece i of partition k expanded over the new pieces."""
        out = SymbolicHybridSet.zero()
        for j, c in enumerate(self.coefficients[k][i]):
            if c:
                out = out + self.pieces[j].scale(c)
        return out

    def rewrite_rows(self, k: int) -> Tuple[Tuple[int, ...], ...]:
        return self.coefficients[k]

    def reordered(self, order: Sequence[int]) -> "Refinement":
        """Permute the new pieces; labels are reissued in the new order."""
        if sorted(order) != list(range(self.size)):
            raise ContractError(f"not a permutation of 0..{self.size - 1}: {order!r}")
        pieces = tuple(self.pieces[j] for j in order)
        labels = tuple(f"P{j + 1}" for j in range(self.size))
        coeffs = tuple(
            tuple(tuple(rows[i][j] for j in order) for i in range(len(rows)))
            for rows in self.coefficients
        )
        return Refinement(self.universe, self.partitions, pieces, labels, coeffs, None)

    @classmethod
    def trivial(cls, partition: GeneralisedPartition) -> "Refinement":
        """A partition refines itself."""
        n = len(partition.pieces)
        identity = tuple(
            tuple(int(i == j) for j in range(n)) for i in range(n)
        )
        return cls(
            partition.universe,
            (partition,),
            partition.pieces,
            partition.labels,
            (identity,),
        )


def common_strict_refinement(
    parts: Sequence[GeneralisedPartition],
    choice: Optional[ChoiceMatrix] = None,
    style: str = STYLE_ONES_TOP,
) -> Refinement:
    """Minimal common refinement of several partitions of one universe.

    The kept (independent) pieces are all but the last of each partition;
    the supplied or canonical choice matrix says how the new pieces combine
    into universe and kept pieces, and its exact inverse defines the new
    pieces themselves.
    """
    parts = list(parts)
    if not parts:
        raise ContractError("need at least one partition")
    universe = parts[0].universe
    for p in parts[1:]:
        if p.universe != universe:
            raise RefinementError(
                f"partitions {parts[0].name!r} and {p.name!r} have different universes"
            )
    sizes = [len(p.pieces) for p in parts]
    n = min_refinement_size(sizes)

    row_labels = ["U"]
    rhs = [SymbolicHybridSet.from_atom(universe)]
    for p in parts:
        for label, piece in list(zip(p.labels, p.pieces))[:-1]:
            row_labels.append(f"{p.name}.{label}")
            rhs.append(piece)

    if choice is None:
        choice = canonical_choice_matrix(sizes, style, row_labels)
    if choice.size != n:
        raise RefinementError(
            f"choice matrix is {choice.size}x{choice.size}, refinement needs {n}"
        )
    inverse = choice.inverse()

    pieces = []
    for j in range(n):
        piece = SymbolicHybridSet.zero()
        for i in range(n):
            c = inverse[j][i]
            if c:
                piece = piece + rhs[i].scale(c)
        pieces.append(piece)

    coefficients = []
    row = 1  # row 0 is the universe
    for p in parts:
        rows = []
        kept = len(p.pieces) - 1
        for i in range(kept):
            rows.append(tuple(choice.entries[row + i]))
        # the dropped final piece is universe minus the kept ones
        dropped = list(choice.entries[0])
        for i in range(kept):
            dropped = [d - c for d, c in zip(dropped, choice.entries[row + i])]
        rows.append(tuple(dropped))
        coefficients.append(tuple(rows))
        row += kept

    labels = tuple(f"P{j}" for j in range(1, n + 1))
    return Refinement(universe, tuple(parts), tuple(pieces), labels, tuple(coefficients), choice)


def verify_rewrite(
    refined: Sequence[SymbolicHybridSet],
    original: GeneralisedPartition,
    rewrite: Sequence[Sequence[int]],
    valuation,
    sample: Iterable[Point],
) -> bool:
    """Sampled check that each rewrite reproduces its original piece exactly."""
    for piece, row in zip(original.pieces, rewrite):
        for p in sample:
            got = sum(
                c * refined[j].multiplicity(p, valuation)
                for j, c in enumerate(row)
                if c
            )
            if got != piece.multiplicity(p, valuation):
                return False
    return True


def is_strict(
    refined: Sequence[SymbolicHybridSet],
    original: GeneralisedPartition,
    rewrite: Sequence[Sequence[int]],
    valuation,
    sample: Iterable[Point],
) -> bool:
    """Strictness check: the pieces used to rewrite each original piece must
    not spill support outside it (union of supports, sampled)."""
    sample = list(sample)
    for piece, row in zip(original.pieces, rewrite):
        used = [refined[j] for j, c in enumerate(row) if c]
        union = {
            p for p in sample if any(r.multiplicity(p, valuation) != 0 for r in used)
        }
        own = {p for p in sample if piece.multiplicity(p, valuation) != 0}
        if union != own:
            return False
    return True
