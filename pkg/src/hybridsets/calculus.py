"""Piecewise arithmetic over refinements, signed summation, linear operators.

``pointwise_star`` is the reason the whole layering exists: combining two
piecewise functions produces one term per refinement piece, so iterated
combination grows linearly in the number of pieces instead of doubling the
case analysis at every step.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Union

from .errors import ContractError, RefinementError
from .functions import (
    FreeWord,
    FunctionAtom,
    HybridExpr,
    HybridTerm,
    StarOp,
    UNDEFINED,
    evaluate,
    marked_join,
)
from .regions import Point, RegionAtom, Universe, Valuation, resolve_param
from .refine import GeneralisedPartition, Refinement, common_strict_refinement


def _as_terms(operand) -> tuple:
    if isinstance(operand, HybridExpr):
        return operand.terms
    if isinstance(operand, HybridTerm):
        return (operand,)
    raise TypeError(f"expected an expression or term, got {operand!r}")


def _match_terms(terms, pieces, who: str) -> List[int]:
    """Assign each term the index of its partition piece, bijectively."""
    if len(terms) != len(pieces):
        raise RefinementError(
            f"{who} has {len(terms)} terms but the partition has {len(pieces)} pieces"
        )
    taken = [False] * len(pieces)
    assignment = []
    for t in terms:
        found = None
        for j, piece in enumerate(pieces):
            if not taken[j] and t.region == piece:
                found = j
                break
        if found is None:
            raise RefinementError(
                f"{who}: term region {t.region.render()!r} is not a partition piece"
            )
        taken[found] = True
        assignment.append(found)
    return assignment


def pointwise_star(
    star: StarOp,
    f,
    g,
    refinement: Optional[Refinement] = None,
    universe: Optional[RegionAtom] = None,
) -> HybridExpr:
    """Combine two piecewise operands with an AC star over a common refinement.

    Each operand must be a join of terms whose regions are exactly the pieces
    of the matching partition recorded in the refinement.  When no refinement
    is given and the operands share their region list, the shared partition
    refines itself; otherwise the canonical minimal refinement is built,
    which needs the universe atom.

    The result is a marked join with one term per refinement piece: the term
    word multiplies every operand word raised to its rewrite coefficient for
    that piece.
    """
    if not star.is_ac:
        raise ContractError(f"star {star.name!r} is not declared AC")
    f_terms, g_terms = _as_terms(f), _as_terms(g)

    if refinement is None:
        f_regions = tuple(t.region for t in f_terms)
        g_regions = tuple(t.region for t in g_terms)
        if f_regions == g_regions:
            universe = universe or RegionAtom("U", Universe())
            shared = GeneralisedPartition(
                "shared", universe, f_regions, assumed=True
            )
            refinement = Refinement.trivial(shared)
        else:
            if universe is None:
                raise ContractError(
                    "pointwise_star needs a universe atom to build the canonical refinement"
                )
            pf = GeneralisedPartition("lhs", universe, f_regions, assumed=True)
            pg = GeneralisedPartition("rhs", universe, g_regions, assumed=True)
            refinement = common_strict_refinement([pf, pg])

    if len(refinement.partitions) == 1:
        sources = [refinement.partitions[0].pieces] * 2
    elif len(refinement.partitions) >= 2:
        sources = [refinement.partitions[0].pieces, refinement.partitions[1].pieces]
    else:
        sources = [refinement.pieces] * 2

    assign_f = _match_terms(f_terms, sources[0], "left operand")
    assign_g = _match_terms(g_terms, sources[1], "right operand")
    coeff_f = refinement.coefficients[0]
    coeff_g = refinement.coefficients[1] if len(refinement.coefficients) > 1 else refinement.coefficients[0]

    out_terms = []
    for j in range(refinement.size):
        w = FreeWord()
        for t, i in zip(f_terms, assign_f):
            c = coeff_f[i][j]
            if c:
                w = w.mul(t.word.pow(c))
        for t, i in zip(g_terms, assign_g):
            c = coeff_g[i][j]
            if c:
                w = w.mul(t.word.pow(c))
        if w.is_empty:
            raise ContractError(
                f"value word for refinement piece {refinement.labels[j]} cancelled away"
            )
        out_terms.append(HybridTerm(w, refinement.pieces[j]))
    return marked_join(star, out_terms)


@dataclass
class CheckReport:
    """Outcome of a sampled identity check."""

    name: str
    checked: int = 0
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def record(self, message: str) -> None:
        self.violations.append(message)

    def render(self) -> str:
        status = "OK" if self.passed else "FAIL"
        lines = [f"{self.name}: {status} ({self.checked} checks)"]
        lines.extend(f"  {v}" for v in self.violations)
        return "\n".join(lines)

    def __str__(self):
        return self.render()


def star_inverse_identity_check(
    star: StarOp,
    f: HybridTerm,
    valuation: Optional[Valuation],
    sample: Iterable[Point],
) -> CheckReport:
    """Check that f combined with its star-inverse collapses to the unit
    with the region's own multiplicity, and vanishes off the region."""
    if not star.has_inverse or star.unit is None or star.apply is None:
        raise ContractError(f"star {star.name!r} has no declared inverse and unit")
    items = f.word.items()
    if len(items) != 1 or items[0][1] != 1:
        raise ContractError("inverse check expects a single-atom term")
    base = items[0][0]
    mirrored = FunctionAtom(
        f"~{base.name}", func=lambda p, v: star.invert(base.value(p, v))
    )
    expr = marked_join(
        star, [HybridTerm(f.word.mul(FreeWord.from_atom(mirrored)), f.region)]
    )
    report = CheckReport(f"inverse identity for {base.name!r} under {star.name!r}")
    for p in sample:
        report.checked += 1
        m = f.region.multiplicity(p, valuation)
        out = evaluate(expr, p, valuation)
        if m == 0:
            if out is not UNDEFINED:
                report.record(f"at {p}: expected undefined, got {out}")
        else:
            if out is UNDEFINED:
                report.record(f"at {p}: expected unit with multiplicity {m}")
            elif out.value != star.unit or out.multiplicity != m:
                report.record(
                    f"at {p}: expected {star.unit} with multiplicity {m}, "
                    f"got {out.value} with multiplicity {out.multiplicity}"
                )
    return report


@dataclass(frozen=True)
class KarrSum:
    """A half-open signed sum over integers: bounds may be parameters."""

    lower: Union[int, str, Fraction]
    upper: Union[int, str, Fraction]
    summand: FunctionAtom


def _int_bound(value, valuation) -> int:
    resolved = resolve_param(value if isinstance(value, str) else Fraction(value), valuation)
    if resolved.denominator != 1:
        raise ContractError(f"summation bound {resolved} is not an integer")
    return int(resolved)


def karr_sum(s: KarrSum, valuation: Optional[Valuation] = None) -> Fraction:
    """Sum over lower <= i < upper, with the reversed-bounds convention
    that swapping the bounds negates the sum."""
    lo = _int_bound(s.lower, valuation)
    hi = _int_bound(s.upper, valuation)
    sign = 1
    if lo > hi:
        lo, hi, sign = hi, lo, -1
    total = Fraction(0)
    for i in range(lo, hi):
        total += s.summand.value(Fraction(i), valuation)
    return sign * total


def karr_split_check(
    f: FunctionAtom,
    lower: int,
    mid: int,
    upper: int,
    valuation: Optional[Valuation] = None,
) -> CheckReport:
    """Verify the split and telescoping identities for arbitrary bound order."""
    report = CheckReport(f"signed-sum identities for {f.name!r}")

    whole = karr_sum(KarrSum(lower, upper, f), valuation)
    left = karr_sum(KarrSum(lower, mid, f), valuation)
    right = karr_sum(KarrSum(mid, upper, f), valuation)
    report.checked += 1
    if whole != left + right:
        report.record(
            f"split ({lower},{mid},{upper}): {whole} != {left} + {right}"
        )

    step = FunctionAtom(
        f"{f.name}'", func=lambda x, v: f.value(x + 1, v) - f.value(x, v)
    )
    tele = karr_sum(KarrSum(mid, upper, step), valuation)
    direct = f.value(Fraction(_int_bound(upper, valuation)), valuation) - f.value(
        Fraction(_int_bound(mid, valuation)), valuation
    )
    report.checked += 1
    if tele != direct:
        report.record(f"telescoping ({mid},{upper}): {tele} != {direct}")
    return report


@dataclass(frozen=True)
class LinearOperatorSpec:
    """A declared linear operator acting on sampled values."""

    name: str
    combine: Callable[[Sequence[Fraction]], Fraction] = field(compare=False)


def linearity_report(spec: LinearOperatorSpec) -> CheckReport:
    """Probe additivity and scaling on seeded random value vectors."""
    rng = random.Random(20240915)
    report = CheckReport(f"linearity of {spec.name!r}")
    for _ in range(5):
        n = rng.randint(1, 8)
        a = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n)]
        b = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n)]
        c = Fraction(rng.randint(-5, 5))
        report.checked += 2
        if spec.combine([x + y for x, y in zip(a, b)]) != spec.combine(a) + spec.combine(b):
            report.record(f"additivity fails on vectors of length {n}")
        if spec.combine([c * x for x in a]) != c * spec.combine(a):
            report.record(f"scaling by {c} fails on a vector of length {n}")
    return report


_OPERATORS: dict = {}


def register_linear_operator(spec: LinearOperatorSpec) -> LinearOperatorSpec:
    report = linearity_report(spec)
    if not report.passed:
        raise ContractError(
            f"operator {spec.name!r} failed the linearity self-test: "
            + "; ".join(report.violations)
        )
    _OPERATORS[spec.name] = spec
    return spec


def linear_operator(name: str) -> LinearOperatorSpec:
    try:
        return _OPERATORS[name]
    except KeyError:
        raise ContractError(f"linear operator {name!r} is not declared") from None


SUMMATION = register_linear_operator(
    LinearOperatorSpec("sum", lambda values: sum(values, Fraction(0)))
)


def apply_linear(
    op: Union[LinearOperatorSpec, str],
    f: HybridTerm,
    valuation: Optional[Valuation],
    sample: Iterable[Point],
) -> Fraction:
    """Apply a declared linear operator to a region-weighted function:
    the operand at x is multiplicity(region, x) * f(x)."""
    if isinstance(op, str):
        try:
            op = _OPERATORS[op]
        except KeyError:
            raise ContractError(f"linear operator {op!r} is not declared") from None
    elif op.name not in _OPERATORS:
        raise ContractError(f"linear operator {op.name!r} is not declared")
    items = f.word.items()
    if len(items) != 1 or items[0][1] != 1:
        raise ContractError("apply_linear expects a single-atom term")
    base = items[0][0]
    values = [
        Fraction(f.region.multiplicity(p, valuation)) * base.value(p, valuation)
        for p in sample
    ]
    return op.combine(values)
