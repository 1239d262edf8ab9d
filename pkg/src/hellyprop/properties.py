"""Monotone set properties and the exact decision procedures behind them.

A property is monotone when it survives growing the set: if it holds for B and
B is contained in C, it holds for C.  The built-ins are nonemptiness, having
volume at least v (boxes only), and containing at least n points of a fixed
finite point set; AllOf/AnyOf compose them.  Nonemptiness of a general
H-convex set is decided by exact Fourier-Motzkin elimination over the
rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .hsystem import Box, HSet, Vec, hset_to_box, is_box_system


class MonotoneProperty:
    """Base marker for the pluggable monotone predicates."""


@dataclass(frozen=True)
class NonEmpty(MonotoneProperty):
    pass


@dataclass(frozen=True)
class VolumeAtLeast(MonotoneProperty):
    v: Fraction

    def __post_init__(self) -> None:
        if self.v < 0:
            raise ValueError("volume threshold must be nonnegative")


@dataclass(frozen=True)
class ContainsAtLeast(MonotoneProperty):
    n: int
    points: tuple[Vec, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("point count threshold must be positive")


@dataclass(frozen=True)
class AllOf(MonotoneProperty):
    parts: tuple[MonotoneProperty, ...]


@dataclass(frozen=True)
class AnyOf(MonotoneProperty):
    parts: tuple[MonotoneProperty, ...]


def box_volume(b: Box) -> Fraction:
    """Product of the nonnegative side lengths; 0 for empty boxes."""
    vol = Fraction(1)
    for lo, hi in zip(b.lo, b.hi):
        vol *= max(Fraction(0), hi - lo)
    return vol


def contains_point(s: HSet, p: Vec) -> bool:
    if len(p) != s.system.dim:
        raise ValueError("point dimension must equal the system dimension")
    for normal, offset in zip(s.system.normals, s.offsets):
        if sum(c * x for c, x in zip(normal, p)) > offset:
            return False
    return True


def count_points(s: HSet, points: Sequence[Vec]) -> int:
    return sum(1 for p in points if contains_point(s, p))


# -- exact rational feasibility ----------------------------------------------

IntRow = tuple[tuple[int, ...], int]  # (coefficients, rhs) meaning <coeffs, x> <= rhs


def _to_integer_rows(constraints: Sequence[tuple[Vec, Fraction]]) -> list[IntRow]:
    rows: list[IntRow] = []
    for coeffs, rhs in constraints:
        denoms = [c.denominator for c in coeffs] + [rhs.denominator]
        scale = 1
        for d in denoms:
            scale = scale * d // gcd(scale, d)
        ints = tuple(int(c * scale) for c in coeffs)
        rows.append(_normalize_row((ints, int(rhs * scale))))
    return rows


def _normalize_row(row: IntRow) -> IntRow:
    coeffs, rhs = row
    g = 0
    for c in coeffs:
        g = gcd(g, abs(c))
    g = gcd(g, abs(rhs))
    if g > 1:
        coeffs = tuple(c // g for c in coeffs)
        rhs //= g
    return coeffs, rhs


def fourier_motzkin_feasible(
    constraints: Sequence[tuple[Vec, Fraction]],
    order: Sequence[int] | None = None,
) -> bool:
    """Decide whether {x : <coeffs_i, x> <= rhs_i for all i} is nonempty.

    Variables are eliminated in the given order (default 0..d-1).  Exact
    integer arithmetic throughout; rows are normalized and deduplicated to
    curb the quadratic blowup.  Practical for d <= 4, k <= 12.
    """
    if not constraints:
        return True
    d = len(constraints[0][0])
    rows = _to_integer_rows(constraints)
    elim = list(order) if order is not None else list(range(d))
    if sorted(elim) != list(range(d)):
        raise ValueError("elimination order must be a permutation of the variables")
    for var in elim:
        pos: list[IntRow] = []
        neg: list[IntRow] = []
        rest: list[IntRow] = []
        for coeffs, rhs in rows:
            a = coeffs[var]
            if a > 0:
                pos.append((coeffs, rhs))
            elif a < 0:
                neg.append((coeffs, rhs))
            else:
                if all(c == 0 for c in coeffs) and rhs < 0:
                    return False
                rest.append((coeffs, rhs))
        combined: set[IntRow] = set(rest)
        for pc, pr in pos:
            a = pc[var]
            for nc, nr in neg:
                c = -nc[var]
                coeffs = tuple(c * pv + a * nv for pv, nv in zip(pc, nc))
                rhs = c * pr + a * nr
                if all(cv == 0 for cv in coeffs) and rhs < 0:
                    return False
                combined.add(_normalize_row((coeffs, rhs)))
        rows = list(combined)
    return all(rhs >= 0 for _, rhs in rows)


def feasible(s: HSet, order: Sequence[int] | None = None) -> bool:
    """True iff the represented point set is nonempty."""
    if order is None and is_box_system(s.system):
        b = hset_to_box(s)
        return all(lo <= hi for lo, hi in zip(b.lo, b.hi))
    constraints = list(zip(s.system.normals, s.offsets))
    return fourier_motzkin_feasible(constraints, order)


def eval_property(prop: MonotoneProperty, s: HSet) -> bool:
    """Exact decision of the property on the point set represented by s."""
    if isinstance(prop, NonEmpty):
        return feasible(s)
    if isinstance(prop, VolumeAtLeast):
        if not is_box_system(s.system):
            raise ValueError("volume unsupported: not a box system")
        return box_volume(hset_to_box(s)) >= prop.v
    if isinstance(prop, ContainsAtLeast):
        if prop.points and len(prop.points[0]) != s.system.dim:
            raise ValueError("point dimension must equal the system dimension")
        return count_points(s, prop.points) >= prop.n
    if isinstance(prop, AllOf):
        return all(eval_property(p, s) for p in prop.parts)
    if isinstance(prop, AnyOf):
        return any(eval_property(p, s) for p in prop.parts)
    raise TypeError(f"unknown property: {prop!r}")
