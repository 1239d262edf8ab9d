"""Direction systems and H-convex sets as exact rational offset vectors.

An H-convex set over a fixed list of k halfspace normals is the intersection
of k translated halfspaces ``{x : <n_i, x> <= b_i}`` and is fully described by
its offset vector ``(b_1, ..., b_k)``.  Intersection of such sets is the
componentwise minimum of offsets, and each index i carries a natural preorder:
one set's i-th halfspace is contained in another's exactly when its i-th
offset is no larger.  Axis-parallel boxes are the special case with normals
``+e_1, -e_1, ..., +e_d, -e_d``.

All arithmetic is exact (``fractions.Fraction``); floats are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

RationalLike = Union[Fraction, int, str]
Vec = tuple[Fraction, ...]


def frac(x: RationalLike) -> Fraction:
    """Coerce an int, a 'p/q' string, or a Fraction to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"exact rational required, got {type(x).__name__}: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


def vec(xs: Iterable[RationalLike]) -> Vec:
    return tuple(frac(x) for x in xs)


class Cmp(Enum):
    """Outcome of comparing two sets under one of the k halfspace orderings."""

    LESS = -1
    EQUAL = 0
    GREATER = 1


@dataclass(frozen=True)
class HSystem:
    """A fixed list of halfspace normal directions in dimension ``dim``."""

    dim: int
    normals: tuple[Vec, ...]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if not self.normals:
            raise ValueError("at least one normal is required")
        for n in self.normals:
            if len(n) != self.dim:
                raise ValueError("normal length must equal the dimension")
            if all(c == 0 for c in n):
                raise ValueError("normals must be nonzero")

    @property
    def k(self) -> int:
        return len(self.normals)


@lru_cache(maxsize=None)
def canonical_box_system(dim: int) -> HSystem:
    """The 2*dim-normal system (+e_1, -e_1, ..., +e_d, -e_d) that carries boxes."""
    if dim < 1:
        raise ValueError("dimension must be positive")
    normals: list[Vec] = []
    for j in range(dim):
        plus = tuple(Fraction(1 if i == j else 0) for i in range(dim))
        minus = tuple(Fraction(-1 if i == j else 0) for i in range(dim))
        normals.append(plus)
        normals.append(minus)
    return HSystem(dim=dim, normals=tuple(normals))


def is_box_system(system: HSystem) -> bool:
    return system == canonical_box_system(system.dim)


@dataclass(frozen=True)
class HSet:
    """An H-convex set: one offset per normal of its system (may be empty/unbounded)."""

    system: HSystem
    offsets: Vec

    def __post_init__(self) -> None:
        if len(self.offsets) != self.system.k:
            raise ValueError("offset vector length must equal the system's k")


@dataclass(frozen=True)
class Box:
    """An axis-parallel box, the product of closed intervals [lo_j, hi_j]."""

    lo: Vec
    hi: Vec

    def __post_init__(self) -> None:
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have equal length")
        if not self.lo:
            raise ValueError("dimension must be positive")

    @property
    def dim(self) -> int:
        return len(self.lo)


def box(lo: Iterable[RationalLike], hi: Iterable[RationalLike]) -> Box:
    return Box(lo=vec(lo), hi=vec(hi))


def box_to_hset(b: Box) -> HSet:
    """Embed a box as offsets (hi_1, -lo_1, ..., hi_d, -lo_d) over the canonical system."""
    offsets: list[Fraction] = []
    for j in range(b.dim):
        offsets.append(b.hi[j])
        offsets.append(-b.lo[j])
    return HSet(system=canonical_box_system(b.dim), offsets=tuple(offsets))


def hset_to_box(s: HSet) -> Box:
    if not is_box_system(s.system):
        raise ValueError("not a box system")
    d = s.system.dim
    lo = tuple(-s.offsets[2 * j + 1] for j in range(d))
    hi = tuple(s.offsets[2 * j] for j in range(d))
    return Box(lo=lo, hi=hi)


@dataclass(frozen=True)
class Family:
    """An indexed collection of H-convex sets over one shared system.

    Members are addressed by stable string ids; algorithms report witnesses by
    id, never by position.
    """

    system: HSystem
    members: tuple[HSet, ...]
    ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.members) != len(self.ids):
            raise ValueError("ids and members must have equal length")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("member ids must be unique")
        for m in self.members:
            if m.system != self.system:
                raise ValueError("all members must share the family's system")
        object.__setattr__(self, "_index", dict(zip(self.ids, self.members)))

    def __len__(self) -> int:
        return len(self.members)

    def member(self, member_id: str) -> HSet:
        try:
            return self._index[member_id]  # type: ignore[attr-defined]
        except KeyError:
            raise KeyError(f"no member with id {member_id!r}") from None

    def has_id(self, member_id: str) -> bool:
        return member_id in self._index  # type: ignore[attr-defined]

    def items(self) -> Iterable[tuple[str, HSet]]:
        return zip(self.ids, self.members)


def family(system: HSystem, sets: Iterable[HSet], ids: Iterable[str] | None = None) -> Family:
    members = tuple(sets)
    if ids is None:
        width = max(2, len(str(max(len(members) - 1, 0))))
        ids = tuple(f"b{i:0{width}d}" for i in range(len(members)))
    return Family(system=system, members=members, ids=tuple(ids))


def family_from_boxes(boxes: Iterable[Box], ids: Iterable[str] | None = None) -> Family:
    hsets = [box_to_hset(b) for b in boxes]
    if not hsets:
        raise ValueError("cannot infer a system from an empty box list")
    return family(hsets[0].system, hsets, ids)


def subfamily(f: Family, keep_ids: Iterable[str]) -> Family:
    """Restrict a family to the given ids, preserving the family's member order."""
    keep = set(keep_ids)
    missing = keep - set(f.ids)
    if missing:
        raise KeyError(f"no member with id {sorted(missing)[0]!r}")
    pairs = [(i, m) for i, m in f.items() if i in keep]
    return Family(system=f.system, members=tuple(m for _, m in pairs), ids=tuple(i for i, _ in pairs))


@dataclass(frozen=True)
class ColorClasses:
    """Color classes for the colorful theorems: families over one shared system."""

    classes: tuple[Family, ...]

    def __post_init__(self) -> None:
        if not self.classes:
            raise ValueError("at least one class is required")
        system = self.classes[0].system
        for cls in self.classes:
            if cls.system != system:
                raise ValueError("all classes must share one system")

    @property
    def system(self) -> HSystem:
        return self.classes[0].system


def intersect(sets: Sequence[HSet]) -> HSet:
    """Componentwise-minimum intersection; errors on empty input or mixed systems."""
    if not sets:
        raise ValueError("cannot intersect an empty list of sets")
    system = sets[0].system
    for s in sets[1:]:
        if s.system != system:
            raise ValueError("cannot intersect sets over different systems")
    offsets = tuple(min(s.offsets[i] for s in sets) for i in range(system.k))
    return HSet(system=system, offsets=offsets)


def intersect_ids(f: Family, ids: Iterable[str]) -> HSet:
    return intersect([f.member(i) for i in ids])


def intersect_family(f: Family) -> HSet:
    return intersect(list(f.members))


def compare(s1: HSet, s2: HSet, i: int) -> Cmp:
    """Compare two sets under the i-th ordering (0-based): containment of the
    i-th translated halfspaces, equivalently comparison of the i-th offsets."""
    if s1.system != s2.system:
        raise ValueError("cannot compare sets over different systems")
    if not 0 <= i < s1.system.k:
        raise IndexError(f"ordering index {i} out of range [0, {s1.system.k})")
    a, b = s1.offsets[i], s2.offsets[i]
    if a < b:
        return Cmp.LESS
    if a == b:
        return Cmp.EQUAL
    return Cmp.GREATER


def offset_leq(s1: HSet, s2: HSet) -> bool:
    """True iff every offset of s1 is <= the matching offset of s2.

    This certifies geometric containment s1 <= s2 (the converse need not hold
    when constraints are redundant).
    """
    if s1.system != s2.system:
        raise ValueError("cannot compare sets over different systems")
    return all(a <= b for a, b in zip(s1.offsets, s2.offsets))


def ordered_ids(f: Family, i: int) -> list[str]:
    """Member ids sorted by the i-th ordering, ties broken by id."""
    if not 0 <= i < f.system.k:
        raise IndexError(f"ordering index {i} out of range [0, {f.system.k})")
    return sorted(f.ids, key=lambda mid: (f.member(mid).offsets[i], mid))
