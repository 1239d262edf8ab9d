"""Deterministic instance generators: tightness constructions and seeded tests.

Every generator is a pure function of its arguments; identical seeds give
identical families, id for id and offset for offset.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .hsystem import (
    Box,
    Family,
    HSet,
    HSystem,
    box_to_hset,
    canonical_box_system,
    family,
    family_from_boxes,
    hset_to_box,
    intersect,
)
from .properties import MonotoneProperty, NonEmpty, box_volume, eval_property
from .fractional import density


@dataclass(frozen=True)
class GenSpec:
    """Serializable recipe for the CLI's ``gen`` command."""

    kind: str  # "tight-colorful" | "tight-fractional" | "random" | "dense"
    dim: int
    count: int = 0
    epsilon: Fraction | None = None
    thickness: Fraction | None = None
    clip: Fraction | None = None
    seed: int = 0
    alpha_target: Fraction | None = None
    r: int = 2
    halfspaces: int = 0

    def describe(self) -> dict:
        """Instance-metadata view: the parameters that were actually set."""
        out: dict = {"generator": self.kind, "dim": self.dim, "seed": self.seed}
        if self.count:
            out["count"] = self.count
        if self.epsilon is not None:
            out["epsilon"] = str(self.epsilon)
        if self.thickness is not None:
            out["thickness"] = str(self.thickness)
        if self.clip is not None:
            out["clip"] = str(self.clip)
        if self.alpha_target is not None:
            out["alpha_target"] = str(self.alpha_target)
            out["r"] = self.r
        if self.halfspaces:
            out["halfspaces"] = self.halfspaces
        return out


def _id_width(n: int) -> int:
    return max(2, len(str(max(n - 1, 0))))


def gen_tight_colorful(dim: int, epsilon: Fraction, clip: Fraction | None = None) -> Family:
    """2*dim clipped halfspaces whose full intersection has volume epsilon < 1
    while every (2*dim - 1)-subfamily keeps volume at least 1.

    Side lengths default to (1, ..., 1, epsilon); the clipping cube half-width
    defaults to 2*dim/epsilon and is checked after generation.
    """
    if not Fraction(0) < epsilon < 1:
        raise ValueError("epsilon must be in (0,1)")
    m = clip if clip is not None else Fraction(2 * dim) / epsilon
    if m < 1:
        raise ValueError("clip half-width must be at least 1")
    sides = [Fraction(1)] * (dim - 1) + [epsilon]
    boxes: list[Box] = []
    for j in range(dim):
        lo = tuple(Fraction(0) if i == j else -m for i in range(dim))
        hi = tuple(m for _ in range(dim))
        boxes.append(Box(lo=lo, hi=hi))  # clipped {x_j >= 0}
        lo = tuple(-m for _ in range(dim))
        hi = tuple(sides[j] if i == j else m for i in range(dim))
        boxes.append(Box(lo=lo, hi=hi))  # clipped {x_j <= s_j}
    ids = tuple(f"g{i:0{_id_width(2 * dim)}d}" for i in range(2 * dim))
    fam = family_from_boxes(boxes, ids)
    full = box_volume(hset_to_box(intersect(list(fam.members))))
    if full != epsilon:
        raise RuntimeError("internal error: full intersection volume mismatch")
    for drop in range(2 * dim):
        rest = [m_ for i, m_ in enumerate(fam.members) if i != drop]
        vol = box_volume(hset_to_box(intersect(rest)))
        if vol < 1:
            needed = Fraction(1) if dim == 1 else 1 / epsilon
            raise ValueError(
                f"clip half-width {m} too small: a {2 * dim - 1}-subfamily has "
                f"volume {vol} < 1; use at least {needed}"
            )
    return fam


def singleton_classes(fam: Family) -> list[tuple[str, ...]]:
    """One class per member, in family order (for the tightness experiments)."""
    return [(mid,) for mid in fam.ids]


def gen_tight_fractional(
    dim: int,
    n: int,
    thickness: Fraction = Fraction(1, 4),
    clip: Fraction | None = None,
) -> Family:
    """n thin slabs split across the axes: same-axis slabs are pairwise
    disjoint, cross-axis slabs always meet.

    Slab offsets are consecutive even integers; thickness must stay below 2.
    """
    if n < dim:
        raise ValueError("need at least one slab per axis")
    if thickness <= 0:
        raise ValueError("thickness must be positive")
    if thickness >= 2:
        raise ValueError("thickness too large: same-axis slabs would overlap")
    per_axis = [n // dim + (1 if i < n % dim else 0) for i in range(dim)]
    max_offset = 2 * (max(per_axis) - 1) + thickness
    m = clip if clip is not None else Fraction(2 * max(per_axis) + 1)
    if m < max_offset:
        raise ValueError(f"clip half-width {m} too small for offsets up to {max_offset}")
    boxes: list[Box] = []
    for axis in range(dim):
        for slab in range(per_axis[axis]):
            start = Fraction(2 * slab)
            lo = tuple(start if i == axis else -m for i in range(dim))
            hi = tuple(start + thickness if i == axis else m for i in range(dim))
            boxes.append(Box(lo=lo, hi=hi))
    ids = tuple(f"s{i:0{_id_width(n)}d}" for i in range(n))
    return family_from_boxes(boxes, ids)


def gen_random_system(dim: int, k: int, seed: int) -> HSystem:
    """Seeded general direction system: k nonzero integer normals in [-3, 3]^dim."""
    rng = random.Random(("system", dim, k, seed).__repr__())
    normals = []
    for _ in range(k):
        while True:
            n = tuple(Fraction(rng.randint(-3, 3)) for _ in range(dim))
            if any(c != 0 for c in n):
                normals.append(n)
                break
    return HSystem(dim=dim, normals=tuple(normals))


def gen_random(
    dim: int,
    count: int,
    seed: int,
    system: HSystem | None = None,
) -> Family:
    """Seeded family: boxes with lattice endpoints, or uniform offsets over a
    supplied general system.  A count of zero gives an empty family."""
    rng = random.Random(("family", dim, count, seed).__repr__())
    width = _id_width(count)
    if system is None or system == canonical_box_system(dim):
        boxes = []
        for _ in range(count):
            lo = [Fraction(rng.randint(-40, 40), 4) for _ in range(dim)]
            length = [Fraction(rng.randint(0, 60), 4) for _ in range(dim)]
            boxes.append(Box(lo=tuple(lo), hi=tuple(l + s for l, s in zip(lo, length))))
        ids = tuple(f"b{i:0{width}d}" for i in range(count))
        sys_ = canonical_box_system(dim)
        return family(sys_, [box_to_hset(b) for b in boxes], ids)
    sets = []
    for _ in range(count):
        offsets = tuple(Fraction(rng.randint(-40, 40), 4) for _ in range(system.k))
        sets.append(HSet(system=system, offsets=offsets))
    ids = tuple(f"b{i:0{width}d}" for i in range(count))
    return family(system, sets, ids)


def _min_core_size(n: int, r: int, alpha_target: Fraction) -> int:
    for c in range(r, n + 1):
        if Fraction(comb(c, r), comb(n, r)) >= alpha_target:
            return c
    return n


def _separation_shift(system: HSystem, index: int) -> tuple[Fraction, ...] | None:
    """A translation making translate #index disjoint from the base and from
    earlier translates, probed along coordinate directions."""
    dim = system.dim
    for axis in range(dim):
        for sign in (1, -1):
            direction = tuple(
                Fraction(sign if i == axis else 0) for i in range(dim)
            )
            moved = [sum(c * v for c, v in zip(normal, direction)) for normal in system.normals]
            if any(m < 0 for m in moved) and any(m > 0 for m in moved):
                scale = Fraction(10 * (index + 1))
                return tuple(scale * d for d in direction)
    return None


def gen_dense(
    dim: int,
    n: int,
    alpha_target: Fraction,
    r: int,
    prop: MonotoneProperty,
    seed: int,
    system: HSystem | None = None,
) -> Family:
    """Family whose measured r-tuple density under the property is at least
    alpha_target: a nested core around a shared base plus far-away outliers.

    Core members share the base set and are totally ordered under every
    ordering (distinct margins, one shared shuffle).  Outliers are translates
    of the base pushed until pairwise disjoint; when the system admits no
    separating direction they are simply dropped, which only raises the
    density.  The achieved density is re-measured exactly; the core grows on a
    shortfall.
    """
    if not Fraction(0) < alpha_target <= 1:
        raise ValueError("alpha_target must be in (0, 1]")
    if n < r:
        raise ValueError("need at least r members")
    sys_ = system if system is not None else canonical_box_system(dim)
    base = HSet(system=sys_, offsets=tuple(Fraction(1) for _ in range(sys_.k)))
    if not eval_property(prop, base):
        raise ValueError("the core base set does not satisfy the property")
    rng = random.Random(("dense", dim, n, str(alpha_target), r, seed).__repr__())
    margins = [Fraction(i + 1, 2 * n) for i in range(n)]
    rng.shuffle(margins)
    core_size = _min_core_size(n, r, alpha_target)
    width = _id_width(n)
    while True:
        sets: list[HSet] = []
        placed_shifts: list[tuple[Fraction, ...]] = []
        for i in range(n):
            if i < core_size:
                m = margins[i]
                sets.append(
                    HSet(system=sys_, offsets=tuple(o + m for o in base.offsets))
                )
            else:
                shift = _separation_shift(sys_, i - core_size)
                if shift is None:
                    m = margins[i]
                    sets.append(
                        HSet(system=sys_, offsets=tuple(o + m for o in base.offsets))
                    )
                else:
                    placed_shifts.append(shift)
                    offsets = tuple(
                        o + sum(c * v for c, v in zip(normal, shift))
                        for o, normal in zip(base.offsets, sys_.normals)
                    )
                    sets.append(HSet(system=sys_, offsets=offsets))
        ids = tuple(f"b{i:0{width}d}" for i in range(n))
        fam = family(sys_, sets, ids)
        if density(fam, r, prop) >= alpha_target:
            return fam
        if core_size == n:
            raise ValueError(
                f"could not reach density {alpha_target} with {n} members"
            )
        core_size = min(n, core_size + max(1, (n - core_size) // 2))


def gen_family(
    spec: GenSpec,
    system: HSystem | None = None,
    prop: MonotoneProperty | None = None,
) -> Family:
    """Dispatch a GenSpec to the matching generator."""
    if spec.kind == "tight-colorful":
        if spec.epsilon is None:
            raise ValueError("tight-colorful needs epsilon")
        return gen_tight_colorful(spec.dim, spec.epsilon, spec.clip)
    if spec.kind == "tight-fractional":
        return gen_tight_fractional(
            spec.dim,
            spec.count,
            spec.thickness if spec.thickness is not None else Fraction(1, 4),
            spec.clip,
        )
    sys_ = system
    if sys_ is None and spec.halfspaces:
        sys_ = gen_random_system(spec.dim, spec.halfspaces, spec.seed)
    if spec.kind == "random":
        return gen_random(spec.dim, spec.count, spec.seed, sys_)
    if spec.kind == "dense":
        if spec.alpha_target is None:
            raise ValueError("dense needs alpha_target")
        return gen_dense(
            spec.dim,
            spec.count,
            spec.alpha_target,
            spec.r,
            prop if prop is not None else NonEmpty(),
            spec.seed,
            sys_,
        )
    raise ValueError(f"unknown generator kind {spec.kind!r}")
