"""Shared instance builders for the test suite (seeded, deterministic)."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from hellyprop import (
    Box,
    Family,
    HSet,
    HSystem,
    box_to_hset,
    canonical_box_system,
    family,
    gen_random_system,
)


def random_box(rng: random.Random, dim: int, span: int = 40) -> Box:
    lo = [Fraction(rng.randint(-span, span), 4) for _ in range(dim)]
    length = [Fraction(rng.randint(0, span), 4) for _ in range(dim)]
    return Box(lo=tuple(lo), hi=tuple(l + s for l, s in zip(lo, length)))


def random_box_family(rng: random.Random, dim: int, count: int) -> Family:
    system = canonical_box_system(dim)
    members = [box_to_hset(random_box(rng, dim)) for _ in range(count)]
    ids = tuple(f"b{i:02d}" for i in range(count))
    return family(system, members, ids)


def random_offsets_family(
    rng: random.Random, system: HSystem, count: int, prefix: str = "b"
) -> Family:
    members = [
        HSet(
            system=system,
            offsets=tuple(Fraction(rng.randint(-40, 40), 4) for _ in range(system.k)),
        )
        for _ in range(count)
    ]
    ids = tuple(f"{prefix}{i:03d}" for i in range(count))
    return family(system, members, ids)


def cored_box_family(
    rng: random.Random, dim: int, count: int, core_size: int
) -> Family:
    """core_size members all containing [0,1]^dim, the rest random."""
    system = canonical_box_system(dim)
    members = []
    for i in range(count):
        if i < core_size:
            lo = [Fraction(-rng.randint(0, 8), 4) for _ in range(dim)]
            hi = [Fraction(4 + rng.randint(0, 8), 4) for _ in range(dim)]
            members.append(box_to_hset(Box(lo=tuple(lo), hi=tuple(hi))))
        else:
            members.append(box_to_hset(random_box(rng, dim)))
    ids = tuple(f"b{i:02d}" for i in range(count))
    return family(system, members, ids)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240811)


def triangle_system() -> HSystem:
    return HSystem(
        dim=2,
        normals=(
            (Fraction(1), Fraction(0)),
            (Fraction(0), Fraction(1)),
            (Fraction(-1), Fraction(-1)),
        ),
    )


def seeded_general_system(dim: int, k: int, seed: int) -> HSystem:
    return gen_random_system(dim, k, seed)
