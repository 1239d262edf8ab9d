"""Constructive selection theorems over the k halfspace orderings.

Every algorithm here returns machine-checkable evidence: offset comparisons
for the containment claims, direction profiles for chains.  Verifying a
certificate never requires re-running the algorithm that produced it.

Determinism: ties under any ordering are broken by stable member id (and by
class index where several classes are in play).  The certificates never depend
on which way a tie broke, only on the run being reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from .hsystem import (
    ColorClasses,
    Family,
    HSet,
    Vec,
    intersect,
    ordered_ids,
    subfamily,
)

# (member_id, coordinate, intersection offset, member offset); the inequality
# lhs <= rhs is what certifies containment at that coordinate.
ComparisonRecord = tuple[str, int, Fraction, Fraction]

SplitDirection = Literal["F1<F2", "F2<F1"]


@dataclass(frozen=True)
class SelectionWitness:
    """Certified output of a colorful selection.

    ``chosen[c]`` is the selected member id of class c.  For ``kind ==
    "colorful"`` the permutation lists the class picked at each construction
    step and the pivot is the last one; for ``kind == "weak_colorful"`` the
    permutation records, per ordering, which class formed the leading block,
    and the certificate covers the surviving ``pruned_ids`` of the pivot class.
    """

    kind: Literal["colorful", "weak_colorful"]
    chosen: tuple[str, ...]
    pivot_class: int
    permutation: tuple[int, ...]
    intersection: Vec
    certificate: tuple[ComparisonRecord, ...]
    pruned_ids: tuple[str, ...] | None = None


@dataclass(frozen=True)
class ChainWitness:
    """A tuple of members whose offsets are monotone under every ordering."""

    ids: tuple[str, ...]
    direction_profile: tuple[Literal["ascending", "descending"], ...]


@dataclass(frozen=True)
class StrongHellyWitness:
    """Subfamily whose intersection equals the full family's, offset for offset."""

    ids: tuple[str, ...]
    intersection: Vec


def strong_helly_witness(f: Family) -> StrongHellyWitness:
    """Pick, per ordering, the member attaining the minimum offset.

    The resulting subfamily has at most k members and its intersection equals
    the whole family's intersection exactly at the offset level.
    """
    if len(f) == 0:
        raise ValueError("family must be nonempty")
    picked: list[str] = []
    for i in range(f.system.k):
        best = ordered_ids(f, i)[0]
        if best not in picked:
            picked.append(best)
    inter = intersect([f.member(m) for m in picked])
    return StrongHellyWitness(ids=tuple(picked), intersection=inter.offsets)


def _containment_certificate(
    inter: HSet, target: Family
) -> tuple[ComparisonRecord, ...]:
    records: list[ComparisonRecord] = []
    for mid, member in target.items():
        for coord in range(inter.system.k):
            lhs = inter.offsets[coord]
            rhs = member.offsets[coord]
            if lhs > rhs:
                raise RuntimeError("internal error: containment certificate failed")
            records.append((mid, coord, lhs, rhs))
    return tuple(records)


def colorful_select(classes: ColorClasses) -> SelectionWitness:
    """Sequential minimal selection across k classes of a k-normal system.

    Step i takes the globally minimal member under the i-th ordering among all
    classes not yet consumed; that member's class is consumed.  The class
    consumed last is the pivot: the intersection of the selection is contained
    in every member of the pivot class, certified coordinatewise.
    """
    k = classes.system.k
    c = len(classes.classes)
    if c != k:
        raise ValueError(f"expected {k} classes for a {k}-normal system, got {c}")
    for cls in classes.classes:
        if len(cls) == 0:
            raise ValueError("classes must be nonempty")
    remaining = list(range(c))
    permutation: list[int] = []
    chosen: list[str | None] = [None] * c
    for i in range(k):
        best: tuple[Fraction, int, str] | None = None
        for ci in remaining:
            for mid, member in classes.classes[ci].items():
                key = (member.offsets[i], ci, mid)
                if best is None or key < best:
                    best = key
        assert best is not None
        _, best_class, best_id = best
        permutation.append(best_class)
        remaining.remove(best_class)
        chosen[best_class] = best_id
    chosen_ids = tuple(mid for mid in chosen if mid is not None)
    assert len(chosen_ids) == c
    inter = intersect(
        [classes.classes[ci].member(chosen_ids[ci]) for ci in range(c)]
    )
    pivot = permutation[-1]
    certificate = _containment_certificate(inter, classes.classes[pivot])
    return SelectionWitness(
        kind="colorful",
        chosen=chosen_ids,
        pivot_class=pivot,
        permutation=tuple(permutation),
        intersection=inter.offsets,
        certificate=certificate,
    )


def consistent_split(
    f1: Family,
    f2: Family,
    h: int,
    tags: tuple[int, int] = (0, 1),
) -> tuple[Family, Family, SplitDirection]:
    """Halve two families so one output wholly precedes the other under <_h.

    Sorts the union under (offset_h, tag, id), takes the first half, and keeps
    the halves of each family that landed on one side.  Output sizes are
    floor(|f1|/2) and floor(|f2|/2); the returned direction says which output
    precedes the other (strictly under the tie-broken total order).
    """
    if f1.system != f2.system:
        raise ValueError("families must share one system")
    if len(f1) == 0 or len(f2) == 0:
        raise ValueError("families must be nonempty")
    if not 0 <= h < f1.system.k:
        raise IndexError(f"ordering index {h} out of range [0, {f1.system.k})")
    if tags[0] == tags[1]:
        raise ValueError("tags must differ")
    m, n = len(f1), len(f2)
    entries = [(member.offsets[h], tags[0], mid) for mid, member in f1.items()]
    entries += [(member.offsets[h], tags[1], mid) for mid, member in f2.items()]
    entries.sort()
    half = (m + n) // 2
    first, second = entries[:half], entries[half:]
    x1 = [mid for _, t, mid in first if t == tags[0]]
    x2 = [mid for _, t, mid in first if t == tags[1]]
    y1 = [mid for _, t, mid in second if t == tags[0]]
    y2 = [mid for _, t, mid in second if t == tags[1]]
    if len(x1) >= m // 2 and len(y2) >= n // 2:
        out1, out2 = x1[: m // 2], y2[: n // 2]
        direction: SplitDirection = "F1<F2"
    else:
        out1, out2 = y1[: m // 2], x2[: n // 2]
        direction = "F2<F1"
    return subfamily(f1, out1), subfamily(f2, out2), direction


def families_consistent(f1: Family, f2: Family, h: int) -> bool:
    """All of one family precedes all of the other under <_h (ties allowed)."""
    a = [member.offsets[h] for member in f1.members]
    b = [member.offsets[h] for member in f2.members]
    if not a or not b:
        return True
    return max(a) <= min(b) or max(b) <= min(a)


def grid_required_size(class_count: int, k_normals: int) -> int:
    """Post-trim class size needed so the halving schedule bottoms out at >= 1."""
    return 2 ** ((class_count - 1) * k_normals)


def consistent_grid(classes: ColorClasses) -> ColorClasses:
    """Shrink every class until each pair is consistently ordered everywhere.

    Classes are first trimmed to a common power of two (keeping the
    lexicographically first ids), then the pairwise split runs over pairs in
    lexicographic order with the orderings innermost.  Each class is halved
    once per (partner, ordering), so the output classes have equal size
    trimmed / 2^((c-1)*k).
    """
    c = len(classes.classes)
    kt = classes.system.k
    required = grid_required_size(c, kt)
    smallest = min(len(cls) for cls in classes.classes)
    trimmed = 1 << (smallest.bit_length() - 1) if smallest else 0
    if trimmed < required:
        raise ValueError(
            f"classes too small: need at least {required} members per class "
            f"after power-of-two trimming, smallest class has {smallest}"
        )
    current = [
        subfamily(cls, sorted(cls.ids)[:trimmed]) for cls in classes.classes
    ]
    for i in range(c):
        for j in range(i + 1, c):
            for h in range(kt):
                a, b, _ = consistent_split(current[i], current[j], h, tags=(i, j))
                current[i], current[j] = a, b
    return ColorClasses(classes=tuple(current))


def _leading_block(grid: ColorClasses, h: int) -> int:
    """Smallest class index whose members all precede every other class under <_h."""
    stats = []
    for cls in grid.classes:
        vals = [member.offsets[h] for member in cls.members]
        stats.append((min(vals), max(vals)))
    for ci, (_, hi) in enumerate(stats):
        if all(hi <= lo for cj, (lo, _) in enumerate(stats) if cj != ci):
            return ci
    raise RuntimeError("internal error: no leading block after consistent_grid")


def weak_colorful_helly(classes: ColorClasses) -> tuple[SelectionWitness, Family]:
    """Selection plus a large surviving chunk of one class that it pins down.

    Requires k+1 equally sized classes over a (2k+1)-normal system, each of
    size at least 2^(k(2k+1)+1).  After the consistent grid, some class leads
    under at most one ordering; its minimal member under that ordering plus
    arbitrary members elsewhere intersect inside every survivor of that class.
    The survivors keep at least a 2^(-k(2k+1)-1) fraction of the class.
    """
    kt = classes.system.k
    if kt % 2 == 0:
        raise ValueError("system must have an odd number of normals (2k+1)")
    k = (kt - 1) // 2
    c = len(classes.classes)
    if c != k + 1:
        raise ValueError(f"expected {k + 1} classes for a {kt}-normal system, got {c}")
    sizes = [len(cls) for cls in classes.classes]
    required = 2 ** (k * kt + 1)
    if min(sizes) < required:
        raise ValueError(
            f"each class needs at least {required} members, smallest has {min(sizes)}"
        )
    if len(set(sizes)) != 1:
        raise ValueError(f"classes must have equal sizes, got {sizes}")
    grid = consistent_grid(classes)
    leaders = tuple(_leading_block(grid, h) for h in range(kt))
    counts = [leaders.count(ci) for ci in range(c)]
    pivot = next(ci for ci in range(c) if counts[ci] <= 1)
    lead_orderings = [h for h in range(kt) if leaders[h] == pivot]
    chosen: list[str] = []
    for ci in range(c):
        cls = grid.classes[ci]
        if ci == pivot and lead_orderings:
            h0 = lead_orderings[0]
            chosen.append(
                min(cls.ids, key=lambda mid: (cls.member(mid).offsets[h0], mid))
            )
        else:
            chosen.append(min(cls.ids))
    inter = intersect([grid.classes[ci].member(chosen[ci]) for ci in range(c)])
    pruned = grid.classes[pivot]
    certificate = _containment_certificate(inter, pruned)
    if len(pruned) * 2 ** (k * kt + 1) < len(classes.classes[pivot]):
        raise RuntimeError("internal error: survivor bound violated")
    witness = SelectionWitness(
        kind="weak_colorful",
        chosen=tuple(chosen),
        pivot_class=pivot,
        permutation=leaders,
        intersection=inter.offsets,
        certificate=certificate,
        pruned_ids=pruned.ids,
    )
    return witness, pruned


def erdos_szekeres_bound(k: int, target: int) -> int:
    """Family size that forces a consistent chain of the target length:
    (target-1)^(2^(k-1)) + 1 via iterated monotone-subsequence extraction."""
    if k < 1 or target < 1:
        raise ValueError("k and target must be positive")
    return (target - 1) ** (2 ** (k - 1)) + 1


def _longest_monotone(
    seq: list[tuple[str, Vec]], coord: int, ascending: bool
) -> list[tuple[str, Vec]]:
    # O(n^2) DP; ties count as monotone in either direction.
    n = len(seq)
    if n == 0:
        return []
    best_len = [1] * n
    prev = [-1] * n
    for i in range(n):
        for j in range(i):
            a, b = seq[j][1][coord], seq[i][1][coord]
            ok = a <= b if ascending else a >= b
            if ok and best_len[j] + 1 > best_len[i]:
                best_len[i] = best_len[j] + 1
                prev[i] = j
    end = max(range(n), key=lambda i: (best_len[i], -i))
    out: list[tuple[str, Vec]] = []
    while end != -1:
        out.append(seq[end])
        end = prev[end]
    out.reverse()
    return out


def consistent_chain(f: Family, target: int) -> ChainWitness | None:
    """Extract a chain of the target length ordered consistently everywhere.

    Sorts by the first ordering, then repeatedly keeps a longest monotone
    subsequence under each further ordering (ascending preferred on ties).
    Returns None when the iterated extraction falls short; any family of size
    at least erdos_szekeres_bound(k, target) is guaranteed to succeed.
    """
    if target < 2:
        raise ValueError("target chain length must be at least 2")
    k = f.system.k
    seq = [(mid, f.member(mid).offsets) for mid in ordered_ids(f, 0)]
    profile: list[Literal["ascending", "descending"]] = ["ascending"]
    for coord in range(1, k):
        asc = _longest_monotone(seq, coord, ascending=True)
        desc = _longest_monotone(seq, coord, ascending=False)
        if len(asc) >= len(desc):
            seq = asc
            profile.append("ascending")
        else:
            seq = desc
            profile.append("descending")
    if len(seq) < target:
        return None
    seq = seq[:target]
    return ChainWitness(
        ids=tuple(mid for mid, _ in seq), direction_profile=tuple(profile)
    )


def chain_is_consistent(chain: Sequence[HSet], witness: ChainWitness) -> bool:
    if len(chain) != len(witness.ids):
        return False
    if not chain:
        return False
    k = chain[0].system.k
    if len(witness.direction_profile) != k:
        return False
    for coord, direction in enumerate(witness.direction_profile):
        for a, b in zip(chain, chain[1:]):
            x, y = a.offsets[coord], b.offsets[coord]
            if direction == "ascending" and x > y:
                return False
            if direction == "descending" and x < y:
                return False
    return True


def chain_intersection(chain: Sequence[HSet], witness: ChainWitness) -> HSet:
    """Intersection of a consistent chain collapses to first-meets-last.

    Re-validates the witness, then returns intersect({first, last}) after
    checking it equals the full chain's intersection offset for offset.
    """
    if not chain_is_consistent(chain, witness):
        raise ValueError("not consistently ordered")
    ends = intersect([chain[0], chain[-1]])
    full = intersect(list(chain))
    if ends.offsets != full.offsets:
        raise RuntimeError("internal error: chain intersection did not collapse")
    return ends
