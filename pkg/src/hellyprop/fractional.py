"""Fractional intersection pipelines and the desk-scale piercing search.

The algorithms here are verified sound, never complete: every returned object
carries certificates that re-check from raw offsets, and a None result is
always legal when the input is below the regime the counting arguments need.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, islice, product
from math import comb
from typing import Sequence

from . import limits
from .hsystem import (
    ColorClasses,
    Family,
    Vec,
    hset_to_box,
    intersect,
    intersect_ids,
    is_box_system,
    offset_leq,
    ordered_ids,
    subfamily,
)
from .properties import MonotoneProperty, NonEmpty, eval_property
from .selection import (
    SelectionWitness,
    erdos_szekeres_bound,
    weak_colorful_helly,
)


@dataclass(frozen=True)
class FractionalWitness:
    """Certified output of the prefix-product extraction.

    ``prefixes[i]`` is the discarded leading block under the i-th ordering,
    ``witness_tuple`` picks one member per prefix whose intersection satisfies
    the property, and every survivor contains that intersection offsetwise.
    """

    alpha: Fraction
    gamma: Fraction
    prefix_size: int
    prefixes: tuple[tuple[str, ...], ...]
    witness_tuple: tuple[str, ...]
    survivors: tuple[str, ...]
    beta_achieved: Fraction


@dataclass(frozen=True)
class Hypergraph:
    """r-uniform hypergraph over member ids; edges are sorted id tuples."""

    vertices: tuple[str, ...]
    r: int
    edges: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        seen = set()
        for e in self.edges:
            if len(e) != self.r or len(set(e)) != self.r:
                raise ValueError("edges must be r-element id sets")
            key = frozenset(e)
            if key in seen:
                raise ValueError("duplicate edge")
            seen.add(key)
        object.__setattr__(self, "_edge_set", seen)

    def has_edge(self, ids: Sequence[str]) -> bool:
        return frozenset(ids) in self._edge_set  # type: ignore[attr-defined]


@dataclass(frozen=True)
class PiercingFamily:
    """Pins (each satisfying the property) plus a total containment cover.

    Every pin is the intersection of the recorded source subfamily; the cover
    maps every member id to a pin contained in it (offsetwise).
    """

    pins: tuple[Vec, ...]
    pin_sources: tuple[tuple[str, ...], ...]
    cover: tuple[tuple[str, int], ...]

    def cover_map(self) -> dict[str, int]:
        return dict(self.cover)


@dataclass(frozen=True)
class HypothesisViolation:
    """A p-subset none of whose q-subsets intersects with the property."""

    p: int
    q: int
    p_subset: tuple[str, ...]


@dataclass(frozen=True)
class KPlus1Result:
    """Stages of the hypergraph/weak-colorful pipeline plus the final witness."""

    t: int
    classes: tuple[tuple[str, ...], ...]
    selection: SelectionWitness
    pruned_ids: tuple[str, ...]
    accumulated: tuple[tuple[str, ...], ...]
    alpha_used: Fraction
    fractional: FractionalWitness

    @property
    def survivors(self) -> tuple[str, ...]:
        return self.fractional.survivors


@dataclass(frozen=True)
class PairsResult:
    """Pair-density stage: consistent chains certify intersecting k-tuples."""

    alpha: Fraction
    chain_bound: int
    c_k: Fraction
    alpha_prime: Fraction
    certified_count: int
    total_tuples: int
    certified_alpha: Fraction
    fractional: FractionalWitness

    @property
    def survivors(self) -> tuple[str, ...]:
        return self.fractional.survivors


def root_upper_bound(x: Fraction, n: int, denominator: int = 10**6) -> Fraction:
    """Smallest m/denominator whose n-th power is >= x, for x in [0, 1].

    Rounding up keeps the discarded prefixes at least as large as the counting
    argument assumes.
    """
    if n < 1:
        raise ValueError("root index must be positive")
    if x <= 0:
        return Fraction(0)
    if x >= 1:
        return Fraction(1)
    lo, hi = 0, denominator
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if Fraction(mid, denominator) ** n >= x:
            hi = mid
        else:
            lo = mid
    return Fraction(hi, denominator)


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


# -- density ------------------------------------------------------------------


def _box_pairwise_adjacency(f: Family) -> tuple[list[int], list[int]]:
    """Bitmask adjacency of pairwise-intersecting boxes, restricted to the
    nonempty members; returns (adjacency masks, member indices kept)."""
    boxes = [hset_to_box(m) for m in f.members]
    alive = [
        i
        for i, b in enumerate(boxes)
        if all(lo <= hi for lo, hi in zip(b.lo, b.hi))
    ]
    adj = [0] * len(alive)
    for a in range(len(alive)):
        ba = boxes[alive[a]]
        for b in range(a + 1, len(alive)):
            bb = boxes[alive[b]]
            if all(
                ba.lo[j] <= bb.hi[j] and bb.lo[j] <= ba.hi[j]
                for j in range(ba.dim)
            ):
                adj[a] |= 1 << b
                adj[b] |= 1 << a
    return adj, alive


def _count_cliques(adj: list[int], r: int) -> int:
    """Exact number of r-subsets that are pairwise adjacent.

    Recursion with a complete-subgraph shortcut, so dense instances (a big
    mutually adjacent core) are counted in closed form instead of walked.
    """
    n = len(adj)

    def is_complete(mask: int) -> bool:
        rest = mask
        while rest:
            v = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            if (adj[v] | (1 << v)) & mask != mask:
                return False
        return True

    def count(mask: int, need: int) -> int:
        if need == 0:
            return 1
        size = bin(mask).count("1")
        if size < need:
            return 0
        if is_complete(mask):
            return comb(size, need)
        total = 0
        rest = mask
        while rest:
            v = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            total += count(adj[v] & rest, need - 1)
        return total

    return count((1 << n) - 1, r)


def count_intersecting_tuples(f: Family, r: int, prop: MonotoneProperty) -> int:
    """Exact number of r-subsets whose intersection satisfies the property.

    Box families under NonEmpty use pairwise-clique counting (a box family
    intersects exactly when it intersects pairwise); everything else is plain
    enumeration.
    """
    n = len(f)
    if not 1 <= r <= n:
        raise ValueError(f"tuple size must be in [1, {n}], got {r}")
    if isinstance(prop, NonEmpty) and is_box_system(f.system):
        adj, _ = _box_pairwise_adjacency(f)
        return _count_cliques(adj, r)
    members = list(f.members)
    return sum(
        1
        for combo in combinations(range(n), r)
        if eval_property(prop, intersect([members[i] for i in combo]))
    )


def density(f: Family, r: int, prop: MonotoneProperty) -> Fraction:
    """Exact fraction of r-subsets that intersect with the property."""
    count = count_intersecting_tuples(f, r, prop)
    return Fraction(count, comb(len(f), r))


# -- fractional pipelines -----------------------------------------------------


def fractional_k(
    f: Family,
    prop: MonotoneProperty,
    alpha: Fraction,
    sample: int | None = None,
    sample_seed: int = 0,
) -> FractionalWitness | None:
    """Discard k leading blocks, find a witness tuple in their product.

    The prefix under each ordering has ceil(gamma*n) members (at least 1) with
    gamma an exact rational upper bound on (1-alpha)^(1/(k+1)).  A property-
    satisfying tuple with one member per prefix is contained in every survivor,
    so the survivors intersect with the property.  None is returned only when
    no tuple in the product satisfies the property (with ``sample`` set, the
    scan is randomized and incomplete).
    """
    if not Fraction(0) < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    if len(f) == 0:
        raise ValueError("family must be nonempty")
    k = f.system.k
    n = len(f)
    gamma = root_upper_bound(1 - alpha, k + 1)
    prefix_size = min(n, max(1, _ceil(gamma * n)))
    prefixes = tuple(tuple(ordered_ids(f, i)[:prefix_size]) for i in range(k))
    found: tuple[str, ...] | None = None
    if sample is None:
        for tup in product(*prefixes):
            if eval_property(prop, intersect_ids(f, tup)):
                found = tup
                break
    else:
        rng = random.Random(sample_seed)
        for _ in range(sample):
            tup = tuple(rng.choice(pref) for pref in prefixes)
            if eval_property(prop, intersect_ids(f, tup)):
                found = tup
                break
    if found is None:
        return None
    discarded = set()
    for pref in prefixes:
        discarded.update(pref)
    survivors = tuple(mid for mid in f.ids if mid not in discarded)
    inter = intersect_ids(f, found)
    for mid in survivors:
        if not offset_leq(inter, f.member(mid)):
            raise RuntimeError("internal error: survivor containment failed")
    return FractionalWitness(
        alpha=alpha,
        gamma=gamma,
        prefix_size=prefix_size,
        prefixes=prefixes,
        witness_tuple=found,
        survivors=survivors,
        beta_achieved=Fraction(len(survivors), n),
    )


def build_hypergraph(f: Family, r: int, prop: MonotoneProperty) -> Hypergraph:
    """All r-subsets whose intersection satisfies the property, as hyperedges."""
    n = len(f)
    if not 1 <= r <= n:
        raise ValueError(f"tuple size must be in [1, {n}], got {r}")
    edges = []
    for combo in combinations(sorted(f.ids), r):
        if eval_property(prop, intersect_ids(f, combo)):
            edges.append(combo)
    return Hypergraph(vertices=tuple(sorted(f.ids)), r=r, edges=tuple(edges))


def transversals_complete(graph: Hypergraph, classes: Sequence[Sequence[str]]) -> bool:
    """Every one-per-class choice is an edge (the multipartite completeness check)."""
    return all(graph.has_edge(choice) for choice in product(*classes))


def find_multipartite(
    graph: Hypergraph, r: int, t: int, budget: int = 100_000
) -> tuple[tuple[str, ...], ...] | None:
    """Search for r disjoint classes of t vertices with every transversal an edge.

    Greedy by vertex degree with a bounded backtracking budget; None when the
    budget runs out.  No completeness claim is made: existence in dense
    hypergraphs is an asymptotic fact this finder does not certify.
    """
    if graph.r != r:
        raise ValueError("hypergraph uniformity must match r")
    if r < 1 or t < 1:
        raise ValueError("r and t must be positive")
    if r * t > len(graph.vertices):
        return None
    degree: dict[str, int] = {v: 0 for v in graph.vertices}
    for e in graph.edges:
        for v in e:
            degree[v] += 1
    order = sorted(graph.vertices, key=lambda v: (-degree[v], v))
    rank = {v: i for i, v in enumerate(order)}
    classes: list[list[str]] = [[] for _ in range(r)]
    used: set[str] = set()
    steps = 0

    def admissible(v: str, ci: int) -> bool:
        others = [classes[cj] for cj in range(r) if cj != ci]
        if any(not grp for grp in others):
            return True
        return all(graph.has_edge((v, *pick)) for pick in product(*others))

    def fill(slot: int) -> bool:
        nonlocal steps
        if slot == r * t:
            return True
        rnd, ci = divmod(slot, r)
        start = 0
        if classes[ci]:
            start = rank[classes[ci][-1]] + 1
        elif ci > 0 and classes[ci - 1]:
            # classes are unordered: force ascending leading vertices
            start = rank[classes[ci - 1][0]] + 1
        for v in order[start:]:
            if v in used:
                continue
            steps += 1
            if steps > budget:
                return False
            if not admissible(v, ci):
                continue
            classes[ci].append(v)
            used.add(v)
            if fill(slot + 1):
                return True
            classes[ci].pop()
            used.remove(v)
            if steps > budget:
                return False
        return False

    if not fill(0):
        return None
    return tuple(tuple(sorted(grp)) for grp in classes)


def default_block_size(k: int) -> int:
    """The class size the pipeline uses when no override is given:
    2^(k(2k+1)+1) * (2k+1)."""
    return 2 ** (k * (2 * k + 1) + 1) * (2 * k + 1)


def fractional_kplus1(
    f: Family,
    prop: MonotoneProperty,
    alpha: Fraction,
    t_override: int | None = None,
    budget: int = 100_000,
    accumulate_cap: int = 64,
) -> KPlus1Result | None:
    """(k+1)-tuple hypothesis over a (2k+1)-normal system, full pipeline.

    Builds the (k+1)-uniform intersection hypergraph, extracts a complete
    multipartite block, runs the weak colorful selection on its classes, and
    accumulates property-satisfying (2k+1)-tuples: each combines the selection
    with extra survivors of the pivot class.  The closing step hands the exact
    measured (2k+1)-tuple density to the prefix-product extraction, whose
    witness is the returned subfamily's certificate.
    """
    kt = f.system.k
    if kt % 2 == 0:
        raise ValueError("system must have an odd number of normals (2k+1)")
    if not Fraction(0) < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    k = (kt - 1) // 2
    r = k + 1
    t = t_override if t_override is not None else default_block_size(k)
    graph = build_hypergraph(f, r, prop)
    class_ids = find_multipartite(graph, r, t, budget=budget)
    if class_ids is None:
        return None
    color = ColorClasses(classes=tuple(subfamily(f, ids) for ids in class_ids))
    witness, pruned = weak_colorful_helly(color)
    grid_classes = _grid_classes_for(color)
    accumulated = _accumulate_tuples(
        f, prop, witness, pruned, grid_classes, k, cap=accumulate_cap
    )
    alpha_used = density(f, kt, prop)
    if alpha_used == 0:
        return None
    fractional = fractional_k(f, prop, alpha_used)
    if fractional is None:
        return None
    return KPlus1Result(
        t=t,
        classes=class_ids,
        selection=witness,
        pruned_ids=pruned.ids,
        accumulated=accumulated,
        alpha_used=alpha_used,
        fractional=fractional,
    )


def _grid_classes_for(color: ColorClasses) -> tuple[Family, ...]:
    from .selection import consistent_grid

    return consistent_grid(color).classes


def _accumulate_tuples(
    f: Family,
    prop: MonotoneProperty,
    witness: SelectionWitness,
    pruned: Family,
    grid_classes: tuple[Family, ...],
    k: int,
    cap: int,
) -> tuple[tuple[str, ...], ...]:
    pivot = witness.pivot_class
    pivot_pick = witness.chosen[pivot]
    extras_pool = [mid for mid in pruned.ids if mid != pivot_pick]
    other_pools = [
        grid_classes[ci].ids
        for ci in range(len(grid_classes))
        if ci != pivot
    ]
    tuples: list[tuple[str, ...]] = []
    choices = product(combinations(extras_pool, k), *other_pools)
    for extras, *others in islice(choices, cap):
        tup = tuple(sorted((pivot_pick, *extras, *others)))
        if not eval_property(prop, intersect_ids(f, tup)):
            raise RuntimeError("internal error: accumulated tuple fails the property")
        tuples.append(tup)
    return tuple(tuples)


def is_consistent_subset(members: Sequence[tuple[str, Vec]]) -> bool:
    """The members admit an order monotone under every coordinate
    (checked by sorting under the first ordering, ties by id)."""
    seq = sorted(members, key=lambda item: (item[1][0], item[0]))
    if len(seq) < 2:
        return True
    k = len(seq[0][1])
    for coord in range(k):
        vals = [offsets[coord] for _, offsets in seq]
        ascending = all(a <= b for a, b in zip(vals, vals[1:]))
        descending = all(a >= b for a, b in zip(vals, vals[1:]))
        if not (ascending or descending):
            return False
    return True


def pairs_chain_constant(k: int) -> tuple[int, Fraction]:
    """(N, c_k): any N members contain a consistent k-chain, and a c_k fraction
    of all k-subsets is consistently ordered as a consequence."""
    n_bound = erdos_szekeres_bound(k, k)
    return n_bound, Fraction(1, comb(n_bound, k))


def fractional_pairs(
    f: Family, prop: MonotoneProperty, alpha: Fraction
) -> PairsResult | None:
    """Pair-density hypothesis: consistent chains upgrade pairs to k-tuples.

    Counts the k-subsets that are consistently ordered with every pair
    intersecting under the property; each such subset intersects with the
    property because a consistent chain's intersection collapses to its two
    extremes.  The exact certified k-tuple density is then handed to the
    prefix-product extraction.
    """
    k = f.system.k
    n_bound, c_k = pairs_chain_constant(k)
    if not (1 - c_k) < alpha <= 1:
        raise ValueError(
            f"alpha must lie in (1 - c_k, 1] with c_k = {c_k} (chain bound N = {n_bound})"
        )
    n = len(f)
    if n < k:
        raise ValueError(f"family must have at least k = {k} members")
    alpha_prime = alpha + c_k - 1
    pair_ok: dict[frozenset[str], bool] = {}

    def pair_intersecting(a: str, b: str) -> bool:
        key = frozenset((a, b))
        if key not in pair_ok:
            pair_ok[key] = eval_property(prop, intersect_ids(f, (a, b)))
        return pair_ok[key]

    count = 0
    for combo in combinations(sorted(f.ids), k):
        if not all(pair_intersecting(a, b) for a, b in combinations(combo, 2)):
            continue
        if is_consistent_subset([(mid, f.member(mid).offsets) for mid in combo]):
            count += 1
    total = comb(n, k)
    certified = Fraction(count, total)
    if certified == 0:
        return None
    fractional = fractional_k(f, prop, certified)
    if fractional is None:
        return None
    return PairsResult(
        alpha=alpha,
        chain_bound=n_bound,
        c_k=c_k,
        alpha_prime=alpha_prime,
        certified_count=count,
        total_tuples=total,
        certified_alpha=certified,
        fractional=fractional,
    )


# -- piercing -----------------------------------------------------------------


def maximal_intersecting_subfamilies(
    f: Family, prop: MonotoneProperty
) -> list[tuple[str, ...]]:
    """All maximal subfamilies whose intersection satisfies the property.

    Property-satisfying subfamilies are downward closed (shrinking a subfamily
    grows the intersection), so maximality is one-element extension failure.
    Exhaustive over subsets; gated by the piercing family limit.
    """
    limits.check_family_size(len(f), limits.PQ_FAMILY_LIMIT, "maximal-subfamily search")
    ids = list(f.ids)
    n = len(ids)
    members = [f.member(mid) for mid in ids]
    good = [False] * (1 << n)
    for mask in range(1, 1 << n):
        chosen = [members[i] for i in range(n) if mask >> i & 1]
        good[mask] = eval_property(prop, intersect(chosen))
    result = []
    for mask in range(1, 1 << n):
        if not good[mask]:
            continue
        if any(
            not mask >> i & 1 and good[mask | (1 << i)] for i in range(n)
        ):
            continue
        result.append(tuple(ids[i] for i in range(n) if mask >> i & 1))
    return result


def pq_pierce(
    f: Family,
    prop: MonotoneProperty,
    p: int,
    q: int,
    improvement_cap: int = 200_000,
) -> PiercingFamily | HypothesisViolation:
    """Direct search for a small piercing family under the (p, q) hypothesis.

    Exhaustively scans every p-subset for a property-intersecting q-subset;
    a failure is returned as the violating p-subset.  On success the candidate
    pins are the intersections of maximal property-intersecting subfamilies,
    covered greedily and then improved exhaustively when the candidate space
    is small enough.
    """
    # Threshold floor(k/2) + 1 is the tuple size of the matching fractional
    # pipeline: d + 1 for boxes in R^d, k + 1 for a (2k+1)-normal system.
    threshold = f.system.k // 2 + 1
    if not p >= q >= threshold:
        raise ValueError(f"need p >= q >= {threshold}, got p={p}, q={q}")
    limits.check_family_size(len(f), limits.PQ_FAMILY_LIMIT, "piercing search")
    inter_ok: dict[frozenset[str], bool] = {}

    def subset_ok(ids: Sequence[str]) -> bool:
        key = frozenset(ids)
        if key not in inter_ok:
            inter_ok[key] = eval_property(prop, intersect_ids(f, ids))
        return inter_ok[key]

    for p_subset in combinations(sorted(f.ids), p):
        if not any(subset_ok(q_subset) for q_subset in combinations(p_subset, q)):
            return HypothesisViolation(p=p, q=q, p_subset=p_subset)
    for mid in f.ids:
        if not subset_ok((mid,)):
            raise ValueError(
                f"member {mid!r} does not itself satisfy the property; "
                "no pin can be contained in it"
            )
    sources = maximal_intersecting_subfamilies(f, prop)
    pins = [intersect_ids(f, src) for src in sources]
    coverage = [
        frozenset(mid for mid in f.ids if offset_leq(pin, f.member(mid)))
        for pin in pins
    ]
    chosen = _greedy_cover(list(f.ids), coverage)
    improved = _improve_cover(
        set(f.ids), coverage, len(chosen), improvement_cap
    )
    if improved is not None:
        chosen = improved
    cover: list[tuple[str, int]] = []
    for mid in f.ids:
        pin_idx = next(j for j, ci in enumerate(chosen) if mid in coverage[ci])
        cover.append((mid, pin_idx))
    return PiercingFamily(
        pins=tuple(pins[ci].offsets for ci in chosen),
        pin_sources=tuple(sources[ci] for ci in chosen),
        cover=tuple(cover),
    )


def _greedy_cover(universe: list[str], coverage: list[frozenset[str]]) -> list[int]:
    uncovered = set(universe)
    chosen: list[int] = []
    while uncovered:
        best = max(
            range(len(coverage)),
            key=lambda ci: (len(coverage[ci] & uncovered), -ci),
        )
        if not coverage[best] & uncovered:
            raise RuntimeError("internal error: uncoverable member in greedy cover")
        chosen.append(best)
        uncovered -= coverage[best]
    return chosen


def _improve_cover(
    universe: set[str],
    coverage: list[frozenset[str]],
    below: int,
    cap: int,
) -> list[int] | None:
    for size in range(1, below):
        if comb(len(coverage), size) > cap:
            return None
        for combo in combinations(range(len(coverage)), size):
            covered: set[str] = set()
            for ci in combo:
                covered |= coverage[ci]
            if covered >= universe:
                return list(combo)
    return None
