"""Exhaustive brute-force verifiers and the independent certificate checker.

Everything here is ground truth for the tests: small instances are searched
completely, and every certificate emitted by the algorithms can be re-checked
from raw offsets without re-running the algorithm that produced it.  Value
mismatches make the checks return False; structural problems (unknown ids,
malformed shapes) raise CertificateError.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb

from . import limits
from .fractional import (
    FractionalWitness,
    HypothesisViolation,
    KPlus1Result,
    PairsResult,
    PiercingFamily,
    is_consistent_subset,
    pairs_chain_constant,
    root_upper_bound,
    _ceil,
)
from .hsystem import (
    ColorClasses,
    Family,
    intersect,
    intersect_ids,
    offset_leq,
    ordered_ids,
)
from .properties import MonotoneProperty, eval_property
from .selection import ChainWitness, SelectionWitness, StrongHellyWitness


class CertificateError(Exception):
    """A certificate is structurally unusable (dangling ids, malformed data)."""


@dataclass(frozen=True)
class ColorfulReport:
    """Exhaustive truth values for a colorful instance."""

    hypothesis_holds: bool
    conclusion_holds: bool
    violating_selection: tuple[str, ...] | None
    witness_class: int | None


def brute_min_witness(f: Family) -> tuple[str, ...]:
    """Smallest subfamily (size order, then lexicographic) with the same
    intersection offsets as the whole family."""
    limits.check_family_size(len(f), limits.BRUTE_FAMILY_LIMIT, "brute_min_witness")
    if len(f) == 0:
        raise ValueError("family must be nonempty")
    target = intersect(list(f.members)).offsets
    for size in range(1, len(f) + 1):
        for combo in combinations(sorted(f.ids), size):
            if intersect_ids(f, combo).offsets == target:
                return combo
    raise RuntimeError("unreachable: the full family matches itself")


def brute_colorful(classes: ColorClasses, prop: MonotoneProperty) -> ColorfulReport:
    """Exhaustively decide both sides of the colorful implication:
    every selection intersecting with the property, and some whole class doing so."""
    sizes = [len(cls) for cls in classes.classes]
    if any(s == 0 for s in sizes):
        raise ValueError("classes must be nonempty")
    total = 1
    for s in sizes:
        total *= s
    if total > limits.TRANSVERSAL_LIMIT:
        raise ValueError(
            f"transversal count {total} exceeds the gate {limits.TRANSVERSAL_LIMIT}"
        )
    hypothesis = True
    violating: tuple[str, ...] | None = None
    for choice in product(*[list(cls.items()) for cls in classes.classes]):
        if not eval_property(prop, intersect([member for _, member in choice])):
            hypothesis = False
            violating = tuple(mid for mid, _ in choice)
            break
    conclusion = False
    witness_class: int | None = None
    for ci, cls in enumerate(classes.classes):
        if eval_property(prop, intersect(list(cls.members))):
            conclusion = True
            witness_class = ci
            break
    return ColorfulReport(
        hypothesis_holds=hypothesis,
        conclusion_holds=conclusion,
        violating_selection=violating,
        witness_class=witness_class,
    )


def brute_best_subfamily(f: Family, prop: MonotoneProperty) -> tuple[str, ...]:
    """Largest subfamily whose intersection satisfies the property (may be empty)."""
    limits.check_family_size(len(f), limits.BRUTE_FAMILY_LIMIT, "brute_best_subfamily")
    for size in range(len(f), 0, -1):
        for combo in combinations(sorted(f.ids), size):
            if eval_property(prop, intersect_ids(f, combo)):
                return combo
    return ()


def brute_pierce(
    f: Family, prop: MonotoneProperty, bound: int
) -> PiercingFamily | None:
    """Minimal piercing family within the size bound, or None.

    Candidate pins are intersections of maximal property-intersecting
    subfamilies (sufficient: any pin cover converts into one of these without
    growing).  Exhaustive over pin tuples in size order.
    """
    from .fractional import maximal_intersecting_subfamilies

    limits.check_family_size(len(f), limits.PIERCE_FAMILY_LIMIT, "brute_pierce")
    if bound > 4:
        raise ValueError("brute_pierce is gated at bound <= 4")
    sources = maximal_intersecting_subfamilies(f, prop)
    pins = [intersect_ids(f, src) for src in sources]
    coverage = [
        frozenset(mid for mid in f.ids if offset_leq(pin, f.member(mid)))
        for pin in pins
    ]
    universe = set(f.ids)
    for size in range(1, bound + 1):
        if comb(len(pins), size) > limits.TRANSVERSAL_LIMIT:
            raise ValueError("candidate pin combinations exceed the gate")
        for combo in combinations(range(len(pins)), size):
            covered: set[str] = set()
            for ci in combo:
                covered |= coverage[ci]
            if covered >= universe:
                cover = tuple(
                    (mid, next(j for j, ci in enumerate(combo) if mid in coverage[ci]))
                    for mid in f.ids
                )
                return PiercingFamily(
                    pins=tuple(pins[ci].offsets for ci in combo),
                    pin_sources=tuple(sources[ci] for ci in combo),
                    cover=cover,
                )
    return None


# -- certificate verification --------------------------------------------------


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CertificateError(message)


def _member_or_fail(f: Family, mid: str):
    if not f.has_id(mid):
        raise CertificateError(f"certificate references missing id {mid!r}")
    return f.member(mid)


def verify_strong_helly(witness: StrongHellyWitness, f: Family) -> bool:
    members = [_member_or_fail(f, mid) for mid in witness.ids]
    if not members or len(set(witness.ids)) != len(witness.ids):
        return False
    if len(members) > f.system.k:
        return False
    inter = intersect(members)
    if tuple(witness.intersection) != inter.offsets:
        return False
    return inter.offsets == intersect(list(f.members)).offsets


def verify_selection(witness: SelectionWitness, classes: ColorClasses) -> bool:
    c = len(classes.classes)
    kt = classes.system.k
    _require(len(witness.chosen) == c, "chosen must select one member per class")
    chosen_members = [
        _member_or_fail(classes.classes[ci], witness.chosen[ci]) for ci in range(c)
    ]
    if not 0 <= witness.pivot_class < c:
        return False
    inter = intersect(chosen_members)
    if tuple(witness.intersection) != inter.offsets:
        return False
    if witness.kind == "colorful":
        if c != kt or sorted(witness.permutation) != list(range(c)):
            return False
        if witness.permutation[-1] != witness.pivot_class:
            return False
        target_ids = set(classes.classes[witness.pivot_class].ids)
    elif witness.kind == "weak_colorful":
        if kt % 2 == 0 or c != (kt - 1) // 2 + 1:
            return False
        if len(witness.permutation) != kt or not all(
            0 <= ci < c for ci in witness.permutation
        ):
            return False
        if witness.pruned_ids is None:
            return False
        pivot_ids = set(classes.classes[witness.pivot_class].ids)
        for mid in witness.pruned_ids:
            _require(
                mid in pivot_ids,
                f"pruned id {mid!r} is not in the pivot class",
            )
        k = (kt - 1) // 2
        if len(witness.pruned_ids) * 2 ** (k * kt + 1) < len(
            classes.classes[witness.pivot_class]
        ):
            return False
        target_ids = set(witness.pruned_ids)
    else:
        return False
    seen: set[tuple[str, int]] = set()
    pivot_family = classes.classes[witness.pivot_class]
    for mid, coord, lhs, rhs in witness.certificate:
        member = _member_or_fail(pivot_family, mid)
        if mid not in target_ids or not 0 <= coord < kt:
            return False
        if lhs != inter.offsets[coord] or rhs != member.offsets[coord]:
            return False
        if lhs > rhs:
            return False
        seen.add((mid, coord))
    expected = {(mid, coord) for mid in target_ids for coord in range(kt)}
    return seen == expected


def verify_chain(witness: ChainWitness, f: Family) -> bool:
    members = [_member_or_fail(f, mid) for mid in witness.ids]
    if not members:
        return False
    k = f.system.k
    if len(witness.direction_profile) != k:
        return False
    for coord, direction in enumerate(witness.direction_profile):
        if direction not in ("ascending", "descending"):
            return False
        for a, b in zip(members, members[1:]):
            x, y = a.offsets[coord], b.offsets[coord]
            if direction == "ascending" and x > y:
                return False
            if direction == "descending" and x < y:
                return False
    return True


def verify_fractional(
    witness: FractionalWitness, f: Family, prop: MonotoneProperty
) -> bool:
    k = f.system.k
    n = len(f)
    if not Fraction(0) < witness.alpha <= 1:
        return False
    if witness.gamma != root_upper_bound(1 - witness.alpha, k + 1):
        return False
    if witness.prefix_size != min(n, max(1, _ceil(witness.gamma * n))):
        return False
    if len(witness.prefixes) != k or len(witness.witness_tuple) != k:
        return False
    for i in range(k):
        expected = tuple(ordered_ids(f, i)[: witness.prefix_size])
        if witness.prefixes[i] != expected:
            return False
        if witness.witness_tuple[i] not in witness.prefixes[i]:
            return False
    for mid in witness.witness_tuple:
        _member_or_fail(f, mid)
    inter = intersect_ids(f, witness.witness_tuple)
    if not eval_property(prop, inter):
        return False
    discarded = set()
    for pref in witness.prefixes:
        discarded.update(pref)
    expected_survivors = tuple(mid for mid in f.ids if mid not in discarded)
    if witness.survivors != expected_survivors:
        return False
    for mid in witness.survivors:
        if not offset_leq(inter, _member_or_fail(f, mid)):
            return False
    return witness.beta_achieved == Fraction(len(witness.survivors), n)


def verify_piercing(
    cert: PiercingFamily, f: Family, prop: MonotoneProperty
) -> bool:
    if len(cert.pins) != len(cert.pin_sources) or not cert.pins:
        return False
    pins = []
    for pin_offsets, src in zip(cert.pins, cert.pin_sources):
        if not src:
            return False
        inter = intersect([_member_or_fail(f, mid) for mid in src])
        if tuple(pin_offsets) != inter.offsets:
            return False
        if not eval_property(prop, inter):
            return False
        pins.append(inter)
    cover = dict(cert.cover)
    if set(cover) != set(f.ids) or len(cert.cover) != len(f):
        return False
    for mid, pin_idx in cert.cover:
        if not 0 <= pin_idx < len(pins):
            return False
        if not offset_leq(pins[pin_idx], _member_or_fail(f, mid)):
            return False
    return True


def verify_hypothesis_violation(
    violation: HypothesisViolation, f: Family, prop: MonotoneProperty
) -> bool:
    ids = violation.p_subset
    if len(ids) != violation.p or len(set(ids)) != violation.p:
        return False
    for mid in ids:
        _member_or_fail(f, mid)
    if not violation.p >= violation.q >= 1:
        return False
    return not any(
        eval_property(prop, intersect_ids(f, q_subset))
        for q_subset in combinations(ids, violation.q)
    )


def verify_kplus1(result: KPlus1Result, f: Family, prop: MonotoneProperty) -> bool:
    kt = f.system.k
    if kt % 2 == 0:
        return False
    k = (kt - 1) // 2
    if len(result.classes) != k + 1:
        return False
    seen: set[str] = set()
    for ids in result.classes:
        if len(ids) != result.t:
            return False
        for mid in ids:
            _member_or_fail(f, mid)
            if mid in seen:
                return False
            seen.add(mid)
    for choice in product(*result.classes):
        if not eval_property(prop, intersect_ids(f, choice)):
            return False
    from .hsystem import subfamily

    classes = ColorClasses(
        classes=tuple(subfamily(f, ids) for ids in result.classes)
    )
    if not verify_selection(result.selection, classes):
        return False
    if result.pruned_ids != result.selection.pruned_ids:
        return False
    for tup in result.accumulated:
        if len(tup) != kt or len(set(tup)) != kt:
            return False
        for mid in tup:
            _member_or_fail(f, mid)
        if not eval_property(prop, intersect_ids(f, tup)):
            return False
    if not Fraction(0) < result.alpha_used <= 1:
        return False
    if result.fractional.alpha != result.alpha_used:
        return False
    return verify_fractional(result.fractional, f, prop)


def verify_pairs(result: PairsResult, f: Family, prop: MonotoneProperty) -> bool:
    k = f.system.k
    n_bound, c_k = pairs_chain_constant(k)
    if result.chain_bound != n_bound or result.c_k != c_k:
        return False
    if not (1 - c_k) < result.alpha <= 1:
        return False
    if result.alpha_prime != result.alpha + c_k - 1:
        return False
    count = 0
    for combo in combinations(sorted(f.ids), k):
        for mid in combo:
            _member_or_fail(f, mid)
        if not all(
            eval_property(prop, intersect_ids(f, (a, b)))
            for a, b in combinations(combo, 2)
        ):
            continue
        if is_consistent_subset([(mid, f.member(mid).offsets) for mid in combo]):
            count += 1
    if count != result.certified_count:
        return False
    if result.total_tuples != comb(len(f), k):
        return False
    if result.certified_alpha != Fraction(count, result.total_tuples):
        return False
    if result.fractional.alpha != result.certified_alpha:
        return False
    return verify_fractional(result.fractional, f, prop)


Certificate = (
    StrongHellyWitness
    | SelectionWitness
    | ChainWitness
    | FractionalWitness
    | PiercingFamily
    | HypothesisViolation
    | KPlus1Result
    | PairsResult
)


def verify_certificate(
    cert: Certificate,
    instance: Family | ColorClasses,
    prop: MonotoneProperty | None = None,
) -> bool:
    """Re-check a certificate from raw offsets only.

    The instance is the family (or color classes) the certificate refers to;
    property-dependent certificates additionally need the property.
    """
    if isinstance(cert, StrongHellyWitness):
        _require(isinstance(instance, Family), "strong-helly needs a family")
        return verify_strong_helly(cert, instance)
    if isinstance(cert, SelectionWitness):
        _require(isinstance(instance, ColorClasses), "selection needs color classes")
        return verify_selection(cert, instance)
    if isinstance(cert, ChainWitness):
        _require(isinstance(instance, Family), "chain needs a family")
        return verify_chain(cert, instance)
    _require(isinstance(instance, Family), "certificate needs a family")
    _require(prop is not None, "certificate needs the property")
    assert prop is not None and isinstance(instance, Family)
    if isinstance(cert, FractionalWitness):
        return verify_fractional(cert, instance, prop)
    if isinstance(cert, PiercingFamily):
        return verify_piercing(cert, instance, prop)
    if isinstance(cert, HypothesisViolation):
        return verify_hypothesis_violation(cert, instance, prop)
    if isinstance(cert, KPlus1Result):
        return verify_kplus1(cert, instance, prop)
    if isinstance(cert, PairsResult):
        return verify_pairs(cert, instance, prop)
    raise CertificateError(f"unknown certificate type {type(cert).__name__}")
