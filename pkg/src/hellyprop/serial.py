"""Bit-exact JSON interchange for instances and certificates.

Rationals travel as canonical ``p/q`` strings (plain integers when the
denominator is 1), never as floats.  Serialized output is canonical: sorted
keys, two-space indentation, one trailing newline, so identical content means
identical bytes.  Certificates embed a SHA-256 hash of the instance's
canonical serialization.
"""

from __future__ import annotations

import hashlib
import json
import re
from fractions import Fraction
from typing import Any

from .fractional import (
    FractionalWitness,
    HypothesisViolation,
    KPlus1Result,
    PairsResult,
    PiercingFamily,
)
from .hsystem import (
    ColorClasses,
    Family,
    HSet,
    HSystem,
    canonical_box_system,
    family,
    is_box_system,
    subfamily,
)
from .properties import (
    AllOf,
    AnyOf,
    ContainsAtLeast,
    MonotoneProperty,
    NonEmpty,
    VolumeAtLeast,
)
from .selection import ChainWitness, SelectionWitness, StrongHellyWitness

FORMAT_VERSION = "0.1.0"
CERTIFICATE_FORMAT = "hellyprop.certificate/1"

_RATIONAL_RE = re.compile(r"^-?[0-9]+(/[1-9][0-9]*)?$")


def rational_to_str(x: Fraction) -> str:
    return str(x)


def rational_from_str(s: str) -> Fraction:
    if not isinstance(s, str) or not _RATIONAL_RE.match(s):
        raise ValueError(f"not a canonical rational string: {s!r}")
    return Fraction(s)


def vec_to_json(xs) -> list[str]:
    return [rational_to_str(x) for x in xs]


def vec_from_json(xs) -> tuple[Fraction, ...]:
    return tuple(rational_from_str(x) for x in xs)


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def instance_sha256(payload: dict) -> str:
    return hashlib.sha256(canonical_dumps(payload).encode("utf-8")).hexdigest()


# -- properties ----------------------------------------------------------------


def property_to_json(prop: MonotoneProperty) -> dict:
    if isinstance(prop, NonEmpty):
        return {"kind": "non_empty"}
    if isinstance(prop, VolumeAtLeast):
        return {"kind": "volume_at_least", "v": rational_to_str(prop.v)}
    if isinstance(prop, ContainsAtLeast):
        return {
            "kind": "contains_at_least",
            "n": prop.n,
            "points": [vec_to_json(p) for p in prop.points],
        }
    if isinstance(prop, AllOf):
        return {"kind": "all_of", "parts": [property_to_json(p) for p in prop.parts]}
    if isinstance(prop, AnyOf):
        return {"kind": "any_of", "parts": [property_to_json(p) for p in prop.parts]}
    raise ValueError(f"unknown property {prop!r}")


def property_from_json(data: dict) -> MonotoneProperty:
    kind = data.get("kind")
    if kind == "non_empty":
        return NonEmpty()
    if kind == "volume_at_least":
        return VolumeAtLeast(v=rational_from_str(data["v"]))
    if kind == "contains_at_least":
        return ContainsAtLeast(
            n=int(data["n"]),
            points=tuple(vec_from_json(p) for p in data["points"]),
        )
    if kind == "all_of":
        return AllOf(parts=tuple(property_from_json(p) for p in data["parts"]))
    if kind == "any_of":
        return AnyOf(parts=tuple(property_from_json(p) for p in data["parts"]))
    raise ValueError(f"unknown property kind {kind!r}")


# -- instances ------------------------------------------------------------------


def instance_to_json(
    fam: Family,
    classes: list[tuple[str, ...]] | None = None,
    prop: MonotoneProperty | None = None,
    meta: dict | None = None,
) -> dict:
    payload: dict[str, Any] = {
        "dim": fam.system.dim,
        "sets": [
            {"id": mid, "offsets": vec_to_json(member.offsets)}
            for mid, member in fam.items()
        ],
    }
    if is_box_system(fam.system):
        payload["box_system"] = fam.system.dim
    else:
        payload["normals"] = [vec_to_json(n) for n in fam.system.normals]
    if classes is not None:
        payload["classes"] = [list(ids) for ids in classes]
    if prop is not None:
        payload["property"] = property_to_json(prop)
    payload["meta"] = dict(meta or {})
    payload["meta"].setdefault("version", FORMAT_VERSION)
    return payload


def instance_from_json(
    data: dict,
) -> tuple[Family, ColorClasses | None, MonotoneProperty | None]:
    dim = int(data["dim"])
    if "box_system" in data:
        if int(data["box_system"]) != dim:
            raise ValueError("box_system must equal dim")
        system = canonical_box_system(dim)
    elif "normals" in data:
        system = HSystem(
            dim=dim, normals=tuple(vec_from_json(n) for n in data["normals"])
        )
    else:
        raise ValueError("instance needs either box_system or normals")
    ids = []
    members = []
    for entry in data["sets"]:
        ids.append(str(entry["id"]))
        members.append(HSet(system=system, offsets=vec_from_json(entry["offsets"])))
    fam = family(system, members, ids)
    classes: ColorClasses | None = None
    if "classes" in data and data["classes"] is not None:
        classes = ColorClasses(
            classes=tuple(
                subfamily(fam, [str(mid) for mid in group])
                for group in data["classes"]
            )
        )
    prop: MonotoneProperty | None = None
    if "property" in data and data["property"] is not None:
        prop = property_from_json(data["property"])
    return fam, classes, prop


# -- witnesses ------------------------------------------------------------------


def witness_to_json(obj) -> dict:
    if isinstance(obj, StrongHellyWitness):
        return {
            "type": "strong_helly",
            "ids": list(obj.ids),
            "intersection": vec_to_json(obj.intersection),
        }
    if isinstance(obj, SelectionWitness):
        return {
            "type": "selection",
            "kind": obj.kind,
            "chosen": list(obj.chosen),
            "pivot_class": obj.pivot_class,
            "permutation": list(obj.permutation),
            "intersection": vec_to_json(obj.intersection),
            "certificate": [
                [mid, coord, rational_to_str(lhs), rational_to_str(rhs)]
                for mid, coord, lhs, rhs in obj.certificate
            ],
            "pruned_ids": list(obj.pruned_ids) if obj.pruned_ids is not None else None,
        }
    if isinstance(obj, ChainWitness):
        return {
            "type": "chain",
            "ids": list(obj.ids),
            "direction_profile": list(obj.direction_profile),
        }
    if isinstance(obj, FractionalWitness):
        return {
            "type": "fractional",
            "alpha": rational_to_str(obj.alpha),
            "gamma": rational_to_str(obj.gamma),
            "prefix_size": obj.prefix_size,
            "prefixes": [list(p) for p in obj.prefixes],
            "witness_tuple": list(obj.witness_tuple),
            "survivors": list(obj.survivors),
            "beta_achieved": rational_to_str(obj.beta_achieved),
        }
    if isinstance(obj, PiercingFamily):
        return {
            "type": "piercing",
            "pins": [vec_to_json(p) for p in obj.pins],
            "pin_sources": [list(src) for src in obj.pin_sources],
            "cover": [[mid, idx] for mid, idx in obj.cover],
        }
    if isinstance(obj, HypothesisViolation):
        return {
            "type": "hypothesis_violation",
            "p": obj.p,
            "q": obj.q,
            "p_subset": list(obj.p_subset),
        }
    if isinstance(obj, KPlus1Result):
        return {
            "type": "kplus1",
            "t": obj.t,
            "classes": [list(ids) for ids in obj.classes],
            "selection": witness_to_json(obj.selection),
            "pruned_ids": list(obj.pruned_ids),
            "accumulated": [list(tup) for tup in obj.accumulated],
            "alpha_used": rational_to_str(obj.alpha_used),
            "fractional": witness_to_json(obj.fractional),
        }
    if isinstance(obj, PairsResult):
        return {
            "type": "pairs",
            "alpha": rational_to_str(obj.alpha),
            "chain_bound": obj.chain_bound,
            "c_k": rational_to_str(obj.c_k),
            "alpha_prime": rational_to_str(obj.alpha_prime),
            "certified_count": obj.certified_count,
            "total_tuples": obj.total_tuples,
            "certified_alpha": rational_to_str(obj.certified_alpha),
            "fractional": witness_to_json(obj.fractional),
        }
    raise ValueError(f"cannot serialize witness of type {type(obj).__name__}")


def witness_from_json(data: dict):
    if not isinstance(data, dict):
        raise ValueError("witness payload must be an object")
    wtype = data.get("type")
    if wtype == "strong_helly":
        return StrongHellyWitness(
            ids=tuple(data["ids"]), intersection=vec_from_json(data["intersection"])
        )
    if wtype == "selection":
        return SelectionWitness(
            kind=data["kind"],
            chosen=tuple(data["chosen"]),
            pivot_class=int(data["pivot_class"]),
            permutation=tuple(int(x) for x in data["permutation"]),
            intersection=vec_from_json(data["intersection"]),
            certificate=tuple(
                (
                    str(mid),
                    int(coord),
                    rational_from_str(lhs),
                    rational_from_str(rhs),
                )
                for mid, coord, lhs, rhs in data["certificate"]
            ),
            pruned_ids=(
                tuple(data["pruned_ids"]) if data.get("pruned_ids") is not None else None
            ),
        )
    if wtype == "chain":
        return ChainWitness(
            ids=tuple(data["ids"]),
            direction_profile=tuple(data["direction_profile"]),
        )
    if wtype == "fractional":
        return FractionalWitness(
            alpha=rational_from_str(data["alpha"]),
            gamma=rational_from_str(data["gamma"]),
            prefix_size=int(data["prefix_size"]),
            prefixes=tuple(tuple(p) for p in data["prefixes"]),
            witness_tuple=tuple(data["witness_tuple"]),
            survivors=tuple(data["survivors"]),
            beta_achieved=rational_from_str(data["beta_achieved"]),
        )
    if wtype == "piercing":
        return PiercingFamily(
            pins=tuple(vec_from_json(p) for p in data["pins"]),
            pin_sources=tuple(tuple(src) for src in data["pin_sources"]),
            cover=tuple((str(mid), int(idx)) for mid, idx in data["cover"]),
        )
    if wtype == "hypothesis_violation":
        return HypothesisViolation(
            p=int(data["p"]), q=int(data["q"]), p_subset=tuple(data["p_subset"])
        )
    if wtype == "kplus1":
        return KPlus1Result(
            t=int(data["t"]),
            classes=tuple(tuple(ids) for ids in data["classes"]),
            selection=witness_from_json(data["selection"]),
            pruned_ids=tuple(data["pruned_ids"]),
            accumulated=tuple(tuple(tup) for tup in data["accumulated"]),
            alpha_used=rational_from_str(data["alpha_used"]),
            fractional=witness_from_json(data["fractional"]),
        )
    if wtype == "pairs":
        return PairsResult(
            alpha=rational_from_str(data["alpha"]),
            chain_bound=int(data["chain_bound"]),
            c_k=rational_from_str(data["c_k"]),
            alpha_prime=rational_from_str(data["alpha_prime"]),
            certified_count=int(data["certified_count"]),
            total_tuples=int(data["total_tuples"]),
            certified_alpha=rational_from_str(data["certified_alpha"]),
            fractional=witness_from_json(data["fractional"]),
        )
    raise ValueError(f"unknown witness type {wtype!r}")


def certificate_to_json(
    algorithm: str,
    instance_payload: dict,
    params: dict,
    status: str,
    witness,
) -> dict:
    return {
        "format": CERTIFICATE_FORMAT,
        "algorithm": algorithm,
        "instance_sha256": instance_sha256(instance_payload),
        "params": params,
        "status": status,
        "witness": witness_to_json(witness) if witness is not None else None,
    }
