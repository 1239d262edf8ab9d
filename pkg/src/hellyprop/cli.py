"""Command-line interface: generate instances, run algorithms, verify
certificates, and measure tuple densities.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 not found,
4 hypothesis failed, 5 instance hash mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from math import comb
from pathlib import Path

from .constructions import GenSpec, gen_family, singleton_classes
from .fractional import (
    HypothesisViolation,
    count_intersecting_tuples,
    fractional_k,
    fractional_kplus1,
    fractional_pairs,
    pq_pierce,
)
from .hsystem import ColorClasses, Family
from .oracle import CertificateError, verify_certificate
from .properties import MonotoneProperty, NonEmpty
from .selection import (
    colorful_select,
    consistent_chain,
    strong_helly_witness,
    weak_colorful_helly,
)
from .serial import (
    canonical_dumps,
    certificate_to_json,
    instance_from_json,
    instance_sha256,
    instance_to_json,
    property_from_json,
    rational_from_str,
    rational_to_str,
    witness_from_json,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3
EXIT_HYPOTHESIS_FAILED = 4
EXIT_INSTANCE_MISMATCH = 5

ALGORITHMS = (
    "strong-helly",
    "colorful",
    "weak-colorful",
    "fractional-k",
    "fractional-k1",
    "fractional-pairs",
    "pq-pierce",
    "chain",
)


def _fail(message: str, code: int = EXIT_USAGE) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _write_canonical(path: str, payload: dict) -> None:
    Path(path).write_text(canonical_dumps(payload), encoding="utf-8")


def _parse_property(raw: str | None) -> MonotoneProperty | None:
    if raw is None:
        return None
    return property_from_json(json.loads(raw))


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        spec = GenSpec(
            kind=args.kind,
            dim=args.dim,
            count=args.count,
            epsilon=rational_from_str(args.epsilon) if args.epsilon else None,
            thickness=rational_from_str(args.thickness) if args.thickness else None,
            clip=rational_from_str(args.clip) if args.clip else None,
            seed=args.seed,
            alpha_target=(
                rational_from_str(args.alpha_target) if args.alpha_target else None
            ),
            r=args.r,
            halfspaces=args.halfspaces,
        )
        prop = _parse_property(args.property) or NonEmpty()
        fam = gen_family(spec, prop=prop)
        classes: list[tuple[str, ...]] | None = None
        if args.kind == "tight-colorful":
            classes = singleton_classes(fam)
        elif args.classes:
            if args.classes < 1 or len(fam) % args.classes != 0:
                raise ValueError(
                    f"cannot split {len(fam)} members into {args.classes} equal classes"
                )
            size = len(fam) // args.classes
            classes = [
                tuple(fam.ids[i * size : (i + 1) * size]) for i in range(args.classes)
            ]
        payload = instance_to_json(fam, classes, prop, spec.describe())
    except (ValueError, KeyError) as exc:
        return _fail(str(exc))
    _write_canonical(args.out, payload)
    print(f"wrote {args.out} ({len(payload['sets'])} sets)")
    return EXIT_OK


def _load_instance(
    path: str,
) -> tuple[dict, Family, ColorClasses | None, MonotoneProperty]:
    raw = _load_json(path)
    fam, classes, prop = instance_from_json(raw)
    return raw, fam, classes, prop or NonEmpty()


def cmd_run(args: argparse.Namespace) -> int:
    if args.algorithm not in ALGORITHMS:
        return _fail(f"unknown algorithm {args.algorithm!r}; choose from {ALGORITHMS}")
    try:
        raw, fam, classes, prop = _load_instance(args.instance)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(f"cannot load instance: {exc}")
    params: dict = {}
    status = "ok"
    witness = None
    try:
        if args.algorithm == "strong-helly":
            witness = strong_helly_witness(fam)
        elif args.algorithm == "colorful":
            if classes is None:
                return _fail("instance carries no classes")
            witness = colorful_select(classes)
        elif args.algorithm == "weak-colorful":
            if classes is None:
                return _fail("instance carries no classes")
            witness, _pruned = weak_colorful_helly(classes)
        elif args.algorithm == "chain":
            if args.target is None:
                return _fail("chain requires --target")
            params["target"] = args.target
            witness = consistent_chain(fam, args.target)
            if witness is None:
                status = "not_found"
        elif args.algorithm == "fractional-k":
            if args.alpha is None:
                return _fail("fractional-k requires --alpha")
            alpha = rational_from_str(args.alpha)
            params["alpha"] = rational_to_str(alpha)
            witness = fractional_k(fam, prop, alpha)
            if witness is None:
                status = "not_found"
        elif args.algorithm == "fractional-k1":
            if args.alpha is None:
                return _fail("fractional-k1 requires --alpha")
            alpha = rational_from_str(args.alpha)
            params["alpha"] = rational_to_str(alpha)
            if args.t_override is not None:
                params["t_override"] = args.t_override
            witness = fractional_kplus1(fam, prop, alpha, args.t_override)
            if witness is None:
                status = "not_found"
        elif args.algorithm == "fractional-pairs":
            if args.alpha is None:
                return _fail("fractional-pairs requires --alpha")
            alpha = rational_from_str(args.alpha)
            params["alpha"] = rational_to_str(alpha)
            witness = fractional_pairs(fam, prop, alpha)
            if witness is None:
                status = "not_found"
        elif args.algorithm == "pq-pierce":
            if args.p is None or args.q is None:
                return _fail("pq-pierce requires --p and --q")
            params["p"] = args.p
            params["q"] = args.q
            result = pq_pierce(fam, prop, args.p, args.q)
            if isinstance(result, HypothesisViolation):
                status = "hypothesis_failed"
            witness = result
    except (ValueError, KeyError, IndexError) as exc:
        return _fail(str(exc))
    payload = certificate_to_json(args.algorithm, raw, params, status, witness)
    if args.out:
        _write_canonical(args.out, payload)
        print(f"wrote {args.out} (status: {status})")
    else:
        print(canonical_dumps(payload), end="")
    if status == "not_found":
        return EXIT_NOT_FOUND
    if status == "hypothesis_failed":
        return EXIT_HYPOTHESIS_FAILED
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        cert = _load_json(args.certificate)
        raw, fam, classes, prop = _load_instance(args.instance)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(f"cannot load inputs: {exc}")
    if cert.get("instance_sha256") != instance_sha256(raw):
        print("instance hash mismatch", file=sys.stderr)
        return EXIT_INSTANCE_MISMATCH
    status = cert.get("status")
    if status == "not_found":
        print("certificate records a not-found outcome; nothing to verify")
        return EXIT_OK
    if not isinstance(cert.get("witness"), dict):
        print("verification failed: certificate carries no witness", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    try:
        witness = witness_from_json(cert["witness"])
        algorithm = cert.get("algorithm")
        if algorithm in ("colorful", "weak-colorful"):
            if classes is None:
                return _fail("instance carries no classes")
            ok = verify_certificate(witness, classes)
        else:
            ok = verify_certificate(witness, fam, prop)
    except (CertificateError, ValueError, KeyError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    if not ok:
        print("verification failed")
        return EXIT_VERIFY_FAILED
    print("certificate verified")
    return EXIT_OK


def cmd_density(args: argparse.Namespace) -> int:
    try:
        raw, fam, _classes, prop = _load_instance(args.instance)
        if args.property:
            prop = _parse_property(args.property) or prop
        if not 1 <= args.r <= len(fam):
            return _fail(f"r must be in [1, {len(fam)}]")
        count = count_intersecting_tuples(fam, args.r, prop)
        total = comb(len(fam), args.r)
        value = Fraction(count, total)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(str(exc))
    print(f"{count}/{total}")
    print(rational_to_str(value))
    if args.out:
        report = {
            "r": args.r,
            "tuples": total,
            "intersecting": count,
            "density": rational_to_str(value),
            "instance_sha256": instance_sha256(raw),
        }
        _write_canonical(args.out, report)
        print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hellyprop",
        description=(
            "Constructive Helly-type selection, fractional, and piercing "
            "algorithms with exact rational certificates"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument(
        "--kind",
        required=True,
        choices=("tight-colorful", "tight-fractional", "random", "dense"),
    )
    gen.add_argument("--dim", type=int, required=True)
    gen.add_argument("--count", type=int, default=0)
    gen.add_argument("--epsilon", help="rational like 1/2")
    gen.add_argument("--thickness", help="rational slab thickness")
    gen.add_argument("--clip", help="rational bounding-cube half-width")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--alpha-target", dest="alpha_target", help="rational density target")
    gen.add_argument("--r", type=int, default=2, help="tuple size for dense instances")
    gen.add_argument("--halfspaces", type=int, default=0, help="seeded general system size")
    gen.add_argument("--classes", type=int, default=0, help="split into equal classes")
    gen.add_argument("--property", help="property JSON embedded into the instance")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    run = sub.add_parser("run", help="run an algorithm, write its certificate")
    run.add_argument("--algorithm", required=True)
    run.add_argument("--instance", required=True)
    run.add_argument("--alpha", help="rational hypothesis density")
    run.add_argument("--t-override", dest="t_override", type=int)
    run.add_argument("--p", type=int)
    run.add_argument("--q", type=int)
    run.add_argument("--target", type=int, help="chain length target")
    run.add_argument("--out")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="re-check a certificate against its instance")
    ver.add_argument("--certificate", required=True)
    ver.add_argument("--instance", required=True)
    ver.set_defaults(func=cmd_verify)

    den = sub.add_parser("density", help="exact intersecting-tuple density")
    den.add_argument("--instance", required=True)
    den.add_argument("--r", type=int, required=True)
    den.add_argument("--property", help="property JSON overriding the instance's")
    den.add_argument("--out", help="write a JSON report")
    den.set_defaults(func=cmd_density)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    return args.func(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
