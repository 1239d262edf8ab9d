"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.  Stated
runtime budgets are asserted; all equality checks are exact (rationals, no
tolerances).
"""

from __future__ import annotations

import contextlib
import copy
import io
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from hellyprop import (
    Box,
    ColorClasses,
    ContainsAtLeast,
    Family,
    HSet,
    HypothesisViolation,
    NonEmpty,
    VolumeAtLeast,
    box_to_hset,
    box_volume,
    brute_colorful,
    brute_min_witness,
    brute_pierce,
    canonical_box_system,
    colorful_select,
    default_block_size,
    density,
    eval_property,
    family,
    fractional_k,
    fractional_kplus1,
    fractional_pairs,
    gen_dense,
    gen_random_system,
    gen_tight_colorful,
    hset_to_box,
    intersect,
    intersect_family,
    intersect_ids,
    pairs_chain_constant,
    pq_pierce,
    strong_helly_witness,
    verify_certificate,
    weak_colorful_helly,
)
from hellyprop.cli import main as cli_main
from hellyprop.fractional import root_upper_bound
from hellyprop.selection import ChainWitness, chain_intersection
from hellyprop.serial import canonical_dumps, instance_to_json

FIXTURES = Path(__file__).parent / "fixtures"


def report(criterion: int, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    line = f"ACCEPTANCE-{criterion:02d} {status}: {detail}"
    # bypass pytest's capture so the line lands in the terminal either way
    sys.__stdout__.write(line + "\n")
    sys.__stdout__.flush()
    assert ok, line


def test_criterion_01_strong_helly():
    start = time.monotonic()
    checked = brute_checked = 0
    for seed in range(1000):
        rng = random.Random(f"acc1-{seed}")
        dim = rng.randint(1, 4)
        size = rng.randint(1, 40)
        fam = _random_boxes(rng, dim, size)
        w = strong_helly_witness(fam)
        assert len(w.ids) <= 2 * dim
        assert intersect_ids(fam, w.ids).offsets == intersect_family(fam).offsets
        checked += 1
        if size <= 12:
            bw = brute_min_witness(fam)
            assert len(bw) <= 2 * dim
            brute_checked += 1
    elapsed = time.monotonic() - start
    report(
        1,
        elapsed < 60,
        f"{checked} families exact, {brute_checked} brute-checked, {elapsed:.1f}s < 60s",
    )


def _random_boxes(rng: random.Random, dim: int, count: int) -> Family:
    system = canonical_box_system(dim)
    members = []
    for _ in range(count):
        lo = [Fraction(rng.randint(-40, 40), 4) for _ in range(dim)]
        hi = [l + Fraction(rng.randint(0, 60), 4) for l in lo]
        members.append(box_to_hset(Box(lo=tuple(lo), hi=tuple(hi))))
    return family(system, members, [f"b{i:02d}" for i in range(count)])


def _cored_boxes(rng: random.Random, dim: int, count: int, core: int) -> Family:
    system = canonical_box_system(dim)
    members = []
    for i in range(count):
        if i < core:
            lo = [Fraction(-rng.randint(0, 8), 4) for _ in range(dim)]
            hi = [Fraction(4 + rng.randint(0, 8), 4) for _ in range(dim)]
        else:
            lo = [Fraction(rng.randint(-40, 40), 4) for _ in range(dim)]
            hi = [l + Fraction(rng.randint(0, 60), 4) for l in lo]
        members.append(box_to_hset(Box(lo=tuple(lo), hi=tuple(hi))))
    return family(system, members, [f"b{i:02d}" for i in range(count)])


def test_criterion_02_colorful_helly():
    violations = 0
    verified = 0
    for seed in range(500):
        rng = random.Random(f"acc2-{seed}")
        use_boxes = rng.random() < 0.6
        if use_boxes:
            dim = rng.randint(1, 4)
            system = canonical_box_system(dim)
        else:
            dim = rng.randint(1, 3)
            system = gen_random_system(dim, rng.randint(2, 5), seed)
        k = system.k
        sizes = [rng.randint(1, 6) for _ in range(k)]
        while _product(sizes) > 4000:
            sizes[sizes.index(max(sizes))] = max(1, max(sizes) // 2)
        cored = seed % 3 == 0
        classes = []
        for ci in range(k):
            if use_boxes and cored:
                fam = _cored_boxes(rng, dim, sizes[ci], core=sizes[ci])
            elif use_boxes:
                fam = _random_boxes(rng, dim, sizes[ci])
            else:
                fam = _random_offsets(rng, system, sizes[ci], cored)
            classes.append(_prefix_ids(fam, f"c{ci}_"))
        color = ColorClasses(classes=tuple(classes))
        if seed % 2 == 0:
            prop = NonEmpty()
        else:
            pts = [tuple(Fraction(1, 2) for _ in range(dim))]
            pts += [
                tuple(Fraction(rng.randint(-10, 10)) for _ in range(dim))
                for _ in range(2)
            ]
            prop = ContainsAtLeast(1, tuple(pts))
        witness = colorful_select(color)
        assert verify_certificate(witness, color)
        verified += 1
        rep = brute_colorful(color, prop)
        if rep.hypothesis_holds and not rep.conclusion_holds:
            violations += 1
    report(
        2,
        violations == 0 and verified == 500,
        f"500 instances: certificates verified, implication violations = {violations}",
    )


def _product(xs):
    out = 1
    for x in xs:
        out *= x
    return out


def _random_offsets(rng, system, count, cored=False) -> Family:
    members = []
    for _ in range(count):
        if cored:
            offsets = tuple(
                Fraction(1) + Fraction(rng.randint(0, 20), 4) for _ in range(system.k)
            )
        else:
            offsets = tuple(
                Fraction(rng.randint(-40, 40), 4) for _ in range(system.k)
            )
        members.append(HSet(system=system, offsets=offsets))
    return family(system, members, [f"m{i:02d}" for i in range(count)])


def _prefix_ids(fam: Family, prefix: str) -> Family:
    return Family(
        system=fam.system,
        members=fam.members,
        ids=tuple(prefix + mid for mid in fam.ids),
    )


def test_criterion_03_tightness_of_2d():
    for dim in (1, 2, 3, 4):
        fam = gen_tight_colorful(dim, Fraction(1, 2))
        full = box_volume(hset_to_box(intersect_family(fam)))
        assert full == Fraction(1, 2), f"d={dim}: full volume {full}"
        for drop in range(2 * dim):
            rest = [m for i, m in enumerate(fam.members) if i != drop]
            vol = box_volume(hset_to_box(intersect(rest)))
            assert vol >= 1, f"d={dim}: dropping member {drop} gives volume {vol}"
    report(3, True, "d=1..4: full volume exactly 1/2, every (2d-1)-subfamily >= 1")


def test_criterion_04_fractional_k():
    worst = None
    for seed in (101, 102, 103):
        start = time.monotonic()
        fam = gen_dense(2, 200, Fraction(95, 100), 4, NonEmpty(), seed=seed)
        alpha = density(fam, 4, NonEmpty())
        assert alpha >= Fraction(95, 100)
        w = fractional_k(fam, NonEmpty(), alpha)
        assert w is not None
        assert eval_property(NonEmpty(), intersect_ids(fam, w.survivors))
        assert verify_certificate(w, fam, NonEmpty())
        # conservative evaluation of ceil((1 - 4 (1-alpha)^(1/5)) * 200): the
        # root is bracketed rationally and the larger threshold is asserted
        g_hi = root_upper_bound(1 - alpha, 5)
        g_lo = g_hi - Fraction(1, 10**6)
        bound = -((-(1 - 4 * g_lo) * 200).numerator // ((1 - 4 * g_lo) * 200).denominator)
        assert len(w.survivors) >= bound
        elapsed = time.monotonic() - start
        assert elapsed < 120, f"seed {seed}: {elapsed:.1f}s"
        worst = max(worst or 0, elapsed)
    report(
        4,
        True,
        f"3 instances, measured alpha >= 0.95, survivors meet the bound, "
        f"worst runtime {worst:.1f}s < 120s",
    )


def test_criterion_05_chain_proposition():
    rng = random.Random("acc5")
    systems = {}
    for trial in range(10**4):
        k = rng.randint(2, 8)
        length = rng.randint(2, 6)
        key = (k, trial % 7)
        if key not in systems:
            systems[key] = gen_random_system(2, k, 1000 + trial)
        system = systems[key]
        profile = tuple(rng.choice(["ascending", "descending"]) for _ in range(k))
        columns = []
        for direction in profile:
            vals = sorted(Fraction(rng.randint(-30, 30), 2) for _ in range(length))
            if direction == "descending":
                vals.reverse()
            columns.append(vals)
        chain = [
            HSet(system=system, offsets=tuple(columns[c][i] for c in range(k)))
            for i in range(length)
        ]
        witness = ChainWitness(
            ids=tuple(f"m{i}" for i in range(length)), direction_profile=profile
        )
        ends = chain_intersection(chain, witness)
        full = intersect(chain)
        assert ends.offsets == full.offsets
        for coord in range(k):
            lo = min(s.offsets[coord] for s in chain)
            assert lo in (chain[0].offsets[coord], chain[-1].offsets[coord])
    report(5, True, "10^4 chains: per-coordinate minima at the ends, exact collapse")


def test_criterion_06_weak_colorful():
    start = time.monotonic()
    for seed in range(200):
        rng = random.Random(f"acc6a-{seed}")
        system = gen_random_system(2, 3, seed)
        classes = ColorClasses(
            classes=(
                _prefix_ids(_random_offsets(rng, system, 16), "a"),
                _prefix_ids(_random_offsets(rng, system, 16), "b"),
            )
        )
        witness, pruned = weak_colorful_helly(classes)
        assert verify_certificate(witness, classes)
        assert len(pruned) * 2**4 >= 16
    for seed in range(20):
        rng = random.Random(f"acc6b-{seed}")
        system = gen_random_system(3, 5, 7000 + seed)
        classes = ColorClasses(
            classes=tuple(
                _prefix_ids(_random_offsets(rng, system, 2048), f"c{i}")
                for i in range(3)
            )
        )
        witness, pruned = weak_colorful_helly(classes)
        assert verify_certificate(witness, classes)
        assert len(pruned) * 2**11 >= 2048
    elapsed = time.monotonic() - start
    report(
        6,
        elapsed < 300,
        f"200 seeds (k=1) + 20 seeds (k=2) verified, {elapsed:.1f}s < 300s",
    )


def test_criterion_07_fractional_kplus1_pipeline():
    assert default_block_size(1) == 48  # 2^(k(2k+1)+1) * (2k+1) at k=1
    for seed in (11, 12, 13):
        system = gen_random_system(2, 3, 9000 + seed)
        while not _system_separable(system):
            seed += 100
            system = gen_random_system(2, 3, 9000 + seed)
        fam = gen_dense(2, 60, Fraction(9, 10), 2, NonEmpty(), seed=seed, system=system)
        res = fractional_kplus1(fam, NonEmpty(), Fraction(9, 10), t_override=16)
        assert res is not None
        assert res.t == 16
        assert len(res.survivors) >= 1
        assert eval_property(NonEmpty(), intersect_ids(fam, res.survivors))
        assert verify_certificate(res, fam, NonEmpty())
    report(
        7,
        True,
        "k=1, |F|=60, t_override=16: pipeline certificates verify; default t(k=1)=48",
    )


def _system_separable(system) -> bool:
    from hellyprop.constructions import _separation_shift

    return _separation_shift(system, 0) is not None


def test_criterion_08_pairs_version():
    # nested core of 29 plus one box touching all but the four smallest
    margins = [Fraction(j + 1, 60) for j in range(29)]
    members = [
        box_to_hset(Box(lo=(-m,), hi=(1 + m,))) for m in margins
    ]
    mu = Fraction(3, 40)  # between margins[3] and margins[4]
    members.append(box_to_hset(Box(lo=(1 + mu,), hi=(Fraction(5),))))
    fam = family(
        canonical_box_system(1), members, [f"b{i:02d}" for i in range(30)]
    )
    alpha = density(fam, 2, NonEmpty())
    assert alpha == Fraction(431, 435)
    assert alpha >= Fraction(99, 100)
    n_bound, c_k = pairs_chain_constant(2)
    assert (n_bound, c_k) == (2, Fraction(1))
    res = fractional_pairs(fam, NonEmpty(), alpha)
    assert res is not None
    assert res.alpha_prime == alpha + c_k - 1 == alpha
    assert eval_property(NonEmpty(), intersect_ids(fam, res.survivors))
    assert verify_certificate(res, fam, NonEmpty())
    # survivors meet the prefix-product guarantee at alpha' and, on this
    # instance, the asymptotic target too
    operational = 30 - 2 * res.fractional.prefix_size
    assert len(res.survivors) >= operational
    g_lo = root_upper_bound(1 - res.alpha_prime, 3) - Fraction(1, 10**6)
    formula = (1 - 2 * g_lo) * 30
    bound = -((-formula).numerator // formula.denominator)
    assert len(res.survivors) >= bound
    with pytest.raises(ValueError, match="c_k"):
        fractional_pairs(fam, NonEmpty(), Fraction(0))
    report(
        8,
        True,
        f"alpha = {alpha}, survivors = {len(res.survivors)} >= {bound}; "
        "alpha <= 1 - c_k rejected",
    )


def test_criterion_09_pq_desk_scale():
    verified = 0
    for seed in range(100):
        rng = random.Random(f"acc9-{seed}")
        if seed % 10 < 7:
            dim, q = 1, 3
            p = rng.randint(3, 6)
        else:
            dim, q = 2, 5
            p = rng.randint(5, 6)
        n = rng.randint(max(p, 8), 12)
        core = min(n, n - p + q + rng.randint(0, 1))
        fam = _cored_boxes(rng, dim, n, core)
        res = pq_pierce(fam, NonEmpty(), p, q)
        assert not isinstance(res, HypothesisViolation), f"seed {seed}"
        assert verify_certificate(res, fam, NonEmpty())
        if len(res.pins) <= 4:
            assert brute_pierce(fam, NonEmpty(), len(res.pins)) is not None
        verified += 1
    # constructed violations
    for seed in range(10):
        spread = [
            Box(lo=(Fraction(5 * i),), hi=(Fraction(5 * i + 1),)) for i in range(5)
        ]
        fam = family(
            canonical_box_system(1),
            [box_to_hset(b) for b in spread],
            [f"m{i}" for i in range(5)],
        )
        res = pq_pierce(fam, NonEmpty(), 3, 2)
        assert isinstance(res, HypothesisViolation)
        assert verify_certificate(res, fam, NonEmpty())
    report(9, verified == 100, f"{verified} piercing instances verified + violations checked")


def _random_property(rng: random.Random, dim: int, variant: str):
    if variant == "non_empty":
        return NonEmpty()
    if variant == "volume":
        return VolumeAtLeast(Fraction(rng.randint(0, 8), 2))
    if variant == "points":
        pts = tuple(
            tuple(Fraction(rng.randint(-10, 10), 2) for _ in range(dim))
            for _ in range(rng.randint(1, 5))
        )
        return ContainsAtLeast(rng.randint(1, 2), pts)
    parts = []
    for _ in range(rng.randint(2, 3)):
        parts.append(
            _random_property(
                rng, dim, rng.choice(["non_empty", "volume", "points"])
            )
        )
    from hellyprop import AllOf, AnyOf

    return AllOf(tuple(parts)) if variant == "all_of" else AnyOf(tuple(parts))


def test_criterion_10_monotone_contract():
    counterexamples = 0
    for variant in ("non_empty", "volume", "points", "all_of", "any_of"):
        rng = random.Random(f"acc10-{variant}")
        for _ in range(10**4):
            dim = rng.randint(1, 3)
            prop = _random_property(rng, dim, variant)
            lo = [Fraction(rng.randint(-30, 30), 4) for _ in range(dim)]
            hi = [l + Fraction(rng.randint(0, 40), 4) for l in lo]
            s1 = box_to_hset(Box(lo=tuple(lo), hi=tuple(hi)))
            grow = tuple(Fraction(rng.randint(0, 8), 4) for _ in range(2 * dim))
            s2 = HSet(
                system=s1.system,
                offsets=tuple(o + g for o, g in zip(s1.offsets, grow)),
            )
            if eval_property(prop, s1) and not eval_property(prop, s2):
                counterexamples += 1
    report(
        10,
        counterexamples == 0,
        f"5 x 10^4 offset-ordered pairs, counterexamples = {counterexamples}",
    )


# -- criterion 11: mutation suite ----------------------------------------------


def _bump(rational: str) -> str:
    return str(Fraction(rational) + 1)


def _mutators(algorithm: str):
    def missing_id_strong(w):
        w["ids"][0] = "zz_missing"

    def bump_intersection(w):
        w["intersection"][0] = _bump(w["intersection"][0])

    def missing_chosen(w):
        w["chosen"][0] = "zz_missing"

    def bump_cert_lhs(w):
        w["certificate"][0][2] = _bump(w["certificate"][0][2])

    def drop_cert_record(w):
        w["certificate"] = w["certificate"][1:]

    def rotate_pivot(w):
        w["pivot_class"] = (w["pivot_class"] + 1) % len(w["chosen"])

    def missing_chain_id(w):
        w["ids"][0] = "zz_missing"

    def sideways(w):
        w["direction_profile"][0] = "sideways"

    def truncate_profile(w):
        w["direction_profile"] = w["direction_profile"][:-1]

    def tuple_outside_prefix(w):
        w["witness_tuple"][0] = "zz_missing"

    def bump_beta(w):
        w["beta_achieved"] = _bump(w["beta_achieved"])

    def bump_prefix_size(w):
        w["prefix_size"] += 1

    def drop_survivor(w):
        w["survivors"] = w["survivors"][1:]

    def bump_gamma(w):
        w["gamma"] = _bump(w["gamma"])

    def bump_t(w):
        w["t"] += 1

    def bump_alpha_used(w):
        w["alpha_used"] = str(Fraction(w["alpha_used"]) / 2)

    def missing_selection_chosen(w):
        w["selection"]["chosen"][0] = "zz_missing"

    def duplicate_accumulated(w):
        w["accumulated"][0][0] = w["accumulated"][0][1]

    def bump_count(w):
        w["certified_count"] += 1

    def bump_ck(w):
        w["c_k"] = _bump(w["c_k"])

    def alpha_out_of_range(w):
        w["alpha"] = "3/2"

    def bump_inner_beta(w):
        w["fractional"]["beta_achieved"] = _bump(w["fractional"]["beta_achieved"])

    def drop_cover(w):
        w["cover"] = w["cover"][1:]

    def bump_pin(w):
        w["pins"][0][0] = _bump(w["pins"][0][0])

    def empty_sources(w):
        w["pin_sources"][0] = []

    def bad_pin_index(w):
        w["cover"][0][1] = 99

    menus = {
        "strong-helly": [missing_id_strong, bump_intersection],
        "colorful": [missing_chosen, bump_cert_lhs, drop_cert_record, rotate_pivot],
        "weak-colorful": [missing_chosen, bump_cert_lhs, drop_cert_record, bump_intersection],
        "chain": [missing_chain_id, sideways, truncate_profile],
        "fractional-k": [
            tuple_outside_prefix,
            bump_beta,
            bump_prefix_size,
            drop_survivor,
            bump_gamma,
        ],
        "fractional-k1": [
            bump_t,
            bump_alpha_used,
            missing_selection_chosen,
            duplicate_accumulated,
        ],
        "fractional-pairs": [bump_count, bump_ck, alpha_out_of_range, bump_inner_beta],
        "pq-pierce": [drop_cover, bump_pin, empty_sources, bad_pin_index],
    }
    return menus[algorithm]


def _instance_for(algorithm: str, seed: int, tmp: Path) -> tuple[Path, list[str]]:
    rng = random.Random(f"acc11-{algorithm}-{seed}")
    path = tmp / f"{algorithm}-{seed}-inst.json"
    extra: list[str] = []
    if algorithm == "strong-helly":
        fam, classes = _random_boxes(rng, rng.randint(1, 3), rng.randint(5, 15)), None
    elif algorithm == "colorful":
        fam = _random_boxes(rng, 1, 4)
        classes = [list(fam.ids[:2]), list(fam.ids[2:])]
    elif algorithm == "weak-colorful":
        system = gen_random_system(2, 3, seed)
        fam = _random_offsets(rng, system, 32)
        classes = [list(fam.ids[:16]), list(fam.ids[16:])]
    elif algorithm == "chain":
        fam, classes = _random_boxes(rng, 1, 8), None
        extra = ["--target", "3"]
    elif algorithm == "fractional-k":
        fam = gen_dense(1, 12, Fraction(9, 10), 2, NonEmpty(), seed=seed)
        classes = None
        extra = ["--alpha", str(density(fam, 2, NonEmpty()))]
    elif algorithm == "fractional-k1":
        probe = 4000 + seed
        system = gen_random_system(2, 3, probe)
        while not _system_separable(system):
            probe += 1
            system = gen_random_system(2, 3, probe)
        fam = gen_dense(2, 34, Fraction(9, 10), 2, NonEmpty(), seed=seed, system=system)
        classes = None
        extra = ["--alpha", "9/10", "--t-override", "16"]
    elif algorithm == "fractional-pairs":
        fam = gen_dense(1, 12, Fraction(9, 10), 2, NonEmpty(), seed=seed)
        classes = None
        extra = ["--alpha", str(density(fam, 2, NonEmpty()))]
    else:  # pq-pierce
        fam = _cored_boxes(rng, 1, 8, core=7)
        classes = None
        extra = ["--p", "4", "--q", "3"]
    payload = instance_to_json(fam, classes, NonEmpty(), {"seed": seed})
    path.write_text(canonical_dumps(payload), encoding="utf-8")
    return path, extra


def test_criterion_11_mutation_suite(tmp_path):
    algorithms = (
        "strong-helly",
        "colorful",
        "weak-colorful",
        "chain",
        "fractional-k",
        "fractional-k1",
        "fractional-pairs",
        "pq-pierce",
    )
    def quiet_cli(argv: list[str]) -> int:
        sink = io.StringIO()
        with contextlib.redirect_stdout(sink), contextlib.redirect_stderr(sink):
            return cli_main(argv)

    for algorithm in algorithms:
        menu = _mutators(algorithm)
        for i in range(50):
            inst, extra = _instance_for(algorithm, i, tmp_path)
            cert = tmp_path / f"{algorithm}-{i}-cert.json"
            code = quiet_cli(
                ["run", "--algorithm", algorithm, "--instance", str(inst)]
                + extra
                + ["--out", str(cert)]
            )
            assert code == 0, f"{algorithm} seed {i}: run exited {code}"
            assert (
                quiet_cli(
                    ["verify", "--certificate", str(cert), "--instance", str(inst)]
                )
                == 0
            ), f"{algorithm} seed {i}: pristine certificate rejected"
            payload = json.loads(cert.read_text())
            mutated = copy.deepcopy(payload)
            menu[i % len(menu)](mutated["witness"])
            bad = tmp_path / f"{algorithm}-{i}-bad.json"
            bad.write_text(json.dumps(mutated), encoding="utf-8")
            assert (
                quiet_cli(
                    ["verify", "--certificate", str(bad), "--instance", str(inst)]
                )
                == 1
            ), f"{algorithm} seed {i}: mutation {i % len(menu)} accepted"
    report(11, True, "8 algorithms x 50 certificates: pristine pass, mutated fail")


def test_criterion_12_fractional_tightness_density(tmp_path, capsys):
    inst = tmp_path / "tf.json"
    rep = tmp_path / "report.json"
    assert (
        cli_main(
            [
                "gen", "--kind", "tight-fractional", "--dim", "2",
                "--count", "12", "--out", str(inst),
            ]
        )
        == 0
    )
    capsys.readouterr()
    assert (
        cli_main(
            ["density", "--instance", str(inst), "--r", "2", "--out", str(rep)]
        )
        == 0
    )
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "36/66" and out[1] == "6/11"
    fixture = FIXTURES / "tight_fractional_density_d2_n12.json"
    assert rep.read_bytes() == fixture.read_bytes(), "report deviates from fixture"
    report(
        12,
        True,
        "measured pair density 36/66 = 6/11 matches the stored fixture "
        "(one slab per axis pair is the only intersecting kind)",
    )
