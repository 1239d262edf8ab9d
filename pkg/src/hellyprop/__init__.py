"""Constructive Helly-type theorems for monotone properties of boxes and
H-convex sets, with exact rational arithmetic and re-checkable certificates."""

from .hsystem import (
    Box,
    Cmp,
    ColorClasses,
    Family,
    HSet,
    HSystem,
    box,
    box_to_hset,
    canonical_box_system,
    compare,
    family,
    family_from_boxes,
    frac,
    hset_to_box,
    intersect,
    intersect_family,
    intersect_ids,
    is_box_system,
    offset_leq,
    ordered_ids,
    subfamily,
    vec,
)
from .properties import (
    AllOf,
    AnyOf,
    ContainsAtLeast,
    MonotoneProperty,
    NonEmpty,
    VolumeAtLeast,
    box_volume,
    count_points,
    eval_property,
    feasible,
    fourier_motzkin_feasible,
)
from .selection import (
    ChainWitness,
    SelectionWitness,
    StrongHellyWitness,
    chain_intersection,
    colorful_select,
    consistent_chain,
    consistent_grid,
    consistent_split,
    erdos_szekeres_bound,
    families_consistent,
    strong_helly_witness,
    weak_colorful_helly,
)
from .fractional import (
    FractionalWitness,
    Hypergraph,
    HypothesisViolation,
    KPlus1Result,
    PairsResult,
    PiercingFamily,
    build_hypergraph,
    default_block_size,
    density,
    find_multipartite,
    fractional_k,
    fractional_kplus1,
    fractional_pairs,
    pairs_chain_constant,
    pq_pierce,
    transversals_complete,
)
from .constructions import (
    GenSpec,
    gen_dense,
    gen_family,
    gen_random,
    gen_random_system,
    gen_tight_colorful,
    gen_tight_fractional,
    singleton_classes,
)
from .oracle import (
    CertificateError,
    ColorfulReport,
    brute_best_subfamily,
    brute_colorful,
    brute_min_witness,
    brute_pierce,
    verify_certificate,
)

__version__ = "0.1.0"
