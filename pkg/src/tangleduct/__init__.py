"""Finite separation systems, tangles, and tree certificates.

The package answers one question constructively: given a finite separation
system and a family of stars, either exhibit a consistent orientation
avoiding every star of the family, or build a tree whose nodes all carry
stars from the family — never both, never neither (under the stated
hypotheses).  Everything returned is re-verified from first principles
before it reaches the caller.
"""

from .backends import (
    DEFAULT_CLOSURE_CAP,
    GROUND_CAP,
    GraphInput,
    OrderFunction,
    build_set_universe,
    graph_separations,
    is_improper,
    is_submodular,
    side_masks,
    submodularity_violation,
)
from .cli import RunConfig, demo_family, main, run
from .core import (
    OrientedSep,
    SeparationSystem,
    Universe,
    find_inconsistency,
    is_antisymmetric,
    is_consistent,
    is_multistar,
    is_nested,
    is_orientation,
    is_small,
    is_star,
    system_from_json_dict,
    system_to_json_dict,
    tables_from_masks,
    validate_universe,
)
from .duality import (
    Certificate,
    DualityState,
    ShiftRecord,
    avoids,
    duality_state,
    emulates,
    emulates_for_family,
    find_separator,
    shift_map,
    shift_stree,
    standardize,
    strong_duality,
    verify_certificate,
    violating_star,
    weak_duality,
)
from .errors import (
    FNotStandard,
    FNotStars,
    HypothesisFailure,
    InternalInvariant,
    MalformedInput,
    NoMatchingStar,
    NotFSeparable,
    RootLabelTrivial,
    ShiftLeftS,
    TangleductError,
    TargetNotAboveR,
    TooLarge,
)
from .essential import (
    EssentialCore,
    essential_core,
    essentialize_stree,
    expand_to_family,
)
from .oracle import (
    DEFAULT_CENSUS_CAP,
    CrossCheckReport,
    OrientationCensus,
    cross_check,
    enumerate_orientations,
    orientation_picks,
)
from .stree import (
    STree,
    STreeReport,
    StarFamily,
    contract_to_tight,
    find_guided_sink,
    is_order_respecting,
    is_over,
    prune_to_irredundant,
    star_sort_key,
    tighten_rooted,
    validate_stree,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "CrossCheckReport",
    "DEFAULT_CENSUS_CAP",
    "DEFAULT_CLOSURE_CAP",
    "DualityState",
    "EssentialCore",
    "FNotStandard",
    "FNotStars",
    "GROUND_CAP",
    "GraphInput",
    "HypothesisFailure",
    "InternalInvariant",
    "MalformedInput",
    "NoMatchingStar",
    "NotFSeparable",
    "OrderFunction",
    "OrientationCensus",
    "OrientedSep",
    "RootLabelTrivial",
    "RunConfig",
    "STree",
    "STreeReport",
    "SeparationSystem",
    "ShiftLeftS",
    "ShiftRecord",
    "StarFamily",
    "TangleductError",
    "TargetNotAboveR",
    "TooLarge",
    "Universe",
    "avoids",
    "build_set_universe",
    "contract_to_tight",
    "cross_check",
    "demo_family",
    "duality_state",
    "emulates",
    "emulates_for_family",
    "enumerate_orientations",
    "essential_core",
    "essentialize_stree",
    "expand_to_family",
    "find_guided_sink",
    "find_inconsistency",
    "find_separator",
    "graph_separations",
    "is_antisymmetric",
    "is_consistent",
    "is_improper",
    "is_multistar",
    "is_nested",
    "is_order_respecting",
    "is_orientation",
    "is_over",
    "is_small",
    "is_star",
    "is_submodular",
    "main",
    "orientation_picks",
    "prune_to_irredundant",
    "run",
    "shift_map",
    "shift_stree",
    "side_masks",
    "standardize",
    "star_sort_key",
    "strong_duality",
    "submodularity_violation",
    "system_from_json_dict",
    "system_to_json_dict",
    "tables_from_masks",
    "tighten_rooted",
    "validate_stree",
    "validate_universe",
    "verify_certificate",
    "violating_star",
    "weak_duality",
]
