"""Numerical ranges, numerical diameters and the induced seminorms of linear maps
between matrix algebras, with certified intervals and a replication suite."""
from .diamnorm import (Budget, DiamEstimate, LedgerEntry, analyze_map, cb_lower,
                       diam_estimate, inequality_ledger, map_norm, sdiam_estimate,
                       separation_check, submultiplicativity, witness_ratio)
from .errors import OpDiamError, ResourceLimit, ValidationError
from .maps import EXAMPLE_IDS, named_example, random_superop
from .numrange import (centering_constants, numerical_diameter, numerical_radius,
                       range_sample, spectral_diameter, support_function)
from .replicate import distinguishability_report, run_suite
from .superop import (SuperOp, amplify, apply, classify, compose, from_choi, from_kraus,
                      from_transfer, section_translate, trace_translate_cp)

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "DiamEstimate",
    "EXAMPLE_IDS",
    "LedgerEntry",
    "OpDiamError",
    "ResourceLimit",
    "SuperOp",
    "ValidationError",
    "amplify",
    "analyze_map",
    "apply",
    "cb_lower",
    "centering_constants",
    "classify",
    "compose",
    "diam_estimate",
    "distinguishability_report",
    "from_choi",
    "from_kraus",
    "from_transfer",
    "inequality_ledger",
    "map_norm",
    "named_example",
    "numerical_diameter",
    "numerical_radius",
    "random_superop",
    "range_sample",
    "run_suite",
    "sdiam_estimate",
    "section_translate",
    "separation_check",
    "spectral_diameter",
    "submultiplicativity",
    "support_function",
    "trace_translate_cp",
    "witness_ratio",
]

