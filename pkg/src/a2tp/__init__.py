"""Triangle presentations over PG(2,q) and the abelian invariant A_T."""

from .coinv import AnalysisReport, analyze, expected_epsilon_order, relation_matrix
from .gf import FieldContext, PrimePower, build_field, prime_power
from .plane import PlaneContext, build_plane
from .presentation import (
    TrianglePresentation,
    find_m_subset,
    gen_t0,
    gen_t0_dual,
    is_s_invariant,
    read_presentation,
    twist,
    twist_by_name,
    validate,
    write_presentation,
)
from .zlinalg import FpAbelianGroup, IntMatrix, SnfResult, hnf_accumulate, snf

__all__ = [
    "AnalysisReport",
    "FieldContext",
    "FpAbelianGroup",
    "IntMatrix",
    "PlaneContext",
    "PrimePower",
    "SnfResult",
    "TrianglePresentation",
    "analyze",
    "build_field",
    "build_plane",
    "expected_epsilon_order",
    "find_m_subset",
    "gen_t0",
    "gen_t0_dual",
    "hnf_accumulate",
    "is_s_invariant",
    "prime_power",
    "read_presentation",
    "relation_matrix",
    "snf",
    "twist",
    "twist_by_name",
    "validate",
    "write_presentation",
]

__version__ = "0.1.0"
