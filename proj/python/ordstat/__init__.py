"""Order statistics over map families, Orlicz norms and l1 embeddings."""

from ._core import (
    Embedding,
    Error,
    check_bounds,
    conjugate_power,
    expected_sum,
    field_table,
    integral_rearrangement,
    luxemburg_norm,
    m_from_rv,
    mstar,
    rademacher_average,
    reference_norm,
    simulate_expected_sum,
    theorem_ratio,
    verify_family,
)

__all__ = [
    "Embedding",
    "Error",
    "check_bounds",
    "conjugate_power",
    "expected_sum",
    "field_table",
    "integral_rearrangement",
    "luxemburg_norm",
    "m_from_rv",
    "mstar",
    "rademacher_average",
    "reference_norm",
    "simulate_expected_sum",
    "theorem_ratio",
    "verify_family",
]
