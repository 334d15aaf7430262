"""Exact intersection queries among simplices in four dimensions."""
from ._core import (
    SchemaError,
    batched_breakpoint,
    batched_cost_exponent,
    collisions,
    generate,
    k_counts,
    oracle,
    q_tradeoff_exponent,
    query,
    tradeoff_curve,
    unfold_wide,
)

__all__ = [
    "SchemaError",
    "batched_breakpoint",
    "batched_cost_exponent",
    "collisions",
    "generate",
    "k_counts",
    "oracle",
    "q_tradeoff_exponent",
    "query",
    "tradeoff_curve",
    "unfold_wide",
]
