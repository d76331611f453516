"""Spreading speeds and linear-determinacy diagnostics for two-species
competition systems with nonlocal dispersal in periodic habitats."""

from nldisp._core import (
    Habitat,
    NldispError,
    eval_expr,
    expr_free_vars,
    kernel_moment,
)

__all__ = [
    "Habitat",
    "NldispError",
    "eval_expr",
    "expr_free_vars",
    "kernel_moment",
]
