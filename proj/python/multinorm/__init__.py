"""Python access to the multinorm estimators."""

from ._core import (
    ArgumentError,
    Body,
    CapacityError,
    Estimate,
    density_at_zero,
    estimate_M,
    estimate_norm,
    min_signs,
    q_n_cube,
    run_cli,
)

__all__ = [
    "ArgumentError",
    "Body",
    "CapacityError",
    "Estimate",
    "density_at_zero",
    "estimate_M",
    "estimate_norm",
    "min_signs",
    "q_n_cube",
    "run_cli",
]
