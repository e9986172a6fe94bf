"""Swing option pricing by optimal quantization."""

from ._core import (
    ContractViolation,
    InfeasibleContract,
    InstanceTooLarge,
    NumericalFailure,
    SwingError,
    GlobalConstraints,
    OptimizerReport,
    QuantTree,
    TwoFactorParams,
    build_tree,
    closed_form_strip,
    interpolate_on_tile,
    lattice_premium_surface,
    lloyd_optimize,
    locate_tile,
    newton_optimize_1d_normal,
    premium_surface,
    price_lattice_bruteforce,
    price_lattice_dp,
    price_two_period,
    quantized_dp_price,
    reachable_set,
    simulate_factor_paths,
    swap_value,
    value_policy,
    variance_lambda,
)

__all__ = [
    "ContractViolation",
    "InfeasibleContract",
    "InstanceTooLarge",
    "NumericalFailure",
    "SwingError",
    "GlobalConstraints",
    "OptimizerReport",
    "QuantTree",
    "TwoFactorParams",
    "build_tree",
    "closed_form_strip",
    "interpolate_on_tile",
    "lattice_premium_surface",
    "lloyd_optimize",
    "locate_tile",
    "newton_optimize_1d_normal",
    "premium_surface",
    "price_lattice_bruteforce",
    "price_lattice_dp",
    "price_two_period",
    "quantized_dp_price",
    "reachable_set",
    "simulate_factor_paths",
    "swap_value",
    "value_policy",
    "variance_lambda",
]
