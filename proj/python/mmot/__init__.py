"""Constructive symmetric multimarginal transport plans for repulsive costs."""

from ._mmot import (
    DegenerateCloud,
    Error,
    InsufficientMass,
    Marginal,
    Omega,
    ParseError,
    Plan,
    ValidationFailed,
    certify,
    construct,
    exact_optimum_tiny,
    min_separation,
    plan_cost,
    plan_marginal,
    sharpness_lower_bound,
    sharpness_marginal,
    sharpness_monte_carlo,
    validate,
)

__all__ = [
    "DegenerateCloud",
    "Error",
    "InsufficientMass",
    "Marginal",
    "Omega",
    "ParseError",
    "Plan",
    "ValidationFailed",
    "certify",
    "construct",
    "exact_optimum_tiny",
    "min_separation",
    "plan_cost",
    "plan_marginal",
    "sharpness_lower_bound",
    "sharpness_marginal",
    "sharpness_monte_carlo",
    "validate",
]
