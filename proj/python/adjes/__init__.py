"""Adjusted Expected Shortfall: risk profiles, SSD checks and market optima."""

from ._core import (
    AdjesError,
    MarketModel,
    RiskProfile,
    StepQuantile,
    adjusted_es,
    benchmark_from_es_profile,
    gaussian_discretized,
    gaussian_es,
    homogeneity,
    is_acceptable,
    rolling_report,
    solve_problem_A,
    solve_problem_B,
    ssd_based_risk,
    ssd_dominates,
    sum_profiles,
)

__all__ = [
    "AdjesError",
    "MarketModel",
    "RiskProfile",
    "StepQuantile",
    "adjusted_es",
    "benchmark_from_es_profile",
    "gaussian_discretized",
    "gaussian_es",
    "homogeneity",
    "is_acceptable",
    "rolling_report",
    "solve_problem_A",
    "solve_problem_B",
    "ssd_based_risk",
    "ssd_dominates",
    "sum_profiles",
]
