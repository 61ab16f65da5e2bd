"""Robust Bayesian sequential borrowing.

Thin wrapper around the compiled core. The main entry points are
StudySummary, ProgrammeSpec, analyze (sequential stage-by-stage analysis)
and run_scenario (Monte Carlo operating characteristics).
"""

from ._core import (  # noqa: F401
    CounterRng,
    Direction,
    EngineState,
    EssMethod,
    MixtureDistribution,
    PathComponent,
    PooledNormal,
    ProgrammeSpec,
    StudySummary,
    advance,
    analyze,
    bias_sample,
    decide,
    enumerate_paths,
    ess_elir,
    ess_moment,
    ess_pct,
    mixture,
    normal_pdf,
    normal_quantile,
    normal_upper_tail,
    path_weights,
    pool,
    run_scenario,
    success_probability,
)

__all__ = [
    "CounterRng",
    "Direction",
    "EngineState",
    "EssMethod",
    "MixtureDistribution",
    "PathComponent",
    "PooledNormal",
    "ProgrammeSpec",
    "StudySummary",
    "advance",
    "analyze",
    "bias_sample",
    "decide",
    "enumerate_paths",
    "ess_elir",
    "ess_moment",
    "ess_pct",
    "mixture",
    "normal_pdf",
    "normal_quantile",
    "normal_upper_tail",
    "path_weights",
    "pool",
    "run_scenario",
    "success_probability",
]
