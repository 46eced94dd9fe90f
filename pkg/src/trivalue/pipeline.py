"""Serial composition of stages and decision-tool valuation.

The normalized g posterior of stage n becomes the g prior of stage n+1,
while each stage keeps its own freshly specified delta prior. Stage 1 uses
the exact bivariate-normal coupling; later stages couple the carried
(non-Gaussian) g marginal to the new delta prior through a Gaussian copula
with that stage's rho. A moment-matching variant (carried marginal replaced
by a Gaussian with the same mean and sd) is available for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .distributions import (
    DEFAULT_GRID_POINTS,
    Gaussian1D,
    GridDensity,
    normalize,
)
from .errors import DegenerateStageError
from .tripartite import StageReport, StageSpec, evaluate_stage

#: g grids span the pipeline prior mean +/- this many prior sds; wider than
#: the delta span because chaining reshapes the tails.
G_SPAN_SDS = 10.0

#: Supported couplings between the carried g marginal and the next delta prior.
CHAINING_METHODS = ("copula", "moment_match")


@dataclass(frozen=True)
class PipelineSpec:
    g_prior: Gaussian1D
    g_star: float
    stages: tuple[StageSpec, ...]
    market_value: float = 1.0

    def __post_init__(self):
        stages = tuple(self.stages)
        if not stages:
            raise ValueError("pipeline needs at least one stage")
        object.__setattr__(self, "stages", stages)


@dataclass(frozen=True)
class PipelineReport:
    stage_reports: tuple[StageReport, ...]
    cumulative_success: tuple[float, ...]
    terminal_p_g_exceeds: float
    terminal_value: float


def g_grid_bounds(spec: PipelineSpec) -> tuple[float, float]:
    span = G_SPAN_SDS * spec.g_prior.sd
    return spec.g_prior.mean - span, spec.g_prior.mean + span


def initial_g_density(
    spec: PipelineSpec, n_points: int = DEFAULT_GRID_POINTS
) -> GridDensity:
    lo, hi = g_grid_bounds(spec)
    gd = GridDensity(lo, hi, spec.g_prior.pdf(np.linspace(lo, hi, n_points)))
    return normalize(gd)


def chain_prior(prev_posterior_g: GridDensity) -> GridDensity:
    """Normalized g posterior, ready to serve as the next stage's prior.

    The survival mass stripped here is bookkept in cumulative_success.
    """
    return normalize(prev_posterior_g)


def _grid_moments(gd: GridDensity) -> Gaussian1D:
    norm = normalize(gd)
    w = np.ones(norm.n_points)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= norm.h / 3.0
    mean = float(w @ (norm.x * norm.values))
    var = float(w @ ((norm.x - mean) ** 2 * norm.values))
    return Gaussian1D(mean, math.sqrt(var))


def run_pipeline(spec: PipelineSpec, chaining: str = "copula") -> PipelineReport:
    """Evaluate every stage in order and collect terminal statistics."""
    if chaining not in CHAINING_METHODS:
        raise ValueError(f"chaining must be one of {CHAINING_METHODS}, got {chaining!r}")
    current = initial_g_density(spec)
    prior_gaussian: Optional[Gaussian1D] = spec.g_prior
    reports: list[StageReport] = []
    cumulative: list[float] = []
    running = 1.0
    for idx, stage in enumerate(spec.stages, start=1):
        try:
            report = evaluate_stage(
                stage, current, spec.g_star, prior_gaussian=prior_gaussian
            )
        except DegenerateStageError as exc:
            raise DegenerateStageError(f"stage {idx}: {exc}") from exc
        reports.append(report)
        running *= report.assurance
        cumulative.append(running)
        current = chain_prior(report.posterior_g)
        if chaining == "moment_match":
            moments = _grid_moments(current)
            current = GridDensity(current.lo, current.hi, moments.pdf(current.x))
            current = normalize(current)
            prior_gaussian = moments
        else:
            prior_gaussian = None
    terminal = reports[-1].p_g_exceeds_given_success
    return PipelineReport(
        stage_reports=tuple(reports),
        cumulative_success=tuple(cumulative),
        terminal_p_g_exceeds=terminal,
        terminal_value=terminal * cumulative[-1] * spec.market_value,
    )


def decision_tool_value(
    spec: PipelineSpec,
    stage_index: int,
    replacement: StageSpec,
    chaining: str = "copula",
) -> float:
    """Value of swapping in a new decision tool at stage_index (1-based).

    The change in terminal P(g > g_star | all stages succeed) times the
    market value; negative when the replacement tool is worse.
    """
    n = len(spec.stages)
    if not 1 <= stage_index <= n:
        raise ValueError(f"stage_index must lie in [1, {n}], got {stage_index}")
    old = run_pipeline(spec, chaining=chaining)
    stages = list(spec.stages)
    stages[stage_index - 1] = replacement
    new = run_pipeline(replace(spec, stages=tuple(stages)), chaining=chaining)
    return (new.terminal_p_g_exceeds - old.terminal_p_g_exceeds) * spec.market_value


@dataclass(frozen=True)
class SweepPoint:
    rho_sweep: float
    rho_conditioning: Optional[float]
    assurance: float
    terminal_p_g_exceeds: float
    relative_change: Optional[float]  # vs previous sweep point, same conditioning


def sweep_rho(
    spec: PipelineSpec,
    sweep_stage: int,
    rho_grid: Sequence[float],
    conditioning_stage: Optional[int] = None,
    conditioning_values: Optional[Sequence[float]] = None,
    chaining: str = "copula",
) -> list[SweepPoint]:
    """Terminal probability as a function of one stage's rho, optionally
    conditioned on a second stage's rho (Cartesian product)."""
    n = len(spec.stages)
    if not 1 <= sweep_stage <= n:
        raise ValueError(f"sweep_stage must lie in [1, {n}], got {sweep_stage}")
    if (conditioning_stage is None) != (conditioning_values is None):
        raise ValueError("conditioning stage and values must be given together")
    if conditioning_stage is not None and not 1 <= conditioning_stage <= n:
        raise ValueError(
            f"conditioning_stage must lie in [1, {n}], got {conditioning_stage}"
        )
    rho_grid = list(rho_grid)
    if not rho_grid:
        raise ValueError("rho_grid is empty")
    cond_values: list[Optional[float]] = (
        [None] if conditioning_values is None else list(conditioning_values)
    )
    points: list[SweepPoint] = []
    for cond in cond_values:
        prev: Optional[float] = None
        for rho in rho_grid:
            stages = list(spec.stages)
            stages[sweep_stage - 1] = replace(stages[sweep_stage - 1], rho=rho)
            if cond is not None:
                stages[conditioning_stage - 1] = replace(
                    stages[conditioning_stage - 1], rho=cond
                )
            report = run_pipeline(replace(spec, stages=tuple(stages)), chaining=chaining)
            terminal = report.terminal_p_g_exceeds
            rel = None if prev is None else (terminal - prev) / prev
            points.append(
                SweepPoint(
                    rho_sweep=rho,
                    rho_conditioning=cond,
                    assurance=report.stage_reports[sweep_stage - 1].assurance,
                    terminal_p_g_exceeds=terminal,
                    relative_change=rel,
                )
            )
            prev = terminal
    return points
