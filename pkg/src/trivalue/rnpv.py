"""Risk-adjusted NPV baseline and its bridge to the staged model.

rNPV = r * p_1...p_N - sum_n c_n * p_0 * p_1...p_{n-1}: the probability-
weighted reward minus the probability-weighted cost of reaching each stage.
All amounts are pre-discounted; no time value is modeled here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .pipeline import PipelineReport, PipelineSpec, run_pipeline


@dataclass(frozen=True)
class RnpvSpec:
    reward: float
    costs: tuple[float, ...]
    probs: tuple[float, ...]
    p0: float = 1.0  # probability the candidate enters stage 1

    def __post_init__(self):
        costs = tuple(self.costs)
        probs = tuple(self.probs)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "probs", probs)
        if len(costs) != len(probs) or not costs:
            raise ValueError("costs and probs must have equal, non-zero length")
        if any(not 0.0 <= p <= 1.0 for p in (*probs, self.p0)):
            raise ValueError("probabilities must lie in [0, 1]")
        if self.reward < 0.0 or any(c < 0.0 for c in costs):
            raise ValueError("reward and costs must be non-negative")


def rnpv_terms(spec: RnpvSpec) -> tuple[float, tuple[float, ...]]:
    """(risk-adjusted reward, per-stage risk-adjusted costs)."""
    reward = spec.reward * math.prod(spec.probs)
    cost_terms = []
    reach = spec.p0
    for n, cost in enumerate(spec.costs):
        cost_terms.append(cost * reach)
        reach *= spec.probs[n]
    return reward, tuple(cost_terms)


def rnpv(spec: RnpvSpec) -> float:
    reward, cost_terms = rnpv_terms(spec)
    return reward - sum(cost_terms)


def implied_progression_probs(report: PipelineReport) -> tuple[float, ...]:
    """Per-stage assurances, usable as the p_n of an rNPV computation."""
    return tuple(sr.assurance for sr in report.stage_reports)


@dataclass(frozen=True)
class ComparisonRecord:
    """Outcome of the two-programs-same-progression-rates comparison."""

    rnpv: float
    assurances: tuple[float, ...]
    terminal_a: float
    terminal_b: float
    value_difference: float  # (terminal_b - terminal_a) * market value of A


def compare(
    rnpv_spec: RnpvSpec,
    pipeline_a: PipelineSpec,
    pipeline_b: PipelineSpec,
    chaining: str = "copula",
) -> ComparisonRecord:
    """Contrast two pipelines that differ only in predictive validity.

    Both pipelines must produce the same per-stage assurances (within
    1e-9); rNPV, which sees only progression probabilities, is then
    identical for the two while the terminal probabilities differ.
    rnpv_spec supplies reward, costs, and p0; its probs are replaced by
    the implied assurances.
    """
    report_a = run_pipeline(pipeline_a, chaining=chaining)
    report_b = run_pipeline(pipeline_b, chaining=chaining)
    probs_a = implied_progression_probs(report_a)
    probs_b = implied_progression_probs(report_b)
    if len(probs_a) != len(probs_b) or any(
        abs(a - b) > 1e-9 for a, b in zip(probs_a, probs_b)
    ):
        raise ValueError(
            "pipelines have differing assurances; the comparison requires "
            "identical stage parameters apart from rho"
        )
    if len(rnpv_spec.costs) != len(probs_a):
        raise ValueError("rnpv_spec stage count does not match the pipelines")
    value = rnpv(replace(rnpv_spec, probs=probs_a))
    return ComparisonRecord(
        rnpv=value,
        assurances=probs_a,
        terminal_a=report_a.terminal_p_g_exceeds,
        terminal_b=report_b.terminal_p_g_exceeds,
        value_difference=(
            report_b.terminal_p_g_exceeds - report_a.terminal_p_g_exceeds
        )
        * pipeline_a.market_value,
    )


def from_pipeline(
    reward: float,
    costs: Sequence[float],
    pipeline_spec: PipelineSpec,
    p0: float = 1.0,
    chaining: str = "copula",
) -> RnpvSpec:
    """Build an RnpvSpec whose probabilities come from a pipeline run."""
    report = run_pipeline(pipeline_spec, chaining=chaining)
    return RnpvSpec(
        reward=reward,
        costs=tuple(costs),
        probs=implied_progression_probs(report),
        p0=p0,
    )
