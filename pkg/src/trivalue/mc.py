"""Seeded Monte Carlo oracle for the staged model.

Simulates the same generative process the quadrature path integrates:
draw the quality score g from its prior, then at each stage draw the true
readout effect from the stage's delta prior coupled to g (bivariate normal
at stage 1; Gaussian copula via the surviving population's empirical CDF
afterwards), add readout noise, and keep the candidate iff the noisy
readout clears the stage cutoff. Uses the counter-based Philox generator
with one child stream per stage, so estimates are bit-reproducible for a
fixed (seed, n_replicates) regardless of batch size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtri

from .distributions import Gaussian1D
from .pipeline import PipelineReport, PipelineSpec, run_pipeline
from .tripartite import StageSpec, cutoff


@dataclass(frozen=True)
class McConfig:
    n_replicates: int
    seed: int
    batch_size: int = 250_000

    def __post_init__(self):
        if self.n_replicates < 1:
            raise ValueError("n_replicates must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass(frozen=True)
class McEstimate:
    value: Optional[float]
    std_error: Optional[float]
    n: int

    @property
    def estimable(self) -> bool:
        return self.value is not None


def _proportion(count: int, n: int) -> McEstimate:
    if n == 0:
        return McEstimate(None, None, 0)
    p = count / n
    return McEstimate(p, math.sqrt(p * (1.0 - p) / n), n)


def _standard_normals(rng: np.random.Generator, n: int, batch_size: int) -> np.ndarray:
    """Inverse-CDF normal draws, generated in batches to bound memory.

    Chunked uniform draws from one generator concatenate to the same
    stream as a single draw, so batch_size never changes the result.
    """
    out = np.empty(n)
    for start in range(0, n, batch_size):
        stop = min(start + batch_size, n)
        u = rng.random(stop - start)
        np.clip(u, 1e-16, None, out=u)
        out[start:stop] = ndtri(u)
    return out


def _hazen_scores(g_values: np.ndarray) -> np.ndarray:
    """Copula scores from the empirical CDF, mid-rank (Hazen) convention."""
    m = g_values.size
    ranks = np.empty(m)
    ranks[np.argsort(g_values, kind="stable")] = np.arange(1, m + 1)
    u = np.clip((ranks - 0.5) / m, 1e-16, 1.0 - 1e-16)
    return ndtri(u)


def simulate_pipeline(spec: PipelineSpec, cfg: McConfig) -> dict[str, McEstimate]:
    """Estimate every per-stage and terminal statistic by simulation.

    Keys: assurance_n, tp_n, fp_n, cumulative_n, p_g_exceeds_n for each
    stage n, plus terminal_p_g_exceeds. Statistics of stages with zero
    entrants are flagged non-estimable (value None), never NaN.
    """
    n_total = cfg.n_replicates
    streams = np.random.SeedSequence(cfg.seed).spawn(len(spec.stages) + 1)
    rng_g = np.random.Generator(np.random.Philox(streams[0]))
    g_alive = spec.g_prior.mean + spec.g_prior.sd * _standard_normals(
        rng_g, n_total, cfg.batch_size
    )

    results: dict[str, McEstimate] = {}
    for i, stage in enumerate(spec.stages, start=1):
        m = g_alive.size
        if m == 0:
            for key in ("assurance", "tp", "fp", "cumulative", "p_g_exceeds"):
                results[f"{key}_{i}"] = McEstimate(None, None, 0)
            continue
        if i == 1:
            z_g = (g_alive - spec.g_prior.mean) / spec.g_prior.sd
        else:
            z_g = _hazen_scores(g_alive)
        rng = np.random.Generator(np.random.Philox(streams[i]))
        eps = _standard_normals(rng, m, cfg.batch_size)
        eta = _standard_normals(rng, m, cfg.batch_size)
        prior = stage.delta_prior
        delta = prior.mean + prior.sd * (
            stage.rho * z_g + math.sqrt(1.0 - stage.rho**2) * eps
        )
        passed = delta + stage.sigma_hat * eta > cutoff(stage)
        k = int(passed.sum())
        tp = int((passed & (delta > stage.delta_min)).sum())
        results[f"assurance_{i}"] = _proportion(k, m)
        results[f"tp_{i}"] = _proportion(tp, m)
        results[f"fp_{i}"] = _proportion(k - tp, m)
        g_alive = g_alive[passed]
        results[f"cumulative_{i}"] = _proportion(g_alive.size, n_total)
        results[f"p_g_exceeds_{i}"] = _proportion(
            int((g_alive > spec.g_star).sum()), g_alive.size
        )
    results["terminal_p_g_exceeds"] = results[f"p_g_exceeds_{len(spec.stages)}"]
    return results


def simulate_stage(
    stage: StageSpec, g_prior: Gaussian1D, g_star: float, cfg: McConfig
) -> dict[str, McEstimate]:
    """Single-stage oracle with exact bivariate-normal sampling."""
    spec = PipelineSpec(g_prior=g_prior, g_star=g_star, stages=(stage,))
    return simulate_pipeline(spec, cfg)


@dataclass(frozen=True)
class GateRow:
    statistic: str
    quadrature: float
    mc_value: Optional[float]
    std_error: Optional[float]
    passed: bool


def compare_with_quadrature(
    spec: PipelineSpec,
    estimates: dict[str, McEstimate],
    report: Optional[PipelineReport] = None,
    n_sigma: float = 3.0,
    chaining: str = "copula",
) -> list[GateRow]:
    """Side-by-side quadrature-vs-MC table with an n-sigma pass gate."""
    if report is None:
        report = run_pipeline(spec, chaining=chaining)
    rows: list[GateRow] = []
    for i, sr in enumerate(report.stage_reports, start=1):
        expected = {
            f"assurance_{i}": sr.assurance,
            f"tp_{i}": sr.tp,
            f"fp_{i}": sr.fp,
            f"cumulative_{i}": report.cumulative_success[i - 1],
            f"p_g_exceeds_{i}": sr.p_g_exceeds_given_success,
        }
        for name, quad in expected.items():
            est = estimates[name]
            if not est.estimable:
                rows.append(GateRow(name, quad, None, None, False))
                continue
            tol = n_sigma * (est.std_error or 0.0)
            rows.append(
                GateRow(name, quad, est.value, est.std_error,
                        bool(abs(est.value - quad) <= tol))
            )
    return rows
