"""Single-stage model linking a decision tool's readout to candidate quality.

A stage is parameterized by the predictive validity rho, a normal prior on
the true readout effect delta, the readout noise sigma_hat, and a success
criterion. Success means the observed readout exceeds a cutoff; the
operations below compute the cutoff, the unnormalized posteriors of delta
and of the quality score g after success, and the derived probabilities
(assurance, false/true positives, threshold exceedance).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import ndtr

from .distributions import (
    DEFAULT_GRID_POINTS,
    BivariateGaussian,
    Gaussian1D,
    GridDensity,
    conditional_g_given_delta,
    copula_conditional_values,
    integrate,
    normal_pdf,
    std_normal_quantile,
)
from .errors import DegenerateStageError, NumericalIntegrityError

#: Delta grids span the prior mean +/- this many combined standard
#: deviations sqrt(sigma_delta^2 + sigma_hat^2).
DELTA_SPAN_SDS = 8.0

#: Stages with success probability below this cannot support conditional
#: statistics.
ASSURANCE_FLOOR = 1e-10

#: Grid-mass assurance and the closed form must agree this closely or the
#: grid is considered misconfigured.
ASSURANCE_CROSS_CHECK_TOL = 1e-5


@dataclass(frozen=True)
class FrequentistAlpha:
    """Success iff the observed readout clears a one-sided test at level
    alpha against the minimal relevant effect delta_min."""

    alpha: float
    delta_min: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class AbsoluteCutoff:
    """Success iff the observed readout exceeds a directly chosen cutoff."""

    c: float


@dataclass(frozen=True)
class TopFraction:
    """Success iff the candidate lands in the top fraction q of the
    readout distribution implied by the current delta prior."""

    q: float

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must lie in (0, 1), got {self.q}")


SuccessCriterion = Union[FrequentistAlpha, AbsoluteCutoff, TopFraction]


@dataclass(frozen=True)
class StageSpec:
    """All parameters of one stage.

    delta_min is the truth boundary used to classify false vs true
    positives; under FrequentistAlpha it must equal the criterion's
    delta_min (single source of truth).
    """

    rho: float
    delta_prior: Gaussian1D
    sigma_hat: float
    criterion: SuccessCriterion
    delta_min: float = 0.0

    def __post_init__(self):
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie strictly in (-1, 1), got {self.rho}")
        if not self.sigma_hat > 0.0:
            raise ValueError(f"sigma_hat must be positive, got {self.sigma_hat}")
        if isinstance(self.criterion, FrequentistAlpha):
            if self.criterion.delta_min != self.delta_min:
                raise ValueError(
                    "criterion.delta_min and StageSpec.delta_min disagree "
                    f"({self.criterion.delta_min} vs {self.delta_min})"
                )

    @property
    def marginal_readout_sd(self) -> float:
        """SD of the observed readout marginal, sqrt(sd_delta^2 + sigma_hat^2)."""
        return math.hypot(self.delta_prior.sd, self.sigma_hat)


@dataclass(frozen=True)
class StageReport:
    """All per-stage outputs: probabilities plus the two sub-densities
    (each with total mass equal to the assurance)."""

    cutoff: float
    assurance: float
    fp: float
    tp: float
    p_above_given_success: float
    p_below_given_success: float
    p_g_exceeds_given_success: float
    posterior_delta: GridDensity
    posterior_g: GridDensity


def cutoff(spec: StageSpec) -> float:
    """Readout cutoff implied by the stage's success criterion."""
    crit = spec.criterion
    if isinstance(crit, FrequentistAlpha):
        return spec.sigma_hat * std_normal_quantile(1.0 - crit.alpha) + crit.delta_min
    if isinstance(crit, AbsoluteCutoff):
        return crit.c
    if isinstance(crit, TopFraction):
        # (1-q)-quantile of the readout marginal so a fraction q passes.
        return (
            spec.delta_prior.mean
            + spec.marginal_readout_sd * std_normal_quantile(1.0 - crit.q)
        )
    raise TypeError(f"unknown success criterion {crit!r}")


def success_prob_given_delta(delta, spec: StageSpec):
    """P(observed readout > cutoff | true effect delta)."""
    c = cutoff(spec)
    return ndtr((np.asarray(delta, dtype=float) - c) / spec.sigma_hat)


def delta_grid_bounds(spec: StageSpec) -> tuple[float, float]:
    span = DELTA_SPAN_SDS * spec.marginal_readout_sd
    return spec.delta_prior.mean - span, spec.delta_prior.mean + span


def posterior_delta(
    spec: StageSpec, n_points: int = DEFAULT_GRID_POINTS
) -> GridDensity:
    """Unnormalized posterior of delta after success; mass = assurance."""
    lo, hi = delta_grid_bounds(spec)
    d = np.linspace(lo, hi, n_points)
    vals = success_prob_given_delta(d, spec) * normal_pdf(d, spec.delta_prior)
    return GridDensity(lo, hi, vals)


def assurance_closed_form(spec: StageSpec) -> float:
    """P(success) marginalized over the delta prior, in closed form."""
    c = cutoff(spec)
    return float(ndtr((spec.delta_prior.mean - c) / spec.marginal_readout_sd))


def assurance(
    spec: StageSpec, pd: Optional[GridDensity] = None
) -> float:
    """P(success): grid mass of the delta posterior, cross-checked against
    the closed form. A disagreement beyond tolerance aborts."""
    if pd is None:
        pd = posterior_delta(spec)
    mass = pd.mass
    exact = assurance_closed_form(spec)
    if abs(mass - exact) > ASSURANCE_CROSS_CHECK_TOL:
        raise NumericalIntegrityError(
            f"assurance mismatch: grid mass {mass!r} vs closed form {exact!r}"
        )
    return mass


def fp_tp(
    spec: StageSpec, pd: Optional[GridDensity] = None
) -> tuple[float, float]:
    """(false positive, true positive) masses split at delta_min.

    Mass outside the grid is zero, so a boundary beyond the grid simply
    allocates everything to one side.
    """
    if pd is None:
        pd = posterior_delta(spec)
    split = min(max(spec.delta_min, pd.lo), pd.hi)
    fp = integrate(pd, pd.lo, split)
    tp = integrate(pd, split, pd.hi)
    return fp, tp


def conditional_classification(
    spec: StageSpec, pd: Optional[GridDensity] = None
) -> tuple[float, float]:
    """(P(delta > delta_min | success), P(delta < delta_min | success))."""
    if pd is None:
        pd = posterior_delta(spec)
    a = assurance(spec, pd)
    if a < ASSURANCE_FLOOR:
        raise DegenerateStageError(f"assurance {a} too small for conditioning")
    fp, tp = fp_tp(spec, pd)
    return tp / a, fp / a


def posterior_g(
    spec: StageSpec,
    g_prior: GridDensity,
    prior_gaussian: Optional[Gaussian1D] = None,
    pd: Optional[GridDensity] = None,
) -> GridDensity:
    """Unnormalized posterior of g after success; mass = assurance.

    Integrates the conditional density of g given delta against the delta
    posterior. When ``prior_gaussian`` is supplied the (g, delta) joint is
    the exact bivariate normal; otherwise g and delta are coupled by a
    Gaussian copula with correlation rho, which preserves the gridded g
    marginal exactly and coincides with the bivariate normal whenever that
    marginal is Gaussian.
    """
    if pd is None:
        pd = posterior_delta(spec)
    d = pd.x
    # Simpson weights over the delta grid.
    w = np.ones(pd.n_points)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= pd.h / 3.0
    w *= pd.values

    if prior_gaussian is not None:
        bvn = BivariateGaussian(
            mean_g=prior_gaussian.mean,
            mean_d=spec.delta_prior.mean,
            sd_g=prior_gaussian.sd,
            sd_d=spec.delta_prior.sd,
            rho=spec.rho,
        )
        cond_sd = prior_gaussian.sd * math.sqrt(1.0 - spec.rho * spec.rho)
        cond_mean = prior_gaussian.mean + spec.rho * (
            prior_gaussian.sd / bvn.sd_d
        ) * (d[None, :] - bvn.mean_d)
        kernel = Gaussian1D(0.0, cond_sd).pdf(g_prior.x[:, None] - cond_mean)
    else:
        z_d = (d - spec.delta_prior.mean) / spec.delta_prior.sd
        kernel = copula_conditional_values(g_prior, spec.rho, z_d)
    return GridDensity(g_prior.lo, g_prior.hi, np.maximum(kernel @ w, 0.0))


def prob_g_exceeds(
    posterior: GridDensity, g_star: float, assurance_value: float
) -> float:
    """P(g > g_star | success) from the unnormalized g posterior."""
    if assurance_value < ASSURANCE_FLOOR:
        raise DegenerateStageError(
            f"assurance {assurance_value} too small for conditioning"
        )
    upper = max(min(g_star, posterior.hi), posterior.lo)
    return integrate(posterior, upper, posterior.hi) / assurance_value


def evaluate_stage(
    spec: StageSpec,
    g_prior: GridDensity,
    g_star: float,
    prior_gaussian: Optional[Gaussian1D] = None,
) -> StageReport:
    """Full per-stage report; see StageReport."""
    pd = posterior_delta(spec)
    a = assurance(spec, pd)
    if a < ASSURANCE_FLOOR:
        raise DegenerateStageError(f"assurance {a} too small for conditioning")
    fp, tp = fp_tp(spec, pd)
    pg = posterior_g(spec, g_prior, prior_gaussian=prior_gaussian, pd=pd)
    return StageReport(
        cutoff=cutoff(spec),
        assurance=a,
        fp=fp,
        tp=tp,
        p_above_given_success=tp / a,
        p_below_given_success=fp / a,
        p_g_exceeds_given_success=prob_g_exceeds(pg, g_star, a),
        posterior_delta=pd,
        posterior_g=pg,
    )
