"""Valuation of staged R&D programs and of the decision tools that drive
progression decisions, alongside a conventional risk-adjusted NPV baseline."""

from .distributions import (
    BivariateGaussian,
    Gaussian1D,
    GridDensity,
    cdf_of,
    conditional_g_given_delta,
    copula_conditional_g,
    gaussian_grid_density,
    integrate,
    normal_pdf,
    normalize,
    std_normal_cdf,
    std_normal_quantile,
)
from .errors import (
    ConfigError,
    DegenerateDensityError,
    DegenerateStageError,
    NumericalIntegrityError,
    TrivalueError,
)
from .mc import McConfig, McEstimate, compare_with_quadrature, simulate_pipeline, simulate_stage
from .pipeline import (
    PipelineReport,
    PipelineSpec,
    SweepPoint,
    chain_prior,
    decision_tool_value,
    initial_g_density,
    run_pipeline,
    sweep_rho,
)
from .rnpv import (
    ComparisonRecord,
    RnpvSpec,
    compare,
    implied_progression_probs,
    rnpv,
    rnpv_terms,
)
from .tripartite import (
    AbsoluteCutoff,
    FrequentistAlpha,
    StageReport,
    StageSpec,
    TopFraction,
    assurance,
    conditional_classification,
    cutoff,
    evaluate_stage,
    fp_tp,
    posterior_delta,
    posterior_g,
    prob_g_exceeds,
    success_prob_given_delta,
)

__version__ = "0.1.0"

__all__ = [
    "AbsoluteCutoff",
    "BivariateGaussian",
    "ComparisonRecord",
    "ConfigError",
    "DegenerateDensityError",
    "DegenerateStageError",
    "FrequentistAlpha",
    "Gaussian1D",
    "GridDensity",
    "McConfig",
    "McEstimate",
    "NumericalIntegrityError",
    "PipelineReport",
    "PipelineSpec",
    "RnpvSpec",
    "StageReport",
    "StageSpec",
    "SweepPoint",
    "TopFraction",
    "TrivalueError",
    "assurance",
    "cdf_of",
    "chain_prior",
    "compare",
    "compare_with_quadrature",
    "conditional_classification",
    "conditional_g_given_delta",
    "copula_conditional_g",
    "cutoff",
    "decision_tool_value",
    "evaluate_stage",
    "fp_tp",
    "gaussian_grid_density",
    "implied_progression_probs",
    "initial_g_density",
    "integrate",
    "normal_pdf",
    "normalize",
    "posterior_delta",
    "posterior_g",
    "prob_g_exceeds",
    "rnpv",
    "rnpv_terms",
    "run_pipeline",
    "simulate_pipeline",
    "simulate_stage",
    "std_normal_cdf",
    "std_normal_quantile",
    "success_prob_given_delta",
    "sweep_rho",
]
