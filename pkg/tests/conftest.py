from pathlib import Path

import pytest

from trivalue import (
    FrequentistAlpha,
    Gaussian1D,
    PipelineSpec,
    StageSpec,
)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

# Four-stage reference configuration (preclinical through Phase 3 +
# regulatory): per-stage (rho, mu_delta, sigma_delta, sigma_hat, delta_min,
# alpha), shared quality prior N(0, 0.9) and threshold 1.49.
REFERENCE_ROWS = (
    (0.50, 0.00, 0.90, 1.05, 0.10, 0.77),
    (0.60, 0.10, 0.55, 0.30, 0.00, 0.45),
    (0.65, 0.30, 1.50, 0.60, 0.00, 0.05),
    (0.80, 0.80, 1.35, 0.25, 0.00, 0.05),
)


def make_stage(rho, mu, sd, sh, d0, alpha) -> StageSpec:
    return StageSpec(
        rho=rho,
        delta_prior=Gaussian1D(mu, sd),
        sigma_hat=sh,
        criterion=FrequentistAlpha(alpha=alpha, delta_min=d0),
        delta_min=d0,
    )


def reference_pipeline(market_value: float = 100.0, **stage_overrides) -> PipelineSpec:
    """The reference four-stage pipeline; stage_overrides maps 1-based
    stage index to a dict of replacement row fields, e.g. rho1=0.2."""
    rows = [list(r) for r in REFERENCE_ROWS]
    for key, value in stage_overrides.items():
        assert key.startswith("rho")
        rows[int(key[3:]) - 1][0] = value
    return PipelineSpec(
        g_prior=Gaussian1D(0.0, 0.9),
        g_star=1.49,
        stages=tuple(make_stage(*row) for row in rows),
        market_value=market_value,
    )


def single_stage(rho: float = 0.4) -> StageSpec:
    """Single-stage setup: alpha 0.025, readout noise 0.4, delta prior
    N(0.5, 1), quality prior N(0, 1)."""
    return make_stage(rho, 0.5, 1.0, 0.4, 0.0, 0.025)


def single_stage_pipeline(rho: float = 0.4) -> PipelineSpec:
    return PipelineSpec(
        g_prior=Gaussian1D(0.0, 1.0),
        g_star=2.0,
        stages=(single_stage(rho),),
        market_value=100.0,
    )


@pytest.fixture(scope="session")
def reference_report():
    from trivalue import run_pipeline

    return run_pipeline(reference_pipeline())


@pytest.fixture(scope="session")
def config_dir() -> Path:
    return CONFIG_DIR
