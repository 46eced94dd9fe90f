"""Figure rendering for the CLI report paths.

Each function takes already-computed results and writes a PNG next to the
delimited artifacts. Rendering is headless (Agg) and metadata-free so
reruns produce identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .pipeline import PipelineReport, PipelineSpec, SweepPoint  # noqa: E402
from .tripartite import StageReport, StageSpec, success_prob_given_delta  # noqa: E402

_SAVE_KWARGS = dict(dpi=150, metadata={"Software": None})


def stage_figure(
    path: Union[str, Path],
    spec: StageSpec,
    report: StageReport,
    g_prior_values,
    title: Optional[str] = None,
) -> None:
    """Two-panel stage view: readout-effect curves and quality curves.

    The success curve is scaled by the prior's maximum so it shares the
    density axis.
    """
    pd = report.posterior_delta
    pg = report.posterior_g
    prior_d = spec.delta_prior.pdf(pd.x)
    success = success_prob_given_delta(pd.x, spec) * prior_d.max()

    fig, (ax_d, ax_g) = plt.subplots(1, 2, figsize=(10, 4))
    ax_d.plot(pd.x, prior_d, label="prior of delta")
    ax_d.plot(pd.x, pd.values, label="posterior of delta")
    ax_d.plot(pd.x, success, "--", label="P(success | delta), scaled")
    ax_d.axvline(spec.delta_min, color="gray", lw=0.8)
    ax_d.set_xlabel("delta")
    ax_d.set_ylabel("density")
    ax_d.legend(fontsize=8)

    ax_g.plot(pg.x, g_prior_values, label="prior of G")
    ax_g.plot(pg.x, pg.values, label="posterior of G")
    ax_g.set_xlabel("G")
    ax_g.legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def pipeline_g_figure(
    path: Union[str, Path],
    spec: PipelineSpec,
    report: PipelineReport,
    g_prior_values,
) -> None:
    """Overlay of the carried quality sub-densities, one per stage.

    Each curve is scaled so its area equals the cumulative survival
    probability up to that stage.
    """
    fig, ax = plt.subplots(figsize=(7, 4.5))
    x = report.stage_reports[0].posterior_g.x
    ax.plot(x, g_prior_values, "k--", lw=1, label="prior")
    for i, (sr, cum) in enumerate(
        zip(report.stage_reports, report.cumulative_success), start=1
    ):
        pg = sr.posterior_g
        ax.plot(pg.x, pg.values * (cum / pg.mass), label=f"after stage {i}")
    ax.axvline(spec.g_star, color="gray", lw=0.8)
    ax.set_xlabel("G")
    ax.set_ylabel("sub-density (area = cumulative survival)")
    ax.set_xlim(spec.g_prior.mean - 5 * spec.g_prior.sd,
                spec.g_prior.mean + 5 * spec.g_prior.sd)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def sweep_figure(path: Union[str, Path], points: Sequence[SweepPoint]) -> None:
    """Terminal exceedance probability against the swept rho, one line per
    conditioning value."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    groups: dict = {}
    for p in points:
        groups.setdefault(p.rho_conditioning, []).append(p)
    for cond, pts in groups.items():
        label = "sweep" if cond is None else f"conditioning rho = {cond:g}"
        ax.plot(
            [p.rho_sweep for p in pts],
            [p.terminal_p_g_exceeds for p in pts],
            marker="o",
            ms=3,
            label=label,
        )
    ax.set_xlabel("swept rho")
    ax.set_ylabel("terminal P(G > G* | success)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
