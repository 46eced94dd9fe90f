"""Command-line interface.

Subcommands: stage, pipeline, sweep, rnpv, mc. Each reads a JSON config
(see config module for the schema), prints a short summary, and writes
CSV/JSON artifacts plus a rendered PNG figure into --out.

Exit codes: 0 success, 2 configuration error, 3 numerical-integrity
failure, 4 MC-vs-quadrature gate failure under --strict.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from . import artifacts, config, plots
from .errors import ConfigError, NumericalIntegrityError, TrivalueError
from .mc import McConfig, compare_with_quadrature, simulate_pipeline
from .pipeline import (
    PipelineReport,
    PipelineSpec,
    chain_prior,
    initial_g_density,
    run_pipeline,
    sweep_rho,
)
from .rnpv import implied_progression_probs, rnpv, rnpv_terms
from .tripartite import StageReport, success_prob_given_delta

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRITY = 3
EXIT_GATE = 4

STAT_ROWS = (
    ("p_success", lambda sr, cum: sr.assurance),
    ("cumulative_p_success", lambda sr, cum: cum),
    ("p_success_and_delta_above", lambda sr, cum: sr.tp),
    ("p_success_and_delta_below", lambda sr, cum: sr.fp),
    ("p_delta_above_given_success", lambda sr, cum: sr.p_above_given_success),
    ("p_delta_below_given_success", lambda sr, cum: sr.p_below_given_success),
    ("p_g_exceeds_given_success", lambda sr, cum: sr.p_g_exceeds_given_success),
)


def _parse_rho_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--rho-grid expects a:step:b, got {text!r}")
    try:
        a, step, b = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"--rho-grid expects numbers, got {text!r}") from exc
    if step <= 0:
        raise ConfigError("--rho-grid step must be positive")
    grid = []
    k = 0
    while True:
        v = a + k * step
        if v > b + 1e-9:
            break
        grid.append(round(v, 12))
        k += 1
    if not grid:
        raise ConfigError(f"--rho-grid {text!r} is empty")
    return grid


def _parse_cond_values(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"--cond-values expects comma-separated numbers, got {text!r}") from exc
    if not values:
        raise ConfigError("--cond-values is empty")
    return values


def _stage_report_dict(index: int, sr: StageReport) -> dict:
    return {
        "stage": index,
        "cutoff": sr.cutoff,
        "assurance": sr.assurance,
        "tp": sr.tp,
        "fp": sr.fp,
        "p_above_given_success": sr.p_above_given_success,
        "p_below_given_success": sr.p_below_given_success,
        "p_g_exceeds_given_success": sr.p_g_exceeds_given_success,
    }


def _g_prior_at_stage(spec: PipelineSpec, index: int, chaining: str):
    """The gridded g prior seen by stage ``index`` (1-based)."""
    if index == 1:
        return initial_g_density(spec)
    truncated = PipelineSpec(
        g_prior=spec.g_prior,
        g_star=spec.g_star,
        stages=spec.stages[: index - 1],
        market_value=spec.market_value,
    )
    report = run_pipeline(truncated, chaining=chaining)
    return chain_prior(report.stage_reports[-1].posterior_g)


def cmd_stage(args) -> int:
    spec = config.load_pipeline_spec(args.config)
    n = len(spec.stages)
    if not 1 <= args.stage <= n:
        raise ConfigError(f"--stage must lie in [1, {n}], got {args.stage}")
    report = run_pipeline(
        PipelineSpec(spec.g_prior, spec.g_star, spec.stages[: args.stage],
                     spec.market_value),
        chaining=args.chaining,
    )
    sr = report.stage_reports[-1]
    stage = spec.stages[args.stage - 1]
    g_prior = _g_prior_at_stage(spec, args.stage, args.chaining)

    out = Path(args.out)
    base = f"stage_{args.stage}"
    if args.format in ("json", "both"):
        artifacts.write_json(out / f"{base}_report.json",
                             _stage_report_dict(args.stage, sr))
    if args.format in ("csv", "both"):
        pd = sr.posterior_delta
        prior_d = stage.delta_prior.pdf(pd.x)
        success_scaled = success_prob_given_delta(pd.x, stage) * prior_d.max()
        pg = sr.posterior_g
        rows = zip(pd.x, prior_d, pd.values, success_scaled,
                   pg.x, g_prior.values, pg.values)
        artifacts.write_csv(
            out / f"{base}_curves.csv",
            ["delta", "prior_delta", "posterior_delta", "success_scaled",
             "g", "prior_g", "posterior_g"],
            rows,
        )
    if args.plots:
        plots.stage_figure(out / f"{base}.png", stage, sr, g_prior.values,
                           title=f"Stage {args.stage}")
    print(f"stage {args.stage}: cutoff {sr.cutoff:.3g}, "
          f"P(success) {sr.assurance:.3g}, "
          f"P(G > G* | success) {sr.p_g_exceeds_given_success:.3g}")
    return EXIT_OK


def _pipeline_dict(spec: PipelineSpec, report: PipelineReport) -> dict:
    return {
        "stages": [
            _stage_report_dict(i, sr)
            for i, sr in enumerate(report.stage_reports, start=1)
        ],
        "cumulative_success": list(report.cumulative_success),
        "terminal_p_g_exceeds": report.terminal_p_g_exceeds,
        "terminal_value": report.terminal_value,
        "market_value": spec.market_value,
    }


def cmd_pipeline(args) -> int:
    spec = config.load_pipeline_spec(args.config)
    report = run_pipeline(spec, chaining=args.chaining)
    out = Path(args.out)
    if args.format in ("json", "both"):
        artifacts.write_json(out / "pipeline_report.json",
                             _pipeline_dict(spec, report))
    if args.format in ("csv", "both"):
        n = len(report.stage_reports)
        header = ["statistic"] + [f"stage_{i}" for i in range(1, n + 1)]
        rows = [
            [name] + [func(sr, cum) for sr, cum in
                      zip(report.stage_reports, report.cumulative_success)]
            for name, func in STAT_ROWS
        ]
        artifacts.write_csv(out / "pipeline_table.csv", header, rows)

        g_prior = initial_g_density(spec)
        header = ["g", "prior_g"]
        cols = [report.stage_reports[0].posterior_g.x, g_prior.values]
        for i, (sr, cum) in enumerate(
            zip(report.stage_reports, report.cumulative_success), start=1
        ):
            pg = sr.posterior_g
            header += [f"posterior_g_scaled_{i}", f"posterior_g_normalized_{i}"]
            cols += [pg.values * (cum / pg.mass), pg.values / pg.mass]
        artifacts.write_csv(out / "pipeline_g_curves.csv", header, zip(*cols))
    if args.plots:
        plots.pipeline_g_figure(out / "pipeline_g.png", spec, report,
                                initial_g_density(spec).values)

    print("stage      " + "  ".join(f"{i:>7d}" for i in range(1, len(report.stage_reports) + 1)))
    for name, func in STAT_ROWS:
        cells = "  ".join(
            f"{func(sr, cum):7.3f}"
            for sr, cum in zip(report.stage_reports, report.cumulative_success)
        )
        print(f"{name:<28s} {cells}")
    print(f"terminal P(G > G* | success) = {report.terminal_p_g_exceeds:.3g}, "
          f"terminal value = {report.terminal_value:.3g}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = config.load_pipeline_spec(args.config)
    rho_grid = _parse_rho_grid(args.rho_grid)
    cond_values = _parse_cond_values(args.cond_values) if args.cond_values else None
    if (args.cond_stage is None) != (cond_values is None):
        raise ConfigError("--cond-stage and --cond-values must be given together")
    try:
        points = sweep_rho(
            spec,
            sweep_stage=args.sweep_stage,
            rho_grid=rho_grid,
            conditioning_stage=args.cond_stage,
            conditioning_values=cond_values,
            chaining=args.chaining,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = Path(args.out)
    rows = [
        (p.rho_sweep, p.rho_conditioning, p.assurance,
         p.terminal_p_g_exceeds, p.relative_change)
        for p in points
    ]
    if args.format in ("csv", "both"):
        artifacts.write_csv(
            out / "sweep.csv",
            ["rho_sweep", "rho_conditioning", "assurance",
             "terminal_p_g_exceeds", "relative_change"],
            rows,
        )
    if args.format in ("json", "both"):
        artifacts.write_json(
            out / "sweep.json",
            [
                {
                    "rho_sweep": p.rho_sweep,
                    "rho_conditioning": p.rho_conditioning,
                    "assurance": p.assurance,
                    "terminal_p_g_exceeds": p.terminal_p_g_exceeds,
                    "relative_change": p.relative_change,
                }
                for p in points
            ],
        )
    if args.plots:
        plots.sweep_figure(out / "sweep.png", points)
    print(f"swept stage {args.sweep_stage} over {len(rho_grid)} rho values; "
          f"terminal range [{min(r[3] for r in rows):.3g}, "
          f"{max(r[3] for r in rows):.3g}]")
    return EXIT_OK


def cmd_rnpv(args) -> int:
    spec = config.load_rnpv_spec(args.config, allow_missing_probs=bool(args.from_pipeline))
    if args.from_pipeline:
        pipe = config.load_pipeline_spec(args.from_pipeline)
        if len(pipe.stages) != len(spec.costs):
            raise ConfigError(
                f"pipeline has {len(pipe.stages)} stages but rnpv config has "
                f"{len(spec.costs)} costs"
            )
        report = run_pipeline(pipe, chaining=args.chaining)
        from dataclasses import replace
        spec = replace(spec, probs=implied_progression_probs(report))
    reward_term, cost_terms = rnpv_terms(spec)
    value = rnpv(spec)
    out = Path(args.out)
    doc = {
        "reward": spec.reward,
        "probs": list(spec.probs),
        "costs": list(spec.costs),
        "p0": spec.p0,
        "risk_adjusted_reward": reward_term,
        "risk_adjusted_costs": list(cost_terms),
        "rnpv": value,
    }
    if args.format in ("json", "both"):
        artifacts.write_json(out / "rnpv.json", doc)
    if args.format in ("csv", "both"):
        rows = [["risk_adjusted_reward", reward_term]]
        rows += [[f"risk_adjusted_cost_{i}", -c] for i, c in enumerate(cost_terms, 1)]
        rows += [["rnpv", value]]
        artifacts.write_csv(out / "rnpv.csv", ["term", "value"], rows)
    print(f"risk-adjusted reward: {reward_term:.3g}")
    for i, c in enumerate(cost_terms, start=1):
        print(f"risk-adjusted cost, stage {i}: -{c:.3g}")
    print(f"rNPV = {value:.3g}")
    return EXIT_OK


def cmd_mc(args) -> int:
    spec = config.load_pipeline_spec(args.config)
    cfg = McConfig(n_replicates=args.replicates, seed=args.seed)
    estimates = simulate_pipeline(spec, cfg)
    report = run_pipeline(spec, chaining=args.chaining)
    gate = compare_with_quadrature(spec, estimates, report=report,
                                   chaining=args.chaining)
    out = Path(args.out)
    if args.format in ("csv", "both"):
        artifacts.write_csv(
            out / "mc_estimates.csv",
            ["statistic", "estimate", "std_error", "n"],
            [(k, e.value, e.std_error, e.n) for k, e in estimates.items()],
        )
        artifacts.write_csv(
            out / "mc_gate.csv",
            ["statistic", "quadrature", "mc", "std_error", "status"],
            [(r.statistic, r.quadrature, r.mc_value, r.std_error,
              "PASS" if r.passed else "FAIL") for r in gate],
        )
    if args.format in ("json", "both"):
        artifacts.write_json(
            out / "mc_estimates.json",
            {
                "seed": args.seed,
                "n_replicates": args.replicates,
                "estimates": {
                    k: {"value": e.value, "std_error": e.std_error, "n": e.n}
                    for k, e in estimates.items()
                },
                "gate": [
                    {"statistic": r.statistic, "quadrature": r.quadrature,
                     "mc": r.mc_value, "std_error": r.std_error,
                     "passed": r.passed}
                    for r in gate
                ],
            },
        )
    failures = [r for r in gate if not r.passed]
    for r in gate:
        mc_txt = "n/a" if r.mc_value is None else f"{r.mc_value:.3g}"
        print(f"{r.statistic:<18s} quad {r.quadrature:.3g}  mc {mc_txt}  "
              f"{'PASS' if r.passed else 'FAIL'}")
    if failures and args.strict:
        print(f"{len(failures)} statistic(s) outside the 3-SE gate", file=sys.stderr)
        return EXIT_GATE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trivalue",
        description="Staged drug R&D valuation: tripartite stages, pipeline "
                    "chaining, rNPV baseline, and a Monte Carlo oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=("csv", "json", "both"),
                       default="both", help="artifact formats to write")
        p.add_argument("--chaining", choices=("copula", "moment_match"),
                       default="copula",
                       help="coupling used when carrying G across stages")
        p.add_argument("--no-plots", dest="plots", action="store_false",
                       help="skip PNG figure rendering")

    p = sub.add_parser("stage", help="evaluate one stage and emit its curves")
    common(p)
    p.add_argument("--stage", type=int, default=1, help="1-based stage index")
    p.set_defaults(func=cmd_stage)

    p = sub.add_parser("pipeline", help="run all stages in series")
    common(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("sweep", help="sweep one stage's predictive validity")
    common(p)
    p.add_argument("--sweep-stage", type=int, required=True)
    p.add_argument("--rho-grid", required=True, metavar="a:step:b")
    p.add_argument("--cond-stage", type=int, default=None)
    p.add_argument("--cond-values", default=None, metavar="v1,v2,...")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rnpv", help="risk-adjusted NPV with term breakdown")
    common(p)
    p.add_argument("--from-pipeline", default=None, metavar="PATH",
                   help="pipeline config whose assurances supply the "
                        "progression probabilities")
    p.set_defaults(func=cmd_rnpv)

    p = sub.add_parser("mc", help="Monte Carlo oracle and quadrature gate")
    common(p)
    p.add_argument("--replicates", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--strict", action="store_true",
                   help="exit 4 if any statistic fails the 3-SE gate")
    p.set_defaults(func=cmd_mc)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalIntegrityError as exc:
        print(f"numerical integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except TrivalueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
