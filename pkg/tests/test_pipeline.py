from dataclasses import replace

import numpy as np
import pytest

from trivalue import (
    DegenerateStageError,
    FrequentistAlpha,
    Gaussian1D,
    PipelineSpec,
    StageSpec,
    chain_prior,
    decision_tool_value,
    evaluate_stage,
    initial_g_density,
    run_pipeline,
    std_normal_cdf,
    sweep_rho,
)

from conftest import single_stage, single_stage_pipeline, make_stage, reference_pipeline


def random_pipeline(rng, n_stages=None, rho=None) -> PipelineSpec:
    n = n_stages or rng.integers(1, 4)
    stages = []
    for _ in range(n):
        d0 = rng.uniform(-0.3, 0.3)
        stages.append(
            StageSpec(
                rho=rho if rho is not None else rng.uniform(0.0, 0.9),
                delta_prior=Gaussian1D(rng.uniform(-0.5, 1.0), rng.uniform(0.4, 1.6)),
                sigma_hat=rng.uniform(0.2, 1.2),
                criterion=FrequentistAlpha(alpha=rng.uniform(0.05, 0.9), delta_min=d0),
                delta_min=d0,
            )
        )
    return PipelineSpec(
        g_prior=Gaussian1D(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.5)),
        g_star=rng.uniform(0.5, 2.0),
        stages=tuple(stages),
        market_value=100.0,
    )


class TestChainPrior:
    def test_unit_mass_and_shape(self, reference_report):
        pg = reference_report.stage_reports[0].posterior_g
        chained = chain_prior(pg)
        assert chained.mass == pytest.approx(1.0, abs=1e-9)
        ratio = chained.values[pg.values > 1e-12] / pg.values[pg.values > 1e-12]
        assert np.max(ratio) / np.min(ratio) - 1.0 < 1e-12

    def test_success_shifts_quality_up(self, reference_report):
        # MC-verified sign: conditioning on success raises the G mean when rho > 0
        chained = chain_prior(reference_report.stage_reports[0].posterior_g)
        w = np.ones(chained.n_points)
        w[1:-1:2], w[2:-1:2] = 4.0, 2.0
        w *= chained.h / 3.0
        assert float(w @ (chained.x * chained.values)) > 0.0


class TestRunPipeline:
    def test_reference_cumulative(self, reference_report):
        expected = (0.687, 0.371, 0.124, 0.076)
        for got, want in zip(reference_report.cumulative_success, expected):
            assert got == pytest.approx(want, abs=0.003)

    def test_cumulative_is_running_product(self, reference_report):
        prod = 1.0
        for sr, cum in zip(
            reference_report.stage_reports, reference_report.cumulative_success
        ):
            prod *= sr.assurance
            assert cum == pytest.approx(prod, abs=1e-9)

    def test_reference_terminal(self, reference_report):
        assert reference_report.terminal_p_g_exceeds == pytest.approx(0.384, abs=0.03)

    def test_reference_per_stage_exceedance(self, reference_report):
        expected = (0.063, 0.106, 0.242, 0.384)
        for sr, want in zip(reference_report.stage_reports, expected):
            assert sr.p_g_exceeds_given_success == pytest.approx(want, abs=0.03)

    def test_all_rho_zero_flat(self):
        spec = reference_pipeline(rho1=0.0, rho2=0.0, rho3=0.0, rho4=0.0)
        report = run_pipeline(spec)
        # oracle: prior tail 1 - Phi(1.49 / 0.9)
        for sr in report.stage_reports:
            assert sr.p_g_exceeds_given_success == pytest.approx(0.049, abs=0.002)

    def test_single_stage_matches_evaluate_stage(self):
        spec = single_stage_pipeline()
        report = run_pipeline(spec)
        direct = evaluate_stage(
            spec.stages[0],
            initial_g_density(spec),
            spec.g_star,
            prior_gaussian=spec.g_prior,
        )
        sr = report.stage_reports[0]
        assert sr.cutoff == direct.cutoff
        assert sr.assurance == direct.assurance
        assert sr.fp == direct.fp and sr.tp == direct.tp
        assert sr.p_g_exceeds_given_success == pytest.approx(
            direct.p_g_exceeds_given_success, abs=1e-12
        )
        assert report.cumulative_success == (sr.assurance,)

    def test_terminal_rho_zero_equals_prior_tail_randomized(self):
        rng = np.random.default_rng(23)
        for _ in range(8):
            spec = random_pipeline(rng, rho=0.0)
            report = run_pipeline(spec)
            tail = 1.0 - std_normal_cdf(
                (spec.g_star - spec.g_prior.mean) / spec.g_prior.sd
            )
            assert report.terminal_p_g_exceeds == pytest.approx(tail, abs=1e-3)

    def test_rho_monotone_per_stage(self):
        for stage_idx in range(1, 5):
            terminals = []
            for rho in (0.0, 0.2, 0.4, 0.6, 0.8):
                spec = reference_pipeline(**{f"rho{stage_idx}": rho})
                terminals.append(run_pipeline(spec).terminal_p_g_exceeds)
            assert np.all(np.diff(terminals) >= 0.0)

    def test_terminal_value(self, reference_report):
        expected = (
            reference_report.terminal_p_g_exceeds
            * reference_report.cumulative_success[-1]
            * 100.0
        )
        assert reference_report.terminal_value == pytest.approx(expected, rel=1e-12)

    def test_degenerate_stage_names_index(self):
        bad = StageSpec(
            rho=0.3,
            delta_prior=Gaussian1D(0.0, 0.1),
            sigma_hat=0.1,
            criterion=FrequentistAlpha(alpha=1e-15, delta_min=5.0),
            delta_min=5.0,
        )
        spec = reference_pipeline()
        spec = replace(spec, stages=(spec.stages[0], bad))
        with pytest.raises(DegenerateStageError, match="stage 2"):
            run_pipeline(spec)

    def test_moment_match_variant_close_to_copula(self):
        spec = reference_pipeline()
        copula = run_pipeline(spec, chaining="copula")
        mm = run_pipeline(spec, chaining="moment_match")
        assert mm.terminal_p_g_exceeds == pytest.approx(
            copula.terminal_p_g_exceeds, abs=0.02
        )

    def test_unknown_chaining(self):
        with pytest.raises(ValueError):
            run_pipeline(reference_pipeline(), chaining="magic")


class TestDecisionToolValue:
    def test_identity_replacement_is_zero(self):
        spec = reference_pipeline()
        assert decision_tool_value(spec, 1, spec.stages[0]) == 0.0

    def test_one_point_terminal_gain_is_one_currency_unit(self):
        # synthetic check of the valuation rule itself: delta terminal of
        # +0.01 at market value 100 must price at +1.00
        spec = reference_pipeline()
        better = replace(spec.stages[0], rho=0.9)
        old = run_pipeline(spec).terminal_p_g_exceeds
        new_stages = (better,) + spec.stages[1:]
        new = run_pipeline(replace(spec, stages=new_stages)).terminal_p_g_exceeds
        value = decision_tool_value(spec, 1, better)
        assert value == pytest.approx((new - old) * 100.0, rel=1e-12)
        assert value > 0.0  # MC-verified sign for a rho upgrade

    def test_index_bounds(self):
        spec = reference_pipeline()
        with pytest.raises(ValueError):
            decision_tool_value(spec, 0, spec.stages[0])
        with pytest.raises(ValueError):
            decision_tool_value(spec, 5, spec.stages[0])


class TestSweepRho:
    def test_single_stage_strictly_increasing(self):
        points = sweep_rho(single_stage_pipeline(), 1, np.arange(0.0, 0.95, 0.1))
        terminals = [p.terminal_p_g_exceeds for p in points]
        assert np.all(np.diff(terminals) > 0.0)
        assurances = {p.assurance for p in points}
        assert len(assurances) == 1

    def test_single_stage_relative_changes(self):
        points = sweep_rho(single_stage_pipeline(), 1, [0.1, 0.2])
        assert points[0].relative_change is None
        assert points[1].relative_change == pytest.approx(0.18, abs=0.02)

    def test_conditioning_cartesian_product(self):
        spec = reference_pipeline()
        points = sweep_rho(
            spec, 1, [0.2, 0.4], conditioning_stage=4, conditioning_values=[0.1, 0.9]
        )
        assert len(points) == 4
        assert [p.rho_conditioning for p in points] == [0.1, 0.1, 0.9, 0.9]
        gain_low = points[1].relative_change
        gain_high = points[3].relative_change
        assert gain_high > gain_low  # later-stage validity amplifies early gains

    def test_all_zero_grid_flat(self):
        spec = reference_pipeline(rho2=0.0, rho3=0.0, rho4=0.0)
        points = sweep_rho(spec, 1, [0.0])
        tail = 1.0 - std_normal_cdf(1.49 / 0.9)
        assert points[0].terminal_p_g_exceeds == pytest.approx(tail, abs=1e-3)

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            sweep_rho(single_stage_pipeline(), 1, [])

    def test_conditioning_args_must_pair(self):
        with pytest.raises(ValueError):
            sweep_rho(reference_pipeline(), 1, [0.2], conditioning_stage=3)
