import pytest

from trivalue import (
    Gaussian1D,
    McConfig,
    compare_with_quadrature,
    simulate_pipeline,
    simulate_stage,
)

from conftest import single_stage, make_stage, reference_pipeline

CFG = McConfig(n_replicates=200_000, seed=42)


class TestDeterminism:
    def test_same_seed_bit_identical(self):
        spec = reference_pipeline()
        a = simulate_pipeline(spec, CFG)
        b = simulate_pipeline(spec, CFG)
        assert a == b

    def test_batch_size_does_not_change_results(self):
        spec = reference_pipeline()
        a = simulate_pipeline(spec, McConfig(50_000, seed=7, batch_size=1024))
        b = simulate_pipeline(spec, McConfig(50_000, seed=7, batch_size=50_000))
        assert a == b

    def test_different_seed_differs(self):
        spec = reference_pipeline()
        a = simulate_pipeline(spec, McConfig(50_000, seed=1))
        b = simulate_pipeline(spec, McConfig(50_000, seed=2))
        assert a["assurance_1"].value != b["assurance_1"].value


class TestSingleStage:
    def test_single_stage_assurance(self):
        est = simulate_stage(single_stage(), Gaussian1D(0.0, 1.0), 2.0, CFG)
        a = est["assurance_1"]
        assert abs(a.value - 0.396015564160) <= 3.0 * a.std_error

    def test_single_stage_exceedance_matches_quadrature(self):
        from trivalue import PipelineSpec, run_pipeline

        spec = PipelineSpec(Gaussian1D(0.0, 1.0), 2.0, (single_stage(),))
        est = simulate_pipeline(spec, CFG)
        quad = run_pipeline(spec).terminal_p_g_exceeds
        e = est["terminal_p_g_exceeds"]
        assert abs(e.value - quad) <= 3.0 * e.std_error

    def test_noise_dominated_limit(self):
        # with enormous readout noise the readout marginal is ~N(mu, sigma_hat)
        # while the cutoff is sigma_hat * quantile(1 - alpha), so the pass
        # rate approaches alpha itself
        stage = make_stage(0.3, 0.5, 1.0, 1e6, 0.0, 0.2)
        est = simulate_stage(stage, Gaussian1D(0.0, 1.0), 2.0, CFG)
        a = est["assurance_1"]
        assert a.value == pytest.approx(0.2, abs=3.0 * a.std_error + 1e-4)


class TestPipelineOracle:
    def test_reference_assurances(self):
        est = simulate_pipeline(reference_pipeline(), McConfig(1_000_000, seed=42))
        for i, want in enumerate((0.687, 0.540, 0.335, 0.611), start=1):
            e = est[f"assurance_{i}"]
            assert abs(e.value - want) <= 3.0 * e.std_error + 0.002

    def test_rho_zero_terminal_is_prior_tail(self):
        spec = reference_pipeline(rho1=0.0, rho2=0.0, rho3=0.0, rho4=0.0)
        est = simulate_pipeline(spec, McConfig(1_000_000, seed=11))
        e = est["terminal_p_g_exceeds"]
        assert abs(e.value - 0.048905928496) <= 3.0 * e.std_error

    def test_fp_tp_partition_exact(self):
        est = simulate_pipeline(reference_pipeline(), CFG)
        for i in range(1, 5):
            assert est[f"fp_{i}"].value + est[f"tp_{i}"].value == pytest.approx(
                est[f"assurance_{i}"].value, abs=1e-15
            )

    def test_gate_passes_on_reference(self, reference_report):
        spec = reference_pipeline()
        est = simulate_pipeline(spec, McConfig(1_000_000, seed=42))
        rows = compare_with_quadrature(spec, est, report=reference_report)
        assert all(r.passed for r in rows)

    def test_zero_survivors_flagged(self):
        impossible = make_stage(0.0, 0.0, 0.1, 0.1, 0.0, 0.05)
        from dataclasses import replace

        from trivalue import AbsoluteCutoff, StageSpec

        blocked = StageSpec(
            rho=0.0,
            delta_prior=Gaussian1D(0.0, 0.1),
            sigma_hat=0.1,
            criterion=AbsoluteCutoff(50.0),
        )
        spec = reference_pipeline()
        spec = replace(spec, stages=(blocked, spec.stages[1]))
        est = simulate_pipeline(spec, McConfig(10_000, seed=3))
        assert est["assurance_1"].value == 0.0
        assert not est["p_g_exceeds_1"].estimable
        assert not est["assurance_2"].estimable
        assert not est["terminal_p_g_exceeds"].estimable

    def test_n_one_runs(self):
        est = simulate_pipeline(reference_pipeline(), McConfig(1, seed=5))
        assert est["assurance_1"].n == 1
