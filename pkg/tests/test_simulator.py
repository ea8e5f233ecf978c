"""Monte Carlo engine: determinism, backend equivalence, statistical laws."""

import math

import numpy as np
import pytest

from molrelay.analytics import (
    NetworkConfig,
    RelayHop,
    analytic_pe_cooperative,
    analytic_pe_simo,
    analytic_pe_siso,
)
from molrelay.channel import Emission, Link, MuiModel, peak_gain
from molrelay.detection import detector_from_signal, relay_performance
from molrelay.simulator import (
    HAVE_EXTENSION,
    available_backends,
    compare_detectors,
    compile_scenario,
    estimate_pe,
    relay_decision_count,
    run_trial,
)
from molrelay.simulator.engine import _counts

from _oracles import MUI_MEAN, MUI_STD

REF_MUI = MuiModel(MUI_MEAN, MUI_STD)
UNIT_LINK = Link(1.0)
UNIT_GAIN = peak_gain(UNIT_LINK)

needs_extension = pytest.mark.skipif(not HAVE_EXTENSION, reason="compiled kernel not built")


def chain_config(n_relays=2, q_node=1e9, beta=0.5, d_sr=10.0, d_rd=20.0):
    hop = RelayHop(
        source_link=Link.from_um(d_sr),
        relay_mui=REF_MUI,
        emission=Emission(q_node),
        dest_link=Link.from_um(d_rd),
        dest_mui=REF_MUI,
    )
    return NetworkConfig(
        prior_one=beta,
        source_emission=Emission(q_node),
        relays=(hop,) * n_relays,
        direct_link=Link.from_um(25.0),
        direct_mui=REF_MUI,
        baseline_total_emission=Emission(q_node),
    )


def desk_config(n_relays=2, st_=2.0, sigt=1.0, mut=0.0, beta=0.5, relay_sigma=1e-9):
    """Effectively perfect sensing hops, adjustable destination SNR."""
    hop = RelayHop(
        source_link=UNIT_LINK,
        relay_mui=MuiModel(0.0, relay_sigma),
        emission=Emission(st_ / UNIT_GAIN),
        dest_link=UNIT_LINK,
        dest_mui=MuiModel(mut, sigt),
    )
    return NetworkConfig(
        prior_one=beta,
        source_emission=Emission(1.0 / UNIT_GAIN),
        relays=(hop,) * n_relays,
    )


class TestDeterminism:
    def test_repeatable_estimates(self):
        cfg = chain_config()
        a = estimate_pe(cfg, trials=20_000, seed=5)
        b = estimate_pe(cfg, trials=20_000, seed=5)
        assert a == b

    def test_seed_changes_the_draws(self):
        cfg = chain_config()
        a = estimate_pe(cfg, trials=20_000, seed=5)
        b = estimate_pe(cfg, trials=20_000, seed=6)
        assert a.errors != b.errors

    def test_worker_count_invariance(self):
        cfg = chain_config()
        serial = estimate_pe(cfg, trials=150_000, seed=5, workers=1)
        parallel = estimate_pe(cfg, trials=150_000, seed=5, workers=4)
        assert serial == parallel

    def test_trial_outcomes_are_pure_functions(self):
        cfg = chain_config()
        first = [run_trial(cfg, seed=42, trial_index=k) for k in range(50)]
        second = [run_trial(cfg, seed=42, trial_index=k) for k in range(50)]
        assert first == second

    def test_chunking_invariance(self):
        scn = compile_scenario(chain_config())
        whole = _counts(scn, 9, 0, 10_000, "numpy")
        split = tuple(
            sum(parts)
            for parts in zip(
                _counts(scn, 9, 0, 3_000, "numpy"),
                _counts(scn, 9, 3_000, 4_500, "numpy"),
                _counts(scn, 9, 7_500, 2_500, "numpy"),
            )
        )
        assert whole == split


@needs_extension
class TestBackendEquivalence:
    @pytest.mark.parametrize("system", ["cooperative", "siso", "miso", "simo"])
    def test_identical_counts_across_backends(self, system):
        scn = compile_scenario(chain_config(q_node=2e9), system)
        compiled = _counts(scn, 77, 0, 100_000, "compiled")
        pure = _counts(scn, 77, 0, 100_000, "numpy")
        assert compiled == pure

    def test_identical_counts_with_relay_errors(self):
        # low-SNR sensing hops exercise the mixture LLR path hard
        scn = compile_scenario(chain_config(q_node=3e8, d_sr=20.0, d_rd=10.0))
        assert _counts(scn, 3, 0, 200_000, "compiled") == _counts(scn, 3, 0, 200_000, "numpy")

    def test_run_trial_matches_batch_counters(self):
        cfg = chain_config(q_node=1.5e9)
        n = 4_000
        for detector in ("linear", "exact"):
            errors = sum(
                run_trial(cfg, detector=detector, seed=11, trial_index=k).error
                for k in range(n)
            )
            scn = compile_scenario(cfg)
            counts = _counts(scn, 11, 0, n, "compiled")
            assert errors == counts[0 if detector == "linear" else 1]


class TestStatisticalAgreement:
    def test_near_noiseless_chain_never_errs(self):
        cfg = desk_config(st_=2.0, sigt=2e-3, relay_sigma=1e-9)
        est = estimate_pe(cfg, trials=10_000, seed=4)
        assert est.errors == 0

    def test_high_prior_transmits_ones(self):
        cfg = desk_config(beta=1.0 - 1e-12)
        outcomes = [run_trial(cfg, seed=3, trial_index=k) for k in range(200)]
        assert all(t.transmitted == 1 for t in outcomes)

    def test_symmetric_coin_limit(self):
        # destination noise dwarfs the signal: the chain cannot beat a coin
        cfg = desk_config(st_=2.0, sigt=2e6)
        est = estimate_pe(cfg, trials=100_000, seed=8)
        se = math.sqrt(0.25 / est.trials)
        assert abs(est.p_hat - 0.5) < 4 * se

    def test_two_perfect_branches_match_closed_form(self):
        cfg = desk_config(n_relays=2, st_=2.0, sigt=1.0)
        expected = analytic_pe_cooperative(cfg)
        est = estimate_pe(cfg, trials=100_000, seed=16)
        se = math.sqrt(expected * (1 - expected) / est.trials)
        assert abs(est.p_hat - expected) < 4 * se

    def test_relay_rates_match_closed_form(self):
        rng = np.random.default_rng(30)
        trials = 200_000
        for case in range(8):
            s = float(10 ** rng.uniform(-0.5, 1.5))
            mu = float(rng.uniform(0, 5))
            sigma = float(10 ** rng.uniform(-0.5, 0.5))
            beta = float(rng.uniform(0.1, 0.9))
            det = detector_from_signal(s, MuiModel(mu, sigma), beta)
            point = relay_performance(det)
            for symbol, p in ((1, point.p_detect), (0, point.p_false_alarm)):
                hits = relay_decision_count(det, symbol, trials, seed=1000 + case)
                se = math.sqrt(max(p * (1 - p), 1e-12) / trials)
                assert abs(hits / trials - p) < 4 * se + 1e-9

    @pytest.mark.parametrize("system,q", [("siso", 3e9), ("miso", 3e9), ("simo", 3e9)])
    def test_baselines_match_their_closed_forms(self, system, q):
        cfg = chain_config(q_node=q)
        if system == "siso":
            expected = analytic_pe_siso(Emission(q), cfg.direct_link, REF_MUI, 0.5)
        elif system == "miso":
            # equal split at a common distance superposes back to the total
            expected = analytic_pe_siso(Emission(q), cfg.direct_link, REF_MUI, 0.5)
        else:
            expected = analytic_pe_simo(Emission(q), [(cfg.direct_link, REF_MUI)] * 2, 0.5)
        est = estimate_pe(cfg, system=system, trials=100_000, seed=6)
        se = math.sqrt(expected * (1 - expected) / est.trials)
        assert abs(est.p_hat - expected) < 4 * se

    def test_exact_rule_never_loses_materially(self):
        for cfg, seed in (
            (chain_config(q_node=1e9), 61),
            (chain_config(q_node=3e8, d_sr=20.0, d_rd=10.0), 62),
            (desk_config(n_relays=3, st_=1.0, sigt=1.2, relay_sigma=0.4), 63),
        ):
            cmp_ = compare_detectors(cfg, trials=100_000, seed=seed)
            p_lin = cmp_.errors_linear / cmp_.trials
            se = math.sqrt(max(p_lin * (1 - p_lin), 1e-12) / cmp_.trials)
            assert cmp_.errors_exact / cmp_.trials <= p_lin + 4 * se


class TestApiContracts:
    def test_unknown_system(self):
        with pytest.raises(ValueError):
            compile_scenario(chain_config(), "mimo")

    def test_baseline_needs_direct_link(self):
        cfg = desk_config()
        with pytest.raises(ValueError):
            compile_scenario(cfg, "siso")

    def test_trials_must_be_positive(self):
        with pytest.raises(ValueError):
            estimate_pe(chain_config(), trials=0, seed=1)

    def test_unknown_detector(self):
        with pytest.raises(ValueError):
            estimate_pe(chain_config(), detector="soft", trials=10, seed=1)

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            estimate_pe(chain_config(), trials=10, seed=1, backend="cuda")

    def test_available_backends_shape(self):
        assert "numpy" in available_backends()

    def test_estimate_fields(self):
        est = estimate_pe(chain_config(), trials=1_000, seed=2)
        assert est.trials == 1_000
        assert est.p_hat == est.errors / est.trials
        assert est.standard_error == pytest.approx(
            math.sqrt(est.p_hat * (1 - est.p_hat) / est.trials)
        )
        assert est.seed == 2

    def test_direct_systems_report_full_agreement(self):
        cmp_ = compare_detectors(chain_config(), system="siso", trials=5_000, seed=3)
        assert cmp_.agreement == cmp_.trials
        assert cmp_.errors_linear == cmp_.errors_exact

    def test_trial_outcome_error_flag(self):
        cfg = chain_config()
        for k in range(100):
            t = run_trial(cfg, seed=21, trial_index=k)
            assert t.error == (t.destination != t.transmitted)
            assert len(t.relay_decisions) == cfg.relay_count
