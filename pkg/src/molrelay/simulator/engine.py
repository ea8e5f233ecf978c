"""Monte Carlo engine for the full two-phase chain and its baselines.

Determinism contract: every sampled value is a pure function of
(seed, config, trial index).  Trials are independent and their error
counts add, so splitting a run across any number of worker processes - in
any chunking - produces byte-identical estimates.  See rng.py for the
counter-based stream layout.

Two kernels implement the trial chain: a compiled Cython extension and a
vectorised numpy fallback.  The extension is preferred when importable;
set MOLRELAY_PURE=1 to force the fallback.  Both produce identical counts
(tested), so backend choice never changes results.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..analytics import NetworkConfig, PERFECT_RELAY, fusion_branches, relay_detectors
from ..detection import (
    DetectionPerformance,
    FusionBranch,
    RelayDetector,
    build_fusion_weights,
    build_relay_detector,
    detector_from_signal,
    relay_performance,
)
from ..channel import peak_gain
from . import _kernel_py
from .rng import normal_scalar, normal_stream, uniform_scalar

try:
    from . import _mc_ext
except ImportError:  # extension not built; pure fallback
    _mc_ext = None

HAVE_EXTENSION = _mc_ext is not None

SYSTEMS = ("cooperative", "siso", "miso", "simo")
DETECTORS = ("linear", "exact")

_DEFAULT_CHUNK = 1 << 16


def available_backends() -> tuple[str, ...]:
    return ("compiled", "numpy") if HAVE_EXTENSION else ("numpy",)


def default_backend() -> str:
    if HAVE_EXTENSION and os.environ.get("MOLRELAY_PURE", "") not in ("1", "true", "yes"):
        return "compiled"
    return "numpy"


@dataclass(frozen=True)
class CompiledScenario:
    """Flat array form of one (config, system) pair consumed by the kernels."""

    kind: int
    draws_per_trial: int
    prior_one: float
    log_prior_odds: float
    relay_signal: np.ndarray
    relay_mu: np.ndarray
    relay_sigma: np.ndarray
    relay_scale: np.ndarray
    relay_threshold: np.ndarray
    dest_signal: np.ndarray
    dest_mu: np.ndarray
    dest_sigma: np.ndarray
    weight: np.ndarray
    fusion_threshold: float
    ln_pd: np.ndarray
    ln_1m_pd: np.ndarray
    ln_pfa: np.ndarray
    ln_1m_pfa: np.ndarray

    @property
    def branch_count(self) -> int:
        return len(self.dest_signal)


def _as_f64(values) -> np.ndarray:
    return np.ascontiguousarray(values, dtype=np.float64)


def _log_weights(performances: Sequence[DetectionPerformance]):
    with np.errstate(divide="ignore"):  # log(0) = -inf is the intended limit
        pd = _as_f64([p.p_detect for p in performances])
        pfa = _as_f64([p.p_false_alarm for p in performances])
        return np.log(pd), np.log1p(-pd), np.log(pfa), np.log1p(-pfa)


def _empty() -> np.ndarray:
    return np.empty(0, dtype=np.float64)


def _relay_arrays(detectors: Sequence[RelayDetector]):
    return (
        _as_f64([d.signal for d in detectors]),
        _as_f64([d.mui.mean for d in detectors]),
        _as_f64([d.mui.std for d in detectors]),
        _as_f64([d.statistic_scale for d in detectors]),
        _as_f64([d.statistic_threshold for d in detectors]),
    )


def _fusion_scenario(
    kind: int,
    draws: int,
    prior_one: float,
    relay_arrays,
    branches: Sequence[FusionBranch],
) -> CompiledScenario:
    weights = build_fusion_weights(branches, prior_one)
    lpd, l1pd, lpfa, l1pfa = _log_weights([b.performance for b in branches])
    return CompiledScenario(
        kind=kind,
        draws_per_trial=draws,
        prior_one=prior_one,
        log_prior_odds=math.log((1.0 - prior_one) / prior_one),
        relay_signal=relay_arrays[0],
        relay_mu=relay_arrays[1],
        relay_sigma=relay_arrays[2],
        relay_scale=relay_arrays[3],
        relay_threshold=relay_arrays[4],
        dest_signal=_as_f64(weights.signals),
        dest_mu=_as_f64(weights.mui_means),
        dest_sigma=_as_f64(weights.mui_stds),
        weight=_as_f64(weights.weights),
        fusion_threshold=weights.threshold,
        ln_pd=lpd,
        ln_1m_pd=l1pd,
        ln_pfa=lpfa,
        ln_1m_pfa=l1pfa,
    )


def compile_scenario(config: NetworkConfig, system: str = "cooperative") -> CompiledScenario:
    """Lower a scenario to the flat kernel form.

    Baseline systems require config.direct_link / direct_mui; the MISO
    budget is split evenly over config.baseline_nodes co-located emitters
    (their peak concentrations superpose into one received signal), and
    SIMO uses config.baseline_nodes receiving surfaces with independent
    interference.
    """
    if system not in SYSTEMS:
        raise ValueError(f"unknown system {system!r}; expected one of {SYSTEMS}")

    if system == "cooperative":
        detectors = relay_detectors(config)
        performances = [relay_performance(d) for d in detectors]
        branches = fusion_branches(config, performances)
        return _fusion_scenario(
            _kernel_py.KIND_TWO_PHASE,
            1 + 2 * len(branches),
            config.prior_one,
            _relay_arrays(detectors),
            branches,
        )

    if config.direct_link is None or config.direct_mui is None:
        raise ValueError(f"system {system!r} needs direct_link and direct_mui in the config")
    budget = config.baseline_emission()

    if system in ("siso", "miso"):
        if system == "siso":
            det = build_relay_detector(budget, config.direct_link, config.direct_mui, config.prior_one)
        else:
            per_node = budget.molecules / config.baseline_nodes
            superposed = config.baseline_nodes * (per_node * peak_gain(config.direct_link))
            det = detector_from_signal(superposed, config.direct_mui, config.prior_one)
        return CompiledScenario(
            kind=_kernel_py.KIND_DIRECT,
            draws_per_trial=2,
            prior_one=config.prior_one,
            log_prior_odds=math.log((1.0 - config.prior_one) / config.prior_one),
            relay_signal=_as_f64([det.signal]),
            relay_mu=_as_f64([det.mui.mean]),
            relay_sigma=_as_f64([det.mui.std]),
            relay_scale=_as_f64([det.statistic_scale]),
            relay_threshold=_as_f64([det.statistic_threshold]),
            dest_signal=_empty(),
            dest_mu=_empty(),
            dest_sigma=_empty(),
            weight=_empty(),
            fusion_threshold=math.nan,
            ln_pd=_empty(),
            ln_1m_pd=_empty(),
            ln_pfa=_empty(),
            ln_1m_pfa=_empty(),
        )

    # simo: one emission sensed by baseline_nodes independent surfaces
    branches = [
        FusionBranch(
            emission=budget,
            link=config.direct_link,
            mui=config.direct_mui,
            performance=PERFECT_RELAY,
        )
        for _ in range(config.baseline_nodes)
    ]
    return _fusion_scenario(
        _kernel_py.KIND_BROADCAST,
        1 + len(branches),
        config.prior_one,
        (_empty(), _empty(), _empty(), _empty(), _empty()),
        branches,
    )


@dataclass(frozen=True)
class TrialOutcome:
    """Realisation of one simulated symbol slot."""

    transmitted: int
    relay_decisions: tuple[int, ...]
    destination: int
    error: bool


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo error-rate estimate with its binomial standard error."""

    trials: int
    errors: int
    p_hat: float
    standard_error: float
    seed: int


@dataclass(frozen=True)
class DetectorComparison:
    """Linear vs exact destination rules evaluated on shared draws."""

    trials: int
    errors_linear: int
    errors_exact: int
    agreement: int
    seed: int

    @property
    def agreement_rate(self) -> float:
        return self.agreement / self.trials


def _counts(scn: CompiledScenario, seed: int, start: int, n: int, backend: str):
    if backend == "compiled":
        return _mc_ext.chain_counts(scn, seed, start, n)
    return _kernel_py.chain_counts(scn, seed, start, n)


def _chunk_counts(args):
    scn, seed, start, n, backend = args
    return _counts(scn, seed, start, n, backend)


def _accumulate(
    scn: CompiledScenario,
    seed: int,
    trials: int,
    workers: int,
    backend: str,
    chunk_size: int = _DEFAULT_CHUNK,
) -> tuple[int, int, int]:
    chunks = [
        (scn, seed, start, min(chunk_size, trials - start), backend)
        for start in range(0, trials, chunk_size)
    ]
    if workers <= 1 or len(chunks) == 1:
        results = [_chunk_counts(c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chunk_counts, chunks))
    err_lin = sum(r[0] for r in results)
    err_ex = sum(r[1] for r in results)
    agree = sum(r[2] for r in results)
    return err_lin, err_ex, agree


def _validate_run(detector: str, trials: int, backend: str | None) -> str:
    if detector not in DETECTORS:
        raise ValueError(f"unknown detector {detector!r}; expected one of {DETECTORS}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials!r}")
    resolved = backend or default_backend()
    if resolved not in available_backends():
        raise ValueError(f"backend {resolved!r} not available (have {available_backends()})")
    return resolved


def estimate_pe(
    config: NetworkConfig,
    detector: str = "linear",
    system: str = "cooperative",
    trials: int = 100_000,
    seed: int = 0,
    workers: int = 1,
    backend: str | None = None,
) -> McEstimate:
    """Estimate the end-to-end error probability by Monte Carlo.

    Deterministic for fixed (seed, config, trials) regardless of worker
    count or backend.
    """
    backend = _validate_run(detector, trials, backend)
    scn = compile_scenario(config, system)
    err_lin, err_ex, _ = _accumulate(scn, seed, trials, workers, backend)
    errors = err_lin if detector == "linear" else err_ex
    p_hat = errors / trials
    return McEstimate(
        trials=trials,
        errors=errors,
        p_hat=p_hat,
        standard_error=math.sqrt(p_hat * (1.0 - p_hat) / trials),
        seed=seed,
    )


def compare_detectors(
    config: NetworkConfig,
    system: str = "cooperative",
    trials: int = 100_000,
    seed: int = 0,
    workers: int = 1,
    backend: str | None = None,
) -> DetectorComparison:
    """Run both destination rules on the same draws and count agreement."""
    backend = _validate_run("linear", trials, backend)
    scn = compile_scenario(config, system)
    err_lin, err_ex, agree = _accumulate(scn, seed, trials, workers, backend)
    return DetectorComparison(
        trials=trials,
        errors_linear=err_lin,
        errors_exact=err_ex,
        agreement=agree,
        seed=seed,
    )


def run_trial(
    config: NetworkConfig,
    detector: str = "linear",
    system: str = "cooperative",
    *,
    seed: int,
    trial_index: int = 0,
) -> TrialOutcome:
    """Run a single trial and return its full realisation.

    Scalar reference path: consumes exactly the draws the kernels assign to
    this trial index, in the same order, so outcomes agree bit for bit with
    the batch counters (tested).
    """
    if detector not in DETECTORS:
        raise ValueError(f"unknown detector {detector!r}; expected one of {DETECTORS}")
    scn = compile_scenario(config, system)
    base = trial_index * scn.draws_per_trial
    x0 = int(uniform_scalar(seed, base) < scn.prior_one)

    if scn.kind == _kernel_py.KIND_DIRECT:
        z = normal_scalar(seed, base + 1)
        c = (scn.relay_signal[0] if x0 else 0.0) + scn.relay_mu[0] + scn.relay_sigma[0] * z
        decision = int(scn.relay_scale[0] * c > scn.relay_threshold[0])
        return TrialOutcome(x0, (), decision, decision != x0)

    nb = scn.branch_count
    relay_bits: list[int] = []
    statistic = 0.0
    llr = 0.0
    for i in range(nb):
        if scn.kind == _kernel_py.KIND_TWO_PHASE:
            z = normal_scalar(seed, base + 1 + i)
            c = (scn.relay_signal[i] if x0 else 0.0) + scn.relay_mu[i] + scn.relay_sigma[i] * z
            xhat = int(scn.relay_scale[i] * c > scn.relay_threshold[i])
            relay_bits.append(xhat)
            zt = normal_scalar(seed, base + 1 + nb + i)
        else:
            xhat = x0
            zt = normal_scalar(seed, base + 1 + i)
        ct = (scn.dest_signal[i] if xhat else 0.0) + scn.dest_mu[i] + scn.dest_sigma[i] * zt

        statistic += scn.weight[i] * ct

        z1 = (ct - scn.dest_signal[i] - scn.dest_mu[i]) / scn.dest_sigma[i]
        z0 = (ct - scn.dest_mu[i]) / scn.dest_sigma[i]
        llr += _lse2(scn.ln_pd[i] - 0.5 * z1 * z1, scn.ln_1m_pd[i] - 0.5 * z0 * z0)
        llr -= _lse2(scn.ln_pfa[i] - 0.5 * z1 * z1, scn.ln_1m_pfa[i] - 0.5 * z0 * z0)

    if detector == "linear":
        decision = int(statistic > scn.fusion_threshold)
    else:
        decision = int(llr > scn.log_prior_odds)
    return TrialOutcome(x0, tuple(relay_bits), decision, decision != x0)


def _lse2(a: float, b: float) -> float:
    hi, lo = (a, b) if a >= b else (b, a)
    if hi == -math.inf:
        return -math.inf
    return hi + math.log1p(math.exp(lo - hi))


def relay_decision_count(
    detector: RelayDetector, symbol: int, trials: int, seed: int
) -> int:
    """Count decide-1 outcomes for `trials` sensed values under `symbol`.

    Used to validate the closed-form operating point: under symbol 1 the
    count estimates P_D, under symbol 0 it estimates P_FA.  One draw per
    trial from the counter stream.
    """
    if symbol not in (0, 1):
        raise ValueError(f"symbol must be 0 or 1, got {symbol!r}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials!r}")
    z = normal_stream(seed, np.arange(trials, dtype=np.uint64))
    c = (detector.signal if symbol else 0.0) + detector.mui.mean + detector.mui.std * z
    return int(np.count_nonzero(detector.statistic_scale * c > detector.statistic_threshold))
