"""Binary decision statistics for concentration-sensing receivers.

Two detector families live here:

* the per-relay reduced likelihood-ratio test on a single sensed
  concentration (Gaussian MUI, known signal level), with its closed-form
  detection / false-alarm probabilities, and
* the destination's fusion stage, which combines the concentrations
  re-emitted by decode-and-forward relays.  The production rule is the
  linear weighted sum (valid for moderate-to-high molecule counts); the
  exact mixture-likelihood test is also implemented and serves as the
  in-repo optimality oracle for the linear rule.

Decisions use a fixed tie-break: statistic exactly equal to its threshold
decides 0.  The event has measure zero under the Gaussian model; fixing it
keeps every code path deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from .channel import Emission, Link, MuiModel, peak_gain

_LOG_HALF = math.log(0.5)
_SQRT2 = math.sqrt(2.0)


def q_function(x):
    """Standard normal tail probability Q(x) = P(Z > x).

    Accepts a float or ndarray; NaN input is rejected.  Evaluated through
    the complementary error function, accurate to well below 1e-10 absolute
    over the whole real line (underflows to 0 beyond |x| ~ 38).
    """
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any():
        raise ValueError("q_function: NaN input")
    out = 0.5 * special.erfc(arr / _SQRT2)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def log_q_function(x):
    """ln Q(x), stable far into both tails.

    For x >= 0 uses the scaled complementary error function so the result
    stays finite long after Q(x) itself underflows; for x < 0 it folds back
    through Q(x) = 1 - Q(-x).
    """
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any():
        raise ValueError("log_q_function: NaN input")
    pos = np.abs(arr)
    log_tail = _LOG_HALF + np.log(special.erfcx(pos / _SQRT2)) - 0.5 * pos * pos
    with np.errstate(divide="ignore"):  # log1p(-1) = -inf is a valid limit
        folded = np.log1p(-np.exp(log_tail))
    out = np.where(arr >= 0, log_tail, folded)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


@dataclass(frozen=True)
class DetectionPerformance:
    """Operating point of a binary detector: (P_D, P_FA)."""

    p_detect: float
    p_false_alarm: float

    def __post_init__(self) -> None:
        for name, p in (("p_detect", self.p_detect), ("p_false_alarm", self.p_false_alarm)):
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {p!r}")


@dataclass(frozen=True)
class RelayDetector:
    """Reduced LRT for one sensed concentration under Gaussian MUI.

    The received value is c = x*signal + eta with eta ~ N(mean, std^2) and
    x in {0, 1} with prior P(x=1) = prior_one.  The log-LRT reduces to the
    scalar test  statistic_scale * c > statistic_threshold,  equivalently
    c > concentration_threshold  (the scale is positive).

    statistic_scale:          signal / std^2
    statistic_threshold:      (signal^2 + 2*signal*mean) / (2 std^2)
                              + ln((1-prior)/prior)
    concentration_threshold:  statistic_threshold / statistic_scale
    """

    signal: float
    mui: MuiModel
    prior_one: float
    statistic_scale: float
    statistic_threshold: float
    concentration_threshold: float


def _check_prior(prior_one: float) -> float:
    if not (math.isfinite(prior_one) and 0.0 < prior_one < 1.0):
        raise ValueError(f"prior must lie strictly inside (0, 1), got {prior_one!r}")
    return math.log((1.0 - prior_one) / prior_one)


def detector_from_signal(signal: float, mui: MuiModel, prior_one: float) -> RelayDetector:
    """Reduced LRT for a known received signal level (molecules/cm^3)."""
    log_prior_odds = _check_prior(prior_one)
    if not (math.isfinite(signal) and signal > 0.0):
        raise ValueError("degenerate detector: signal level is zero (Q=0 or vanished gain)")
    var = mui.std * mui.std
    scale = signal / var
    threshold = (signal * signal + 2.0 * signal * mui.mean) / (2.0 * var) + log_prior_odds
    return RelayDetector(
        signal=signal,
        mui=mui,
        prior_one=prior_one,
        statistic_scale=scale,
        statistic_threshold=threshold,
        concentration_threshold=threshold / scale,
    )


def build_relay_detector(
    emission: Emission, link: Link, mui: MuiModel, prior_one: float
) -> RelayDetector:
    """Construct the reduced LRT for signal level Q * h_p(d).

    A zero signal (Q = 0 or a fully underflowed link gain) leaves the test
    undefined and is rejected.
    """
    return detector_from_signal(emission.molecules * peak_gain(link), mui, prior_one)


def relay_decide(detector: RelayDetector, concentration: float) -> int:
    """Apply the reduced LRT to one sensed concentration.

    Negative concentrations are legitimate inputs under the Gaussian MUI
    model.  Returns 1 iff scale*c strictly exceeds the threshold.
    """
    return int(detector.statistic_scale * concentration > detector.statistic_threshold)


def relay_performance(detector: RelayDetector) -> DetectionPerformance:
    """Closed-form (P_D, P_FA) of the reduced LRT.

    P_D  = Q((c_thr - signal - mean) / std)
    P_FA = Q((c_thr - mean) / std)
    """
    thr = detector.concentration_threshold
    mu, sig = detector.mui.mean, detector.mui.std
    return DetectionPerformance(
        p_detect=q_function((thr - detector.signal - mu) / sig),
        p_false_alarm=q_function((thr - mu) / sig),
    )


@dataclass(frozen=True)
class FusionBranch:
    """One relay-to-destination branch as seen by the fusion stage.

    emission/link give the re-emitted signal level Q * h_p(d); mui is the
    destination-side interference on this branch's molecule type;
    performance is the relay's (P_D, P_FA) operating point.
    """

    emission: Emission
    link: Link
    mui: MuiModel
    performance: DetectionPerformance

    @property
    def signal(self) -> float:
        return self.emission.molecules * peak_gain(self.link)


@dataclass(frozen=True)
class FusionWeights:
    """Linear fusion rule: decide 1 iff sum_i weights[i]*c[i] > threshold.

    weights[i] scales branch i by its reliability (P_D - P_FA); a branch
    whose relay is uninformative (P_D = P_FA) gets weight 0 and cannot
    influence the decision.  threshold_terms[i] is branch i's additive
    contribution to the threshold; threshold includes the prior log-odds.
    """

    signals: tuple[float, ...]
    mui_means: tuple[float, ...]
    mui_stds: tuple[float, ...]
    weights: tuple[float, ...]
    threshold_terms: tuple[float, ...]
    threshold: float
    prior_one: float

    def __len__(self) -> int:
        return len(self.weights)


def build_fusion_weights(
    branches: Sequence[FusionBranch], prior_one: float
) -> FusionWeights:
    """Derive the linear fusion weights and threshold from the branches."""
    log_prior_odds = _check_prior(prior_one)
    if not branches:
        raise ValueError("fusion requires at least one branch")
    signals, means, stds, weights, terms = [], [], [], [], []
    for b in branches:
        s = b.signal
        var = b.mui.std * b.mui.std
        delta = b.performance.p_detect - b.performance.p_false_alarm
        signals.append(s)
        means.append(b.mui.mean)
        stds.append(b.mui.std)
        weights.append(s / var * delta)
        terms.append((s * s + 2.0 * s * b.mui.mean) / (2.0 * var) * delta)
    return FusionWeights(
        signals=tuple(signals),
        mui_means=tuple(means),
        mui_stds=tuple(stds),
        weights=tuple(weights),
        threshold_terms=tuple(terms),
        threshold=log_prior_odds + math.fsum(terms),
        prior_one=prior_one,
    )


def fusion_decide(weights: FusionWeights, concentrations: Sequence[float]) -> int:
    """Apply the linear fusion rule to the per-branch concentrations."""
    if len(concentrations) != len(weights):
        raise ValueError(
            f"expected {len(weights)} concentrations, got {len(concentrations)}"
        )
    # Sequential accumulation, matching the simulation kernels bit for bit.
    statistic = 0.0
    for w, c in zip(weights.weights, concentrations):
        statistic += w * c
    return int(statistic > weights.threshold)


def _log_mixture_density(c: float, weight_one: float, loc_one: float,
                         loc_zero: float, std: float) -> float:
    """ln of  weight*N(loc_one, std^2) + (1-weight)*N(loc_zero, std^2) at c.

    Works in the log domain with a max shift, so deep-tail observations
    (standardized arguments of hundreds) stay finite.  The 1/(std sqrt(2pi))
    normalisation is omitted: it cancels between hypotheses in the LLR.
    """
    z1 = (c - loc_one) / std
    z0 = (c - loc_zero) / std
    a = math.log(weight_one) - 0.5 * z1 * z1 if weight_one > 0.0 else -math.inf
    b = math.log1p(-weight_one) - 0.5 * z0 * z0 if weight_one < 1.0 else -math.inf
    if a == -math.inf and b == -math.inf:
        return -math.inf
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def exact_destination_llr(
    branches: Sequence[FusionBranch], prior_one: float, concentrations: Sequence[float]
) -> float:
    """Exact destination log-likelihood ratio over the relay-error mixtures.

    Each branch's conditional density is a two-component Gaussian mixture:
    under symbol 1 the relay re-emits with probability P_D, under symbol 0
    with probability P_FA.  The branches are conditionally independent, so
    the LLR is the sum of per-branch log ratios.  This is the optimal test
    the linear fusion rule approximates; a branch with P_D = P_FA
    contributes exactly 0 for every observation.

    Degenerate operating points (P_D or P_FA exactly 0 or 1) collapse the
    mixture to a single Gaussian; the log-domain evaluation keeps every
    contribution finite, with +/-inf possible only when one hypothesis has
    a genuinely zero-probability component (dominant-tail rule).
    """
    _check_prior(prior_one)
    if len(concentrations) != len(branches):
        raise ValueError(
            f"expected {len(branches)} concentrations, got {len(concentrations)}"
        )
    llr = 0.0
    for b, c in zip(branches, concentrations):
        loc_one = b.signal + b.mui.mean
        loc_zero = b.mui.mean
        p_d, p_fa = b.performance.p_detect, b.performance.p_false_alarm
        if p_d == p_fa:
            continue
        num = _log_mixture_density(c, p_d, loc_one, loc_zero, b.mui.std)
        den = _log_mixture_density(c, p_fa, loc_one, loc_zero, b.mui.std)
        llr += num - den
    return llr


def exact_destination_decide(
    branches: Sequence[FusionBranch], prior_one: float, concentrations: Sequence[float]
) -> int:
    """Threshold the exact LLR at the prior log-odds (ties decide 0)."""
    return int(
        exact_destination_llr(branches, prior_one, concentrations)
        > math.log((1.0 - prior_one) / prior_one)
    )
