"""Closed-form end-to-end error analysis for the two-phase relay network.

The chain is: a source emits Q0 molecules for symbol 1 (prior beta) or
stays silent; each decode-and-forward relay senses the peak concentration,
decides with the reduced LRT, and re-emits on its own molecule type; the
destination linearly fuses the per-branch concentrations.  Every stage has
a Gaussian closed form, so the end-to-end error probability

    P_e = beta * (1 - P_D_dest) + (1 - beta) * P_FA_dest

is available without simulation.  The destination statistics assume the
relay decisions enter only through the fusion weights; the closed form is
therefore an in-regime result, accurate where per-relay errors are small
(validated against the full-chain simulator in the test suite).

Baselines used for comparison:

* SISO: the source transmits straight to the destination over one link.
* MISO: several co-located emitters split the budget; peak concentrations
  superpose, so the destination sees one Gaussian test with the summed
  signal.
* SIMO: one source, several receiving nodes with independent MUI; the
  destination fuses them with perfect-branch weights (the relay fusion rule
  with P_D = 1, P_FA = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .channel import Emission, Link, Medium, MuiModel, peak_gain
from .detection import (
    DetectionPerformance,
    FusionBranch,
    FusionWeights,
    RelayDetector,
    build_fusion_weights,
    build_relay_detector,
    detector_from_signal,
    q_function,
    relay_performance,
)

PERFECT_RELAY = DetectionPerformance(p_detect=1.0, p_false_alarm=0.0)


@dataclass(frozen=True)
class RelayHop:
    """Geometry and interference of one relay branch.

    source_link / relay_mui describe the sensing hop (source to relay);
    emission / dest_link / dest_mui describe the re-emission hop (relay to
    destination, on the relay's own molecule type).
    """

    source_link: Link
    relay_mui: MuiModel
    emission: Emission
    dest_link: Link
    dest_mui: MuiModel


@dataclass(frozen=True)
class NetworkConfig:
    """Complete scenario description for analysis and simulation.

    prior_one is the probability the source sends symbol 1.  direct_link /
    direct_mui place the baseline receiving surface (SISO direct hop, and
    the common node distance for MISO/SIMO baselines).
    baseline_total_emission is the molecule budget for baseline systems;
    when omitted it defaults to the cooperative total Q0 + sum(Q_i).
    baseline_nodes sets the emitter / receiver count of MISO / SIMO.
    The medium never enters the error analysis (peak gains are
    D-independent); it is kept for completeness of the scenario.
    """

    prior_one: float
    source_emission: Emission
    relays: tuple[RelayHop, ...]
    direct_link: Link | None = None
    direct_mui: MuiModel | None = None
    baseline_total_emission: Emission | None = None
    baseline_nodes: int = 2
    medium: Medium = field(default_factory=lambda: Medium(1e-6))

    def __post_init__(self) -> None:
        if not (math.isfinite(self.prior_one) and 0.0 < self.prior_one < 1.0):
            raise ValueError(f"prior must lie strictly inside (0, 1), got {self.prior_one!r}")
        if len(self.relays) < 1:
            raise ValueError("cooperative analysis needs at least one relay")
        if not (isinstance(self.baseline_nodes, int) and self.baseline_nodes >= 1):
            raise ValueError(f"baseline_nodes must be an integer >= 1, got {self.baseline_nodes!r}")

    @property
    def relay_count(self) -> int:
        return len(self.relays)

    def baseline_emission(self) -> Emission:
        if self.baseline_total_emission is not None:
            return self.baseline_total_emission
        total = self.source_emission.molecules + sum(r.emission.molecules for r in self.relays)
        return Emission(total)


@dataclass(frozen=True)
class PerformanceReport:
    """Closed-form operating points of every stage plus the end-to-end P_e."""

    relay_performances: tuple[DetectionPerformance, ...]
    destination: DetectionPerformance
    error_probability: float


def relay_detectors(config: NetworkConfig) -> list[RelayDetector]:
    """Reduced-LRT detectors for each relay's sensing hop."""
    return [
        build_relay_detector(config.source_emission, hop.source_link, hop.relay_mui, config.prior_one)
        for hop in config.relays
    ]


def relay_performances(config: NetworkConfig) -> list[DetectionPerformance]:
    """Per-relay closed-form (P_D, P_FA) operating points."""
    return [relay_performance(det) for det in relay_detectors(config)]


def fusion_branches(
    config: NetworkConfig,
    performances: Sequence[DetectionPerformance] | None = None,
) -> list[FusionBranch]:
    """Destination-side branches; performances default to the closed forms.

    Passing explicit performances supports the perfect-relay reduction used
    by the structural identity checks.
    """
    if performances is None:
        performances = relay_performances(config)
    if len(performances) != len(config.relays):
        raise ValueError("one performance per relay required")
    return [
        FusionBranch(emission=hop.emission, link=hop.dest_link, mui=hop.dest_mui, performance=perf)
        for hop, perf in zip(config.relays, performances)
    ]


def _fusion_operating_point(weights: FusionWeights) -> DetectionPerformance:
    """(P_D, P_FA) of the linear fusion statistic from its Gaussian laws.

    Under either hypothesis the statistic is Gaussian with variance
    sum(w_i^2 std_i^2); the hypotheses differ only in the mean shift by the
    per-branch signals.
    """
    shift = 0.0
    center = 0.0
    var = 0.0
    for w, s, mu, sig in zip(weights.weights, weights.signals, weights.mui_means, weights.mui_stds):
        shift += w * (s + mu)
        center += w * mu
        var += (w * sig) ** 2
    if var == 0.0:
        raise ValueError("degenerate fusion: every branch is inert (zero weight)")
    std = math.sqrt(var)
    return DetectionPerformance(
        p_detect=q_function((weights.threshold - shift) / std),
        p_false_alarm=q_function((weights.threshold - center) / std),
    )


def destination_detection(
    config: NetworkConfig,
    performances: Sequence[DetectionPerformance] | None = None,
) -> DetectionPerformance:
    """Destination (P_D, P_FA) for the linear fusion rule."""
    branches = fusion_branches(config, performances)
    weights = build_fusion_weights(branches, config.prior_one)
    return _fusion_operating_point(weights)


def _pe_from_operating_point(point: DetectionPerformance, prior_one: float) -> float:
    return prior_one * (1.0 - point.p_detect) + (1.0 - prior_one) * point.p_false_alarm


def analytic_pe_cooperative(
    config: NetworkConfig,
    performances: Sequence[DetectionPerformance] | None = None,
) -> float:
    """End-to-end error probability of the cooperative chain."""
    return _pe_from_operating_point(destination_detection(config, performances), config.prior_one)


def performance_report(config: NetworkConfig) -> PerformanceReport:
    """Every closed-form quantity of the chain in one pass."""
    per_relay = relay_performances(config)
    dest = destination_detection(config, per_relay)
    return PerformanceReport(
        relay_performances=tuple(per_relay),
        destination=dest,
        error_probability=_pe_from_operating_point(dest, config.prior_one),
    )


def analytic_pe_siso(
    emission: Emission, link: Link, mui: MuiModel, prior_one: float
) -> float:
    """Error probability of direct single-link transmission."""
    det = build_relay_detector(emission, link, mui, prior_one)
    return _pe_from_operating_point(relay_performance(det), prior_one)


def analytic_pe_miso(
    emissions: Sequence[tuple[Emission, Link]], mui: MuiModel, prior_one: float
) -> float:
    """Error probability with several emitters and one receiving surface.

    Peak concentrations superpose linearly, so the receiver faces a single
    Gaussian test with signal sum_k Q_k * h_p(d_k).  One emitter reduces
    exactly to the SISO form.
    """
    if not emissions:
        raise ValueError("MISO requires at least one emitter")
    total = sum(e.molecules * peak_gain(link) for e, link in emissions)
    det = detector_from_signal(total, mui, prior_one)
    return _pe_from_operating_point(relay_performance(det), prior_one)


def analytic_pe_simo(
    emission: Emission, links: Sequence[tuple[Link, MuiModel]], prior_one: float
) -> float:
    """Error probability with one source and several receiving nodes.

    Receiving nodes observe independent MUI, so the optimal combiner is the
    linear fusion rule with perfect-branch weights (the sensing nodes do
    not decode; there is no relay error to discount).
    """
    if not links:
        raise ValueError("SIMO requires at least one receiving node")
    branches = [
        FusionBranch(emission=emission, link=link, mui=mui, performance=PERFECT_RELAY)
        for link, mui in links
    ]
    weights = build_fusion_weights(branches, prior_one)
    return _pe_from_operating_point(_fusion_operating_point(weights), prior_one)
