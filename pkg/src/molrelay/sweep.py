"""Experiment runner: analytic / Monte Carlo rows over a parameter grid.

CSV contract (fixed column order):

    system,N,Q_total,distance_um,pe_analytic,pe_mc,mc_se,trials,seed,detector

Floats are serialised with 17 significant digits so rows re-parse to the
exact same doubles.  Monte Carlo fields are empty in analytic-only runs.
Rows are flushed as they are produced, so an aborted sweep leaves the rows
computed so far in the output file.

Each Monte Carlo row gets its own seed spawned from the sweep seed with
the stream-mixing function (recorded in the row, so any single row can be
reproduced with `molrelay simulate --seed <value>`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence, TextIO

from .analytics import (
    NetworkConfig,
    analytic_pe_cooperative,
    analytic_pe_miso,
    analytic_pe_simo,
    analytic_pe_siso,
)
from .channel import Emission
from .config import ConfigError, LoadedConfig, ScenarioTemplate, SweepSpec
from .simulator import derive_seed, estimate_pe

CSV_COLUMNS = ("system", "N", "Q_total", "distance_um", "pe_analytic",
               "pe_mc", "mc_se", "trials", "seed", "detector")


@dataclass(frozen=True)
class SweepRow:
    system: str
    nodes: int
    q_total: float
    distance_um: float
    pe_analytic: float
    pe_mc: float | None
    mc_se: float | None
    trials: int | None
    seed: int | None
    detector: str | None

    def as_csv(self) -> str:
        mc_fields = ("", "", "", "", "")
        if self.pe_mc is not None:
            mc_fields = (
                _fmt_float(self.pe_mc),
                _fmt_float(self.mc_se),
                str(self.trials),
                str(self.seed),
                self.detector,
            )
        return ",".join((
            self.system,
            str(self.nodes),
            _fmt_float(self.q_total),
            _fmt_float(self.distance_um),
            _fmt_float(self.pe_analytic),
            *mc_fields,
        ))


def _fmt_float(x: float) -> str:
    return format(x, ".17g")


def _analytic_pe(config: NetworkConfig, system: str) -> float:
    if system == "cooperative":
        return analytic_pe_cooperative(config)
    if config.direct_link is None or config.direct_mui is None:
        raise ConfigError("direct_d_um", f"system {system!r} needs a baseline distance")
    budget = config.baseline_emission()
    if system == "siso":
        return analytic_pe_siso(budget, config.direct_link, config.direct_mui, config.prior_one)
    if system == "miso":
        per_node = Emission(budget.molecules / config.baseline_nodes)
        emitters = [(per_node, config.direct_link)] * config.baseline_nodes
        return analytic_pe_miso(emitters, config.direct_mui, config.prior_one)
    surfaces = [(config.direct_link, config.direct_mui)] * config.baseline_nodes
    return analytic_pe_simo(budget, surfaces, config.prior_one)


def _system_nodes(template: ScenarioTemplate, system: str, relay_count: int) -> int:
    if system == "cooperative":
        return relay_count
    return 1 if system == "siso" else template.baseline_nodes


def _cooperative_distance_um(config: NetworkConfig) -> float:
    hop = config.relays[0]
    return hop.source_link.distance_um + hop.dest_link.distance_um


def iter_rows(
    template: ScenarioTemplate,
    sweep: SweepSpec,
    *,
    workers: int = 1,
    trials: int | None = None,
    seed: int | None = None,
    detector: str | None = None,
    analytic_only: bool = False,
    backend: str | None = None,
) -> Iterator[SweepRow]:
    """Produce sweep rows in deterministic order (grid x system x N)."""
    mc_trials = trials if trials is not None else sweep.trials
    base_seed = seed if seed is not None else sweep.seed
    det = detector if detector is not None else sweep.detector
    run_mc = (mc_trials is not None) and not analytic_only
    if run_mc and mc_trials < 1000:
        raise ConfigError("sweep.trials", f"Monte Carlo sweeps need >= 1000 trials, got {mc_trials}")

    row_index = 0
    for value in sweep.grid():
        q = float(value) if sweep.parameter == "total_molecules" else template.budget
        dist = float(value) if sweep.parameter == "distance" else None
        for system in sweep.systems:
            counts = sweep.relay_counts if system == "cooperative" else (None,)
            for n in counts:
                config = template.network_config(
                    n_relays=n, budget=q, total_distance_um=dist
                )
                if system == "cooperative":
                    distance_um = dist if dist is not None else _cooperative_distance_um(config)
                else:
                    distance_um = dist if dist is not None else template.direct_d_um
                    if distance_um is None:
                        raise ConfigError("direct_d_um", f"system {system!r} needs a baseline distance")
                pe = _analytic_pe(config, system)

                pe_mc = se = row_trials = row_seed = row_det = None
                if run_mc:
                    row_seed = derive_seed(base_seed, row_index)
                    est = estimate_pe(
                        config, detector=det, system=system, trials=mc_trials,
                        seed=row_seed, workers=workers, backend=backend,
                    )
                    pe_mc, se, row_trials, row_det = est.p_hat, est.standard_error, est.trials, det
                yield SweepRow(
                    system=system,
                    nodes=_system_nodes(template, system, n if n is not None else 0),
                    q_total=q,
                    distance_um=distance_um,
                    pe_analytic=pe,
                    pe_mc=pe_mc,
                    mc_se=se,
                    trials=row_trials,
                    seed=row_seed,
                    detector=row_det,
                )
                row_index += 1


def run_sweep(loaded: LoadedConfig, out: TextIO, **kwargs) -> int:
    """Write the sweep as CSV to `out`; returns the row count.

    Rows are flushed as produced so partial results survive an abort.
    """
    if loaded.sweep is None:
        raise ConfigError("sweep", "this command needs a 'sweep' block in the config")
    out.write(",".join(CSV_COLUMNS) + "\n")
    out.flush()
    count = 0
    for row in iter_rows(loaded.template, loaded.sweep, **kwargs):
        out.write(row.as_csv() + "\n")
        out.flush()
        count += 1
    return count


def point_rows(
    loaded: LoadedConfig,
    systems: Sequence[str] | None = None,
    *,
    workers: int = 1,
    trials: int | None = None,
    seed: int | None = None,
    detector: str | None = None,
    backend: str | None = None,
) -> list[SweepRow]:
    """Rows for the scenario's own point (no grid): analytic, optionally MC."""
    template = loaded.template
    if systems is None:
        systems = loaded.sweep.systems if loaded.sweep is not None else ("cooperative",)
    rows = []
    row_index = 0
    base_seed = seed if seed is not None else (loaded.sweep.seed if loaded.sweep else 0)
    det = detector if detector is not None else "linear"
    for system in systems:
        counts = [len(template.relays)] if system == "cooperative" else [None]
        for n in counts:
            config = template.network_config(n_relays=n)
            distance_um = (
                _cooperative_distance_um(config) if system == "cooperative" else template.direct_d_um
            )
            if distance_um is None:
                raise ConfigError("direct_d_um", f"system {system!r} needs a baseline distance")
            pe = _analytic_pe(config, system)
            pe_mc = se = row_trials = row_seed = row_det = None
            if trials is not None:
                row_seed = derive_seed(base_seed, row_index)
                est = estimate_pe(
                    config, detector=det, system=system, trials=trials,
                    seed=row_seed, workers=workers, backend=backend,
                )
                pe_mc, se, row_trials, row_det = est.p_hat, est.standard_error, est.trials, det
            rows.append(SweepRow(
                system=system,
                nodes=_system_nodes(template, system, n if n is not None else 0),
                q_total=template.budget,
                distance_um=distance_um,
                pe_analytic=pe,
                pe_mc=pe_mc,
                mc_se=se,
                trials=row_trials,
                seed=row_seed,
                detector=row_det,
            ))
            row_index += 1
    return rows


def write_rows(rows: Sequence[SweepRow], out: TextIO) -> None:
    out.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        out.write(row.as_csv() + "\n")
    out.flush()
