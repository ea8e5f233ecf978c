"""Command-line behaviour: subcommands, CSV contract, exit codes."""

import csv
import io
import json
from contextlib import redirect_stderr, redirect_stdout

import pytest

from molrelay.cli import main
from molrelay.sweep import CSV_COLUMNS

SMALL_SWEEP = {
    "relays": [{"d_sr_um": 10, "d_rd_um": 20}, {"d_sr_um": 10, "d_rd_um": 20}],
    "direct_d_um": 25,
    "Q": 3e9,
    "split_rule": "per_node",
    "sweep": {
        "parameter": "total_molecules",
        "min": 1e9,
        "max": 1e10,
        "points": 2,
        "spacing": "log",
        "systems": ["cooperative", "siso"],
        "N": [1, 2],
        "trials": 2000,
        "seed": 9,
    },
}


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def read_rows(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    return rows


def write_config(tmp_path, payload, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


class TestReproduce:
    def test_fig2a_analytic_only(self):
        code, out, err = run_cli("reproduce", "fig2a", "--analytic-only")
        assert code == 0, err
        rows = read_rows(out)
        # 9 grid points x (3 cooperative rows + 1 siso row)
        assert len(rows) == 36
        assert list(rows[0].keys()) == list(CSV_COLUMNS)
        assert all(r["pe_mc"] == "" and r["trials"] == "" for r in rows)

    def test_fig2a_orderings(self):
        _, out, _ = run_cli("reproduce", "fig2a", "--analytic-only")
        rows = read_rows(out)
        by_system = {}
        for r in rows:
            key = (r["system"], r["N"])
            by_system.setdefault(key, []).append((float(r["Q_total"]), float(r["pe_analytic"])))
        for series in by_system.values():
            values = [pe for _, pe in sorted(series)]
            assert all(b <= a for a, b in zip(values, values[1:]))

    def test_smallest_analytic_sweep(self, tmp_path):
        payload = json.loads(json.dumps(SMALL_SWEEP))
        payload["sweep"].pop("trials")
        payload["sweep"]["points"] = 2
        code, out, _ = run_cli("sweep", "--config", write_config(tmp_path, payload))
        assert code == 0
        rows = read_rows(out)
        # 2 grid points x (2 cooperative + 1 siso)
        assert len(rows) == 6
        assert all(r["pe_mc"] == "" for r in rows)

    def test_analytic_only_runs_are_byte_identical(self):
        _, first, _ = run_cli("reproduce", "fig2b", "--analytic-only")
        _, second, _ = run_cli("reproduce", "fig2b", "--analytic-only")
        assert first == second


class TestCsvContract:
    def test_round_trip_exact(self, tmp_path):
        code, out, _ = run_cli("sweep", "--config", write_config(tmp_path, SMALL_SWEEP))
        assert code == 0
        rows = read_rows(out)
        assert rows, "sweep produced no rows"
        for row in rows:
            for field in ("Q_total", "distance_um", "pe_analytic", "pe_mc", "mc_se"):
                if row[field] == "":
                    continue
                value = float(row[field])
                assert format(value, ".17g") == row[field]

    def test_monte_carlo_fields_populated(self, tmp_path):
        _, out, _ = run_cli("sweep", "--config", write_config(tmp_path, SMALL_SWEEP))
        rows = read_rows(out)
        for row in rows:
            assert row["detector"] == "linear"
            assert int(row["trials"]) == 2000
            assert row["seed"] != ""
            p = float(row["pe_mc"])
            assert 0.0 <= p <= 1.0

    def test_out_file(self, tmp_path):
        target = tmp_path / "rows.csv"
        code, out, _ = run_cli(
            "reproduce", "fig2a", "--analytic-only", "--out", str(target)
        )
        assert code == 0
        assert out == ""
        assert target.read_text().startswith(",".join(CSV_COLUMNS))


class TestPointCommands:
    def test_analytic_point(self, tmp_path):
        code, out, _ = run_cli("analytic", "--config", write_config(tmp_path, SMALL_SWEEP))
        assert code == 0
        rows = read_rows(out)
        assert {r["system"] for r in rows} == {"cooperative", "siso"}

    def test_simulate_point(self, tmp_path):
        code, out, _ = run_cli(
            "simulate", "--config", write_config(tmp_path, SMALL_SWEEP),
            "--system", "cooperative", "--trials", "2000", "--seed", "4",
        )
        assert code == 0
        (row,) = read_rows(out)
        assert row["system"] == "cooperative"
        assert int(row["trials"]) == 2000
        assert abs(float(row["pe_mc"]) - float(row["pe_analytic"])) < 0.1


class TestExitCodes:
    def test_config_error_exits_2(self, tmp_path):
        payload = json.loads(json.dumps(SMALL_SWEEP))
        payload["mui"] = {"mean": 4e16, "cov": 0.0}
        code, _, err = run_cli("analytic", "--config", write_config(tmp_path, payload))
        assert code == 2
        assert "mui.cov" in err

    def test_missing_file_exits_2(self):
        code, _, err = run_cli("analytic", "--config", "/nonexistent.json")
        assert code == 2
        assert "error" in err

    def test_runtime_error_exits_3(self, tmp_path):
        code, _, err = run_cli(
            "simulate", "--config", write_config(tmp_path, SMALL_SWEEP), "--trials", "0"
        )
        assert code == 3
        assert "trials" in err

    def test_unknown_preset_is_an_argparse_error(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("reproduce", "fig9")
        assert exc.value.code == 2


class TestWorkerInvariance:
    def test_sweep_bytes_do_not_depend_on_worker_count(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_SWEEP)
        _, one, _ = run_cli("sweep", "--config", cfg, "--workers", "1")
        _, four, _ = run_cli("sweep", "--config", cfg, "--workers", "4")
        assert one == four


class TestPartialResults:
    def test_rows_before_an_abort_are_flushed(self, tmp_path):
        # siso rows need a baseline distance; the cooperative rows computed
        # before the failure must survive in the output file
        payload = json.loads(json.dumps(SMALL_SWEEP))
        del payload["direct_d_um"]
        payload["sweep"].pop("trials")
        target = tmp_path / "partial.csv"
        code, _, err = run_cli(
            "sweep", "--config", write_config(tmp_path, payload), "--out", str(target)
        )
        assert code == 2
        assert "direct_d_um" in err
        lines = target.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) > 1  # at least the first cooperative row made it out
        assert lines[1].startswith("cooperative")
