"""Command-line layer: parsing, output formats, exit codes, determinism."""

import json

import pytest

from mgcp import shock
from mgcp.cli import main
from mgcp.gcp import RateMatrix, mgcp_component_variance, mgcp_mean
from mgcp.variants import (
    GammaTC,
    Mgfcp,
    Mgsfcp,
    covariance,
    holding_rate,
    variant_levy_measure,
    variant_pgf,
    variant_pmf,
)

MODEL = '{"rates": [[0.5], [0.5, 0.5]]}'
FIG1 = RateMatrix([[0.5], [0.5, 0.5]])


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def csv_rows(text):
    lines = [ln for ln in text.strip().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


class TestPmfCommand:
    def test_csv_matches_library(self, capsys):
        code, out, _ = run(
            capsys,
            ["pmf", "--model", MODEL, "--variant", "mgsfcp", "--alpha", "0.7",
             "--t", "1.0", "--box", "2,3"],
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["n1", "n2", "p"]
        assert len(rows) == 3 * 4
        for row in rows:
            n = (int(row[0]), int(row[1]))
            want = variant_pmf(Mgsfcp(0.7), FIG1, n, 1.0)
            # repr round-trips, so the match is exact
            assert float(row[2]) == want

    def test_json_document(self, capsys):
        code, out, _ = run(
            capsys,
            ["pmf", "--model", MODEL, "--box", "1,1", "--format", "json"],
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["command"] == "pmf"
        assert doc["warnings"] == []
        assert RateMatrix.from_dict(doc["model"]) == FIG1
        assert {"n1", "n2", "p"} == set(doc["rows"][0])
        assert len(doc["rows"]) == 4

    def test_model_from_file(self, capsys, tmp_path):
        path = tmp_path / "model.json"
        path.write_text(MODEL)
        code, out, _ = run(capsys, ["pmf", "--model", str(path), "--box", "1,1"])
        assert code == 0

    def test_invalid_json_exits_2(self, capsys):
        code, _, err = run(capsys, ["pmf", "--model", '{"rates": [[0.5]'])
        assert code == 2
        assert "model: invalid JSON" in err

    def test_bad_rate_type_names_the_field(self, capsys):
        code, _, err = run(
            capsys, ["pmf", "--model", '{"rates": [[0.5], [true]]}']
        )
        assert code == 2
        assert "model.rates[1][0]" in err

    def test_missing_variant_param_exits_2(self, capsys):
        code, _, err = run(
            capsys, ["pmf", "--model", MODEL, "--variant", "mgsfcp"]
        )
        assert code == 2
        assert "--alpha is required" in err

    def test_box_length_mismatch_exits_2(self, capsys):
        code, _, err = run(capsys, ["pmf", "--model", MODEL, "--box", "3"])
        assert code == 2
        assert "box length" in err


class TestPgfCommand:
    def test_value(self, capsys):
        code, out, _ = run(
            capsys,
            ["pgf", "--model", MODEL, "--variant", "gamma", "--a", "1.2",
             "--b", "0.8", "--u", "0.5,0.4", "--t", "1.0"],
        )
        assert code == 0
        _, rows = csv_rows(out)
        assert float(rows[0][2]) == variant_pgf(
            GammaTC(1.2, 0.8), FIG1, (0.5, 0.4), 1.0
        )

    def test_u_length_mismatch(self, capsys):
        code, _, err = run(capsys, ["pgf", "--model", MODEL, "--u", "0.5"])
        assert code == 2
        assert "u length" in err


class TestLevyCommand:
    def test_atoms_and_holding_rate(self, capsys):
        code, out, _ = run(
            capsys,
            ["levy", "--model", MODEL, "--variant", "tempered", "--alpha",
             "0.6", "--theta", "0.9", "--box", "2,2", "--format", "json"],
        )
        assert code == 0
        doc = json.loads(out)
        v = None
        from mgcp.variants import Tempered

        v = Tempered(0.6, 0.9)
        assert doc["holding_rate"] == holding_rate(v, FIG1)
        states = {(r["n1"], r["n2"]) for r in doc["rows"]}
        assert (0, 0) not in states
        for r in doc["rows"]:
            n = (r["n1"], r["n2"])
            assert r["mass"] == variant_levy_measure(v, FIG1, n)

    def test_rejects_inverse_stable_clock(self, capsys):
        code, _, err = run(
            capsys,
            ["levy", "--model", MODEL, "--variant", "mgfcp", "--beta", "0.6"],
        )
        assert code == 2
        assert "no constant rates" in err


class TestMomentsCommand:
    def test_mgcp_mean_variance(self, capsys):
        code, out, _ = run(capsys, ["moments", "--model", MODEL, "--t", "2.0"])
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["component", "mean", "variance"]
        for row in rows:
            i = int(row[0])
            assert float(row[1]) == mgcp_mean(FIG1, i, 2.0)
            assert float(row[2]) == mgcp_component_variance(FIG1, i, 2.0)

    def test_mgfcp_covariance_table(self, capsys):
        code, out, _ = run(
            capsys,
            ["moments", "--model", MODEL, "--variant", "mgfcp", "--beta",
             "0.8", "--t", "1.0"],
        )
        assert code == 0
        _, rows = csv_rows(out)
        assert len(rows) == 4
        for row in rows:
            i, l = int(row[0]), int(row[1])
            assert float(row[2]) == covariance(Mgfcp(0.8), FIG1, i, l, 1.0)

    def test_unsupported_variant_exits_2(self, capsys):
        code, _, err = run(
            capsys,
            ["moments", "--model", MODEL, "--variant", "gamma", "--a", "1.0",
             "--b", "1.0"],
        )
        assert code == 2
        assert "moments supports" in err


class TestSimulateCommand:
    def test_deterministic_rows(self, capsys):
        argv = ["simulate", "--model", MODEL, "--variant", "ig", "--delta",
                "1.1", "--gamma", "0.7", "--samples", "5", "--seed", "9"]
        code1, out1, _ = run(capsys, argv)
        code2, out2, _ = run(capsys, argv)
        assert code1 == code2 == 0
        assert out1 == out2
        header, rows = csv_rows(out1)
        assert header == ["draw", "n1", "n2"]
        assert [int(r[0]) for r in rows] == list(range(5))


class TestEstimateCommand:
    def test_workers_same_bytes(self, capsys):
        base = ["estimate", "--model", MODEL, "--stat", "pmf", "--box", "3,3",
                "--samples", "2000", "--seed", "11"]
        _, out1, _ = run(capsys, base + ["--workers", "1"])
        code, out4, _ = run(capsys, base + ["--workers", "4"])
        assert code == 0
        # the workers echo is the only allowed difference
        assert out1.replace("workers: 1", "workers: 4") == out4

    def test_json_report_shape(self, capsys):
        code, out, _ = run(
            capsys,
            ["estimate", "--model", MODEL, "--stat", "covariance", "--variant",
             "mgfcp", "--beta", "0.8", "--samples", "20000", "--seed", "3",
             "--i", "0", "--l", "1", "--format", "json"],
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["kind"] == "covariance"
        assert doc["passed"] is True
        assert doc["workers"] == 1
        assert doc["rows"][0]["label"] == "covariance"

    def test_mgfcp_pmf_emits_quality_warnings(self, capsys):
        """Deep default-box cells push the three-parameter series into
        its flagged-cancellation regime; the report must keep the flags
        and the exit code must say so."""
        argv = ["estimate", "--model", MODEL, "--variant", "mgfcp", "--beta",
                "0.5", "--samples", "2000", "--seed", "1"]
        code, out, _ = run(capsys, argv + ["--format", "json"])
        assert code == 3
        doc = json.loads(out)
        assert doc["warnings"]
        code, out, _ = run(capsys, argv)
        assert code == 3
        assert "# warning:" in out

    def test_too_few_samples_exits_2(self, capsys):
        code, _, err = run(
            capsys,
            ["estimate", "--model", MODEL, "--samples", "10", "--seed", "1"],
        )
        assert code == 2
        assert "1000" in err


class TestReliabilityCommand:
    def test_fig1_curve(self, capsys):
        code, out, _ = run(
            capsys,
            ["reliability", "--case", "fig1", "--alpha", "0.9", "--threshold",
             "geometric:0.5", "--tgrid", "0:2:1"],
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["t", "L_T"]
        model = shock.ShockModel(FIG1, 0.9, shock.Geometric(0.5))
        want = shock.reliability_curve(model, [0.0, 1.0, 2.0], "fig1")
        got = [(float(r[0]), float(r[1])) for r in rows]
        assert got == [(t, v) for t, v in want]

    def test_general_needs_model(self, capsys):
        code, _, err = run(
            capsys,
            ["reliability", "--alpha", "0.9", "--threshold", "geometric:0.5",
             "--tgrid", "0:1:1"],
        )
        assert code == 2
        assert "--model is required" in err

    def test_threshold_parse_errors(self, capsys):
        base = ["reliability", "--case", "fig1", "--alpha", "0.9", "--tgrid",
                "0:1:1", "--threshold"]
        for bad in ("geometric", "zipf:0.5", "geometric:0.5,0.2", "custom:0.9"):
            code, _, err = run(capsys, base + [bad])
            assert code == 2, bad
            assert err.startswith("error:")

    def test_tgrid_parse_errors(self, capsys):
        base = ["reliability", "--case", "fig1", "--alpha", "0.9",
                "--threshold", "geometric:0.5", "--tgrid"]
        for bad in ("0:2", "2:0:1", "0:1:0"):
            code, _, err = run(capsys, base + [bad])
            assert code == 2, bad
            assert "tgrid" in err

    def test_json_echoes_threshold(self, capsys):
        code, out, _ = run(
            capsys,
            ["reliability", "--case", "fig3", "--alpha", "0.6", "--threshold",
             "incgamma:0,0.5", "--tgrid", "0:1:0.5", "--format", "json"],
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["threshold"] == {"law": "incgamma", "a": 0.0, "p": 0.5}
        assert doc["case"] == "fig3"


class TestPresetsCommand:
    def test_listing(self, capsys):
        code, out, _ = run(capsys, ["presets", "--format", "json"])
        assert code == 0
        doc = json.loads(out)
        names = [r["name"] for r in doc["rows"]]
        assert names == ["figure1", "figure2", "order2", "polya_aeppli"]
        for r in doc["rows"]:
            RateMatrix.from_dict(json.loads(r["model"]))


class TestOutputFiles:
    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "out.csv"
        code, out, _ = run(
            capsys, ["pmf", "--model", MODEL, "--box", "1,1", "--output",
                     str(path)]
        )
        assert code == 0
        assert out == ""
        assert path.read_text().startswith("n1,n2,p")

    def test_output_dir_env(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("MGCP_OUTPUT_DIR", str(tmp_path))
        code, _, _ = run(
            capsys,
            ["pmf", "--model", MODEL, "--box", "1,1", "--output",
             "nested/dir/out.csv"],
        )
        assert code == 0
        assert (tmp_path / "nested" / "dir" / "out.csv").exists()
