import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from oracles import LN2, awgn_se_mp
from wideband_tradeoff.cli import (
    CURVE_HEADER,
    RunConfig,
    channel_from_mapping,
    format_number,
    main,
)
from wideband_tradeoff import ChannelModel

DATA = Path(__file__).parent / "data"
GOLDEN_CURVE = DATA / "curve_awgn_gain1_10db_200.csv"
GOLDEN_VALIDATE = DATA / "validate_awgn_gain1.csv"


def run(args, capsys):
    status = main(args)
    out, err = capsys.readouterr()
    return status, out, err


def write_table(path, snr_max=100.0, n=90, declared=False):
    snrs = np.concatenate([[0.0], np.geomspace(1e-4, snr_max, n)])
    pts = ", ".join(f"[{float(s)!r}, {math.log2(1 + s)!r}]" for s in snrs)
    text = f'kind = "tabulated"\npoints = [{pts}]\n'
    if declared:
        text += f"c1_prime = {1 / LN2!r}\nc2_double_prime = {-1 / LN2!r}\n"
    path.write_text(text)
    return path


@pytest.mark.parametrize(
    "x, text",
    [
        (0.0, "0"),
        (-0.0, "0"),
        (1.0, "1"),
        (-1.59174538955, "-1.59174538955"),
        (1e-4, "0.0001"),
        (9.99e-5, "9.99000000000e-05"),
        (1.0 / 3.0, "0.333333333333"),
        (1e7, "1.00000000000e+07"),
        (9999999.0, "9999999"),
    ],
)
def test_format_number(x, text):
    assert format_number(x) == text


def test_analyze_awgn(capsys):
    status, out, _ = run(["analyze", "--channel", "awgn", "--gain", "1"], capsys)
    assert status == 0
    summary = json.loads(out)
    assert set(summary) == {
        "c1_prime", "c2_double_prime", "ebn0_min_linear", "gamma_min_db", "slope_linear", "slope_db",
    }
    assert summary["gamma_min_db"] == pytest.approx(-1.591745, abs=1e-6)
    assert summary["slope_db"] == pytest.approx(0.664386, abs=1e-6)


def test_analyze_gain2(capsys):
    status, out, _ = run(["analyze", "--channel", "awgn", "--gain", "2"], capsys)
    assert status == 0
    assert json.loads(out)["gamma_min_db"] == pytest.approx(10 * math.log10(LN2 / 2), abs=1e-10)


def test_analyze_invalid_tabulated(tmp_path, capsys):
    spec = tmp_path / "line.toml"
    spec.write_text('kind = "tabulated"\npoints = [[0, 0], [1, 1], [2, 2], [3, 3]]\n')
    status, out, err = run(["analyze", "--spec", str(spec)], capsys)
    assert status == 2
    assert out == ""
    assert "invalid channel" in err


def test_estimated_derivatives_warn(tmp_path, capsys):
    status, _, err = run(["analyze", "--spec", str(write_table(tmp_path / "t.toml"))], capsys)
    assert status == 0
    assert "warning" in err and "finite differences" in err


def test_declared_derivatives_do_not_warn(tmp_path, capsys):
    spec = write_table(tmp_path / "t.toml", declared=True)
    status, out, err = run(["analyze", "--spec", str(spec)], capsys)
    assert status == 0 and "warning" not in err
    assert json.loads(out)["c1_prime"] == pytest.approx(1 / LN2, rel=1e-11)


def test_curve_rows(capsys):
    status, out, _ = run(["curve", "--channel", "awgn", "--gain", "1"], capsys)
    assert status == 0
    rows = list(csv.reader(out.splitlines()))
    assert tuple(rows[0]) == CURVE_HEADER
    data = [[float(v) for v in row] for row in rows[1:]]
    assert len(data) == 201
    assert data[-1][2] == pytest.approx(5.215271, abs=1e-6)
    first = dict(zip(CURVE_HEADER, data[1]))
    assert all(v >= 0 for k, v in first.items() if k != "gamma_db")
    assert first["se_c2"] <= first["se_true"] <= first["se_c1_eps"]


def test_curve_output_bytes(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["curve", "-o", str(a)]) == 0
    assert main(["curve", "-o", str(b)]) == 0
    raw = a.read_bytes()
    assert raw == b.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    assert not any(line.endswith(b",") for line in raw.splitlines())
    raw.decode("utf-8")


def test_curve_matches_golden(tmp_path):
    out = tmp_path / "curve.csv"
    assert main(["curve", "--channel", "awgn", "--gain", "1", "--max-db", "10",
                 "--n-points", "200", "-o", str(out)]) == 0
    assert out.read_bytes() == GOLDEN_CURVE.read_bytes()


def test_golden_curve_agrees_with_oracle():
    with open(GOLDEN_CURVE, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows[::20]:
        ebn0 = float(row["ebn0_linear"])
        expected = 0.0 if float(row["se_true"]) == 0 else float(awgn_se_mp(ebn0))
        # ebn0 is stored to 12 digits, which perturbs the oracle input slightly
        assert float(row["se_true"]) == pytest.approx(expected, rel=1e-10, abs=1e-15)


def test_curve_json(capsys):
    status, out, _ = run(["curve", "--n-points", "5", "--format", "json"], capsys)
    assert status == 0
    payload = json.loads(out)
    assert payload["columns"] == list(CURVE_HEADER)
    assert len(payload["rows"]) == 6
    assert payload["rows"][0]["se_true"] == 0


def test_validate_default_awgn(tmp_path, capsys):
    out = tmp_path / "report.csv"
    status, _, err = run(["validate", "-o", str(out)], capsys)
    assert status == 0
    assert out.read_bytes() == GOLDEN_VALIDATE.read_bytes()
    rows = {r["check_name"]: r for r in csv.DictReader(out.open())}
    for name in ("lower_bound", "sandwich", "slope_equality"):
        assert rows[name]["passed"] == "true" and rows[name]["required"] == "true"
    assert rows["convexity"]["required"] == "false"
    assert "note convexity" in err


def test_validate_json(capsys):
    status, out, _ = run(["validate", "--format", "json", "--n-points", "50"], capsys)
    assert status == 0
    payload = json.loads(out)
    assert payload["passed"] is True
    sandwich = next(c for c in payload["checks"] if c["check_name"] == "sandwich")
    assert sandwich["details"]["prefix_points"] == 51


def test_validate_negative_epsilon(capsys):
    status, out, err = run(["validate", "--epsilon", "-0.7"], capsys)
    assert status == 2 and out == "" and "epsilon" in err


def test_validate_tabulated(tmp_path, capsys):
    status, out, err = run(["validate", "--spec", str(write_table(tmp_path / "t.toml"))], capsys)
    assert status == 0
    rows = {r["check_name"]: r for r in csv.DictReader(out.splitlines())}
    for name in ("lower_bound", "sandwich", "slope_equality"):
        assert rows[name]["passed"] == "true"
    assert float(rows["lower_bound"]["tolerance"]) == 1e-4


def test_validate_zero_tolerance_awgn(capsys):
    status, _, _ = run(["validate", "--tol", "0"], capsys)
    assert status == 0


def test_validate_fails_on_inconsistent_declared_derivatives(tmp_path, capsys):
    spec = write_table(tmp_path / "t.toml")
    spec.write_text(spec.read_text() + f"c1_prime = {1 / LN2!r}\nc2_double_prime = -0.2\n")
    status, _, err = run(["validate", "--spec", str(spec)], capsys)
    assert status == 1
    assert "FAIL" in err


def test_tabulated_beyond_table_is_runtime_failure(tmp_path, capsys):
    spec = write_table(tmp_path / "t.toml", snr_max=10.0, n=63)
    status, out, err = run(["curve", "--spec", str(spec)], capsys)
    assert status == 1 and out == "" and "not reached" in err


@pytest.mark.parametrize(
    "mapping",
    [
        {"kind": "awgn", "gain": 1.0, "colour": "red"},
        {"kind": "awgn", "points": []},
        {"kind": "fading"},
        {"kind": "awgn", "gain": "one"},
        {"kind": "tabulated", "points": [[0, 0], [1, 1], [2, 1.5]], "c1_prime": 1.0},
        {"kind": "tabulated", "gain": 1.0, "points": [[0, 0], [1, 1], [2, 1.5]]},
    ],
)
def test_spec_schema_rejects(mapping):
    from wideband_tradeoff.cli import ConfigError

    with pytest.raises(ConfigError):
        channel_from_mapping(mapping)


def test_spec_file_awgn(tmp_path, capsys):
    spec = tmp_path / "awgn.toml"
    spec.write_text('kind = "awgn"\ngain = 2.0\n')
    status, out, _ = run(["analyze", "--spec", str(spec)], capsys)
    assert status == 0
    assert json.loads(out)["c1_prime"] == pytest.approx(2 / LN2)


@pytest.mark.parametrize("bad", ["not toml [", None])
def test_spec_file_errors(tmp_path, capsys, bad):
    spec = tmp_path / "bad.toml"
    if bad is not None:
        spec.write_text(bad)
    status, _, err = run(["analyze", "--spec", str(spec)], capsys)
    assert status == 2 and "error" in err


def test_run_config_defaults():
    cfg = RunConfig(command="curve", channel=ChannelModel.awgn(1.0))
    assert (cfg.gamma_offset_max_db, cfg.n_points, cfg.epsilon) == (10.0, 200, 0.01)


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["curve", "--n-points"])
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "wideband_tradeoff", "analyze", "--format", "csv"],
        capture_output=True, text=True, check=True,
    )
    assert proc.stdout.startswith("quantity,value\n")
