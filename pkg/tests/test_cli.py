import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from algebraic_damping.analysis import fit_decay_exponent
from algebraic_damping.cli import EXIT_CONFIG, EXIT_DOMAIN, EXIT_OK, main, parse_observable
from algebraic_damping.errors import ConfigError
from algebraic_damping.evolve import TimeSeries
from algebraic_damping.fields import Mode, Parity
from algebraic_damping.serialization import write_series

REPO_ROOT = Path(__file__).resolve().parents[1]


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def write_csv(path, func, n=400):
    t = 1.0 + np.arange(n)
    write_series(TimeSeries(1.0, 1.0, func(t)), path)
    return str(path)


def test_parse_observable():
    assert parse_observable("a3").label == "A3"
    observable = parse_observable("sin:2,-1")
    assert observable.n == Mode(2, -1)
    assert observable.parity is Parity.SIN
    with pytest.raises(ConfigError):
        parse_observable("tan:1,1")
    with pytest.raises(ConfigError):
        parse_observable("A7")


def test_models(capsys):
    code, payload = run_json(capsys, ["models"])
    assert code == EXIT_OK
    assert "isochrone" in payload["models"]
    assert "toy-factorized" in payload["perturbations"]


def test_schema(capsys):
    code, payload = run_json(capsys, ["schema"])
    assert code == EXIT_OK
    assert "quadrature" in payload["properties"]


def test_analyze_composite(capsys):
    code, payload = run_json(capsys, ["analyze", "--model", "composite-toy", "--mode", "1,1", "--bins", "256"])
    assert code == EXIT_OK
    report = payload["modes"][0]
    assert report["mode"] == "1,1"
    assert report["predictions"]["cos"]["label"] == "2(C)"
    assert report["predictions"]["sin"]["label"] == "1"
    assert any(s["singularity"]["kind"] == "line" for s in report["singularities"])


def test_analyze_isochrone_mode_outside_configured_perturbation(capsys):
    code, payload = run_json(capsys, ["analyze", "--model", "isochrone", "--mode", "2,-1", "--bins", "256"])
    assert code == EXIT_OK
    assert payload["perturbation"]["n2"] == 1
    report = payload["modes"][0]
    assert (report["perturbation"]["n2"], report["perturbation"]["n3"]) == (2, 1)
    entries = {s["singularity"]["kind"]: s for s in report["singularities"]}
    assert set(entries) == {"infinity", "line", "tangent", "vertex"}
    assert entries["vertex"]["singularity"]["line_adjacent"]
    assert entries["vertex"]["law"] is None
    assert entries["tangent"]["law"]["omega0"] == pytest.approx(0.1185, abs=5e-4)
    assert entries["infinity"]["law"]["power"] == pytest.approx(2.0 / 3.0)
    assert report["predictions"]["sin"]["power"] == pytest.approx(2.0 / 3.0)


def test_analyze_rejects_zero_mode(capsys):
    code, payload = run_json(capsys, ["analyze", "--mode", "0,0", "--bins", "256"])
    assert code == EXIT_CONFIG
    assert payload["kind"] == "config"


def test_invalid_bins_is_config_error(capsys):
    code, payload = run_json(capsys, ["analyze", "--bins", "100"])
    assert code == EXIT_CONFIG
    assert "bins" in payload["error"]


def test_evolve_unsupported_mode_is_domain_error(capsys, tmp_path):
    code, payload = run_json(capsys, ["evolve", "--model", "vertex-toy", "--observable", "cos:2,1",
                                      "--bins", "256", "--n-samples", "4", "--out", str(tmp_path / "x.csv")])
    assert code == EXIT_DOMAIN
    assert payload["error"]


def test_fit_missing_file(capsys, tmp_path):
    code, payload = run_json(capsys, ["fit", str(tmp_path / "missing.csv")])
    assert code == EXIT_CONFIG
    assert "not found" in payload["error"]


def test_fit_series_file(capsys, tmp_path):
    def decay(t):
        return t ** -2.0 * (1.0 + 0.1 / t)

    path = write_csv(tmp_path / "decay.csv", decay)
    code, payload = run_json(capsys, ["fit", path, "--window", "10", "400"])
    assert code == EXIT_OK
    assert payload["exponent"] == pytest.approx(-2.0, abs=0.01)
    # the file round trip must not perturb the fit
    in_process = fit_decay_exponent(TimeSeries(1.0, 1.0, decay(1.0 + np.arange(400))), (10.0, 400.0))
    assert payload["exponent"] == in_process.exponent


def test_reproduce_report_is_deterministic(capsys):
    argv = ["reproduce", "isochrone-table7", "--bins", "256", "--seed", "7"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_spectrum_series_file(capsys, tmp_path):
    path = write_csv(tmp_path / "wave.csv", lambda t: np.cos(0.3 * t), n=1024)
    csv_path = tmp_path / "spectrum.csv"
    code, payload = run_json(capsys, ["spectrum", path, "--csv", str(csv_path)])
    assert code == EXIT_OK
    assert payload["peaks"][0]["frequency"] == pytest.approx(0.3, abs=payload["resolution"])
    assert csv_path.read_text().startswith("frequency,power\n")


def test_reproduce_analysis_only(capsys):
    code, payload = run_json(capsys, ["--threads", "2", "reproduce", "table6", "--bins", "256"])
    assert code == EXIT_OK
    assert payload["passed"]


def test_reproduce_unknown_case():
    with pytest.raises(SystemExit):
        main(["reproduce", "table9"])


def test_module_entry_point_evolves(tmp_path):
    out = tmp_path / "a1.csv"
    result = subprocess.run(
        [sys.executable, "-m", "algebraic_damping", "evolve", "--model", "vertex-toy", "--observable", "A1",
         "--bins", "256", "--t0", "0", "--dt", "1", "--n-samples", "5", "--out", str(out)],
        cwd=REPO_ROOT, capture_output=True, text=True, timeout=300,
    )
    assert result.returncode == 0, result.stderr
    lines = out.read_text().splitlines()
    assert lines[0] == "t,value"
    assert len(lines) == 6
    t0, value = (float(x) for x in lines[1].split(","))
    assert t0 == 0.0
    assert value == pytest.approx(math.pi ** 3 / 2, rel=1e-3)
