import csv
import json
import re
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import eitsim
from eitsim.cli import EXIT_CONFIG, EXIT_FAILURE, main
from eitsim.errors import ConfigError
from eitsim.runner import read_csv
from eitsim.scenario import load_scenario, parse_scenario

CONFIGS = Path(eitsim.__file__).parent / "configs"
UNITLESS_COLUMNS = {"case", "model", "regime", "column", "note", "narrowband", "converged", "points"}


def _write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return p


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _run(config, out, *extra):
    return main(["run", str(config), "--out", str(out), *extra])


def _check_units(header):
    for name in header:
        if name in UNITLESS_COLUMNS:
            continue
        assert re.search(r"\[[^\]]+\]$", name), f"column without unit: {name}"


@pytest.mark.parametrize("config", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_packaged_configs_validate_run_and_repeat(config, tmp_path, capsys):
    assert main(["validate", str(config)]) == 0
    assert "ok" in capsys.readouterr().out
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert _run(config, a) == 0
    assert _run(config, b) == 0
    assert a.read_bytes() == b.read_bytes()
    _check_units(_rows(a)[0])
    # floats carry at most 9 significant digits
    for row in _rows(a)[1:]:
        for v in row:
            if re.fullmatch(r"-?[\d.]+(e[-+]\d+)?", v):
                assert len(re.sub(r"e.*|[-.]", "", v).lstrip("0")) <= 9


def test_parallel_output_identical(tmp_path):
    cfg = CONFIGS / "line_center_transmission.json"
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert _run(cfg, a) == 0
    assert _run(cfg, b, "--jobs", "2") == 0
    assert a.read_bytes() == b.read_bytes()


def test_width_sweep_fit_round_trip(tmp_path):
    widths, fitted = tmp_path / "w.csv", tmp_path / "fit.csv"
    assert _run(CONFIGS / "width_sweep.json", widths) == 0
    assert main(["fit", str(widths), "--out", str(fitted)]) == 0
    table = read_csv(fitted)
    _check_units(table.header)
    got = dict(zip(table.column("case"), table.column("gamma_raman_over_2pi [Hz]")))
    for label, expected in {"2 cm": 2800, "1.5 cm": 3200, "1 cm": 4300}.items():
        assert got[label] == pytest.approx(expected, rel=0.02)
    assert table.column("slope [Hz/(W/m^2)]") == pytest.approx([416] * 3, rel=1e-6)


def test_delay_curves_peak_at_closed_form_maxima(tmp_path):
    out = tmp_path / "d.csv"
    assert _run(CONFIGS / "delay_sweep.json", out) == 0
    table = read_csv(out)
    for label, tau_max in {"T0=0.5 3.2kHz": 4.31e-6, "T0=0.4 5.0kHz": 3.65e-6}.items():
        tau = [t for c, t in zip(table.column("case"), table.column("tau_analytic [s]")) if c == label]
        assert max(tau) == pytest.approx(tau_max, rel=0.01)
        assert max(tau) <= tau_max * (1 + 1e-3)


def test_detuned_profiles(tmp_path):
    spec, fitted = tmp_path / "s.csv", tmp_path / "f.csv"
    assert _run(CONFIGS / "detuned_spectra.json", spec) == 0
    assert main(["fit", str(spec), "--out", str(fitted)]) == 0
    fits = read_csv(fitted)
    asym = dict(zip(fits.column("column"), fits.column("asymmetry [dimensionless]")))
    for name, value in asym.items():
        if "Delta=+0GHz" in name:
            assert abs(value) < 1e-3
        else:
            assert abs(value) > 0.1, name
    table = read_csv(spec)
    mean_t = {h: np.mean(table.column(h)) for h in table.header[1:]}
    assert min(mean_t, key=mean_t.get) == "T Delta=-2.2GHz [dimensionless]"


def test_plot_flag_writes_png(tmp_path):
    out = tmp_path / "t.csv"
    assert _run(CONFIGS / "transit_report.json", out, "--plot") == 0
    png = out.with_suffix(".png")
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert main(["fit", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "x.csv")]) == EXIT_FAILURE


def test_noise_requires_seed_and_is_reproducible(tmp_path):
    base = json.loads((CONFIGS / "width_sweep.json").read_text())
    base.pop("output")
    p = _write(tmp_path, {**base, "noise": {"relative_sigma": 0.01}})
    assert main(["validate", str(p)]) == EXIT_CONFIG
    outs = []
    for seed in (1, 1, 2):
        p = _write(tmp_path, {**base, "noise": {"relative_sigma": 0.01, "seed": seed}})
        out = tmp_path / f"n{len(outs)}.csv"
        assert _run(p, out) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] != outs[2]


@pytest.mark.parametrize(
    "data, fragment",
    [
        ({"schema_version": 1, "kind": "width-sweep", "drive": {"coupling_intensity_w_m2": []}}, "drive.coupling_intensity_w_m2"),
        ({"schema_version": 1, "kind": "width-sweep", "drive": {"coupling_intensity_w_m2": {"start": 1, "stop": 2, "num": 0}}}, "drive.coupling_intensity_w_m2"),
        ({"schema_version": 2, "kind": "spectrum"}, "schema_version"),
        ({"schema_version": 1, "kind": "nope"}, "kind"),
        ({"schema_version": 1, "kind": "spectrum", "medium": {"t0": 1.5}}, "medium.t0"),
        ({"schema_version": 1, "kind": "spectrum", "medium": {"colour": 1}}, "medium"),
        ({"schema_version": 1, "kind": "spectrum", "drive": {"coupling_power_mw": [1]}}, "raman_detuning_khz"),
        ({"schema_version": 1, "kind": "delay-sweep"}, "coupling_power_mw"),
        ({"schema_version": 1, "kind": "fit"}, "input"),
        (
            {"schema_version": 1, "kind": "width-sweep", "drive": {"coupling_power_mw": [1], "coupling_intensity_w_m2": [1]}},
            "not both",
        ),
        (
            {"schema_version": 1, "kind": "width-sweep", "drive": {"coupling_intensity_w_m2": {"start": 0, "stop": 2, "num": 3, "spacing": "log"}}},
            "log-spaced",
        ),
        (
            {"schema_version": 1, "kind": "width-sweep", "drive": {"coupling_intensity_w_m2": [1], "beam_diameter_cm": [1, 2]}},
            "beam_diameter_cm",
        ),
    ],
)
def test_config_errors(tmp_path, capsys, data, fragment):
    p = _write(tmp_path, data)
    assert main(["validate", str(p)]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert fragment in err
    assert str(p) in err
    assert main(["run", str(p), "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG


def test_json_syntax_error_reports_line(tmp_path, capsys):
    p = _write(tmp_path, '{\n  "schema_version": 1,\n  "kind": "spectrum",,\n}')
    assert main(["validate", str(p)]) == EXIT_CONFIG
    assert "line 3" in capsys.readouterr().err


def test_numerical_error_carries_scenario_context(tmp_path, capsys):
    p = _write(
        tmp_path,
        {"schema_version": 1, "kind": "width-sweep", "model": "collisionless", "drive": {"coupling_intensity_w_m2": [0, 10]}},
    )
    assert main(["run", str(p), "--out", str(tmp_path / "x.csv")]) == EXIT_FAILURE
    err = capsys.readouterr().err
    assert str(p) in err and "omega_c" in err


def test_model_not_available_for_kind(tmp_path):
    p = _write(
        tmp_path,
        {"schema_version": 1, "kind": "spectrum", "model": "collisionless",
         "drive": {"coupling_intensity_w_m2": [10], "raman_detuning_khz": {"start": -50, "stop": 50, "num": 11}}},
    )
    assert main(["run", str(p), "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG


def test_missing_output_path(tmp_path):
    p = _write(tmp_path, {"schema_version": 1, "kind": "transit-report"})
    assert main(["run", str(p)]) == EXIT_CONFIG


def test_unrecognised_csv(tmp_path):
    p = tmp_path / "junk.csv"
    p.write_text("a,b\n1,2\n")
    assert main(["fit", str(p), "--out", str(tmp_path / "o.csv")]) == EXIT_FAILURE


def test_collisionless_and_full_width_models(tmp_path):
    for model in ("collisionless", "full"):
        p = _write(
            tmp_path,
            {"schema_version": 1, "kind": "width-sweep", "model": model, "drive": {"coupling_intensity_w_m2": [10, 50, 100]}},
        )
        out = tmp_path / f"{model}.csv"
        assert _run(p, out) == 0
        table = read_csv(out)
        assert set(table.column("model")) == {model}
        fwhm = np.array(table.column("fwhm_hz [Hz]"))
        if model == "full":
            assert np.all(np.isfinite(fwhm))
        else:
            # no width between the regimes, only the two limits
            inter = np.array(table.column("regime")) == "intermediate"
            assert np.all(np.isnan(fwhm[inter])) and np.all(np.isfinite(fwhm[~inter]))
            assert np.all(np.isfinite(table.column("fwhm_low_regime [Hz]")))


def test_scenario_units_and_overrides():
    sc = parse_scenario(
        {
            "schema_version": 1,
            "kind": "spectrum",
            "atom": {"doppler_hwhm_ghz": 0.85, "i_sat_mw_per_cm2": 0.16},
            "medium": {"length_cm": 2.5, "gamma_raman_khz": 3.2},
            "drive": {
                "coupling_power_mw": [2.1],
                "beam_diameter_cm": 1.5,
                "coupling_detuning_ghz": [1.0],
                "raman_detuning_khz": {"start": -10, "stop": 10, "num": 5},
            },
            "pulse": {"duration_us": 70, "peak_power_uw": 35},
            "cases": [{"label": "a"}, {"label": "b", "medium": {"t0": 0.4}}],
        }
    )
    a, b = sc.cases
    assert a.atom.doppler_hwhm == pytest.approx(2 * np.pi * 0.85e9)
    assert a.atom.i_sat == pytest.approx(1.6)
    assert a.medium.length == pytest.approx(0.025)
    assert a.medium.gamma_raman == pytest.approx(2 * np.pi * 3200)
    assert a.intensities[0] == pytest.approx(11.88, abs=0.01)
    assert a.coupling_detunings == [pytest.approx(2 * np.pi * 1e9)]
    assert a.raman_detunings[0] == pytest.approx(-2 * np.pi * 1e4)
    assert sc.pulse.duration == pytest.approx(70e-6)
    assert b.medium.t0 == 0.4 and b.medium.gamma_raman == a.medium.gamma_raman
    with pytest.raises(ConfigError):
        load_scenario("/nonexistent/cfg.json")


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "eitsim", "validate", str(CONFIGS / "transit_report.json")], capture_output=True, text=True)
    assert r.returncode == 0 and "ok" in r.stdout
