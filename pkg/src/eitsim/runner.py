"""Scenario execution and CSV input/output.

Every run produces a ``Table``: a header whose entries carry units in
brackets, and rows of floats, ints or short strings. Floats are written with
9 significant digits so repeated runs give byte-identical files.
"""

from __future__ import annotations

import csv
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, transit
from .errors import ConfigError, EitError, FitError, InvalidDataError
from .lambda_system import eit_width_collisionless
from .medium import (
    Spectrum,
    closed_form_chi,
    eit_width_pumped,
    line_center_transmission,
    simulate_spectrum,
    transmission_from_chi,
    transmission_line_center,
)
from .params import TWO_PI
from .pulse import PulseSpec, delay_bandwidth_product, group_delay_analytic, group_velocity, propagate_pulse
from .scenario import Case, Scenario, omega_grid

log = logging.getLogger(__name__)

FLOAT_FORMAT = "%.9g"
DEFAULT_MODELS = {"spectrum": "full", "width-sweep": "pumped"}


@dataclass
class Table:
    kind: str
    header: list
    rows: list = field(default_factory=list)

    def column(self, name):
        i = self.header.index(name)
        return [r[i] for r in self.rows]


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FORMAT % float(v)
    return str(v)


def write_csv(table: Table, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.header)
        for row in table.rows:
            writer.writerow([_fmt(v) for v in row])


def read_csv(path) -> Table:
    """Read a CSV written by ``write_csv``; lines starting with '#' are skipped."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            lines = list(csv.reader(fh))
    except OSError as exc:
        raise InvalidDataError(f"{path}: cannot read ({exc.strerror})") from exc
    lines = [ln for ln in lines if ln and not ln[0].startswith("#")]
    if not lines:
        raise InvalidDataError(f"{path}: no header row")
    header, body = lines[0], lines[1:]
    rows = []
    for lineno, ln in enumerate(body, start=2):
        if len(ln) != len(header):
            raise InvalidDataError(f"{path}: row {lineno} has {len(ln)} fields, header has {len(header)}")
        row = []
        for v in ln:
            try:
                row.append(float(v))
            except ValueError:
                row.append(v)
        rows.append(row)
    return Table("", header, rows)


def _map(func, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def _check_model(kind, model, allowed):
    if model not in allowed:
        raise ConfigError(f"model '{model}' is not available for kind '{kind}' (use {', '.join(allowed)})")


def _noise(scenario: Scenario):
    if scenario.noise_sigma > 0:
        if scenario.noise_seed is None:
            raise ConfigError("noise requires an explicit seed")
        return np.random.default_rng(scenario.noise_seed)
    return None


# spectrum


def _tag(case, n_cases, intensity, n_int, delta_c):
    parts = []
    if n_cases > 1:
        parts.append(f"case={case.label}")
    if n_int > 1:
        parts.append(f"I={intensity:.6g}W/m^2")
    parts.append(f"Delta={delta_c / (TWO_PI * 1e9):+g}GHz")
    return "T " + " ".join(parts) + " [dimensionless]"


def _spectrum_column(job):
    case, omega_c, delta_c, model = job
    if model == "pumped":
        chi = closed_form_chi(case.raman_detunings, omega_c, case.atom, case.medium)
        return transmission_from_chi(chi, case.medium)
    return simulate_spectrum(case.raman_detunings, delta_c, omega_c, case.atom, case.medium).transmission


def run_spectrum(scenario: Scenario, jobs=1) -> Table:
    model = scenario.model or DEFAULT_MODELS["spectrum"]
    _check_model("spectrum", model, ("full", "pumped"))
    grid = scenario.cases[0].raman_detunings
    for case in scenario.cases[1:]:
        if case.raman_detunings.shape != grid.shape or not np.allclose(case.raman_detunings, grid, rtol=0, atol=0):
            raise ConfigError("all cases of a spectrum must share the same raman_detuning_khz grid")
    header = ["delta_raman [Hz]"]
    work = []
    for case in scenario.cases:
        omegas = omega_grid(case, scenario.calibration)
        for intensity, omega_c in zip(case.intensities, omegas):
            for delta_c in case.coupling_detunings:
                if model == "pumped" and delta_c != 0.0:
                    raise ConfigError("the pumped closed form only describes Delta = 0; use model 'full'")
                header.append(_tag(case, len(scenario.cases), intensity, len(case.intensities), delta_c))
                work.append((case, omega_c, delta_c, model))
    if len(set(header)) != len(header):
        raise ConfigError("spectrum columns are not unique; give each case a distinct label")
    columns = _map(_spectrum_column, work, jobs)
    rng = _noise(scenario)
    if rng is not None:
        columns = [np.clip(c * (1.0 + scenario.noise_sigma * rng.standard_normal(c.size)), 1e-300, None) for c in columns]
    x = grid / TWO_PI
    rows = [[x[i]] + [c[i] for c in columns] for i in range(x.size)]
    return Table("spectrum", header, rows)


# width sweep


def _full_width(job):
    case, omega_c = job
    spec = simulate_spectrum(case.raman_detunings, 0.0, omega_c, case.atom, case.medium)
    return analysis.fit_spectrum(spec).fwhm / TWO_PI


def _auto_raman_grid(case, omega_c, points=121):
    # +-4 expected widths around the dip
    w = eit_width_pumped(omega_c, case.atom, case.medium)
    return np.linspace(-4.0 * w, 4.0 * w, points)


def run_width_sweep(scenario: Scenario, jobs=1) -> Table:
    model = scenario.model or DEFAULT_MODELS["width-sweep"]
    _check_model("width-sweep", model, ("pumped", "collisionless", "full"))
    header = ["case", "beam_diameter [m]", "intensity [W/m^2]", "omega_c [rad/s]", "fwhm_hz [Hz]", "model"]
    if model == "collisionless":
        header += ["regime", "fwhm_low_regime [Hz]", "fwhm_high_regime [Hz]", "omega_inhom [rad/s]"]
    rows = []
    for case in scenario.cases:
        omegas = omega_grid(case, scenario.calibration)
        if model == "full":
            jobs_list = []
            for om in omegas:
                sub = case
                if case.raman_detunings is None:
                    sub = Case(**{**case.__dict__, "raman_detunings": _auto_raman_grid(case, om)})
                jobs_list.append((sub, om))
            widths = _map(_full_width, jobs_list, jobs)
        for k, (intensity, om) in enumerate(zip(case.intensities, omegas)):
            row = [case.label, case.beam_diameter, intensity, om]
            if model == "pumped":
                row += [eit_width_pumped(om, case.atom, case.medium) / TWO_PI, model]
            elif model == "full":
                row += [widths[k], model]
            else:
                cw = eit_width_collisionless(om, case.atom, case.medium.gamma_raman)
                row += [cw.width / TWO_PI, model, cw.regime, cw.low_regime / TWO_PI, cw.high_regime / TWO_PI, cw.omega_inhom]
            rows.append(row)
    rng = _noise(scenario)
    if rng is not None:
        for row in rows:
            row[4] *= 1.0 + scenario.noise_sigma * rng.standard_normal()
    return Table("width-sweep", header, rows)


# transmission sweep


def _line_center(job):
    case, omega_c = job
    return line_center_transmission(omega_c, case.atom, case.medium)


def run_transmission_sweep(scenario: Scenario, jobs=1) -> Table:
    header = ["case", "intensity [W/m^2]", "omega_c [rad/s]", "T_closed_form [dimensionless]", "T_full_model [dimensionless]"]
    rows = []
    for case in scenario.cases:
        omegas = omega_grid(case, scenario.calibration)
        full = _map(_line_center, [(case, om) for om in omegas], jobs)
        for intensity, om, t_full in zip(case.intensities, omegas, full):
            rows.append([case.label, intensity, om, transmission_line_center(om, case.atom, case.medium), t_full])
    return Table("transmission-sweep", header, rows)


# delay sweep


def _numeric_delay(job):
    case, omega_c, pulse = job
    if omega_c == 0.0:
        return 0.0, 1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = propagate_pulse(pulse, omega_c, case.atom, case.medium)
    return res.group_delay, int(res.narrowband)


def run_delay_sweep(scenario: Scenario, jobs=1) -> Table:
    pulse = scenario.pulse or PulseSpec()
    header = [
        "case",
        "intensity [W/m^2]",
        "omega_c [rad/s]",
        "tau_analytic [s]",
        "tau_numeric [s]",
        "v_group_analytic [m/s]",
        "v_group_numeric [m/s]",
        "delay_bandwidth_product [dimensionless]",
        "delay_bandwidth_product_cyclic [dimensionless]",
        "T_line_center [dimensionless]",
        "narrowband",
    ]
    rows = []
    for case in scenario.cases:
        omegas = omega_grid(case, scenario.calibration)
        numeric = _map(_numeric_delay, [(case, om, pulse) for om in omegas], jobs)
        for intensity, om, (tau_num, narrow) in zip(case.intensities, omegas, numeric):
            tau = group_delay_analytic(om, case.atom, case.medium)
            dbp, dbp_cyc = delay_bandwidth_product(tau, om, case.atom, case.medium)
            rows.append(
                [
                    case.label,
                    intensity,
                    om,
                    tau,
                    tau_num,
                    group_velocity(case.medium.length, tau),
                    group_velocity(case.medium.length, tau_num),
                    dbp,
                    dbp_cyc,
                    transmission_line_center(om, case.atom, case.medium),
                    narrow,
                ]
            )
    return Table("delay-sweep", header, rows)


# transit report


def run_transit_report(scenario: Scenario, jobs=1) -> Table:
    header = [
        "diameter [m]",
        "collisions [dimensionless]",
        "tau_diffusive [s]",
        "tau_random_walk [s]",
        "tau_ballistic [s]",
        "gamma_raman [1/s]",
        "gamma_raman_over_2pi [Hz]",
    ]
    tp = scenario.transport
    rows = []
    for case in scenario.cases:
        for d in case.beam_diameters:
            g = transit.gamma_raman_estimate(d, tp, scenario.residual_rate)
            rows.append(
                [
                    d,
                    transit.collision_count(d, tp),
                    transit.diffusive_transit_time(d, tp),
                    transit.random_walk_transit_time(d, tp),
                    transit.ballistic_transit_time(d, tp),
                    g,
                    g / TWO_PI,
                ]
            )
    return Table("transit-report", header, rows)


# fit


SPECTRUM_FIT_HEADER = [
    "column",
    "center [Hz]",
    "fwhm [Hz]",
    "amplitude [dimensionless]",
    "offset [dimensionless]",
    "rms_residual [dimensionless]",
    "converged",
    "asymmetry [dimensionless]",
    "note",
]
REGRESSION_HEADER = [
    "case",
    "points",
    "slope [Hz/(W/m^2)]",
    "intercept [Hz]",
    "gamma_raman [1/s]",
    "gamma_raman_over_2pi [Hz]",
    "r_squared [dimensionless]",
]


def _fit_spectrum_table(table: Table) -> Table:
    x = np.array(table.column("delta_raman [Hz]"), dtype=float)
    rows = []
    t_cols = [h for h in table.header if h.startswith("T ")]
    if not t_cols:
        raise InvalidDataError("spectrum CSV has no transmission columns (header entries starting with 'T ')")
    for name in t_cols:
        t = np.array(table.column(name), dtype=float)
        spec = Spectrum(x, t)
        note = ""
        try:
            fit = analysis.fit_spectrum(spec)
            vals = [fit.center, fit.fwhm, fit.amplitude, fit.offset, fit.rms_residual, fit.converged]
        except (InvalidDataError, FitError) as exc:
            vals = [math.nan] * 5 + [False]
            note = f"fit: {exc}"
        try:
            asym = analysis.asymmetry_metric(spec)
        except InvalidDataError as exc:
            asym = math.nan
            note = (note + "; " if note else "") + f"asymmetry: {exc}"
        rows.append([name] + vals + [asym, note])
    return Table("fit-spectrum", SPECTRUM_FIT_HEADER, rows)


def _fit_width_table(table: Table) -> Table:
    intensity = table.column("intensity [W/m^2]")
    width = table.column("fwhm_hz [Hz]")
    labels = table.column("case") if "case" in table.header else [""] * len(intensity)
    groups = {}
    for lab, i, w in zip(labels, intensity, width):
        groups.setdefault(_fmt(lab), ([], []))
        groups[_fmt(lab)][0].append(i)
        groups[_fmt(lab)][1].append(w)
    rows = []
    for lab, (i, w) in groups.items():
        reg = analysis.width_regression(i, w)
        rows.append([lab, len(i), reg.slope, reg.intercept, reg.gamma_raman_extracted, analysis.gamma_raman_hz(reg), reg.r_squared])
    return Table("fit-regression", REGRESSION_HEADER, rows)


def fit_table(table: Table) -> Table:
    """Reduce an ingested CSV: Lorentzian fits of a spectrum, or a width regression."""
    if "delta_raman [Hz]" in table.header:
        return _fit_spectrum_table(table)
    if "intensity [W/m^2]" in table.header and "fwhm_hz [Hz]" in table.header:
        return _fit_width_table(table)
    raise InvalidDataError(
        "unrecognised CSV: expected a 'delta_raman [Hz]' column (spectrum) or "
        "'intensity [W/m^2]' and 'fwhm_hz [Hz]' columns (width sweep)"
    )


def fit_file(path) -> Table:
    return fit_table(read_csv(path))


def run_fit(scenario: Scenario, jobs=1) -> Table:
    return fit_file(scenario.input_path)


RUNNERS = {
    "spectrum": run_spectrum,
    "width-sweep": run_width_sweep,
    "transmission-sweep": run_transmission_sweep,
    "delay-sweep": run_delay_sweep,
    "transit-report": run_transit_report,
    "fit": run_fit,
}


def run(scenario: Scenario, jobs=1) -> Table:
    """Execute a scenario; numerical failures are re-raised with the scenario source attached."""
    log.info("running %s scenario from %s (%d case(s))", scenario.kind, scenario.source, len(scenario.cases))
    try:
        return RUNNERS[scenario.kind](scenario, jobs)
    except ConfigError as exc:
        raise ConfigError(f"{scenario.source}: {exc}") from exc
    except EitError as exc:
        exc.args = (f"{scenario.source} ({scenario.kind}): {exc.args[0] if exc.args else exc}",) + exc.args[1:]
        raise
