"""Scenario files: JSON in human units, converted once to SI/angular units.

A scenario looks like::

    {
      "schema_version": 1,
      "kind": "delay-sweep",
      "output": "delay_sweep.csv",
      "medium": {"t0": 0.5, "gamma_raman_khz": 3.2},
      "drive": {"coupling_intensity_w_m2": {"start": 1, "stop": 200, "num": 60, "spacing": "log"}},
      "cases": [
        {"label": "1.5 cm", "medium": {"t0": 0.5, "gamma_raman_khz": 3.2}},
        {"label": "0.8 cm", "medium": {"t0": 0.4, "gamma_raman_khz": 5.0}}
      ]
    }

Each entry of ``cases`` overrides the top-level ``atom``, ``medium`` and
``drive`` sections key by key; without ``cases`` a single case is built from
the top level.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .errors import ConfigError, InvalidInputError
from .params import TWO_PI, AtomSpec, MediumSpec, RabiCalibration, beam_intensity
from .pulse import PulseSpec
from .transit import TransportSpec, mean_thermal_speed

SCHEMA_VERSION = 1
KINDS = ("spectrum", "width-sweep", "transmission-sweep", "delay-sweep", "transit-report", "fit")
MODELS = ("pumped", "collisionless", "full")

_number = {"type": "number"}
_positive = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}


def _grid(item):
    return {
        "oneOf": [
            {"type": "array", "items": item, "minItems": 1},
            {
                "type": "object",
                "properties": {
                    "start": item,
                    "stop": item,
                    "num": {"type": "integer", "minimum": 1},
                    "spacing": {"enum": ["linear", "log"]},
                },
                "required": ["start", "stop", "num"],
                "additionalProperties": False,
            },
        ]
    }


_atom_schema = {
    "type": "object",
    "properties": {
        "gamma_opt_per_s": _positive,
        "doppler_hwhm_ghz": _positive,
        "wavelength_nm": _positive,
        "i_sat_mw_per_cm2": _positive,
        "neighbor_offset_ghz": _number,
        "neighbor_strength": _nonneg,
    },
    "additionalProperties": False,
}

_medium_schema = {
    "type": "object",
    "properties": {
        "length_cm": _positive,
        "t0": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "density_per_cm3": _nonneg,
        "temperature_k": _positive,
        "pressure_torr": _nonneg,
        "pump_efficiency": {"type": "number", "minimum": 0, "maximum": 1},
        "gamma_raman_khz": _positive,
        "velocity_profile": {"enum": ["lorentzian", "gaussian"]},
    },
    "additionalProperties": False,
}

_drive_schema = {
    "type": "object",
    "properties": {
        "coupling_power_mw": _grid(_nonneg),
        "coupling_intensity_w_m2": _grid(_nonneg),
        "probe_power_mw": _nonneg,
        "beam_diameter_cm": {"oneOf": [_positive, {"type": "array", "items": _positive, "minItems": 1}]},
        "coupling_detuning_ghz": _grid(_number),
        "raman_detuning_khz": _grid(_number),
    },
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"enum": list(KINDS)},
        "output": {"type": "string", "minLength": 1},
        "input": {"type": "string", "minLength": 1},
        "model": {"enum": list(MODELS)},
        "atom": _atom_schema,
        "medium": _medium_schema,
        "drive": _drive_schema,
        "calibration": {
            "type": "object",
            "properties": {
                "slope_hz_per_w_m2": _positive,
                "kappa": _positive,
                "mode": {"enum": ["slope", "physical"]},
            },
            "additionalProperties": False,
        },
        "pulse": {
            "type": "object",
            "properties": {
                "duration_us": _positive,
                "peak_power_uw": _nonneg,
                "carrier_raman_detuning_khz": _number,
            },
            "additionalProperties": False,
        },
        "transport": {
            "type": "object",
            "properties": {
                "mean_free_path_mm": _positive,
                "diffusion_m2_per_s": _positive,
                "temperature_k": _positive,
                "geometry_factor": _positive,
                "residual_rate_per_s": _nonneg,
            },
            "additionalProperties": False,
        },
        "noise": {
            "type": "object",
            "properties": {"relative_sigma": _nonneg, "seed": {"type": "integer"}},
            "required": ["relative_sigma", "seed"],
            "additionalProperties": False,
        },
        "cases": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "label": {"type": "string"},
                    "atom": _atom_schema,
                    "medium": _medium_schema,
                    "drive": _drive_schema,
                },
                "additionalProperties": False,
            },
        },
    },
    "required": ["schema_version", "kind"],
    "additionalProperties": False,
}


@dataclass
class Case:
    label: str
    atom: AtomSpec
    medium: MediumSpec
    beam_diameters: list  # m
    coupling_powers: list | None  # W
    intensities: list  # W/m^2, one per coupling power when powers are given
    probe_power: float  # W
    coupling_detunings: list  # rad/s
    raman_detunings: np.ndarray | None  # rad/s

    @property
    def beam_diameter(self):
        return self.beam_diameters[0]


@dataclass
class Scenario:
    kind: str
    cases: list
    calibration: RabiCalibration
    model: str | None = None  # None picks the kind default
    output_path: Path | None = None
    input_path: Path | None = None
    pulse: PulseSpec | None = None
    transport: TransportSpec = field(default_factory=TransportSpec)
    residual_rate: float = 0.0
    noise_sigma: float = 0.0
    noise_seed: int | None = None
    source: str = "<config>"


def _path_str(path):
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _expand_grid(spec, scale=1.0):
    if isinstance(spec, list):
        return [float(v) * scale for v in spec]
    num = int(spec["num"])
    start, stop = float(spec["start"]), float(spec["stop"])
    if spec.get("spacing", "linear") == "log":
        if start <= 0 or stop <= 0:
            raise InvalidInputError("log-spaced grids need positive start and stop")
        values = np.geomspace(start, stop, num)
    else:
        values = np.linspace(start, stop, num)
    return [float(v) * scale for v in values]


def _build_atom(d):
    kw = {}
    if "gamma_opt_per_s" in d:
        kw["gamma_opt"] = d["gamma_opt_per_s"]
    if "doppler_hwhm_ghz" in d:
        kw["doppler_hwhm"] = TWO_PI * 1e9 * d["doppler_hwhm_ghz"]
    if "wavelength_nm" in d:
        kw["wavelength"] = 1e-9 * d["wavelength_nm"]
    if "i_sat_mw_per_cm2" in d:
        kw["i_sat"] = 10.0 * d["i_sat_mw_per_cm2"]
    if "neighbor_offset_ghz" in d:
        kw["neighbor_offset"] = TWO_PI * 1e9 * d["neighbor_offset_ghz"]
    if "neighbor_strength" in d:
        kw["neighbor_strength"] = d["neighbor_strength"]
    return AtomSpec(**kw)


def _build_medium(d):
    conv = {
        "length_cm": ("length", 1e-2),
        "t0": ("t0", 1.0),
        "density_per_cm3": ("density", 1e6),
        "temperature_k": ("temperature", 1.0),
        "pressure_torr": ("pressure", 1.0),
        "pump_efficiency": ("pump_efficiency", 1.0),
        "gamma_raman_khz": ("gamma_raman", TWO_PI * 1e3),
    }
    kw = {conv[k][0]: v * conv[k][1] for k, v in d.items() if k in conv}
    if "velocity_profile" in d:
        kw["velocity_profile"] = d["velocity_profile"]
    return MediumSpec(**kw)


def _build_case(label, atom_d, medium_d, drive_d, kind, where):
    atom = _build_atom(atom_d)
    medium = _build_medium(medium_d)

    diam = drive_d.get("beam_diameter_cm", 1.5)
    diameters = [1e-2 * v for v in (diam if isinstance(diam, list) else [diam])]
    if kind != "transit-report" and len(diameters) > 1:
        raise ConfigError(f"{where}.drive.beam_diameter_cm: a list is only allowed for transit-report; use cases")

    powers = None
    if "coupling_power_mw" in drive_d and "coupling_intensity_w_m2" in drive_d:
        raise ConfigError(f"{where}.drive: give coupling_power_mw or coupling_intensity_w_m2, not both")
    if "coupling_power_mw" in drive_d:
        powers = _expand_grid(drive_d["coupling_power_mw"], 1e-3)
        intensities = [beam_intensity(p, diameters[0]) for p in powers]
    elif "coupling_intensity_w_m2" in drive_d:
        intensities = _expand_grid(drive_d["coupling_intensity_w_m2"])
    else:
        intensities = []
    if kind in ("spectrum", "width-sweep", "transmission-sweep", "delay-sweep") and not intensities:
        raise ConfigError(f"{where}.drive: {kind} needs coupling_power_mw or coupling_intensity_w_m2")

    detunings = [TWO_PI * 1e9 * v for v in _expand_grid(drive_d.get("coupling_detuning_ghz", [0.0]))]
    raman = None
    if "raman_detuning_khz" in drive_d:
        raman = np.array(_expand_grid(drive_d["raman_detuning_khz"], TWO_PI * 1e3))
        if raman.size > 1 and not np.all(np.diff(raman) > 0):
            raise ConfigError(f"{where}.drive.raman_detuning_khz: grid must be strictly increasing")
    if kind == "spectrum" and raman is None:
        raise ConfigError(f"{where}.drive: spectrum needs raman_detuning_khz")
    if kind == "spectrum" and raman.size < 5:
        raise ConfigError(f"{where}.drive.raman_detuning_khz: spectrum needs at least 5 detunings")

    return Case(
        label=label,
        atom=atom,
        medium=medium,
        beam_diameters=diameters,
        coupling_powers=powers,
        intensities=intensities,
        probe_power=1e-3 * drive_d.get("probe_power_mw", 0.0),
        coupling_detunings=detunings,
        raman_detunings=raman,
    )


def parse_scenario(data: dict, source="<config>", base_dir: Path | None = None) -> Scenario:
    """Validate a decoded config mapping and convert it to a ``Scenario``."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"{source}: {_path_str(e.absolute_path)}: {e.message}" for e in errors]
        raise ConfigError("\n".join(lines))

    kind = data["kind"]
    if kind == "fit" and "input" not in data:
        raise ConfigError(f"{source}: input: required for kind 'fit'")

    base_dir = base_dir or Path.cwd()

    def resolve(p):
        path = Path(p)
        return path if path.is_absolute() else base_dir / path

    cal_d = data.get("calibration", {})
    try:
        if "kappa" in cal_d:
            calibration = RabiCalibration(cal_d["kappa"])
        elif cal_d.get("mode") == "physical":
            atom0 = _build_atom(data.get("atom", {}))
            calibration = RabiCalibration.physical(i_sat=atom0.i_sat)
        else:
            calibration = RabiCalibration.from_slope(
                _build_atom(data.get("atom", {})), cal_d.get("slope_hz_per_w_m2", 416.0)
            )

        cases = []
        raw_cases = data.get("cases") or [{}]
        for i, c in enumerate(raw_cases):
            where = f"{source}: cases[{i}]" if "cases" in data else source
            merged = {sec: {**data.get(sec, {}), **c.get(sec, {})} for sec in ("atom", "medium", "drive")}
            label = c.get("label", f"case{i}" if len(raw_cases) > 1 else "")
            cases.append(_build_case(label, merged["atom"], merged["medium"], merged["drive"], kind, where))

        pulse = None
        if "pulse" in data:
            p = data["pulse"]
            pulse = PulseSpec(
                duration=1e-6 * p.get("duration_us", 70.0),
                peak_power=1e-6 * p.get("peak_power_uw", 35.0),
                carrier_raman_detuning=TWO_PI * 1e3 * p.get("carrier_raman_detuning_khz", 0.0),
            )

        t = data.get("transport", {})
        temperature = t.get("temperature_k", 300.0)
        transport = TransportSpec(
            mean_free_path=1e-3 * t.get("mean_free_path_mm", 0.1),
            diffusion_constant=t.get("diffusion_m2_per_s", 0.047),
            mean_thermal_speed=mean_thermal_speed(temperature),
            geometry_factor=t.get("geometry_factor", 0.47),
        )
    except InvalidInputError as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    noise = data.get("noise", {})
    return Scenario(
        kind=kind,
        cases=cases,
        calibration=calibration,
        model=data.get("model"),
        output_path=resolve(data["output"]) if "output" in data else None,
        input_path=resolve(data["input"]) if "input" in data else None,
        pulse=pulse,
        transport=transport,
        residual_rate=t.get("residual_rate_per_s", 0.0),
        noise_sigma=noise.get("relative_sigma", 0.0),
        noise_seed=noise.get("seed"),
        source=source,
    )


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file.

    Relative ``output``/``input`` paths are taken relative to the current
    working directory.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return parse_scenario(data, source=str(path))


def omega_grid(case: Case, calibration: RabiCalibration):
    return [math.sqrt(calibration.kappa * i) for i in case.intensities]
