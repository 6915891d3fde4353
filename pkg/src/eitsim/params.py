"""Physical constants, parameter containers and the intensity to Rabi calibration.

All rates are stored as angular quantities (rad/s or 1/s). The Rabi frequency
is the full angular frequency of the Rabi oscillation, twice the value used
in the usual half-Rabi convention. Conversions to Hz, GHz, mW or cm happen
only when reading configs or writing CSV (see ``eitsim.scenario``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import InvalidInputError

TWO_PI = 2.0 * math.pi

# Metastable 4He, 2^3S_1 -> 2^3P_1 at 1083 nm, cell filled with 1 Torr of He.
HE_GAMMA_OPT = 1.4e8  # optical coherence decay at 1 Torr, 1/s
HE_DOPPLER_HWHM = TWO_PI * 0.85e9  # rad/s
HE_WAVELENGTH = 1.083e-6  # m
HE_I_SAT = 1.6  # 0.16 mW/cm^2 in W/m^2
HE_NEIGHBOR_OFFSET = -TWO_PI * 2.29e9  # 3P2 sits below 3P1
# J=1 -> J=2 vs J=1 -> J=1 degeneracy-weighted line strength ratio
HE_NEIGHBOR_STRENGTH = 5.0 / 3.0
HE_NATURAL_LINEWIDTH = TWO_PI * 1.6e6  # spontaneous decay rate of 2^3P, 1/s
HE_MASS_U = 4.002602

# Theoretical width-vs-intensity slope used to calibrate Omega_C(I).
REFERENCE_SLOPE_HZ_PER_W_M2 = 416.0

MEASURED_PUMP_EFFICIENCY = 0.8

VELOCITY_PROFILES = ("lorentzian", "gaussian")


def hz_to_angular(f):
    return TWO_PI * f


def angular_to_hz(w):
    return w / TWO_PI


def _require_positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise InvalidInputError(f"{name} must be positive and finite, got {value!r}")


def _require_nonnegative(name, value):
    if not (value >= 0 and math.isfinite(value)):
        raise InvalidInputError(f"{name} must be non-negative and finite, got {value!r}")


@dataclass(frozen=True)
class AtomSpec:
    """Constants of the Lambda transition and its neighbouring line.

    ``neighbor_offset`` is the optical frequency of the neighbouring
    transition relative to the driven one (rad/s). Setting
    ``neighbor_strength`` to zero removes the neighbouring line.
    """

    gamma_opt: float = HE_GAMMA_OPT
    doppler_hwhm: float = HE_DOPPLER_HWHM
    wavelength: float = HE_WAVELENGTH
    i_sat: float = HE_I_SAT
    neighbor_offset: float = HE_NEIGHBOR_OFFSET
    neighbor_strength: float = HE_NEIGHBOR_STRENGTH

    def __post_init__(self):
        _require_positive("gamma_opt", self.gamma_opt)
        _require_positive("doppler_hwhm", self.doppler_hwhm)
        _require_positive("wavelength", self.wavelength)
        _require_positive("i_sat", self.i_sat)
        _require_nonnegative("neighbor_strength", self.neighbor_strength)
        if not math.isfinite(self.neighbor_offset):
            raise InvalidInputError("neighbor_offset must be finite")

    @property
    def doppler_sigma(self):
        """Standard deviation of the Gaussian Doppler profile, rad/s."""
        return self.doppler_hwhm / math.sqrt(2.0 * math.log(2.0))

    def without_neighbor(self) -> AtomSpec:
        return replace(self, neighbor_strength=0.0)


@dataclass(frozen=True)
class MediumSpec:
    """Vapor cell description.

    ``t0`` is the line-centre transmission with no coupling light and sets the
    optical depth ``-ln(t0)``. ``velocity_profile`` selects the kernel used
    when averaging over atomic velocities: ``"lorentzian"`` (HWHM equal to
    the Doppler HWHM, the kernel under which the closed-form width,
    transmission and delay expressions are exact) or ``"gaussian"``
    (Maxwell-Boltzmann).
    """

    length: float = 0.025
    t0: float = 0.5
    density: float = 3.5e16
    temperature: float = 300.0
    pressure: float = 1.0
    pump_efficiency: float = 1.0
    gamma_raman: float = TWO_PI * 3.2e3
    velocity_profile: str = "lorentzian"

    def __post_init__(self):
        _require_positive("length", self.length)
        if not (0.0 < self.t0 < 1.0):
            raise InvalidInputError(f"t0 must lie in (0, 1), got {self.t0!r}")
        _require_nonnegative("density", self.density)
        _require_positive("temperature", self.temperature)
        _require_nonnegative("pressure", self.pressure)
        if not (0.0 <= self.pump_efficiency <= 1.0):
            raise InvalidInputError(
                f"pump_efficiency must lie in [0, 1], got {self.pump_efficiency!r}"
            )
        _require_positive("gamma_raman", self.gamma_raman)
        if self.velocity_profile not in VELOCITY_PROFILES:
            raise InvalidInputError(
                f"velocity_profile must be one of {VELOCITY_PROFILES}, "
                f"got {self.velocity_profile!r}"
            )

    @property
    def optical_depth(self):
        """Line-centre intensity absorbance ``-ln(t0)``."""
        return -math.log(self.t0)


def _slope_kappa(atom, slope):
    return slope * TWO_PI * (2.0 * atom.doppler_hwhm + atom.gamma_opt)


DEFAULT_KAPPA = _slope_kappa(AtomSpec(), REFERENCE_SLOPE_HZ_PER_W_M2)


@dataclass(frozen=True)
class RabiCalibration:
    """Linear map between intensity and squared Rabi frequency.

    ``kappa`` is Omega_C**2 / I in (rad/s)**2 per W/m**2. The default (also
    selected by passing 0) reproduces the 416 Hz/(W/m^2) width slope for the
    helium constants.
    """

    kappa: float = 0.0

    def __post_init__(self):
        if self.kappa == 0.0:
            object.__setattr__(self, "kappa", DEFAULT_KAPPA)
        _require_positive("kappa", self.kappa)

    @classmethod
    def from_slope(cls, atom: AtomSpec | None = None, slope_hz_per_w_m2=REFERENCE_SLOPE_HZ_PER_W_M2):
        """Calibrate so the pumped-medium EIT width grows by ``slope`` Hz per W/m^2.

        Inverts Gamma_EIT = 2 Gamma_R + Omega_C^2 / (2 W_D + Gamma) for the
        given atomic constants.
        """
        atom = atom or AtomSpec()
        _require_positive("slope_hz_per_w_m2", slope_hz_per_w_m2)
        return cls(_slope_kappa(atom, slope_hz_per_w_m2))

    @classmethod
    def physical(cls, i_sat=HE_I_SAT, natural_linewidth=HE_NATURAL_LINEWIDTH):
        """Dipole calibration Omega^2 = Gamma_sp^2 I / (2 I_sat).

        Independent of the width measurements; useful as a sanity check of
        the slope calibration. Whether the optical pumping efficiency should
        enter here is not known, so it is left out.
        """
        _require_positive("i_sat", i_sat)
        _require_positive("natural_linewidth", natural_linewidth)
        return cls(natural_linewidth**2 / (2.0 * i_sat))

    def slope_hz_per_w_m2(self, atom: AtomSpec) -> float:
        """Width slope d(Gamma_EIT / 2pi)/dI implied by this calibration."""
        return self.kappa / (TWO_PI * (2.0 * atom.doppler_hwhm + atom.gamma_opt))


@dataclass(frozen=True)
class DriveSpec:
    """Coupling/probe beams.

    Powers in W, beam diameter in m at 1/e^2 of the peak intensity,
    detunings in rad/s. ``delta_coupling`` is measured from the centre of
    the Doppler profile.
    """

    coupling_power: float = 0.0
    probe_power: float = 0.0
    beam_diameter: float = 0.015
    delta_raman: float = 0.0
    delta_coupling: float = 0.0

    def __post_init__(self):
        _require_nonnegative("coupling_power", self.coupling_power)
        _require_nonnegative("probe_power", self.probe_power)
        _require_positive("beam_diameter", self.beam_diameter)

    @property
    def coupling_intensity(self):
        return average_intensity(self)

    def omega_c(self, cal: RabiCalibration | None = None) -> float:
        return rabi_from_intensity(self.coupling_intensity, cal or RabiCalibration())

    def omega_p(self, cal: RabiCalibration | None = None) -> float:
        intensity = beam_intensity(self.probe_power, self.beam_diameter)
        return rabi_from_intensity(intensity, cal or RabiCalibration())


def beam_intensity(power, beam_diameter):
    """Intensity-weighted mean intensity P / (pi w^2) of a Gaussian beam."""
    if not beam_diameter > 0:
        raise InvalidInputError(f"beam_diameter must be positive, got {beam_diameter!r}")
    _require_nonnegative("power", power)
    waist = beam_diameter / 2.0
    return power / (math.pi * waist**2)


def average_intensity(drive: DriveSpec) -> float:
    """Coupling intensity averaged over the Gaussian profile, W/m^2.

    Equals half the peak intensity, with ``w`` the 1/e^2 radius.
    """
    return beam_intensity(drive.coupling_power, drive.beam_diameter)


def rabi_from_intensity(intensity, cal: RabiCalibration | None = None) -> float:
    """Full angular Rabi frequency sqrt(kappa * I), rad/s."""
    cal = cal or RabiCalibration()
    if not (intensity >= 0 and math.isfinite(intensity)):
        raise InvalidInputError(f"intensity must be non-negative, got {intensity!r}")
    return math.sqrt(cal.kappa * intensity)


def intensity_from_rabi(omega_c, cal: RabiCalibration | None = None) -> float:
    cal = cal or RabiCalibration()
    _require_nonnegative("omega_c", omega_c)
    return omega_c**2 / cal.kappa


def omega_inhom(atom: AtomSpec, gamma_raman) -> float:
    """Coupling Rabi frequency separating the two collisionless width regimes.

    Omega_inhom = 2 sqrt(2 Gamma_R / Gamma) W_D.
    """
    _require_positive("gamma_raman", gamma_raman)
    _require_positive("gamma_opt", atom.gamma_opt)
    _require_positive("doppler_hwhm", atom.doppler_hwhm)
    return 2.0 * math.sqrt(2.0 * gamma_raman / atom.gamma_opt) * atom.doppler_hwhm
