"""Velocity-averaged response of an optically pumped Doppler-broadened medium.

Every velocity class is assumed to be pumped (velocity-changing collisions
spread the orientation over the whole Doppler profile). A fraction
``pump_efficiency`` of each class contributes the Lambda (EIT) response,
the rest behaves as a bare absorbing two-level transition. The neighbouring
transition adds a second Doppler-broadened absorption line with no EIT.

Co-propagating probe and coupling beams see the same Doppler shift ``x``,
so the Raman detuning is Doppler free and the one-photon probe detuning of a
class is ``Delta + delta + x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad_vec

from .errors import FitError, InvalidDataError, InvalidInputError, NumericalError
from .lambda_system import lambda_response, two_level_response
from .params import AtomSpec, MediumSpec

QUAD_EPSREL = 1e-6
# Gaussian kernel is integrated over |x| <= GAUSS_CUTOFF * sqrt(2) sigma.
GAUSS_CUTOFF = 9.0
MAX_MOVING_BREAKPOINTS = 16


@dataclass
class Spectrum:
    """Probe response sampled against Raman detuning (rad/s).

    ``chi`` is the normalised susceptibility (absorbance = -ln(t0) Im chi)
    and may be ``None`` for spectra read from files.
    """

    raman_detunings: np.ndarray
    transmission: np.ndarray
    chi: np.ndarray | None = None
    delta_coupling: float = 0.0
    label: str = ""

    def __post_init__(self):
        self.raman_detunings = np.asarray(self.raman_detunings, dtype=float)
        self.transmission = np.asarray(self.transmission, dtype=float)
        if self.chi is not None:
            self.chi = np.asarray(self.chi, dtype=complex)
        n = self.raman_detunings.size
        if self.transmission.shape != (n,) or (self.chi is not None and self.chi.shape != (n,)):
            raise InvalidDataError("spectrum arrays must be one-dimensional and of equal length")
        steps = np.diff(self.raman_detunings)
        if n > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
            raise InvalidDataError("raman_detunings must be strictly monotone")

    def mirrored(self) -> Spectrum:
        """Spectrum with delta -> -delta (kept in increasing order)."""
        chi = None if self.chi is None else -np.conj(self.chi[::-1])
        return Spectrum(
            -self.raman_detunings[::-1],
            self.transmission[::-1].copy(),
            chi,
            -self.delta_coupling,
            self.label,
        )


def _kernel_map(atom: AtomSpec, profile: str):
    """Return (lo, hi, x_of, weight_of, u_of) for the velocity substitution."""
    if profile == "lorentzian":
        width = atom.doppler_hwhm
        half = 0.5 * math.pi
        return (
            -half,
            half,
            lambda u: width * math.tan(u),
            lambda u: 1.0 / math.pi,
            lambda x: np.arctan(np.asarray(x) / width),
        )
    scale = math.sqrt(2.0) * atom.doppler_sigma
    return (
        -GAUSS_CUTOFF,
        GAUSS_CUTOFF,
        lambda u: scale * u,
        lambda u: math.exp(-u * u) / math.sqrt(math.pi),
        lambda x: np.asarray(x) / scale,
    )


def _breakpoints(u_of, lo, hi, centers):
    u = np.unique(np.clip(np.asarray(u_of(centers), dtype=float), lo, hi))
    u = u[(u > lo) & (u < hi)]
    return list(u)


def _average(atom, medium, deltas, delta_coupling, omega_c, epsrel):
    """Velocity-average the three response terms on the ``deltas`` grid.

    Returns (lambda_term, two_level_term, neighbor_term) as complex arrays.
    """
    lo, hi, x_of, w_of, u_of = _kernel_map(atom, medium.velocity_profile)
    n = deltas.size
    gamma_opt = atom.gamma_opt
    offset = atom.neighbor_offset
    base = delta_coupling + deltas

    def integrand(u):
        x = x_of(u)
        w = w_of(u)
        detune = base + x
        out = np.empty(3 * n, dtype=complex)
        out[:n] = lambda_response(omega_c, deltas, detune, gamma_opt, medium.gamma_raman)
        out[n : 2 * n] = two_level_response(detune, gamma_opt)
        out[2 * n :] = two_level_response(detune - offset, gamma_opt)
        return w * out

    # Resonant class of each term; the Lambda resonance moves with delta.
    gamma = medium.gamma_raman - 1j * deltas
    shift = (0.25 * omega_c**2 / gamma).imag
    moving = shift - base
    if moving.size > MAX_MOVING_BREAKPOINTS:
        moving = np.quantile(moving, np.linspace(0.0, 1.0, MAX_MOVING_BREAKPOINTS))
    centers = np.concatenate([[-delta_coupling, offset - delta_coupling], moving])
    points = _breakpoints(u_of, lo, hi, centers)

    result, err, info = quad_vec(
        integrand,
        lo,
        hi,
        epsrel=epsrel,
        epsabs=0.0,
        norm="max",
        points=points or None,
        limit=20000,
        full_output=True,
    )
    if not info.success or not np.all(np.isfinite(result)):
        raise NumericalError(
            "velocity quadrature did not converge",
            error_estimate=float(err),
            evaluations=int(info.neval),
            intervals=len(info.intervals),
            status=int(info.status),
        )
    return result[:n], result[n : 2 * n], result[2 * n :]


@lru_cache(maxsize=64)
def _normalisation(atom: AtomSpec, profile: str, epsrel: float) -> float:
    medium = MediumSpec(velocity_profile=profile)
    _, bare, neighbor = _average(atom, medium, np.zeros(1), 0.0, 0.0, epsrel)
    return float((bare[0] + atom.neighbor_strength * neighbor[0]).imag)


def doppler_chi(delta, delta_coupling, omega_c, atom: AtomSpec, medium: MediumSpec, *, epsrel=QUAD_EPSREL):
    """Doppler-averaged normalised probe susceptibility.

    Parameters
    ----------
    delta : float or array
        Raman detuning(s), rad/s.
    delta_coupling : float
        Coupling detuning from the Doppler centre, rad/s. Negative values
        approach the neighbouring line.
    omega_c : float
        Coupling Rabi frequency, rad/s.

    Returns
    -------
    complex or ndarray
        chi normalised so that ``-ln(t0) * chi.imag`` is the intensity
        absorbance; with no coupling at the line centre ``chi.imag == 1``.

    Raises
    ------
    NumericalError
        If the adaptive quadrature cannot meet ``epsrel``.
    """
    if not (omega_c >= 0 and math.isfinite(omega_c)):
        raise InvalidInputError(f"omega_c must be non-negative, got {omega_c!r}")
    scalar = np.ndim(delta) == 0
    deltas = np.atleast_1d(np.asarray(delta, dtype=float))
    if not (np.all(np.isfinite(deltas)) and math.isfinite(delta_coupling)):
        raise InvalidInputError("detunings must be finite")

    lam, bare, neighbor = _average(atom, medium, deltas, float(delta_coupling), float(omega_c), epsrel)
    eta = medium.pump_efficiency
    chi = eta * lam + (1.0 - eta) * bare + atom.neighbor_strength * neighbor
    chi = chi / _normalisation(atom, medium.velocity_profile, epsrel)
    return complex(chi[0]) if scalar else chi


def transmission_from_chi(chi, medium: MediumSpec):
    return np.exp(-medium.optical_depth * np.imag(chi))


def simulate_spectrum(deltas, delta_coupling, omega_c, atom: AtomSpec, medium: MediumSpec, label="") -> Spectrum:
    deltas = np.asarray(deltas, dtype=float)
    chi = doppler_chi(deltas, delta_coupling, omega_c, atom, medium)
    return Spectrum(deltas, transmission_from_chi(chi, medium), chi, float(delta_coupling), label)


def line_center_transmission(omega_c, atom: AtomSpec, medium: MediumSpec) -> float:
    """Full-model transmission at Delta = delta = 0."""
    chi = doppler_chi(0.0, 0.0, omega_c, atom, medium)
    return float(math.exp(-medium.optical_depth * chi.imag))


# Closed forms valid for a fully pumped medium at Delta = 0.


def _doppler_sum(atom):
    return 2.0 * atom.doppler_hwhm + atom.gamma_opt


def eit_width_pumped(omega_c, atom: AtomSpec, medium: MediumSpec) -> float:
    """EIT full width 2 Gamma_R + Omega_C^2 / (2 W_D + Gamma), rad/s."""
    if not omega_c >= 0:
        raise InvalidInputError("omega_c must be non-negative")
    return 2.0 * medium.gamma_raman + omega_c**2 / _doppler_sum(atom)


def transmission_line_center(omega_c, atom: AtomSpec, medium: MediumSpec) -> float:
    """ln T = ln t0 / (1 + Omega_C^2 / (2 Gamma_R (2 W_D + Gamma)))."""
    if not omega_c >= 0:
        raise InvalidInputError("omega_c must be non-negative")
    saturation = omega_c**2 / (2.0 * medium.gamma_raman * _doppler_sum(atom))
    return math.exp(math.log(medium.t0) / (1.0 + saturation))


def closed_form_chi(delta, omega_c, atom: AtomSpec, medium: MediumSpec):
    """Normalised susceptibility consistent with the closed-form width,
    line-centre transmission and group delay.

    chi = i g / (g + a) with g = Gamma_R - i delta and
    a = Omega_C^2 / (2 (2 W_D + Gamma)): a Lorentzian transparency dip of
    full width 2 (Gamma_R + a) on a unit absorption background.
    """
    g = medium.gamma_raman - 1j * np.asarray(delta, dtype=float)
    a = omega_c**2 / (2.0 * _doppler_sum(atom))
    return 1j * g / (g + a)


def fit_delta_eff(omega_c, widths, *, intercept=True) -> float:
    """Least-squares effective pumping width from (Omega_C, Gamma_EIT) data.

    Fits Gamma_EIT = c + Omega_C^2 / (4 delta_eff), i.e. a straight line in
    Omega_C^2 whose slope gives delta_eff; with ``intercept=False`` the line
    is forced through the origin.
    """
    omega_c = np.asarray(omega_c, dtype=float)
    widths = np.asarray(widths, dtype=float)
    if omega_c.shape != widths.shape or omega_c.ndim != 1:
        raise InvalidDataError("omega_c and widths must be 1-D arrays of equal length")
    if omega_c.size < 2:
        raise InvalidDataError("need at least two points to fit delta_eff")
    x = omega_c**2
    scale = float(np.max(np.abs(x))) or 1.0
    x = x / scale  # columns of similar size, or lstsq truncates the intercept
    if intercept:
        if np.ptp(x) <= 1e-12 * max(np.max(np.abs(x)), 1.0):
            raise FitError("all coupling Rabi frequencies are equal; slope is undetermined")
        design = np.column_stack([x, np.ones_like(x)])
    else:
        if not np.any(x > 0):
            raise FitError("need a non-zero Rabi frequency to fit delta_eff")
        design = x[:, None]
    coef, *_ = np.linalg.lstsq(design, widths, rcond=None)
    slope = coef[0] / scale
    if not slope > 0:
        raise FitError(f"fitted width slope is not positive ({slope!r})")
    return 1.0 / (4.0 * slope)
