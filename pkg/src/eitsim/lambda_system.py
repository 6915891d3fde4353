"""Steady-state response of a single velocity class of a Lambda system.

The probe is treated to first order. With gamma = Gamma_R - i delta the
probe coherence is proportional to

    i gamma / [gamma (Gamma - i Delta_p) + Omega_C**2 / 4]

where Delta_p is the one-photon probe detuning seen by the class and
Omega_C the full angular Rabi frequency (hence the factor 1/4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .params import AtomSpec, omega_inhom


@dataclass(frozen=True)
class LambdaState:
    omega_c: float
    delta_raman: float
    detune_probe: float
    gamma_opt: float
    gamma_raman: float

    def __post_init__(self):
        if not self.gamma_opt > 0:
            raise InvalidInputError("gamma_opt must be positive")
        if not self.gamma_raman >= 0:
            raise InvalidInputError("gamma_raman must be non-negative")
        if not self.omega_c >= 0:
            raise InvalidInputError("omega_c must be non-negative")


def lambda_response(omega_c, delta_raman, detune_probe, gamma_opt, gamma_raman):
    """Vectorised normalised probe susceptibility of one velocity class.

    Broadcasts over array arguments. Normalised so that with no coupling
    and zero probe detuning the result is exactly ``1j``. ``gamma_raman``
    may be zero (ideal dark state).
    """
    gamma = gamma_raman - 1j * np.asarray(delta_raman, dtype=float)
    optical = gamma_opt - 1j * np.asarray(detune_probe, dtype=float)
    coupling = 0.25 * np.asarray(omega_c, dtype=float) ** 2
    if np.all(coupling > 0):
        return 1j * gamma_opt * gamma / (gamma * optical + coupling)
    # without coupling gamma cancels; this also fixes the 0/0 at Gamma_R = delta = 0
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        full = 1j * gamma_opt * gamma / (gamma * optical + coupling)
    return np.where(coupling > 0, full, 1j * gamma_opt / optical)


def two_level_response(detune_probe, gamma_opt):
    """Bare absorbing transition, the Omega_C = 0 limit of ``lambda_response``."""
    return 1j * gamma_opt / (gamma_opt - 1j * np.asarray(detune_probe, dtype=float))


def probe_response(state: LambdaState) -> complex:
    """Dimensionless first-order probe response for ``state``.

    Imaginary part is absorption (always >= 0), real part dispersion.
    """
    return complex(
        lambda_response(
            state.omega_c,
            state.delta_raman,
            state.detune_probe,
            state.gamma_opt,
            state.gamma_raman,
        )
    )


# Ratio to Omega_inhom below/above which one regime is taken to hold.
REGIME_MARGIN = 10.0


@dataclass(frozen=True)
class CollisionlessWidth:
    """EIT full width predicted without velocity-changing collisions.

    ``low_regime`` is (Omega_C/4) sqrt(8 Gamma_R/Gamma), valid for
    Omega_C << Omega_inhom; ``high_regime`` is Omega_C^2/(4 W_D), valid for
    Omega_C >> Omega_inhom. No interpolation is attempted in between:
    ``width`` is NaN there and both limits are reported.
    """

    regime: str
    low_regime: float
    high_regime: float
    omega_inhom: float
    delta_eff: float

    @property
    def width(self):
        if self.regime == "low":
            return self.low_regime
        if self.regime == "high":
            return self.high_regime
        return math.nan


def eit_width_collisionless(omega_c, atom: AtomSpec, gamma_raman) -> CollisionlessWidth:
    if not (omega_c > 0 and math.isfinite(omega_c)):
        raise InvalidInputError(f"omega_c must be positive, got {omega_c!r}")
    threshold = omega_inhom(atom, gamma_raman)

    delta_eff_low = omega_c * math.sqrt(atom.gamma_opt / (8.0 * gamma_raman))
    low = omega_c**2 / (4.0 * delta_eff_low)
    high = omega_c**2 / (4.0 * atom.doppler_hwhm)

    ratio = omega_c / threshold
    if ratio < 1.0 / REGIME_MARGIN:
        regime, delta_eff = "low", delta_eff_low
    elif ratio > REGIME_MARGIN:
        regime, delta_eff = "high", atom.doppler_hwhm
    else:
        regime, delta_eff = "intermediate", math.nan
    return CollisionlessWidth(regime, low, high, threshold, delta_eff)
