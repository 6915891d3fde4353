"""Order-of-magnitude transit-time estimates for atoms crossing the beams.

These tie the beam diameter to the Raman decoherence rate. The default
diffusion constant and geometry factor are calibration values reproducing a
1 ms diffusive transit through a 1 cm beam at 300 K and 1 Torr, not
first-principles numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import k as K_B
from scipy.constants import atomic_mass

from .errors import InvalidInputError
from .params import HE_MASS_U

DEFAULT_MEAN_FREE_PATH = 1e-4  # m, hard-sphere estimate at 1 Torr
DEFAULT_DIFFUSION = 0.047  # m^2/s at 1 Torr, 300 K
DEFAULT_GEOMETRY_FACTOR = 0.47


def mean_thermal_speed(temperature=300.0, mass_u=HE_MASS_U):
    """Maxwell-Boltzmann mean speed sqrt(8 k T / (pi m)), m/s."""
    if not (temperature > 0 and mass_u > 0):
        raise InvalidInputError("temperature and mass must be positive")
    return math.sqrt(8.0 * K_B * temperature / (math.pi * mass_u * atomic_mass))


@dataclass(frozen=True)
class TransportSpec:
    mean_free_path: float = DEFAULT_MEAN_FREE_PATH
    diffusion_constant: float = DEFAULT_DIFFUSION
    mean_thermal_speed: float = mean_thermal_speed()
    geometry_factor: float = DEFAULT_GEOMETRY_FACTOR

    def __post_init__(self):
        for name in ("mean_free_path", "diffusion_constant", "mean_thermal_speed", "geometry_factor"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidInputError(f"{name} must be positive, got {value!r}")


def _check_diameter(d):
    if not (d > 0 and math.isfinite(d)):
        raise InvalidInputError(f"beam_diameter must be positive, got {d!r}")


def collision_count(beam_diameter, transport: TransportSpec) -> float:
    """Collisions during a one-dimensional random walk across the beam, (d / l)^2."""
    _check_diameter(beam_diameter)
    return (beam_diameter / transport.mean_free_path) ** 2


def diffusive_transit_time(beam_diameter, transport: TransportSpec) -> float:
    """tau = k d^2 / D, s."""
    _check_diameter(beam_diameter)
    return transport.geometry_factor * beam_diameter**2 / transport.diffusion_constant


def random_walk_transit_time(beam_diameter, transport: TransportSpec) -> float:
    # path length N * l travelled at the mean thermal speed
    return collision_count(beam_diameter, transport) * transport.mean_free_path / transport.mean_thermal_speed


def ballistic_transit_time(beam_diameter, transport: TransportSpec) -> float:
    """Collisionless crossing time d / v, s."""
    _check_diameter(beam_diameter)
    return beam_diameter / transport.mean_thermal_speed


def gamma_raman_estimate(beam_diameter, transport: TransportSpec, residual_rate=0.0) -> float:
    """Raman decoherence rate 1/tau_transit + residual_rate, 1/s.

    ``residual_rate`` collects everything the diffusive picture leaves out;
    it is the knob that accounts for the measured rate depending on beam
    size much more weakly than d^-2.
    """
    if not (residual_rate >= 0 and math.isfinite(residual_rate)):
        raise InvalidInputError(f"residual_rate must be non-negative, got {residual_rate!r}")
    return 1.0 / diffusive_transit_time(beam_diameter, transport) + residual_rate


def residual_for_target(beam_diameter, transport: TransportSpec, gamma_raman) -> float:
    """Residual rate that makes ``gamma_raman_estimate`` hit ``gamma_raman``."""
    residual = gamma_raman - 1.0 / diffusive_transit_time(beam_diameter, transport)
    if residual < 0:
        raise InvalidInputError("target rate is below the pure transit-time rate")
    return residual
