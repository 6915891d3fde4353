"""EIT and slow light in a Doppler-broadened, optically pumped Lambda system."""

from .analysis import FitResult, RegressionResult, asymmetry_metric, fit_lorentzian, fit_spectrum, width_regression
from .errors import ConfigError, EitError, FitError, InvalidDataError, InvalidInputError, NumericalError
from .lambda_system import LambdaState, eit_width_collisionless, probe_response
from .medium import (
    Spectrum,
    closed_form_chi,
    doppler_chi,
    eit_width_pumped,
    fit_delta_eff,
    line_center_transmission,
    simulate_spectrum,
    transmission_line_center,
)
from .params import AtomSpec, DriveSpec, MediumSpec, RabiCalibration, beam_intensity, omega_inhom, rabi_from_intensity
from .pulse import PulseSpec, group_delay_analytic, optimal_coupling, propagate_pulse
from .transit import TransportSpec, collision_count, diffusive_transit_time, gamma_raman_estimate

__version__ = "0.1.0"
