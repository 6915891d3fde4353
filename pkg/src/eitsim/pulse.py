"""Group delay of probe pulses inside the transparency window."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, NumericalError
from .medium import doppler_chi, eit_width_pumped
from .params import TWO_PI, AtomSpec, MediumSpec


@dataclass(frozen=True)
class PulseSpec:
    """Gaussian probe pulse; ``duration`` is the intensity FWHM in s."""

    duration: float = 70e-6
    peak_power: float = 35e-6
    carrier_raman_detuning: float = 0.0

    def __post_init__(self):
        if not (self.duration > 0 and math.isfinite(self.duration)):
            raise InvalidInputError(f"duration must be positive, got {self.duration!r}")
        if not self.peak_power >= 0:
            raise InvalidInputError("peak_power must be non-negative")

    @property
    def spectral_fwhm(self):
        """Angular FWHM of the intensity spectrum, 4 ln2 / duration."""
        return 4.0 * math.log(2.0) / self.duration


@dataclass
class DelayResult:
    group_delay: float
    group_velocity: float
    delay_bandwidth_product: float
    delay_bandwidth_product_cyclic: float
    times: np.ndarray = field(repr=False)
    input_power: np.ndarray = field(repr=False)
    output_power: np.ndarray = field(repr=False)
    energy_ratio: float = 1.0
    narrowband: bool = True

    @property
    def output_pulse(self):
        return self.output_power


def _doppler_sum(atom):
    return 2.0 * atom.doppler_hwhm + atom.gamma_opt


def group_delay_analytic(omega_c, atom: AtomSpec, medium: MediumSpec) -> float:
    """Line-centre group delay of the fully pumped medium, s.

    tau = -ln(t0) (2 W_D + Gamma) Omega^2 / [2 Gamma_R (2 W_D + Gamma) + Omega^2]^2
    """
    if not (omega_c >= 0 and math.isfinite(omega_c)):
        raise InvalidInputError("omega_c must be non-negative")
    s = _doppler_sum(atom)
    return medium.optical_depth * s * omega_c**2 / (2.0 * medium.gamma_raman * s + omega_c**2) ** 2


def optimal_coupling(atom: AtomSpec, medium: MediumSpec):
    """(Omega_opt, tau_max) with Omega_opt^2 = 2 Gamma_R (2 W_D + Gamma)
    and tau_max = -ln(t0) / (8 Gamma_R)."""
    omega = math.sqrt(2.0 * medium.gamma_raman * _doppler_sum(atom))
    return omega, medium.optical_depth / (8.0 * medium.gamma_raman)


def group_velocity(length, delay):
    """L / tau for a positive delay; NaN otherwise."""
    if not length > 0:
        raise InvalidInputError("length must be positive")
    return length / delay if delay > 0 else math.nan


def delay_bandwidth_product(delay, omega_c, atom: AtomSpec, medium: MediumSpec):
    """Delay times the EIT full width.

    Returns ``(angular, cyclic)``: tau * Gamma_EIT with the width in rad/s,
    and tau * Gamma_EIT / 2pi with the width in Hz. At the optimum coupling
    the angular product equals -ln(t0)/2.
    """
    width = eit_width_pumped(omega_c, atom, medium)
    return delay * width, delay * width / TWO_PI


def _parabolic_peak(t, y):
    i = int(np.argmax(y))
    if i == 0 or i == y.size - 1:
        raise NumericalError("pulse peak at the edge of the time window", index=i, samples=y.size)
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0:
        raise NumericalError("pulse peak is not a local maximum", index=i)
    frac = 0.5 * (y0 - y2) / denom
    return t[i] + frac * (t[1] - t[0])


def _fourier_upsample(spectrum, factor):
    n = spectrum.size
    padded = np.zeros(n * factor, dtype=complex)
    half = n // 2
    padded[:half] = spectrum[:half]
    padded[-half:] = spectrum[-half:]
    return np.fft.ifft(padded) * factor


def propagate_pulse(
    pulse: PulseSpec,
    omega_c,
    atom: AtomSpec,
    medium: MediumSpec,
    *,
    delta_coupling=0.0,
    samples_per_fwhm=64,
    window_fwhm=16,
    upsample=8,
    spectral_floor=1e-14,
) -> DelayResult:
    """Propagate a Gaussian pulse through the cell in the frequency domain.

    The field envelope is Fourier transformed, each component is multiplied
    by exp(i (-ln t0 / 2) chi(delta)) with chi from ``doppler_chi`` and the
    result transformed back. The delay is the shift of the intensity peak,
    located by parabolic interpolation on the native grid and checked
    against a Fourier-interpolated grid ``upsample`` times finer.

    Components whose input amplitude is below ``spectral_floor`` times the
    maximum are dropped rather than evaluated.
    """
    if samples_per_fwhm < 4 or window_fwhm < 4:
        raise NumericalError(
            "time grid too coarse to resolve the pulse",
            samples_per_fwhm=samples_per_fwhm,
            window_fwhm=window_fwhm,
        )
    duration = pulse.duration
    dt = duration / samples_per_fwhm
    n = 1 << int(math.ceil(math.log2(window_fwhm * samples_per_fwhm)))
    t = (np.arange(n) - n // 2) * dt

    field_in = math.sqrt(pulse.peak_power) * np.exp(-2.0 * math.log(2.0) * (t / duration) ** 2)
    spec_in = np.fft.fft(field_in)
    omega = TWO_PI * np.fft.fftfreq(n, dt)
    # numpy's inverse transform uses exp(+i w t): component w sits at delta = carrier - w
    deltas = pulse.carrier_raman_detuning - omega

    keep = np.abs(spec_in) > spectral_floor * np.max(np.abs(spec_in))
    transfer = np.zeros(n, dtype=complex)
    chi = doppler_chi(deltas[keep], delta_coupling, omega_c, atom, medium)
    if not np.all(np.isfinite(chi)):
        raise NumericalError("non-finite susceptibility while sampling the pulse band", samples=int(keep.sum()))
    transfer[keep] = np.exp(0.5j * medium.optical_depth * chi)

    spec_out = spec_in * transfer
    field_out = np.fft.ifft(spec_out)
    p_in = np.abs(field_in) ** 2
    p_out = np.abs(field_out) ** 2

    coarse = _parabolic_peak(t, p_out) - _parabolic_peak(t, p_in)
    t_fine = t[0] + np.arange(n * upsample) * (dt / upsample)
    fine_in = np.abs(_fourier_upsample(spec_in, upsample)) ** 2
    fine_out = np.abs(_fourier_upsample(spec_out, upsample)) ** 2
    delay = _parabolic_peak(t_fine, fine_out) - _parabolic_peak(t_fine, fine_in)
    if abs(delay - coarse) > 0.01 * max(abs(delay), dt):
        raise NumericalError(
            "peak interpolation did not converge",
            coarse_delay=coarse,
            fine_delay=delay,
            dt=dt,
        )

    width = eit_width_pumped(omega_c, atom, medium)
    narrowband = pulse.spectral_fwhm < 0.5 * width
    if not narrowband:
        warnings.warn(
            f"pulse bandwidth {pulse.spectral_fwhm:.3g} rad/s is not below half the "
            f"EIT width {width:.3g} rad/s; the delay may be distorted",
            stacklevel=2,
        )
    dbp, dbp_cyc = delay_bandwidth_product(delay, omega_c, atom, medium)
    energy_ratio = float(np.sum(p_out) / np.sum(p_in)) if np.sum(p_in) > 0 else 0.0
    return DelayResult(
        group_delay=float(delay),
        group_velocity=group_velocity(medium.length, delay),
        delay_bandwidth_product=dbp,
        delay_bandwidth_product_cyclic=dbp_cyc,
        times=t,
        input_power=p_in,
        output_power=p_out,
        energy_ratio=energy_ratio,
        narrowband=narrowband,
    )


def gaussian_shape_error(t, power):
    """RMS deviation of ``power`` from a moment-matched Gaussian, relative to its peak.

    Evaluated over +-2 FWHM of the centroid.
    """
    t = np.asarray(t, dtype=float)
    p = np.asarray(power, dtype=float)
    total = np.sum(p)
    if not total > 0:
        raise InvalidInputError("power trace is empty")
    mean = np.sum(t * p) / total
    var = np.sum((t - mean) ** 2 * p) / total
    model = np.exp(-0.5 * (t - mean) ** 2 / var)
    peak = np.max(p)
    fwhm = 2.0 * math.sqrt(2.0 * math.log(2.0) * var)
    sel = np.abs(t - mean) <= 2.0 * fwhm
    # amplitude matched in least squares over the window
    amp = np.sum(p[sel] * model[sel]) / np.sum(model[sel] ** 2)
    return float(np.sqrt(np.mean((p[sel] - amp * model[sel]) ** 2)) / peak)
