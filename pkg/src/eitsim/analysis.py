"""Data reduction: log-transmission Lorentzian fits, width regression, asymmetry."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import FitError, InvalidDataError
from .medium import Spectrum
from .params import TWO_PI

FIT_GTOL = 1e-9
FIT_MAX_EVALUATIONS = 200


@dataclass
class FitResult:
    """Lorentzian fit of an absorbance dip; detunings and widths in rad/s."""

    center: float
    fwhm: float
    amplitude: float
    offset: float
    rms_residual: float
    converged: bool
    diagnostics: dict = field(default_factory=dict, repr=False)


@dataclass
class RegressionResult:
    slope: float  # Hz per W/m^2
    intercept: float  # Hz
    gamma_raman_extracted: float  # 1/s
    r_squared: float


def lorentzian(x, center, fwhm, amplitude, offset):
    """offset - amplitude (w/2)^2 / ((x - c)^2 + (w/2)^2)."""
    half = 0.5 * fwhm
    return offset - amplitude * half**2 / ((np.asarray(x) - center) ** 2 + half**2)


def log_transform(spectrum: Spectrum) -> np.ndarray:
    """Absorbance -ln T of every sample."""
    t = np.asarray(spectrum.transmission, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t <= 0):
        bad = int(np.flatnonzero(~(t > 0))[0]) if np.any(~(t > 0)) else -1
        raise InvalidDataError(f"transmission must be positive and finite (sample {bad})")
    return -np.log(t)


def _edge_level(y, frac=0.1):
    k = max(1, int(round(frac * y.size)))
    return 0.5 * (np.mean(y[:k]) + np.mean(y[-k:]))


def _half_width_guess(x, y, i_ext, level, half):
    """Distance between the half-depth crossings around the extremum."""
    above = (y - half) * np.sign(level - y[i_ext]) > 0  # True where back past half depth
    left = i_ext
    while left > 0 and not above[left]:
        left -= 1
    right = i_ext
    while right < y.size - 1 and not above[right]:
        right += 1
    return abs(x[right] - x[left])


def fit_lorentzian(x, y) -> FitResult:
    """Least-squares Lorentzian fit of ``y`` sampled at ``x``.

    Starts from the extremum and the half-depth crossings. The sampled span
    must cover at least twice the initial width estimate. Non-convergence is
    reported through ``converged`` rather than raised.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidDataError("x and y must be 1-D arrays of equal length")
    if x.size < 5:
        raise InvalidDataError(f"need at least 5 samples, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidDataError("samples must be finite")
    order = np.argsort(x)
    x, y = x[order], y[order]

    level = _edge_level(y)
    i_min, i_max = int(np.argmin(y)), int(np.argmax(y))
    i_ext = i_min if level - y[i_min] >= y[i_max] - level else i_max
    depth = level - y[i_ext]
    if depth == 0:
        raise InvalidDataError("flat data: no dip or peak to fit")
    width0 = _half_width_guess(x, y, i_ext, level, level - 0.5 * depth)
    span = x[-1] - x[0]
    if width0 <= 0:
        width0 = 2.0 * (x[1] - x[0]) if x.size > 1 else span / 10
    if span < 2.0 * width0:
        raise InvalidDataError(f"sampled span {span:.3g} is narrower than twice the dip width {width0:.3g}")

    # work in units of the initial width and depth for conditioning
    xs, ys = width0, abs(depth)
    u = (x - x[i_ext]) / xs
    v = (y - level) / ys
    p0 = np.array([0.0, 1.0, depth / ys, 0.0])

    def resid(p):
        return lorentzian(u, p[0], p[1], p[2], p[3]) - v

    res = least_squares(resid, p0, method="trf", x_scale="jac", gtol=FIT_GTOL, max_nfev=FIT_MAX_EVALUATIONS)
    c, w, a, o = res.x
    w = abs(w)
    converged = bool(res.success and res.status > 0 and w > 0)
    return FitResult(
        center=float(x[i_ext] + c * xs),
        fwhm=float(w * xs),
        amplitude=float(a * ys),
        offset=float(level + o * ys),
        rms_residual=float(np.sqrt(np.mean(res.fun**2)) * ys),
        converged=converged,
        diagnostics={
            "status": int(res.status),
            "message": res.message,
            "nfev": int(res.nfev),
            "optimality": float(res.optimality),
        },
    )


def fit_spectrum(spectrum: Spectrum) -> FitResult:
    """Lorentzian fit of the absorbance of ``spectrum``."""
    return fit_lorentzian(spectrum.raman_detunings, log_transform(spectrum))


def width_regression(intensities, fwhm_hz) -> RegressionResult:
    """Straight-line fit of EIT width (Hz) against coupling intensity (W/m^2).

    The intercept is the zero-intensity width 2 Gamma_R / 2pi, so
    ``gamma_raman_extracted = pi * intercept`` in 1/s.
    """
    i = np.asarray(intensities, dtype=float)
    w = np.asarray(fwhm_hz, dtype=float)
    if i.shape != w.shape or i.ndim != 1:
        raise InvalidDataError("intensities and widths must be 1-D arrays of equal length")
    if i.size < 3:
        raise InvalidDataError(f"need at least 3 points, got {i.size}")
    if not (np.all(np.isfinite(i)) and np.all(np.isfinite(w))):
        raise InvalidDataError("regression inputs must be finite")
    design = np.column_stack([i, np.ones_like(i)])
    coef, _, rank, _ = np.linalg.lstsq(design, w, rcond=None)
    if rank < 2 or np.unique(i).size < 2:
        raise FitError("intensities are not distinct; regression is rank deficient")
    slope, intercept = coef
    ss_res = float(np.sum((w - design @ coef) ** 2))
    ss_tot = float(np.sum((w - np.mean(w)) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return RegressionResult(float(slope), float(intercept), float(math.pi * intercept), r2)


def gamma_raman_hz(result: RegressionResult) -> float:
    return result.gamma_raman_extracted / TWO_PI


def asymmetry_metric(spectrum: Spectrum, edge_fraction=0.1) -> float:
    """Signed asymmetry of the transparency feature, in [-1, 1].

    The absorbance is referred to a straight baseline through the mean of
    the outer ``edge_fraction`` of samples on each side. With ``d`` the
    baseline minus absorbance, the feature centre is the |d|-weighted
    centroid and A+ / A- are the integrals of ``d`` above and below it.
    Returns (A+ - A-) / (|A+| + |A-|): zero for a symmetric profile, +-1 for
    a purely dispersive one.
    """
    x = np.asarray(spectrum.raman_detunings, dtype=float)
    y = log_transform(spectrum)
    if x[0] > x[-1]:
        x, y = x[::-1], y[::-1]
    if x.size < 5:
        raise InvalidDataError("need at least 5 samples")
    k = max(1, int(round(edge_fraction * x.size)))
    xl, yl = np.mean(x[:k]), np.mean(y[:k])
    xr, yr = np.mean(x[-k:]), np.mean(y[-k:])
    baseline = yl + (yr - yl) * (x - xl) / (xr - xl)
    d = baseline - y

    scale = max(np.max(np.abs(y)), np.finfo(float).tiny)
    mag = np.abs(d)
    if np.max(mag) <= 1e-9 * scale:
        raise InvalidDataError("no transparency feature found in spectrum")
    center = np.trapezoid(x * mag, x) / np.trapezoid(mag, x)
    if not (x[0] < center < x[-1]):
        raise InvalidDataError("feature centre lies outside the sampled range")

    d_c = np.interp(center, x, d)
    left = x < center
    right = x > center
    a_minus = np.trapezoid(np.append(d[left], d_c), np.append(x[left], center))
    a_plus = np.trapezoid(np.insert(d[right], 0, d_c), np.insert(x[right], 0, center))
    denom = abs(a_plus) + abs(a_minus)
    if denom == 0:
        raise InvalidDataError("no transparency feature found in spectrum")
    return float((a_plus - a_minus) / denom)
