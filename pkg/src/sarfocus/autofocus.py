"""Localization-error autofocus: contrast-gradient ascent (LECA) and PGA.

The along-track localization error is modelled as ``e_x(n) = beta * n``.
In the SRP-compensated history it appears as the phase ``kx * beta * n``,
which is almost quadratic in ``n`` because ``sin(alpha)`` sweeps linearly
along a straight track.  LECA searches ``beta`` directly by maximizing the
PFA image contrast; the PGA route estimates the phase non-parametrically and
converts its quadratic coefficient to ``beta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, GeometryError, OptimizationError, UndefinedMetricError
from .fmcw import BeatCube
from .geometry import ChirpGeometry, RadarParams, Srp, Trajectory, wavenumbers
from .image import SarImage
from .metrics import image_contrast
from .pfa import CompensatedHistory, form_pfa, range_compensate, srp_beamform


@dataclass(frozen=True)
class LecaConfig:
    """Gradient-ascent settings.

    ``rho=None`` picks the initial learning rate so the first step moves
    ``beta`` by the amount that bends the aperture-edge phase by about one
    radian.  Rejected steps halve ``rho``; accepted steps grow it by
    ``growth``.
    """

    rho: float | None = None
    delta_ic: float = 1e-4
    max_iter: int = 50
    fd_step: float = 1e-6
    beta0: float = 0.0
    growth: float = 1.5

    def __post_init__(self):
        problems = []
        if self.rho is not None and not self.rho > 0:
            problems.append(f"rho must be > 0, got {self.rho}")
        if not self.delta_ic > 0:
            problems.append(f"delta_ic must be > 0, got {self.delta_ic}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            problems.append(f"max_iter must be an integer >= 1, got {self.max_iter}")
        if not self.fd_step > 0:
            problems.append(f"fd_step must be > 0, got {self.fd_step}")
        if not np.isfinite(self.beta0):
            problems.append(f"beta0 must be finite, got {self.beta0}")
        if not self.growth >= 1:
            problems.append(f"growth must be >= 1, got {self.growth}")
        if problems:
            raise ConfigError("invalid LECA configuration", problems)


class LecaResult(NamedTuple):
    beta: float
    ic_trace: list


def _crop(image: SarImage, roi):
    if roi is None:
        return image.pixels
    x0, x1, y0, y1 = roi
    cols = (image.x_axis >= x0) & (image.x_axis <= x1)
    rows = (image.y_axis >= y0) & (image.y_axis <= y1)
    if not cols.any() or not rows.any():
        raise ConfigError(f"roi {roi} contains no pixels")
    return image.pixels[np.ix_(rows, cols)]


def _alpha_rate(geometry: ChirpGeometry):
    n = np.arange(np.size(geometry.alpha))
    if n.size < 2:
        return 0.0
    return float(np.polyfit(n, np.sin(geometry.alpha), 1)[0])


def leca_on_history(hist: CompensatedHistory, cfg: LecaConfig | None = None, roi=None,
                    **form) -> LecaResult:
    """Maximize ``IC(beta)`` of the PFA image of a compensated history.

    ``roi = (x_min, x_max, y_min, y_max)`` restricts the contrast to a window
    of SRP-relative image coordinates.  ``form`` is passed to ``form_pfa``.
    The trace holds the IC of the current iterate after every iteration, so
    its running maximum never decreases; the best ``beta`` seen is returned.
    """
    cfg = cfg or LecaConfig()
    h = cfg.fd_step

    def ic(beta):
        try:
            value = image_contrast(_crop(form_pfa(hist, beta, **form), roi))
        except UndefinedMetricError as exc:
            raise OptimizationError(f"degenerate image at beta={beta:g}: {exc}") from exc
        if not np.isfinite(value):
            raise OptimizationError(f"non-finite image contrast at beta={beta:g}")
        return value

    beta = float(cfg.beta0)
    current = ic(beta)
    trace = [current]
    rho = cfg.rho
    for _ in range(cfg.max_iter):
        grad = (ic(beta + h) - ic(beta - h)) / (2 * h)
        if grad == 0:
            break
        if rho is None:
            k_mean = float(np.mean(hist.k))
            bend = k_mean * abs(_alpha_rate(hist.geometry)) * (hist.data.shape[0] / 2.0) ** 2
            step = 1.0 / bend if bend > 0 else 100 * h
            rho = max(step, 10 * h) / abs(grad)
        step = rho * grad
        if abs(step) < h / 2:
            # step below the resolution of the gradient estimate
            break
        candidate = beta + step
        value = ic(candidate)
        if value > current:
            gain = value - current
            beta, current = candidate, value
            trace.append(current)
            rho *= cfg.growth
            if gain < cfg.delta_ic:
                break
        else:
            rho /= 2.0
            trace.append(current)
    return LecaResult(beta, trace)


def compensated_history(cube: BeatCube, traj: Trajectory, srp: Srp, radar: RadarParams | None = None):
    radar = radar or cube.radar
    return range_compensate(srp_beamform(cube, traj, srp), traj, srp, radar)


def leca_estimate_beta(cube: BeatCube, traj: Trajectory, srp: Srp, radar: RadarParams | None = None,
                       cfg: LecaConfig | None = None, roi=None, **form) -> LecaResult:
    """Estimate the along-track error slope ``beta`` (m per chirp) from a beat cube.

    ``traj`` is the measured trajectory used for range compensation.
    """
    if traj.label == "true":
        raise ConfigError("LECA expects a measured trajectory")
    return leca_on_history(compensated_history(cube, traj, srp, radar), cfg, roi, **form)


@dataclass(frozen=True)
class PgaConfig:
    """PGA settings.

    ``J`` caps the number of rows used; only rows whose peak is at least
    ``threshold_db`` above the row median qualify.  The window starts at
    ``window0`` pixels and halves each iteration down to ``min_window``;
    ``window0=None`` sizes it from the -10 dB extent of the summed,
    centre-shifted row intensity.
    """

    J: int = 32
    iters: int = 10
    window0: int | None = None
    min_window: int = 8
    threshold_db: float = 20.0
    tol: float = 1e-4

    def __post_init__(self):
        problems = []
        if int(self.J) != self.J or self.J < 1:
            problems.append(f"J must be an integer >= 1, got {self.J}")
        if int(self.iters) != self.iters or self.iters < 1:
            problems.append(f"iters must be an integer >= 1, got {self.iters}")
        if self.min_window < 2:
            problems.append(f"min_window must be >= 2, got {self.min_window}")
        if self.window0 is not None and self.window0 < self.min_window:
            problems.append(f"window0 must be >= min_window, got {self.window0}")
        if problems:
            raise ConfigError("invalid PGA configuration", problems)


@dataclass
class PhaseErrorEstimate:
    """Phase error ``eps_phi[n]`` with its least-squares ``(q0, q1, q2)`` fit in ``n``."""

    eps_phi: np.ndarray
    poly: tuple
    rms_residual: float
    n: np.ndarray = None
    corrected: SarImage | None = field(default=None, repr=False)

    @classmethod
    def fit(cls, eps_phi, n=None, corrected=None):
        eps_phi = np.asarray(eps_phi, dtype=float)
        n = np.arange(eps_phi.size, dtype=float) if n is None else np.asarray(n, dtype=float)
        if eps_phi.size >= 3:
            q2, q1, q0 = np.polyfit(n, eps_phi, 2)
        else:
            q0, q1, q2 = float(eps_phi.mean()) if eps_phi.size else 0.0, 0.0, 0.0
        resid = eps_phi - (q0 + q1 * n + q2 * n ** 2)
        rms = float(np.sqrt(np.mean(resid ** 2))) if resid.size else 0.0
        return cls(eps_phi, (float(q0), float(q1), float(q2)), rms, n, corrected)


def detrend(phase, n=None):
    """Remove the least-squares constant and linear component."""
    phase = np.asarray(phase, dtype=float)
    n = np.arange(phase.size, dtype=float) if n is None else n
    if phase.size < 2:
        return phase - phase.mean()
    slope, offset = np.polyfit(n, phase, 1)
    return phase - (offset + slope * n)


def _to_history(rows):
    return np.fft.fft(np.fft.ifftshift(rows, axes=-1), axis=-1, norm="ortho")


def _to_image(hist):
    return np.fft.fftshift(np.fft.ifft(hist, axis=-1, norm="ortho"), axes=-1)


def _select_rows(mag, cfg):
    peak = mag.max(axis=1)
    median = np.median(mag, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio_db = 20 * np.log10(peak / median)
    ratio_db = np.where(median > 0, ratio_db, np.where(peak > 0, np.inf, -np.inf))
    eligible = np.flatnonzero(ratio_db >= cfg.threshold_db)
    if eligible.size == 0:
        eligible = np.array([int(np.argmax(peak))])
    order = eligible[np.argsort(peak[eligible], kind="stable")[::-1]]
    return np.sort(order[: cfg.J])


def _auto_window(shifted, centre, floor, width):
    """Initial window: 1.5x the -10 dB extent of the summed centred intensity."""
    profile = np.sum(np.abs(shifted) ** 2, axis=0)
    above = profile >= 0.1 * profile[centre]
    left = centre
    while left > 0 and above[left - 1]:
        left -= 1
    right = centre
    while right < width - 1 and above[right + 1]:
        right += 1
    half = max(centre - left, right - centre)
    return int(min(width, max(floor, 2 * np.ceil(1.5 * half) + 1)))


def pga_estimate_phase(image: SarImage, cfg: PgaConfig | None = None) -> PhaseErrorEstimate:
    """Phase gradient autofocus along the azimuth (x) axis of a PFA image.

    The slow-time support is the first ``image.meta['slow_time_support']``
    samples of each row's forward transform (the unpadded wavenumber
    samples); the estimate is indexed by that sample.  The returned
    ``corrected`` image has the accumulated phase removed.
    """
    cfg = cfg or PgaConfig()
    pixels = np.asarray(image.pixels, dtype=complex)
    n_rows, width = pixels.shape
    if cfg.J > n_rows:
        raise ConfigError(f"J={cfg.J} exceeds the {n_rows} image rows")
    if not np.abs(pixels).max() > 0:
        raise UndefinedMetricError("PGA on an all-zero image")
    support = int(image.meta.get("slow_time_support", width))
    if not 2 <= support <= width:
        raise ConfigError(f"slow-time support {support} outside [2, {width}]")

    centre = width // 2
    offsets = np.arange(width) - centre
    window = None if cfg.window0 is None else int(cfg.window0)
    eps = np.zeros(support)
    hist = _to_history(pixels)
    work = pixels
    for _ in range(cfg.iters):
        rows = work[_select_rows(np.abs(work), cfg)]
        shifts = centre - np.argmax(np.abs(rows), axis=1)
        shifted = np.stack([np.roll(r, s) for r, s in zip(rows, shifts)])
        if window is None:
            window = _auto_window(shifted, centre, cfg.min_window, width)
        shifted[:, np.abs(offsets) > window / 2.0] = 0
        g = _to_history(shifted)[:, :support]
        dphi = np.angle(np.sum(np.conj(g[:, :-1]) * g[:, 1:], axis=0))
        phi = detrend(np.concatenate(([0.0], np.cumsum(dphi))))
        eps += phi
        hist[:, :support] *= np.exp(-1j * phi)[None, :]
        work = _to_image(hist)
        window = max(cfg.min_window, window // 2)
        if np.sqrt(np.mean(phi ** 2)) < cfg.tol:
            break
    corrected = image.with_pixels(work, autofocus="pga")
    return PhaseErrorEstimate.fit(eps, corrected=corrected)


def phase_on_chirps(est: PhaseErrorEstimate, image: SarImage, geometry: ChirpGeometry) -> PhaseErrorEstimate:
    """Re-index a PGA estimate from wavenumber samples to chirp index.

    Chirp ``n`` sits at ``kx = ky_mid * tan(alpha_n)`` on the resampled grid
    (``ky_mid`` the centre of the range-wavenumber axis).  Chirps outside the
    estimated support use the quadratic fit.
    """
    kx_axis = np.asarray(image.meta.get("kx_axis"))
    ky_axis = np.asarray(image.meta.get("ky_axis"))
    if kx_axis.ndim != 1 or kx_axis.size != est.eps_phi.size or kx_axis.size < 2:
        raise ConfigError("image meta does not carry a kx axis matching the estimate")
    ky_mid = 0.5 * (ky_axis[0] + ky_axis[-1])
    frac = (ky_mid * np.tan(geometry.alpha) - kx_axis[0]) / (kx_axis[1] - kx_axis[0])
    q0, q1, q2 = est.poly
    inside = (frac >= 0) & (frac <= kx_axis.size - 1)
    eps = np.where(inside, np.interp(frac, np.arange(kx_axis.size), est.eps_phi),
                   q0 + q1 * frac + q2 * frac ** 2)
    return PhaseErrorEstimate.fit(eps, corrected=est.corrected)


def phase_to_beta(est: PhaseErrorEstimate, geometry: ChirpGeometry, radar: RadarParams) -> float:
    """``beta = q2 / (k_mean * alpha_rate)`` for a chirp-indexed estimate.

    ``k_mean`` averages the fast-time wavenumbers and ``alpha_rate`` is the
    least-squares slope of ``sin(alpha_n)`` against ``n``.
    """
    rate = _alpha_rate(geometry)
    if abs(rate) < 1e-12:
        raise GeometryError(f"squint rate {rate:g} per chirp: radar is not moving past the SRP")
    return float(est.poly[2] / (np.mean(wavenumbers(radar)) * rate))
