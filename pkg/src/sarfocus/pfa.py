"""Polar Format Algorithm image formation.

Chain: ``srp_beamform`` -> ``range_compensate`` -> (``apply_phase_correction``)
-> ``polar_resample`` -> ``pfa_image``.

After compensation to the SRP the history of a scatterer at offset
``(x_s, y_s)`` from the SRP is ``sigma * exp(-j (kx*x_s + ky*y_s))`` with
``kx = k sin(alpha) cos(psi)`` and ``ky = k cos(alpha) cos(psi)``.  The image
is the unitary 2-D inverse DFT of that history after resampling onto a
rectangular wavenumber grid, so image axes are offsets from the SRP.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, GeometryError
from .fmcw import BeatCube
from .geometry import (
    C,
    ChirpGeometry,
    RadarParams,
    Srp,
    Trajectory,
    aperture_geometry,
    element_positions,
    slant_range,
    wavenumber,
    wavenumbers,
)
from .image import SarImage

# -3 dB mainlobe width of an unweighted aperture, in units of 2*pi/span
SINC_3DB = 0.886


@dataclass(frozen=True)
class CompensatedHistory:
    """SRP-compensated phase history ``[chirp, sample]`` with its polar support."""

    data: np.ndarray
    kx: np.ndarray
    ky: np.ndarray
    k: np.ndarray
    geometry: ChirpGeometry

    @property
    def shape(self):
        return self.data.shape

    def with_data(self, data) -> "CompensatedHistory":
        return CompensatedHistory(data, self.kx, self.ky, self.k, self.geometry)


@dataclass(frozen=True)
class RectHistory:
    """History on a uniform rectangular grid, ``data[i', n']`` at ``(ky[i'], kx[n'])``."""

    data: np.ndarray
    kx: np.ndarray
    ky: np.ndarray


def srp_beamform(cube: BeatCube, traj: Trajectory, srp: Srp) -> np.ndarray:
    """Steer the virtual array to the SRP and average channels, ``[chirp, sample]``."""
    radar = cube.radar
    if len(traj) != radar.N_c:
        raise ConfigError(f"trajectory has {len(traj)} chirps, cube has {radar.N_c}")
    if cube.data.shape[0] == 1:
        return np.array(cube.data[0], dtype=complex)
    r_ref = slant_range(traj.positions, srp.position)
    r_el = slant_range(element_positions(traj, radar), srp.position)
    steer = np.exp(1j * wavenumber(0, radar) * (r_el - r_ref[None, :]))
    return np.einsum("vni,vn->ni", cube.data, steer) / cube.data.shape[0]


def _range_phasor(r_c, radar: RadarParams) -> np.ndarray:
    """``exp(j k(i) r_c(n))`` for all ``(n, i)``.

    k is linear in i, so each row is a geometric sequence; a running product
    replaces N_c * N_s complex exponentials with 2 * N_c of them.
    """
    r_c = np.asarray(r_c, dtype=float)
    k0 = wavenumber(0, radar)
    dk = (2.0 / C) * radar.gamma * radar.T_s
    steps = np.empty((r_c.size, radar.N_s), dtype=complex)
    steps[:, 0] = np.exp(1j * r_c * k0)
    steps[:, 1:] = np.exp(1j * r_c * dk)[:, None]
    return np.cumprod(steps, axis=1)


def range_compensate(history, traj: Trajectory, srp: Srp, radar: RadarParams) -> CompensatedHistory:
    """Multiply by ``exp(+j k(i) r_c(n))`` using the supplied trajectory."""
    history = np.asarray(history)
    if history.shape != (len(traj), radar.N_s):
        raise ConfigError(f"history shape {history.shape} != ({len(traj)}, {radar.N_s})")
    geom = aperture_geometry(traj, srp)
    k = wavenumbers(radar)
    data = history * _range_phasor(geom.r_c, radar)
    scale = np.cos(geom.psi)[:, None] * k[None, :]
    kx = scale * np.sin(geom.alpha)[:, None]
    ky = scale * np.cos(geom.alpha)[:, None]
    return CompensatedHistory(data, kx, ky, k, geom)


def apply_phase_correction(hist: CompensatedHistory, beta, beta_y=0.0, beta_z=0.0) -> CompensatedHistory:
    """Remove the phase of a linear localization error ``e(n) = beta * n``.

    Along-track: multiply by ``exp(-j kx beta n)``.  The optional cross-track
    and vertical slopes extend the correction with ``ky * beta_y * n`` and
    ``-k sin(psi) * beta_z * n`` (radar above the scene plane).
    """
    n = np.arange(hist.data.shape[0])[:, None]
    phase = hist.kx * (beta * n)
    if beta_y:
        phase = phase + hist.ky * (beta_y * n)
    if beta_z:
        phase = phase - np.outer(np.sin(hist.geometry.psi), hist.k) * (beta_z * n)
    return hist.with_data(hist.data * np.exp(-1j * phase))


def inscribed_extent(hist: CompensatedHistory):
    """``(kx_lo, kx_hi, ky_lo, ky_hi)`` of the rectangle inside the polar annulus."""
    ky_lo = hist.ky[:, 0].max()
    ky_hi = hist.ky[:, -1].min()
    tan = np.tan(hist.geometry.alpha)
    t_min, t_max = tan.min(), tan.max()
    kx_lo = max(ky_lo * t_min, ky_hi * t_min)
    kx_hi = min(ky_lo * t_max, ky_hi * t_max)
    return kx_lo, kx_hi, ky_lo, ky_hi


def polar_resample(hist: CompensatedHistory, nkx=None, nky=None, method="cubic") -> RectHistory:
    """Two-stage separable interpolation onto the inscribed rectangular grid.

    Stage one interpolates each chirp along fast time onto a common uniform
    ``ky`` axis; stage two interpolates each ``ky`` row across chirps onto a
    uniform ``kx`` axis.  Samples outside the polar support are zero.
    """
    if method not in ("cubic", "linear"):
        raise ConfigError(f"unknown interpolation method {method!r}")
    nc, ns = hist.data.shape
    nkx = nc if nkx is None else int(nkx)
    nky = ns if nky is None else int(nky)
    if nkx < 1 or nky < 2:
        raise ConfigError(f"grid must have nkx >= 1 and nky >= 2, got ({nkx}, {nky})")
    alpha = hist.geometry.alpha
    if np.ptp(alpha) >= np.pi / 2:
        raise GeometryError("squint span must be below pi/2")
    kx_lo, kx_hi, ky_lo, ky_hi = inscribed_extent(hist)
    if not ky_hi > ky_lo:
        raise GeometryError("empty inscribed rectangle: no common ky support")
    if not kx_hi > kx_lo and not (nkx == 1 and kx_hi == kx_lo):
        raise GeometryError("empty inscribed rectangle: squint span too large for the band")

    cubic = method == "cubic"
    ky = np.linspace(ky_lo, ky_hi, nky)
    stage1 = kernels.interp_rows(hist.ky, hist.data, np.broadcast_to(ky, (nc, nky)), cubic)

    tan = np.tan(alpha)
    order = np.argsort(tan, kind="stable")
    if nc > 1 and not np.all(np.diff(tan[order]) > 0):
        raise GeometryError("squint must vary strictly monotonically across chirps")
    kx = np.linspace(kx_lo, kx_hi, nkx)
    src = ky[:, None] * tan[order][None, :]
    data = kernels.interp_rows(src, stage1.T[:, order], np.broadcast_to(kx, (nky, nkx)), cubic)
    return RectHistory(data, kx, ky)


def _axis(n, step):
    return (np.arange(n) - n // 2) * step


def pfa_image(rect: RectHistory, zero_pad=2, window=None) -> SarImage:
    """Unitary 2-D inverse FFT of the rectangular history.

    Pixel pitch is ``2*pi / (N_padded * dk)`` per axis; the SRP is pixel
    ``(N_y//2, N_x//2)``.  ``window='hann'`` tapers both wavenumber axes.
    """
    data = rect.data
    nky, nkx = data.shape
    if window == "hann":
        data = data * np.outer(np.hanning(nky + 2)[1:-1], np.hanning(nkx + 2)[1:-1])
    elif window not in (None, "none"):
        raise ConfigError(f"unknown window {window!r}")
    py, px = int(round(nky * zero_pad)), int(round(nkx * zero_pad))
    if py < nky or px < nkx:
        raise ConfigError(f"zero_pad must be >= 1, got {zero_pad}")
    padded = np.zeros((py, px), dtype=complex)
    padded[:nky, :nkx] = data
    pixels = np.fft.fftshift(np.fft.ifft2(padded, norm="ortho"))

    dky = (rect.ky[-1] - rect.ky[0]) / (nky - 1)
    y_axis = _axis(py, 2 * np.pi / (py * dky))
    if nkx > 1:
        dkx = (rect.kx[-1] - rect.kx[0]) / (nkx - 1)
        x_axis = _axis(px, 2 * np.pi / (px * dkx))
        res_x = SINC_3DB * 2 * np.pi / (nkx * dkx)
    else:
        x_axis = np.arange(px) - px // 2.0
        res_x = np.nan
    meta = {
        "pipeline": "pfa",
        "kx_axis": rect.kx,
        "ky_axis": rect.ky,
        "slow_time_support": nkx,
        "zero_pad": zero_pad,
        "window": window or "none",
        "resolution": (res_x, SINC_3DB * 2 * np.pi / (nky * dky)),
    }
    return SarImage(pixels, x_axis, y_axis, meta)


def form_pfa(hist: CompensatedHistory, beta=0.0, nkx=None, nky=None, zero_pad=2,
             method="cubic", window=None) -> SarImage:
    """Phase-correct (if ``beta``), resample and image a compensated history."""
    if beta:
        hist = apply_phase_correction(hist, beta)
    image = pfa_image(polar_resample(hist, nkx, nky, method), zero_pad, window)
    image.meta["beta_hat"] = float(beta)
    return image
