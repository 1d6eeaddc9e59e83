"""Time-domain backprojection in SISO, pre-beamformed and pixel-wise variants."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import ConfigError
from .fmcw import BeatCube
from .geometry import (
    RadarParams,
    Trajectory,
    element_positions,
    shift_along_track,
    wavenumber,
)
from .image import SarImage
from .pfa import SINC_3DB

INTERP_CODES = {"linear": 0, "sinc": 1}


@dataclass(frozen=True)
class RangeProfiles:
    """Range-compressed chirps ``data[chirp, bin]`` with bin ``v`` at range ``v * dr``.

    The fast-time transform is taken about the centre sample ``i_c`` so the
    profile envelope carries no linear phase; ``k_ref = k(i_c)`` is the matching
    phase reference (see ``backproject``).
    """

    data: np.ndarray
    dr: float
    zero_pad: int
    i_c: float
    k_ref: float
    channel: int | None = None

    @property
    def n_bins(self):
        return self.data.shape[-1]


@dataclass(frozen=True)
class ImageGrid:
    x_axis: np.ndarray
    y_axis: np.ndarray
    z: float = 0.0

    def __post_init__(self):
        for name in ("x_axis", "y_axis"):
            axis = np.asarray(getattr(self, name), dtype=float)
            if axis.ndim != 1 or axis.size == 0:
                raise ConfigError(f"{name} must be a non-empty 1-D array")
            if axis.size > 2 and not np.allclose(np.diff(axis), axis[1] - axis[0], rtol=1e-9, atol=0):
                raise ConfigError(f"{name} must be uniformly spaced")
            object.__setattr__(self, name, axis)

    @classmethod
    def centered(cls, center, extent, shape, z=0.0):
        """Grid of ``shape = (ny, nx)`` pixels spanning ``extent = (wx, wy)`` m."""
        ny, nx = shape
        wx, wy = extent
        xs = center[0] + (np.arange(nx) - (nx - 1) / 2.0) * (wx / nx)
        ys = center[1] + (np.arange(ny) - (ny - 1) / 2.0) * (wy / ny)
        return cls(xs, ys, z)

    @property
    def shape(self):
        return (self.y_axis.size, self.x_axis.size)


def range_profiles(history, radar: RadarParams, zero_pad=4, channel=None) -> RangeProfiles:
    """Zero-padded fast-time transform of each chirp, ``[..., chirp, bin]``.

    The beat phase ``-k(i) r`` rotates positively with bin index under
    ``sum_i s(i) exp(+j 2 pi v (i - i_c) / N_bins)``, so bin ``v`` maps to
    range ``v * r_max / N_bins``.
    """
    history = np.asarray(history, dtype=complex)
    ns = history.shape[-1]
    if ns != radar.N_s:
        raise ConfigError(f"history has {ns} samples per chirp, radar expects {radar.N_s}")
    if int(zero_pad) != zero_pad or zero_pad < 1:
        raise ConfigError(f"zero_pad must be a positive integer, got {zero_pad}")
    n_bins = ns * int(zero_pad)
    i_c = (ns - 1) / 2.0
    g = np.fft.ifft(history, n=n_bins, axis=-1) * n_bins
    g = g * np.exp(-2j * np.pi * np.arange(n_bins) * i_c / n_bins)
    return RangeProfiles(g, radar.r_max / n_bins, int(zero_pad), i_c, wavenumber(i_c, radar), channel)


def _run(profiles, positions, grid, interp, radar, meta):
    if interp not in INTERP_CODES:
        raise ConfigError(f"unknown interpolation {interp!r}")
    pixels, excluded = kernels.backproject(
        profiles.data, positions, grid.x_axis, grid.y_axis, grid.z,
        profiles.dr, profiles.k_ref, INTERP_CODES[interp],
    )
    meta = {
        "normalization": "unnormalized sum over chirps",
        "excluded_pixels": excluded,
        "interp": interp,
        "backend": kernels.BACKEND,
        **meta,
    }
    return SarImage(pixels, grid.x_axis, grid.y_axis, meta)


def _resolution(traj, grid, radar):
    span = np.ptp(traj.positions[:, 0]) + np.ptp(traj.positions[:, 0]) / max(len(traj) - 1, 1)
    centre = np.array([grid.x_axis.mean(), grid.y_axis.mean(), grid.z])
    r = np.linalg.norm(traj.positions.mean(axis=0) - centre)
    res_x = SINC_3DB * radar.wavelength * r / (2 * span) if span > 0 else np.nan
    return (res_x, SINC_3DB * radar.range_resolution)


def backproject(profiles: RangeProfiles, traj: Trajectory, grid: ImageGrid, radar: RadarParams,
                interp="linear") -> SarImage:
    """Backproject onto ``grid``: ``sum_n G(r_pn / dr, n) * exp(j 2 w_c r_pn / c)``.

    ``G`` here is the centred profile, so the rotation uses ``k(i_c)``; at the
    exact fractional bin this equals the carrier-only reference applied to
    the uncentred transform.  Pixels whose range reaches ``r_max`` for any
    chirp are left at zero and counted in ``meta['excluded_pixels']``.
    """
    data = profiles.data
    if data.ndim != 2 or data.shape[0] != len(traj):
        raise ConfigError(f"profiles {data.shape} do not match a {len(traj)}-chirp trajectory")
    return _run(
        replace(profiles, data=data[None]),
        traj.positions[None], grid, interp, radar,
        {"pipeline": "bpa", "trajectory": traj.label, "resolution": _resolution(traj, grid, radar)},
    )


def pre_bpa_beamform(cube: BeatCube) -> np.ndarray:
    """Boresight beamforming: plain average over virtual channels."""
    return np.mean(cube.data, axis=0)


def pixelwise_bf_backproject(cube: BeatCube, traj: Trajectory, grid: ImageGrid, radar: RadarParams,
                             zero_pad=4, interp="linear") -> SarImage:
    """Backprojection with per-pixel coherent combination of all channels.

    Each channel is interpolated at its own element-to-pixel range and
    rotated by its own carrier phase before the channel average.
    """
    profiles = range_profiles(cube.data, radar, zero_pad)
    return _run(
        profiles, element_positions(traj, radar), grid, interp, radar,
        {"pipeline": "bpa_pixelwise", "trajectory": traj.label,
         "resolution": _resolution(traj, grid, radar)},
    )


def correct_trajectory(traj: Trajectory, beta) -> Trajectory:
    """Apply ``x_r(n) <- x_r(n) + beta*n`` to a measured trajectory."""
    if traj.label not in ("measured", "corrected"):
        raise ConfigError(f"correction expects a measured trajectory, got {traj.label!r}")
    return shift_along_track(traj, beta, "corrected")
