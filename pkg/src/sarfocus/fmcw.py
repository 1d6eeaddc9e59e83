"""Synthetic multi-channel FMCW beat-signal cubes over point scenes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, RangeAmbiguityError, UndefinedMetricError
from .geometry import RadarParams, Scene, Trajectory, element_positions, wavenumbers

PROVENANCES = ("simulated", "ingested")


@dataclass(frozen=True)
class BeatCube:
    """Complex beat samples indexed ``[channel, chirp, fast-time sample]``."""

    data: np.ndarray
    radar: RadarParams
    provenance: str = "simulated"

    def __post_init__(self):
        data = np.asarray(self.data)
        if not np.iscomplexobj(data):
            data = data.astype(complex)
        expected = (self.radar.N_v, self.radar.N_c, self.radar.N_s)
        if data.shape != expected:
            raise ConfigError(f"cube shape {data.shape} does not match radar {expected}")
        if not np.all(np.isfinite(data)):
            raise ConfigError("cube samples must be finite")
        if self.provenance not in PROVENANCES:
            raise ConfigError(f"unknown provenance {self.provenance!r}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def channel_count(self):
        return self.data.shape[0]


def simulate_beat_cube(scene: Scene, traj: Trajectory, radar: RadarParams, dtype=complex):
    """Beat signal ``sum_s sigma_s * exp(-j k(i) r_s(v, n))`` for every channel.

    Stop-and-go: each chirp sees the scene from a single position.  Virtual
    element ``v`` sits ``(v - (N_v-1)/2) * d_v`` along x from the trajectory
    point.  Scatterers are accumulated in scene order.
    """
    if traj.label != "true":
        raise ConfigError(f"simulation expects the true trajectory, got {traj.label!r}")
    if len(scene) == 0:
        raise ConfigError("scene has no scatterers")
    if len(traj) != radar.N_c:
        raise ConfigError(f"trajectory has {len(traj)} chirps, radar expects {radar.N_c}")

    k = wavenumbers(radar)
    elements = element_positions(traj, radar)
    data = np.zeros((radar.N_v, radar.N_c, radar.N_s), dtype=complex)
    for pos, sigma in zip(scene.positions, scene.reflectivities):
        d = elements - pos
        r = np.sqrt(np.sum(d * d, axis=-1))
        if np.any(r >= radar.r_max):
            raise RangeAmbiguityError(
                f"scatterer at {tuple(float(p) for p in pos)} reaches {r.max():.3f} m >= r_max {radar.r_max:.3f} m"
            )
        if sigma == 0:
            continue
        data += sigma * np.exp(-1j * r[..., None] * k)
    return BeatCube(data.astype(dtype, copy=False), radar, "simulated")


def add_noise(cube: BeatCube, snr_db, seed: int) -> BeatCube:
    """Add circular complex Gaussian noise at the given mean-power SNR.

    ``snr_db = inf`` returns the cube unchanged.
    """
    if np.isposinf(snr_db):
        return cube
    power = np.mean(np.abs(cube.data) ** 2)
    if power == 0:
        raise UndefinedMetricError("SNR is undefined for an all-zero cube")
    sigma2 = power / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng(seed)
    shape = cube.data.shape
    noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    noisy = cube.data + np.sqrt(sigma2 / 2.0) * noise
    return BeatCube(noisy.astype(cube.data.dtype, copy=False), cube.radar, cube.provenance)
