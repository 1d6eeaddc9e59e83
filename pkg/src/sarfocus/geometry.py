"""Radar parameters, trajectories, scenes and the shared geometry.

Coordinate frame: ``x`` along track, ``y`` cross-track towards the scene,
``z`` up.  Scatterers and the scene reference point (SRP) normally sit on
the ``z = 0`` plane.

Squint convention: ``sin(alpha) = (x_srp - x_radar) / r_ground``, i.e. the
squint is positive while the SRP is still ahead of the radar.  With this
sign the first-order range to a scatterer at offset ``(x_s, y_s)`` from the
SRP is ``r_c + cos(psi) * (x_s*sin(alpha) + y_s*cos(alpha))``, which is the
projection the polar-format phase model and the localization-error model
are built on.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DomainError, GeometryError

C = 299792458.0

TRAJECTORY_LABELS = ("true", "measured", "corrected")


@dataclass(frozen=True)
class RadarParams:
    """FMCW radar settings.

    Parameters
    ----------
    f_c : float
        Carrier (start) frequency in Hz.
    B : float
        Sweep bandwidth in Hz, swept over the sampled window ``N_s * T_s``.
    T_s : float
        ADC sampling period in s.
    T_c : float
        Pulse repetition time in s.
    N_c, N_s, N_v : int
        Chirps per aperture, samples per chirp, virtual receive channels.
    d_v : float, optional
        Virtual element spacing along track in m. Defaults to half a
        carrier wavelength.
    """

    f_c: float = 77.45e9
    B: float = 900.9e6
    T_s: float = 1.0 / 5e6
    T_c: float = 65e-6
    N_c: int = 128
    N_s: int = 256
    N_v: int = 4
    d_v: float | None = None

    def __post_init__(self):
        if self.d_v is None and self.f_c > 0:
            object.__setattr__(self, "d_v", C / self.f_c / 2.0)
        problems = self.problems()
        if problems:
            raise ConfigError("invalid radar parameters", problems)

    def problems(self) -> list[str]:
        out = []
        for name in ("f_c", "B", "T_s", "T_c", "d_v"):
            value = getattr(self, name)
            if value is None or not np.isfinite(value):
                out.append(f"radar.{name} must be finite (got {value!r})")
        for name in ("f_c", "B", "T_s"):
            value = getattr(self, name)
            if value is not None and np.isfinite(value) and value <= 0:
                out.append(f"radar.{name} must be > 0 (got {value!r})")
        if self.d_v is not None and self.d_v < 0:
            out.append(f"radar.d_v must be >= 0 (got {self.d_v!r})")
        for name, lo in (("N_c", 2), ("N_s", 2), ("N_v", 1)):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < lo:
                out.append(f"radar.{name} must be an integer >= {lo} (got {value!r})")
        timing_ok = not any(n in p for p in out for n in ("T_c", "T_s", "N_s"))
        if timing_ok and self.T_c < self.N_s * self.T_s:
            out.append(
                f"radar.T_c ({self.T_c!r}) must be >= N_s*T_s ({self.N_s * self.T_s!r})"
            )
        return out

    @property
    def omega_c(self) -> float:
        return 2.0 * np.pi * self.f_c

    @property
    def F_s(self) -> float:
        return 1.0 / self.T_s

    @property
    def gamma(self) -> float:
        """Chirp slope in rad/s^2 (full bandwidth over the sampled window)."""
        return 2.0 * np.pi * self.B / (self.N_s * self.T_s)

    @property
    def r_max(self) -> float:
        """Maximum unambiguous range, ``pi * c * F_s / gamma``."""
        return np.pi * C * self.F_s / self.gamma

    @property
    def wavelength(self) -> float:
        return C / self.f_c

    @property
    def range_resolution(self) -> float:
        return C / (2.0 * self.B)

    def replace(self, **changes) -> "RadarParams":
        return replace(self, **changes)


def _frozen(array, dtype=float):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Trajectory:
    """Per-chirp radar phase-centre positions, shape ``(N_c, 3)``."""

    positions: np.ndarray
    label: str = "true"

    def __post_init__(self):
        pos = _frozen(self.positions)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ConfigError(f"trajectory positions must have shape (N, 3), got {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise ConfigError("trajectory positions must be finite")
        if self.label not in TRAJECTORY_LABELS:
            raise ConfigError(f"unknown trajectory label {self.label!r}")
        object.__setattr__(self, "positions", pos)

    def __len__(self):
        return self.positions.shape[0]

    @classmethod
    def linear(cls, radar: RadarParams, velocity=17.5, start=None, n_chirps=None):
        """Constant-velocity track along +x, sampled once per chirp.

        ``start`` defaults to a position that centres the aperture on
        ``x = 0``.
        """
        n = radar.N_c if n_chirps is None else n_chirps
        step = velocity * radar.T_c
        if start is None:
            start = (-step * (n - 1) / 2.0, 0.0, 0.0)
        start = np.asarray(start, dtype=float)
        pos = np.zeros((n, 3))
        pos[:] = start
        pos[:, 0] += step * np.arange(n)
        return cls(pos, "true")


@dataclass(frozen=True)
class Srp:
    position: np.ndarray = field(default_factory=lambda: np.array([0.0, 22.0, 0.0]))

    def __post_init__(self):
        pos = _frozen(self.position)
        if pos.shape != (3,) or not np.all(np.isfinite(pos)):
            raise ConfigError(f"SRP must be a finite 3-vector, got {self.position!r}")
        object.__setattr__(self, "position", pos)


@dataclass(frozen=True)
class Scene:
    """Point scatterers: positions ``(K, 3)`` in m, complex reflectivities ``(K,)``."""

    positions: np.ndarray
    reflectivities: np.ndarray

    def __post_init__(self):
        pos = _frozen(np.atleast_2d(self.positions))
        refl = _frozen(np.atleast_1d(self.reflectivities), complex)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ConfigError(f"scatterer positions must have shape (K, 3), got {pos.shape}")
        if refl.shape != (pos.shape[0],):
            raise ConfigError("one reflectivity per scatterer is required")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(refl))):
            raise ConfigError("scatterer positions and reflectivities must be finite")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "reflectivities", refl)

    @classmethod
    def from_points(cls, points):
        """Build from ``[((x, y, z), sigma), ...]``."""
        points = list(points)
        if not points:
            return cls(np.zeros((0, 3)), np.zeros(0, complex))
        pos = [p for p, _ in points]
        refl = [s for _, s in points]
        return cls(np.array(pos, dtype=float), np.array(refl, dtype=complex))

    def __len__(self):
        return self.positions.shape[0]

    def __or__(self, other: "Scene") -> "Scene":
        return Scene(
            np.vstack([self.positions, other.positions]),
            np.concatenate([self.reflectivities, other.reflectivities]),
        )

    def scaled(self, factor) -> "Scene":
        return Scene(self.positions, self.reflectivities * factor)


@dataclass(frozen=True)
class ChirpGeometry:
    """Slant range, squint and grazing angle to the SRP.

    Fields are scalars for a single chirp or arrays of length ``N_c``.
    """

    r_c: np.ndarray
    alpha: np.ndarray
    psi: np.ndarray


def wavenumber(i, radar) -> np.ndarray:
    """Wavenumber ``k(i) = (2/c) * (omega_c + gamma*T_s*i)`` in rad/m.

    ``radar`` only needs ``f_c``, ``gamma``, ``T_s`` and ``N_s`` attributes.
    """
    idx = np.asarray(i, dtype=float)
    if np.any(idx < 0) or np.any(idx > radar.N_s - 1):
        raise DomainError(f"fast-time index out of range [0, {radar.N_s - 1}]: {i!r}")
    k = (2.0 / C) * (2.0 * np.pi * radar.f_c + radar.gamma * radar.T_s * idx)
    return k if k.ndim else float(k)


def wavenumbers(radar) -> np.ndarray:
    return wavenumber(np.arange(radar.N_s), radar)


def slant_range(radar_pos, scatterer_pos):
    """Euclidean distance between two points (broadcasts over leading axes)."""
    d = np.asarray(radar_pos, dtype=float) - np.asarray(scatterer_pos, dtype=float)
    r = np.sqrt(np.sum(d * d, axis=-1))
    return r if np.ndim(r) else float(r)


def _geometry(positions, srp_pos):
    d = srp_pos[None, :] - positions
    ground = np.hypot(d[:, 0], d[:, 1])
    r_c = np.sqrt(ground**2 + d[:, 2] ** 2)
    if np.any(r_c <= 0):
        raise GeometryError("radar position coincides with the SRP")
    if np.any(ground <= 0):
        raise GeometryError("radar is vertically above the SRP (undefined squint)")
    if np.any(d[:, 1] <= 0):
        raise GeometryError("SRP must lie on the +y (look) side of the radar")
    alpha = np.arctan2(d[:, 0], d[:, 1])
    psi = np.arctan2(-d[:, 2], ground)
    return r_c, alpha, psi


def chirp_geometry(traj: Trajectory, srp: Srp, n: int) -> ChirpGeometry:
    """Geometry of chirp ``n`` relative to the SRP (scalar fields)."""
    if not 0 <= n < len(traj):
        raise DomainError(f"chirp index {n} out of range [0, {len(traj) - 1}]")
    r_c, alpha, psi = _geometry(traj.positions[n : n + 1], srp.position)
    return ChirpGeometry(float(r_c[0]), float(alpha[0]), float(psi[0]))


def aperture_geometry(traj: Trajectory, srp: Srp) -> ChirpGeometry:
    """Geometry of every chirp relative to the SRP (array fields)."""
    r_c, alpha, psi = _geometry(traj.positions, srp.position)
    return ChirpGeometry(_frozen(r_c), _frozen(alpha), _frozen(psi))


def shift_along_track(traj: Trajectory, beta: float, label: str) -> Trajectory:
    pos = traj.positions.copy()
    pos[:, 0] += beta * np.arange(len(traj))
    return Trajectory(pos, label)


def inject_linear_error(traj: Trajectory, beta: float) -> Trajectory:
    """Measured trajectory carrying the along-track error ``e_x(n) = beta*n``.

    The error is defined as true minus measured position, so the measured
    track is ``x_true(n) - beta*n`` and ``correct_trajectory(measured, beta)``
    restores the true track exactly.
    """
    if traj.label != "true":
        raise ConfigError(f"error injection expects a true trajectory, got {traj.label!r}")
    return shift_along_track(traj, -beta, "measured")


def element_offsets(radar: RadarParams) -> np.ndarray:
    """Along-track offset of each virtual element from the array centre."""
    return (np.arange(radar.N_v) - (radar.N_v - 1) / 2.0) * radar.d_v


def element_positions(traj: Trajectory, radar: RadarParams) -> np.ndarray:
    """Virtual element positions, shape ``(N_v, N_c, 3)``."""
    pos = np.repeat(traj.positions[None, :, :], radar.N_v, axis=0)
    pos[:, :, 0] += element_offsets(radar)[:, None]
    return pos
