"""Experiment scenarios: JSON schema, validation, defaults and hashing.

A scenario file is a JSON object; every section is optional::

    {
      "radar":  {"f_c": 77.45e9, "B": 900.9e6, "T_s": 2e-7, "T_c": 6.5e-5,
                 "N_c": 128, "N_s": 256, "N_v": 4, "d_v": null},
      "scene":  [{"position": [0, 22, 0], "sigma": 1.0},
                 {"position": [1, 21, 0], "sigma": [0.5, -0.2]}],
      "motion": {"velocity": 17.5, "start": null},
      "srp":    [0, 22, 0],
      "error":  {"beta_true": 5e-5, "seed": 0, "snr_db": null},
      "grids":  {"pfa": {"nkx": null, "nky": null, "zero_pad": 2,
                         "method": "cubic", "window": null},
                 "bpa": {"center": null, "extent": [6.4, 6.4],
                         "shape": [256, 256], "zero_pad": 4, "interp": "linear"}},
      "autofocus": {"leca": {"rho": null, "delta_ic": 1e-4, "max_iter": 50,
                             "fd_step": 1e-6, "beta0": 0.0, "growth": 1.5},
                    "pga": {"J": 32, "iters": 10, "window0": null,
                            "min_window": 8, "threshold_db": 20.0, "tol": 1e-4},
                    "roi": null}
    }

``sigma`` is a real number or a ``[re, im]`` pair.  ``snr_db: null`` means
noise-free.  ``start: null`` centres the aperture on ``x = 0``.
``grids.bpa.center: null`` centres the backprojection grid on the SRP.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .autofocus import LecaConfig, PgaConfig
from .bpa import ImageGrid
from .errors import ConfigError
from .fmcw import BeatCube, add_noise, simulate_beat_cube
from .geometry import RadarParams, Scene, Srp, Trajectory, inject_linear_error

DEFAULT_SCENE = (
    ((0.0, 22.0, 0.0), 1.0),
    ((-1.5, 22.0, 0.0), 0.8),
    ((1.5, 22.0, 0.0), 0.8),
    ((0.0, 20.5, 0.0), 0.6),
    ((0.0, 23.5, 0.0), 0.6),
)


@dataclass(frozen=True)
class Motion:
    velocity: float = 17.5
    start: tuple | None = None


@dataclass(frozen=True)
class ErrorModel:
    beta_true: float = 0.0
    seed: int = 0
    snr_db: float = math.inf


@dataclass(frozen=True)
class PfaGrid:
    nkx: int | None = None
    nky: int | None = None
    zero_pad: float = 2.0
    method: str = "cubic"
    window: str | None = None


@dataclass(frozen=True)
class BpaGrid:
    center: tuple | None = None
    extent: tuple = (6.4, 6.4)
    shape: tuple = (256, 256)
    zero_pad: int = 4
    interp: str = "linear"


@dataclass(frozen=True)
class AutofocusSettings:
    leca: LecaConfig = field(default_factory=LecaConfig)
    pga: PgaConfig = field(default_factory=PgaConfig)
    roi: tuple | None = None


@dataclass(frozen=True)
class Scenario:
    radar: RadarParams = field(default_factory=RadarParams)
    scene: Scene = field(default_factory=lambda: Scene.from_points(DEFAULT_SCENE))
    motion: Motion = field(default_factory=Motion)
    srp: Srp = field(default_factory=Srp)
    error: ErrorModel = field(default_factory=ErrorModel)
    pfa: PfaGrid = field(default_factory=PfaGrid)
    bpa: BpaGrid = field(default_factory=BpaGrid)
    autofocus: AutofocusSettings = field(default_factory=AutofocusSettings)

    def true_trajectory(self) -> Trajectory:
        return Trajectory.linear(self.radar, self.motion.velocity, self.motion.start)

    def measured_trajectory(self) -> Trajectory:
        return inject_linear_error(self.true_trajectory(), self.error.beta_true)

    def simulate(self, seed=None) -> BeatCube:
        """Beat cube over the true track, with noise when ``snr_db`` is finite."""
        cube = simulate_beat_cube(self.scene, self.true_trajectory(), self.radar)
        seed = self.error.seed if seed is None else seed
        return add_noise(cube, self.error.snr_db, seed)

    def bpa_grid(self) -> ImageGrid:
        center = self.bpa.center if self.bpa.center is not None else self.srp.position[:2]
        z = float(self.srp.position[2])
        return ImageGrid.centered(center, self.bpa.extent, self.bpa.shape, z)

    def replace(self, **sections) -> "Scenario":
        return replace(self, **sections)

    def to_dict(self) -> dict:
        scene = []
        for pos, sigma in zip(self.scene.positions, self.scene.reflectivities):
            s = float(sigma.real) if sigma.imag == 0 else [float(sigma.real), float(sigma.imag)]
            scene.append({"position": [float(v) for v in pos], "sigma": s})
        radar = {f.name: getattr(self.radar, f.name) for f in fields(RadarParams)}
        error = asdict(self.error)
        if math.isinf(error["snr_db"]):
            error["snr_db"] = None
        return _plain({
            "radar": radar,
            "scene": scene,
            "motion": asdict(self.motion),
            "srp": list(self.srp.position),
            "error": error,
            "grids": {"pfa": asdict(self.pfa), "bpa": asdict(self.bpa)},
            "autofocus": {
                "leca": asdict(self.autofocus.leca),
                "pga": asdict(self.autofocus.pga),
                "roi": self.autofocus.roi,
            },
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def digest(self) -> str:
        """First 16 hex digits of the SHA-256 of the canonical JSON form."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


class _Collector:
    """Accumulates every validation problem before raising once."""

    def __init__(self):
        self.problems = []

    def section(self, data, name, allowed):
        if data is None:
            return {}
        if not isinstance(data, dict):
            self.problems.append(f"{name} must be an object")
            return {}
        for key in sorted(set(data) - set(allowed)):
            self.problems.append(f"{name}.{key} is not a known field")
        return {k: v for k, v in data.items() if k in allowed}

    def number(self, value, name, integer=False, allow_none=False):
        if value is None and allow_none:
            return None
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if ok and integer:
            ok = float(value).is_integer()
        if not ok or not math.isfinite(value):
            kind = "an integer" if integer else "a finite number"
            self.problems.append(f"{name} must be {kind} (got {value!r})")
            return None
        return int(value) if integer else float(value)

    def vector(self, value, name, length, allow_none=False, integer=False):
        if value is None and allow_none:
            return None
        if not isinstance(value, (list, tuple)) or len(value) != length:
            self.problems.append(f"{name} must be a list of {length} numbers (got {value!r})")
            return None
        out = [self.number(v, f"{name}[{i}]", integer) for i, v in enumerate(value)]
        return None if any(v is None for v in out) else tuple(out)

    def build(self, cls, kwargs, name):
        # malformed fields are already reported; validate the rest with defaults
        broken = any(v is _BAD for v in kwargs.values())
        kwargs = {k: v for k, v in kwargs.items() if v is not _BAD}
        try:
            built = cls(**kwargs)
            return None if broken else built
        except ConfigError as exc:
            self.problems.extend(exc.problems or [f"{name}: {exc}"])
        except (TypeError, ValueError) as exc:
            self.problems.append(f"{name}: {exc}")
        return None


_BAD = object()


def _fields(cls):
    return [f.name for f in fields(cls)]


def _numbers(col, data, name, spec):
    out = {}
    for key, (integer, allow_none) in spec.items():
        if key not in data:
            continue
        if data[key] is None and allow_none:
            out[key] = None
            continue
        value = col.number(data[key], f"{name}.{key}", integer)
        out[key] = _BAD if value is None else value
    return out


def scenario_from_dict(data) -> Scenario:
    """Validate ``data`` and build a Scenario; every problem is reported at once."""
    col = _Collector()
    top = col.section(data, "scenario",
                      ("radar", "scene", "motion", "srp", "error", "grids", "autofocus"))

    radar_in = col.section(top.get("radar"), "radar", _fields(RadarParams))
    radar_kw = _numbers(col, radar_in, "radar", {
        "f_c": (False, False), "B": (False, False), "T_s": (False, False), "T_c": (False, False),
        "N_c": (True, False), "N_s": (True, False), "N_v": (True, False), "d_v": (False, True),
    })
    radar = col.build(RadarParams, radar_kw, "radar")

    scene = None
    if "scene" in top:
        raw = top["scene"]
        if not isinstance(raw, list) or not raw:
            col.problems.append("scene must be a non-empty list of scatterers")
        else:
            points = []
            for i, item in enumerate(raw):
                item = col.section(item, f"scene[{i}]", ("position", "sigma"))
                pos = col.vector(item.get("position"), f"scene[{i}].position", 3)
                sigma = item.get("sigma", 1.0)
                if isinstance(sigma, list):
                    pair = col.vector(sigma, f"scene[{i}].sigma", 2)
                    sigma = None if pair is None else complex(*pair)
                else:
                    sigma = col.number(sigma, f"scene[{i}].sigma")
                if pos is not None and sigma is not None:
                    points.append((pos, sigma))
            if len(points) == len(raw):
                scene = Scene.from_points(points)
    else:
        scene = Scene.from_points(DEFAULT_SCENE)

    motion_in = col.section(top.get("motion"), "motion", _fields(Motion))
    motion_kw = _numbers(col, motion_in, "motion", {"velocity": (False, False)})
    if "start" in motion_in:
        start = col.vector(motion_in["start"], "motion.start", 3, allow_none=True)
        motion_kw["start"] = _BAD if start is None and motion_in["start"] is not None else start
    if isinstance(motion_kw.get("velocity"), float) and motion_kw["velocity"] <= 0:
        col.problems.append(f"motion.velocity must be > 0 (got {motion_kw['velocity']!r})")
    motion = col.build(Motion, motion_kw, "motion")

    srp = Srp()
    if "srp" in top:
        pos = col.vector(top["srp"], "srp", 3)
        srp = Srp(np.array(pos)) if pos is not None else None

    error_in = col.section(top.get("error"), "error", _fields(ErrorModel))
    error_kw = _numbers(col, error_in, "error", {
        "beta_true": (False, False), "seed": (True, False), "snr_db": (False, True),
    })
    if "snr_db" in error_kw and error_kw["snr_db"] is None:
        error_kw["snr_db"] = math.inf
    if isinstance(error_kw.get("seed"), int) and error_kw["seed"] < 0:
        col.problems.append(f"error.seed must be >= 0 (got {error_kw['seed']})")
    error = col.build(ErrorModel, error_kw, "error")

    grids = col.section(top.get("grids"), "grids", ("pfa", "bpa"))
    pfa_in = col.section(grids.get("pfa"), "grids.pfa", _fields(PfaGrid))
    pfa_kw = _numbers(col, pfa_in, "grids.pfa", {
        "nkx": (True, True), "nky": (True, True), "zero_pad": (False, False),
    })
    for key, choices in (("method", ("cubic", "linear")), ("window", (None, "none", "hann"))):
        if key in pfa_in:
            if pfa_in[key] not in choices:
                col.problems.append(f"grids.pfa.{key} must be one of {choices} (got {pfa_in[key]!r})")
            else:
                pfa_kw[key] = pfa_in[key]
    if isinstance(pfa_kw.get("zero_pad"), float) and pfa_kw["zero_pad"] < 1:
        col.problems.append(f"grids.pfa.zero_pad must be >= 1 (got {pfa_kw['zero_pad']})")
    for key in ("nkx", "nky"):
        if isinstance(pfa_kw.get(key), int) and pfa_kw[key] < 2:
            col.problems.append(f"grids.pfa.{key} must be >= 2 (got {pfa_kw[key]})")
    pfa = col.build(PfaGrid, pfa_kw, "grids.pfa")

    bpa_in = col.section(grids.get("bpa"), "grids.bpa", _fields(BpaGrid))
    bpa_kw = _numbers(col, bpa_in, "grids.bpa", {"zero_pad": (True, False)})
    if "center" in bpa_in:
        center = col.vector(bpa_in["center"], "grids.bpa.center", 2, allow_none=True)
        bpa_kw["center"] = _BAD if center is None and bpa_in["center"] is not None else center
    for key, integer in (("extent", False), ("shape", True)):
        if key in bpa_in:
            vec = col.vector(bpa_in[key], f"grids.bpa.{key}", 2, integer=integer)
            if vec is not None and min(vec) <= 0:
                col.problems.append(f"grids.bpa.{key} entries must be > 0 (got {list(vec)})")
                vec = None
            bpa_kw[key] = _BAD if vec is None else vec
    if "interp" in bpa_in:
        if bpa_in["interp"] not in ("linear", "sinc"):
            col.problems.append(f"grids.bpa.interp must be 'linear' or 'sinc' (got {bpa_in['interp']!r})")
        else:
            bpa_kw["interp"] = bpa_in["interp"]
    if isinstance(bpa_kw.get("zero_pad"), int) and bpa_kw["zero_pad"] < 1:
        col.problems.append(f"grids.bpa.zero_pad must be >= 1 (got {bpa_kw['zero_pad']})")
    bpa = col.build(BpaGrid, bpa_kw, "grids.bpa")

    af_in = col.section(top.get("autofocus"), "autofocus", ("leca", "pga", "roi"))
    leca_in = col.section(af_in.get("leca"), "autofocus.leca", _fields(LecaConfig))
    leca = col.build(LecaConfig, _numbers(col, leca_in, "autofocus.leca", {
        "rho": (False, True), "delta_ic": (False, False), "max_iter": (True, False),
        "fd_step": (False, False), "beta0": (False, False), "growth": (False, False),
    }), "autofocus.leca")
    pga_in = col.section(af_in.get("pga"), "autofocus.pga", _fields(PgaConfig))
    pga = col.build(PgaConfig, _numbers(col, pga_in, "autofocus.pga", {
        "J": (True, False), "iters": (True, False), "window0": (True, True),
        "min_window": (True, False), "threshold_db": (False, False), "tol": (False, False),
    }), "autofocus.pga")
    roi = None
    if af_in.get("roi") is not None:
        roi = col.vector(af_in["roi"], "autofocus.roi", 4)
        if roi is not None and not (roi[0] < roi[1] and roi[2] < roi[3]):
            col.problems.append(f"autofocus.roi must be [x_min, x_max, y_min, y_max] (got {list(roi)})")
    settings = AutofocusSettings(leca, pga, roi) if leca and pga else None

    if radar is not None and scene is not None and motion is not None and srp is not None:
        # coarse consistency: every scatterer must stay inside the unambiguous range
        traj = Trajectory.linear(radar, motion.velocity, motion.start)
        far = np.max(np.linalg.norm(traj.positions[:, None, :] - scene.positions[None], axis=-1))
        if far >= radar.r_max:
            col.problems.append(f"scene reaches {far:.2f} m, beyond r_max {radar.r_max:.2f} m")

    if col.problems:
        raise ConfigError("invalid scenario", col.problems)
    return Scenario(radar, scene, motion, srp, error, pfa, bpa, settings)


def load_scenario(path) -> Scenario:
    """Read and validate a JSON scenario; omitted fields take their defaults."""
    text = Path(path).read_text()
    if not text.strip():
        return Scenario()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(data)


def save_scenario(scenario: Scenario, path):
    Path(path).write_text(scenario.to_json() + "\n")
