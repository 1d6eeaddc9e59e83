"""On-disk formats: SARC beat cubes, ``.npz`` images, PNG and CSV exports.

SARC layout (all little-endian)::

    offset  size  field
    0       4     magic b"SARC"
    4       4     u32 version (1)
    8       12    u32 N_v, N_c, N_s
    20      40    f64 f_c, B, T_s, T_c, d_v
    60      4     u32 provenance (0 simulated, 1 ingested)
    64      ...   f32 (re, im) pairs, channel-major, then chirp, then sample

The payload is ``N_v * N_c * N_s * 8`` bytes.  External recordings can be
converted by writing this header followed by the complex beat samples.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
from PIL import Image, PngImagePlugin

from .errors import ConfigError, FormatError
from .fmcw import PROVENANCES, BeatCube
from .geometry import RadarParams
from .image import SarImage

SARC_MAGIC = b"SARC"
SARC_VERSION = 1
_HEADER = struct.Struct("<4sI3I5dI")
HEADER_BYTES = _HEADER.size


def save_cube(cube: BeatCube, path):
    """Write ``cube`` as SARC.  Samples are stored as complex64."""
    r = cube.radar
    header = _HEADER.pack(
        SARC_MAGIC, SARC_VERSION, r.N_v, r.N_c, r.N_s,
        r.f_c, r.B, r.T_s, r.T_c, r.d_v, PROVENANCES.index(cube.provenance),
    )
    payload = np.ascontiguousarray(cube.data, dtype="<c8").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def load_cube(path) -> BeatCube:
    raw = Path(path).read_bytes()
    if len(raw) < HEADER_BYTES:
        raise FormatError(f"{path}: file shorter than the {HEADER_BYTES}-byte SARC header")
    magic, version, n_v, n_c, n_s, f_c, B, T_s, T_c, d_v, prov = _HEADER.unpack_from(raw)
    if magic != SARC_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {SARC_MAGIC!r}")
    if version != SARC_VERSION:
        raise FormatError(f"{path}: unsupported SARC version {version}")
    if prov >= len(PROVENANCES):
        raise FormatError(f"{path}: unknown provenance code {prov}")
    expected = n_v * n_c * n_s * 8
    if len(raw) - HEADER_BYTES != expected:
        raise FormatError(
            f"{path}: payload is {len(raw) - HEADER_BYTES} bytes, expected {expected} "
            f"for dims ({n_v}, {n_c}, {n_s})"
        )
    radar = RadarParams(f_c=f_c, B=B, T_s=T_s, T_c=T_c, N_c=n_c, N_s=n_s, N_v=n_v, d_v=d_v)
    data = np.frombuffer(raw, dtype="<c8", offset=HEADER_BYTES).reshape(n_v, n_c, n_s)
    return BeatCube(data.astype(np.complex64), radar, PROVENANCES[prov])


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, np.generic):
        return value.item()
    return value


_ARRAY_META = ("kx_axis", "ky_axis")


def save_image(image: SarImage, path, scenario_hash=None):
    """Store pixels, axes and JSON-encoded meta in an ``.npz`` archive."""
    meta = dict(image.meta)
    if scenario_hash is not None:
        meta["scenario_hash"] = scenario_hash
    np.savez(
        path, pixels=image.pixels, x_axis=image.x_axis, y_axis=image.y_axis,
        meta=np.array(json.dumps(_jsonable(meta))),
    )


def load_image(path) -> SarImage:
    try:
        with np.load(path, allow_pickle=False) as npz:
            pixels, xs, ys = npz["pixels"], npz["x_axis"], npz["y_axis"]
            meta = json.loads(str(npz["meta"]))
    except (KeyError, ValueError, OSError) as exc:
        raise FormatError(f"{path}: not a sarfocus image archive ({exc})") from exc
    for key in _ARRAY_META:
        if key in meta:
            meta[key] = np.asarray(meta[key], dtype=float)
    if "resolution" in meta:
        meta["resolution"] = tuple(np.nan if v is None else v for v in meta["resolution"])
    return SarImage(pixels, xs, ys, meta)


def db_image(image: SarImage, dyn_range_db=40.0) -> np.ndarray:
    """8-bit map of ``20 log10(|p| / max)`` clipped to ``[-dyn_range_db, 0]``."""
    mag = np.abs(image.pixels)
    peak = mag.max()
    if not peak > 0:
        return np.zeros(mag.shape, dtype=np.uint8)
    with np.errstate(divide="ignore"):
        db = 20 * np.log10(mag / peak)
    scaled = (np.clip(db, -dyn_range_db, 0.0) + dyn_range_db) / dyn_range_db
    return np.round(scaled * 255).astype(np.uint8)


def export_image(image: SarImage, path, mode="png_db", dyn_range_db=40.0, scenario_hash=None):
    """Export ``image`` as a dB-scaled PNG or a complex CSV.

    ``png_db`` flips rows so the far range is at the top and writes the axis
    annotations to ``<path>.axes.txt``; ``csv_complex`` writes one
    ``row,col,re,im`` record per pixel after ``x_axis`` and ``y_axis`` header rows.
    """
    path = Path(path)
    scenario_hash = scenario_hash or image.meta.get("scenario_hash", "")
    if mode == "png_db":
        if not dyn_range_db > 0:
            raise ConfigError(f"dyn_range_db must be > 0, got {dyn_range_db}")
        info = PngImagePlugin.PngInfo()
        info.add_text("scenario_hash", scenario_hash)
        Image.fromarray(db_image(image, dyn_range_db)[::-1]).save(path, pnginfo=info)
        xs, ys = image.x_axis, image.y_axis
        lines = [
            f"scenario_hash {scenario_hash}",
            f"pipeline {image.meta.get('pipeline', '')}",
            f"autofocus {image.meta.get('autofocus', 'none')}",
            f"dyn_range_db {dyn_range_db}",
            f"x_m {float(xs[0])!r} {float(xs[-1])!r} {xs.size} (left to right)",
            f"y_m {float(ys[0])!r} {float(ys[-1])!r} {ys.size} (bottom to top)",
        ]
        Path(str(path) + ".axes.txt").write_text("\n".join(lines) + "\n")
    elif mode == "csv_complex":
        rows, cols = np.indices(image.shape)
        table = np.column_stack([rows.ravel(), cols.ravel(),
                                 image.pixels.real.ravel(), image.pixels.imag.ravel()])
        with open(path, "w") as fh:
            fh.write(f"# scenario_hash,{scenario_hash}\n")
            fh.write("x_axis," + ",".join(repr(float(v)) for v in image.x_axis) + "\n")
            fh.write("y_axis," + ",".join(repr(float(v)) for v in image.y_axis) + "\n")
            fh.write("row,col,re,im\n")
            np.savetxt(fh, table, fmt=["%d", "%d", "%.17g", "%.17g"], delimiter=",")
    else:
        raise ConfigError(f"unknown export mode {mode!r}")
    return path


def read_csv_complex(path) -> SarImage:
    with open(path) as fh:
        lines = fh.readlines()
    head = [ln for ln in lines[:4] if not ln.startswith("#")]
    try:
        xs = np.array(head[0].split(",")[1:], dtype=float)
        ys = np.array(head[1].split(",")[1:], dtype=float)
        table = np.loadtxt(lines[4:] if lines[0].startswith("#") else lines[3:], delimiter=",", ndmin=2)
    except (IndexError, ValueError) as exc:
        raise FormatError(f"{path}: malformed complex CSV ({exc})") from exc
    pixels = np.zeros((ys.size, xs.size), dtype=complex)
    pixels[table[:, 0].astype(int), table[:, 1].astype(int)] = table[:, 2] + 1j * table[:, 3]
    return SarImage(pixels, xs, ys)
