"""Image-quality and cost metrics: IC, IE, azimuth resolution, runtime."""

from __future__ import annotations

import time
import warnings
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import UndefinedMetricError
from .image import SarImage


class ResolutionWarning(UserWarning):
    """Fewer measurable peaks than requested."""


def _pixels(image):
    return image.pixels if isinstance(image, SarImage) else np.asarray(image)


def image_contrast(image) -> float:
    """Normalised standard deviation of intensity, ``std(I) / mean(I)``."""
    intensity = np.abs(_pixels(image)) ** 2
    if intensity.size == 0:
        raise UndefinedMetricError("image contrast of an empty image")
    mean = intensity.mean()
    if not mean > 0:
        raise UndefinedMetricError("image contrast is undefined for an all-zero image")
    return float(np.sqrt(np.mean((intensity - mean) ** 2)) / mean)


def image_entropy(image, levels=256, domain="linear", floor_db=-60.0) -> float:
    """Histogram entropy in bits of the intensity quantised to ``levels`` bins.

    ``domain='linear'`` bins intensity uniformly on ``[0, max]``;
    ``domain='db'`` bins ``10 log10(I/max)`` on ``[floor_db, 0]``.
    """
    intensity = (np.abs(_pixels(image)) ** 2).ravel()
    if intensity.size == 0:
        raise UndefinedMetricError("image entropy of an empty image")
    peak = intensity.max()
    if not peak > 0:
        raise UndefinedMetricError("image entropy is undefined for an all-zero image")
    if domain == "linear":
        scaled = intensity / peak
    elif domain == "db":
        with np.errstate(divide="ignore"):
            db = 10 * np.log10(intensity / peak)
        scaled = (np.clip(db, floor_db, 0.0) - floor_db) / -floor_db
    else:
        raise ValueError(f"unknown entropy domain {domain!r}")
    bins = np.minimum((scaled * levels).astype(np.int64), levels - 1)
    p = np.bincount(bins, minlength=levels) / bins.size
    p = p[p > 0]
    return float(max(0.0, -np.sum(p * np.log2(p))))


class AzimuthResolution(NamedTuple):
    mean: float
    per_peak: list


def _crossing(power, start, step, half):
    j = start
    while 0 <= j + step < power.size:
        nxt = j + step
        if power[nxt] <= half:
            # linear interpolation in power between j and nxt
            return j + step * (power[j] - half) / (power[j] - power[nxt])
        j = nxt
    return None


def _local_maxima(mag):
    padded = np.pad(mag, 1, mode="constant", constant_values=-np.inf)
    centre = padded[1:-1, 1:-1]
    is_max = np.ones(mag.shape, dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy or dx:
                is_max &= centre >= padded[1 + dy : padded.shape[0] - 1 + dy, 1 + dx : padded.shape[1] - 1 + dx]
    return np.argwhere(is_max & (mag > 0))


def azimuth_resolution(image: SarImage, n_peaks=5, exclusion=None) -> AzimuthResolution:
    """-3 dB azimuth (x) width of the ``n_peaks`` strongest separated peaks.

    ``exclusion`` is ``(rx, ry)`` in metres; peaks closer than this ellipse
    to an already selected peak are skipped.  Defaults to three times
    ``image.meta['resolution']`` when present, else three times the
    measured widths of the brightest peak.  Peaks without a -3 dB crossing
    on both sides (image border) are skipped.
    """
    power = image.intensity
    if not power.max() > 0:
        raise UndefinedMetricError("azimuth resolution of an all-zero image")
    dx = np.mean(np.diff(image.x_axis)) if image.x_axis.size > 1 else 1.0
    dy = np.mean(np.diff(image.y_axis)) if image.y_axis.size > 1 else 1.0

    if exclusion is None:
        res = image.meta.get("resolution")
        if res is not None and np.all(np.isfinite(res)):
            exclusion = (3 * res[0], 3 * res[1])
        else:
            row, col = image.peak()
            wx = _width(power[row, :], col) or 1.0
            wy = _width(power[:, col], row) or 1.0
            exclusion = (3 * wx * dx, 3 * wy * dy)
    rx, ry = exclusion

    maxima = _local_maxima(power)
    order = np.argsort(power[maxima[:, 0], maxima[:, 1]], kind="stable")[::-1]
    chosen, widths = [], []
    for row, col in maxima[order]:
        x, y = image.x_axis[col], image.y_axis[row]
        if any(((x - cx) / rx) ** 2 + ((y - cy) / ry) ** 2 < 1.0 for cx, cy in chosen):
            continue
        chosen.append((x, y))
        w = _width(power[row, :], col)
        if w is None:
            continue
        widths.append(float(w * dx))
        if len(widths) == n_peaks:
            break
    if len(widths) < n_peaks:
        warnings.warn(
            f"only {len(widths)} of {n_peaks} peaks had a measurable -3 dB width",
            ResolutionWarning, stacklevel=2,
        )
    mean = float(np.mean(widths)) if widths else float("nan")
    return AzimuthResolution(mean, widths)


def _width(cut, idx):
    """Fractional -3 dB width (in samples) of ``cut`` around index ``idx``."""
    half = cut[idx] / 2.0
    left = _crossing(cut, idx, -1, half)
    right = _crossing(cut, idx, +1, half)
    if left is None or right is None:
        return None
    return right - left


@dataclass
class MetricsReport:
    ic: float
    ie: float
    ar_m: float
    ar_per_peak: list
    cc_s: float
    pipeline: str = ""
    autofocus: str = "none"
    beta_hat: float | None = None
    stages: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


class RuntimeProbe:
    """Monotonic wall-clock timer for named pipeline stages.

    >>> probe = RuntimeProbe()
    >>> with probe("range_fft"):
    ...     pass
    >>> probe.total >= probe.stages["range_fft"]
    True
    """

    def __init__(self):
        self.stages = {}

    @contextmanager
    def __call__(self, tag):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.record(tag, time.perf_counter() - start)

    def record(self, tag, seconds):
        self.stages[tag] = self.stages.get(tag, 0.0) + seconds
        return self.stages[tag]

    @property
    def total(self):
        return float(sum(self.stages.values()))


def runtime_probe(probe: RuntimeProbe, op_tag, wall_clock) -> float:
    """Record ``wall_clock`` seconds under ``op_tag``; returns the stage total."""
    return probe.record(op_tag, wall_clock)


def evaluate(image: SarImage, n_peaks=5, cc_s=0.0, stages=None) -> MetricsReport:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResolutionWarning)
        ar = azimuth_resolution(image, n_peaks)
    return MetricsReport(
        ic=image_contrast(image),
        ie=image_entropy(image),
        ar_m=ar.mean,
        ar_per_peak=ar.per_peak,
        cc_s=cc_s,
        pipeline=image.meta.get("pipeline", ""),
        autofocus=image.meta.get("autofocus", "none"),
        beta_hat=image.meta.get("beta_hat"),
        stages=dict(stages or {}),
    )
