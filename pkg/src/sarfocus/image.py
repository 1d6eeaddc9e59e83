from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


@dataclass
class SarImage:
    """Complex image with physical axes.

    ``pixels[row, col]`` sits at ``(x_axis[col], y_axis[row])`` in metres.
    ``meta`` carries provenance: pipeline and autofocus ids, estimated
    ``beta_hat``, runtime, and algorithm-specific extras.
    """

    pixels: np.ndarray
    x_axis: np.ndarray
    y_axis: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels)
        self.x_axis = np.asarray(self.x_axis, dtype=float)
        self.y_axis = np.asarray(self.y_axis, dtype=float)
        if self.pixels.ndim != 2 or self.pixels.size == 0:
            raise ConfigError(f"image must be a non-empty 2-D array, got {self.pixels.shape}")
        if self.pixels.shape != (self.y_axis.size, self.x_axis.size):
            raise ConfigError(
                f"pixels {self.pixels.shape} do not match axes "
                f"({self.y_axis.size}, {self.x_axis.size})"
            )
        for name, axis in (("x_axis", self.x_axis), ("y_axis", self.y_axis)):
            if axis.size > 1 and not np.all(np.diff(axis) > 0):
                raise ConfigError(f"{name} must be strictly increasing")

    @property
    def shape(self):
        return self.pixels.shape

    @property
    def intensity(self):
        return np.abs(self.pixels) ** 2

    def peak(self):
        """``(row, col)`` of the brightest pixel."""
        return np.unravel_index(np.argmax(np.abs(self.pixels)), self.pixels.shape)

    def peak_position(self):
        row, col = self.peak()
        return float(self.x_axis[col]), float(self.y_axis[row])

    def with_pixels(self, pixels, **meta) -> "SarImage":
        return SarImage(pixels, self.x_axis, self.y_axis, {**self.meta, **meta})
