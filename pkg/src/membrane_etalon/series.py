"""Tabular containers passed between the model code and the CSV/JSON layer.

Column names carry their unit as a trailing suffix (``wavelength_nm``,
``freq_hz``, ``psd_v2_hz``, ``transmission_norm``). The suffix registry below
maps each known suffix to its SI scale so readers can convert without
guessing.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError

# Trailing unit suffix -> multiplier into base SI units.
UNIT_SUFFIXES = {
    "m": 1.0,
    "mm": 1e-3,
    "um": 1e-6,
    "nm": 1e-9,
    "s": 1.0,
    "us": 1e-6,
    "hz": 1.0,
    "khz": 1e3,
    "mhz": 1e6,
    "rad": 1.0,
    "v": 1.0,
    "w": 1.0,
    "a": 1.0,
    "kg": 1.0,
    "norm": 1.0,       # dimensionless, normalized
    "v2_hz": 1.0,      # V^2/Hz power spectral density
    "halflambda": 1.0, # cavity offset in units of lambda/2
}


def unit_scale(column_name: str) -> float:
    """SI multiplier encoded in a column name's trailing suffix.

    Raises
    ------
    ParseError
        If the name carries no recognized unit suffix.
    """
    parts = column_name.split("_")
    # try the longest composite suffix first (e.g. v2_hz)
    for n in (2, 1):
        if len(parts) > n:
            suffix = "_".join(parts[-n:])
            if suffix in UNIT_SUFFIXES:
                return UNIT_SUFFIXES[suffix]
    raise ParseError(f"column '{column_name}' has no recognized unit suffix")


@dataclass
class SpectrumSeries:
    """One curve y(x) with unit-bearing column names."""

    x: np.ndarray
    y: np.ndarray
    x_name: str = "x_norm"
    y_name: str = "y_norm"

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.shape != self.y.shape:
            raise ParseError(
                f"series columns differ in length: {self.x.size} vs {self.y.size}"
            )

    def x_si(self) -> np.ndarray:
        """x converted to base SI units via the name suffix."""
        return self.x * unit_scale(self.x_name)

    def y_si(self) -> np.ndarray:
        return self.y * unit_scale(self.y_name)


@dataclass
class SweepMap:
    """Noise spectra over a cavity-length sweep.

    ``psd[i, j]`` is the spectral density at offset ``dl_grid[i]`` (in units
    of half the drive wavelength) and frequency ``freq_grid[j]`` (Hz).
    """

    dl_grid: np.ndarray
    freq_grid: np.ndarray
    psd: np.ndarray
    dl_name: str = "dl_over_halflambda"
    freq_name: str = "freq_hz"
    psd_name: str = "psd_v2_hz"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.dl_grid = np.asarray(self.dl_grid, dtype=float)
        self.freq_grid = np.asarray(self.freq_grid, dtype=float)
        self.psd = np.asarray(self.psd, dtype=float)
        if self.psd.shape != (self.dl_grid.size, self.freq_grid.size):
            raise ParseError(
                f"psd shape {self.psd.shape} does not match grids "
                f"({self.dl_grid.size}, {self.freq_grid.size})"
            )
