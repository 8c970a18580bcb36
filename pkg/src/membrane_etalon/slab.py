"""Amplitude reflection and transmission of a thin dielectric slab.

A lossless slab of refractive index n and thickness L in vacuum, probed at
normal incidence with vacuum wavenumber k = 2*pi/lambda, has the amplitude
coefficients

    r = (n^2 - 1) sin(k n L) / [(n^2 + 1) sin(k n L) + 2 i n cos(k n L)]
    t = 2 n                  / [(n^2 + 1) sin(k n L) + 2 i n cos(k n L)]

For real n these satisfy |r|^2 + |t|^2 = 1 identically, and r vanishes at
the transparency points k n L = m*pi where the slab is an integer number of
internal half waves thick.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .series import SpectrumSeries


@dataclass(frozen=True)
class SlabParams:
    """Geometry and material of one slab.

    Parameters
    ----------
    n : float
        Refractive index, real (lossless), n >= 1.
    thickness : float
        Slab thickness in meters, >= 0.
    """

    n: float
    thickness: float

    def __post_init__(self):
        if not (self.n >= 1.0) or not np.isfinite(self.n):
            raise DomainError(f"refractive index must be real and >= 1, got {self.n}")
        if self.thickness < 0 or not np.isfinite(self.thickness):
            raise DomainError(f"thickness must be >= 0, got {self.thickness}")


@dataclass(frozen=True)
class SlabCoefficients:
    """Complex amplitude coefficients of one slab at one wavelength."""

    r: complex
    t: complex

    @property
    def reflectivity(self) -> float:
        """Power reflectivity R = |r|^2."""
        return abs(self.r) ** 2

    @property
    def transmissivity(self) -> float:
        return abs(self.t) ** 2

    @property
    def phase(self) -> float:
        """Reflection phase, arg(r) in (-pi, pi]."""
        return float(np.angle(self.r))

    @classmethod
    def from_reflectivity(cls, reflectivity: float, phase: float = np.pi / 2) -> "SlabCoefficients":
        """Synthetic lossless coefficients with a given power reflectivity.

        Useful for tests and scans where only R matters. The default phase
        pi/2 reproduces the quadrature between r and t of a real dielectric
        slab, so energy bookkeeping stays consistent.
        """
        if not (0.0 <= reflectivity < 1.0):
            raise DomainError(f"reflectivity must be in [0, 1), got {reflectivity}")
        return cls(
            r=np.sqrt(reflectivity) * np.exp(1j * phase),
            t=complex(np.sqrt(1.0 - reflectivity)),
        )


def slab_coefficients(params: SlabParams, wavelength: float) -> SlabCoefficients:
    """Evaluate r and t for one slab at one vacuum wavelength.

    Parameters
    ----------
    params : SlabParams
    wavelength : float
        Vacuum wavelength in meters, > 0.

    Returns
    -------
    SlabCoefficients
        With r in the half-wave convention above; arg(r) - arg(t) is
        +-pi/2 for a lossless slab away from transparency.
    """
    if wavelength <= 0 or not np.isfinite(wavelength):
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    n = params.n
    x = 2.0 * np.pi / wavelength * n * params.thickness
    den = (n * n + 1.0) * np.sin(x) + 2j * n * np.cos(x)
    return SlabCoefficients(
        r=complex((n * n - 1.0) * np.sin(x) / den),
        t=complex(2.0 * n / den),
    )


class IndexModel:
    """Refractive index as a function of vacuum wavelength."""

    name = "abstract"

    def __call__(self, wavelength: float) -> float:
        raise NotImplementedError


class ConstantIndex(IndexModel):
    """Wavelength-independent index."""

    def __init__(self, n: float, name: str | None = None):
        if not (n >= 1.0):
            raise DomainError(f"refractive index must be >= 1, got {n}")
        self.n = float(n)
        self.name = name or f"constant-{n:g}"

    def __call__(self, wavelength):
        return self.n

    def __repr__(self):
        return f"ConstantIndex({self.n!r}, name={self.name!r})"


class TabulatedIndex(IndexModel):
    """Linear interpolation over (wavelength, n) anchor points.

    Outside the tabulated range the nearest anchor value is used (flat
    extrapolation); thin-film indices vary slowly enough that this is the
    safer default over extrapolating a slope from two points.
    """

    def __init__(self, wavelengths, values, name="tabulated"):
        w = np.asarray(wavelengths, dtype=float)
        v = np.asarray(values, dtype=float)
        if w.size != v.size or w.size < 1:
            raise DomainError("index table needs matching, non-empty anchors")
        if np.any(np.diff(w) <= 0):
            raise DomainError("index table wavelengths must be strictly increasing")
        if np.any(v < 1.0):
            raise DomainError("index table values must be >= 1")
        self.wavelengths = w
        self.values = v
        self.name = name

    def __call__(self, wavelength):
        return float(np.interp(wavelength, self.wavelengths, self.values))

    def __repr__(self):
        return f"TabulatedIndex(name={self.name!r}, anchors={self.wavelengths.size})"


def sellmeier_si3n4(wavelength: float) -> float:
    """Stoichiometric LPCVD Si3N4 dispersion (Luke et al., Opt. Lett. 40, 4823).

    Valid roughly over 310 nm to 5.5 um. Provided as a literature reference
    model; stoichiometry of real films shifts the curve by a few percent.
    """
    lu = wavelength * 1e6  # um
    l2 = lu * lu
    n2 = 1.0 + 3.0249 * l2 / (l2 - 0.1353406 ** 2) + 40314.0 * l2 / (l2 - 1239.842 ** 2)
    return float(np.sqrt(n2))


class SellmeierSi3N4(IndexModel):
    name = "si3n4-sellmeier"

    def __call__(self, wavelength):
        return sellmeier_si3n4(wavelength)


# Device-calibrated film index. These anchors are chosen so that the slab
# model with a 75.2 nm film reproduces the bench-measured reflectivities
# 0.3618 / 0.3571 / 0.2652 at 532 / 632.8 / 980 nm. The film stoichiometry
# is not known independently, so this table is an assumption calibrated to
# the device, not a literature dispersion; swap in SellmeierSi3N4 or a
# ConstantIndex when modeling a different film.
SI3N4_DEVICE = TabulatedIndex(
    wavelengths=(532e-9, 632.8e-9, 980e-9),
    values=(2.0410, 1.9963, 1.9785),
    name="si3n4-device-calibrated",
)

# Constant-index fallback, the 532 nm design value often quoted for LPCVD
# nitride. Kept for quick estimates; the tabulated model above is the
# default elsewhere in the package.
SI3N4_CONSTANT = ConstantIndex(2.046, name="si3n4-constant-532nm")

INDEX_MODELS = {
    SI3N4_DEVICE.name: SI3N4_DEVICE,
    SI3N4_CONSTANT.name: SI3N4_CONSTANT,
    "si3n4-sellmeier": SellmeierSi3N4(),
}

DEFAULT_INDEX_MODEL = SI3N4_DEVICE


def reflectivity_curve(
    thickness: float,
    wavelengths,
    index_model: IndexModel = DEFAULT_INDEX_MODEL,
) -> SpectrumSeries:
    """Power reflectivity of one slab over a wavelength grid.

    Parameters
    ----------
    thickness : float
        Film thickness in meters.
    wavelengths : array_like
        Strictly increasing vacuum wavelengths in meters, non-empty.
    index_model : IndexModel
        Dispersion used to evaluate n at each wavelength.

    Returns
    -------
    SpectrumSeries
        Columns wavelength_m, reflectivity_norm.
    """
    w = np.asarray(wavelengths, dtype=float)
    if w.size == 0:
        raise DomainError("wavelength grid is empty")
    if w.ndim != 1 or np.any(np.diff(w) <= 0):
        raise DomainError("wavelength grid must be 1-d and strictly increasing")
    refl = np.empty(w.size)
    for i, lam in enumerate(w):
        par = SlabParams(n=index_model(lam), thickness=thickness)
        refl[i] = slab_coefficients(par, lam).reflectivity
    return SpectrumSeries(x=w, y=refl, x_name="wavelength_m", y_name="reflectivity_norm")
