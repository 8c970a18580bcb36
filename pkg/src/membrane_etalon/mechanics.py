"""Drum modes of stressed rectangular membranes.

A membrane of side lengths Lx, Ly under tensile stress sigma and mass
density rho has flexural modes indexed by (n, m). Two frequency
conventions are in circulation for the same dispersion:

    as-written:   nu = sqrt( sigma/rho ( (n/Lx)^2 + (m/Ly)^2 ) )
    half-factor:  nu = (1/2) sqrt( sigma/rho ( (n/Lx)^2 + (m/Ly)^2 ) )

The half-factor form is the textbook standing-wave result (wavelength
2 Lx / n along x); the as-written form appears when the 1/2 is absorbed
into a redefinition. Both are supported so measured mode tables in either
convention can be used; half-factor is the default everywhere.

Near one resonance the displacement responds to force with

    chi(omega) = (1 / m_eff) / (omega_m^2 - omega^2 + i gamma_m omega)

and a white force drive of spectral amplitude F gives the displacement
spectral density |chi|^2 |F|^2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

CONVENTIONS = ("as-written", "half-factor")
DEFAULT_CONVENTION = "half-factor"


def _convention_factor(convention: str) -> float:
    if convention not in CONVENTIONS:
        raise DomainError(
            f"unknown convention '{convention}', expected one of {CONVENTIONS}"
        )
    return 1.0 if convention == "as-written" else 0.5


@dataclass(frozen=True)
class MembranePlate:
    """Side lengths [m], tensile stress [Pa], mass density [kg/m^3]."""

    lx: float
    ly: float
    stress: float
    density: float

    def __post_init__(self):
        for name in ("lx", "ly", "stress", "density"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)}")


def mode_frequency(
    plate: MembranePlate, n: int, m: int, convention: str = DEFAULT_CONVENTION
) -> float:
    """Frequency of mode (n, m) in Hz.

    n, m are positive integers counting antinodes along x and y.
    """
    if n < 1 or m < 1:
        raise DomainError(f"mode indices must be >= 1, got ({n}, {m})")
    factor = _convention_factor(convention)
    return factor * np.sqrt(
        plate.stress / plate.density * ((n / plate.lx) ** 2 + (m / plate.ly) ** 2)
    )


def effective_mass(plate: MembranePlate, thickness: float) -> float:
    """Effective mass of a sinusoidal drum mode, rho Lx Ly t / 4.

    The quarter is the mean square of the mode shape over the membrane.
    """
    if thickness <= 0:
        raise DomainError(f"thickness must be > 0, got {thickness}")
    return 0.25 * plate.density * plate.lx * plate.ly * thickness


@dataclass(frozen=True)
class MechMode:
    """One mechanical resonance as seen by the optical readout.

    Parameters
    ----------
    omega_m : float
        Angular resonance frequency, rad/s.
    gamma_m : float
        Energy damping rate, rad/s (full linewidth of the displacement
        spectrum).
    mass_eff : float
        Effective mass, kg.
    overlap : float
        Dimensionless overlap eta of the optical spot with the mode shape;
        scales the displacement the light actually sees.
    force_amplitude : float
        White force drive spectral amplitude, N/sqrt(Hz).
    """

    omega_m: float
    gamma_m: float
    mass_eff: float
    overlap: float = 1.0
    force_amplitude: float = 0.0

    def __post_init__(self):
        if self.omega_m <= 0:
            raise DomainError(f"omega_m must be > 0, got {self.omega_m}")
        if self.gamma_m < 0:
            raise DomainError(f"gamma_m must be >= 0, got {self.gamma_m}")
        if self.mass_eff <= 0:
            raise DomainError(f"mass_eff must be > 0, got {self.mass_eff}")

    @property
    def quality(self) -> float:
        """Q = omega_m / gamma_m."""
        if self.gamma_m == 0:
            return np.inf
        return self.omega_m / self.gamma_m


def susceptibility(mode: MechMode, omega):
    """Mechanical response chi(omega), displacement per force.

    chi(-omega) = conj(chi(omega)), as any real-signal response must obey.
    """
    omega = np.asarray(omega, dtype=float)
    out = (1.0 / mode.mass_eff) / (
        mode.omega_m ** 2 - omega ** 2 + 1j * mode.gamma_m * omega
    )
    return out if out.ndim else complex(out)


def displacement_spectra(
    mode1: MechMode, mode2: MechMode, omega, correlation: str = "common"
):
    """Displacement spectral densities (S11, S22, S12) at offset omega.

    S_jj = |chi_j|^2 |F_j|^2 in m^2/Hz for white force drives. The cross
    spectrum S12 = conj(chi_1) chi_2 conj(F_1) F_2 applies when both
    membranes ride the same drive ("common"); "independent" zeroes it.
    """
    if correlation not in ("common", "independent"):
        raise DomainError(
            f"correlation must be 'common' or 'independent', got '{correlation}'"
        )
    chi1 = susceptibility(mode1, omega)
    chi2 = susceptibility(mode2, omega)
    s11 = np.abs(chi1) ** 2 * mode1.force_amplitude ** 2
    s22 = np.abs(chi2) ** 2 * mode2.force_amplitude ** 2
    if correlation == "common":
        s12 = np.conj(chi1) * chi2 * mode1.force_amplitude * mode2.force_amplitude
    else:
        s12 = np.zeros_like(chi1)
    return s11, s22, s12


def piezo_shifted_frequency(omega_m0: float, beta: float, volts: float) -> float:
    """Phenomenological piezo tuning, omega_m(V) = omega_m0 (1 + beta V)."""
    omega = omega_m0 * (1.0 + beta * volts)
    if omega <= 0:
        raise DomainError(
            f"piezo law drove the frequency non-positive (beta V = {beta * volts:.3g})"
        )
    return omega


@dataclass(frozen=True)
class SideLengthFit:
    """Result of infer_side_lengths."""

    lx: float
    ly: float
    residuals: np.ndarray  # relative frequency misfit per mode


def infer_side_lengths(
    modes,
    stress: float,
    density: float,
    convention: str = DEFAULT_CONVENTION,
) -> SideLengthFit:
    """Recover (Lx, Ly) from measured mode frequencies.

    The dispersion is linear in u = 1/Lx^2 and v = 1/Ly^2:

        nu^2 = f^2 (sigma/rho) (n^2 u + m^2 v),    f = 1 or 1/2

    so a plain linear least squares over the measured (n, m, nu) rows
    recovers u and v, provided the mode set separates the two axes.

    Parameters
    ----------
    modes : iterable of (n, m, freq_hz)
        At least two modes with non-proportional (n^2, m^2) rows.
    stress, density : float
        Film stress [Pa] and density [kg/m^3].

    Returns
    -------
    SideLengthFit
        Side lengths in meters plus per-mode relative residuals.

    Raises
    ------
    DomainError
        If the mode set cannot separate Lx from Ly (fewer than two modes,
        all rows proportional) or the fit lands outside the physical
        region u, v > 0.
    """
    rows = list(modes)
    if len(rows) < 2:
        raise DomainError("need at least two measured modes")
    if stress <= 0 or density <= 0:
        raise DomainError("stress and density must be > 0")
    factor = _convention_factor(convention)
    scale = factor ** 2 * stress / density

    a = np.empty((len(rows), 2))
    b = np.empty(len(rows))
    for i, (n, m, freq) in enumerate(rows):
        if n < 1 or m < 1:
            raise DomainError(f"mode indices must be >= 1, got ({n}, {m})")
        if freq <= 0:
            raise DomainError(f"measured frequency must be > 0, got {freq}")
        a[i] = (scale * n * n, scale * m * m)
        b[i] = freq * freq

    # rank check: all (n^2, m^2) rows proportional means Lx and Ly are
    # not separable no matter how many modes were measured
    if np.linalg.matrix_rank(a, tol=1e-12 * np.abs(a).max()) < 2:
        raise DomainError(
            "mode set is degenerate, cannot separate the two side lengths"
        )
    (u, v), *_ = np.linalg.lstsq(a, b, rcond=None)
    if u <= 0 or v <= 0:
        raise DomainError("fit left the physical region (non-positive 1/L^2)")

    lx, ly = 1.0 / np.sqrt(u), 1.0 / np.sqrt(v)
    predicted = np.sqrt(a @ (u, v))
    residuals = (np.sqrt(b) - predicted) / predicted
    return SideLengthFit(lx=float(lx), ly=float(ly), residuals=residuals)
