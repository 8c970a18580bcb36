"""Steady-state response of the two-slab etalon.

Two slabs facing each other across a vacuum gap L form a low-finesse
resonator. Summing the internal round trips gives the familiar geometric
series: with the per-round-trip factor

    mu = -r1 conj(r2) exp(-i omega tau),    tau = 2 L / c

the stationary internal field is t1 E_in / (1 - mu) and the power
transmission is

    T = |t1 t2|^2 / |1 - mu|^2

The fringe visibility is set only by |mu| = sqrt(R1 R2); the sharpness is
quantified here by the ratio of fringe spacing to the full width at half
maximum of T, found numerically from the half-maximum crossings.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import DivergenceError, DomainError, ModelValidityWarning
from .series import SpectrumSeries
from .slab import SlabCoefficients


@dataclass(frozen=True)
class EtalonGeometry:
    """Membrane positions along the optical axis.

    Parameters
    ----------
    resonant_length : float
        Gap L0 in meters at which the etalon is held on a fringe peak.
    mismatch : float
        Offset dL from that operating point, meters. The physical gap is
        L0 + dL. Offsets beyond ~10% of L0 leave the regime in which dL
        can be treated as a pure phase shift, so a warning is issued.
    x1 : float
        Absolute position of the first membrane, meters (cosmetic origin).
    """

    resonant_length: float
    mismatch: float = 0.0
    x1: float = 0.0

    def __post_init__(self):
        if self.resonant_length <= 0:
            raise DomainError(f"resonant length must be > 0, got {self.resonant_length}")
        if self.length <= 0:
            raise DomainError("total gap must remain > 0")
        if abs(self.mismatch) > 0.1 * self.resonant_length:
            warnings.warn(
                "length mismatch exceeds 10% of the resonant length",
                ModelValidityWarning,
                stacklevel=3,
            )

    @property
    def length(self) -> float:
        """Physical gap between the membranes, meters."""
        return self.resonant_length + self.mismatch

    @property
    def x2(self) -> float:
        return self.x1 + self.length

    @property
    def tau(self) -> float:
        """Round-trip time 2 L / c, seconds."""
        return 2.0 * self.length / SPEED_OF_LIGHT

    @property
    def fsr(self) -> float:
        """Free spectral range 1 / tau, Hz."""
        return SPEED_OF_LIGHT / (2.0 * self.length)


def round_trip_factor(
    c1: SlabCoefficients,
    c2: SlabCoefficients,
    geometry: EtalonGeometry,
    wavelength: float,
) -> complex:
    """Complex field factor acquired per internal round trip.

    mu = -r1 conj(r2) exp(-i omega tau). The minus sign and the conjugate
    on r2 come from the boundary conditions seen by the internal field; the
    magnitude is sqrt(R1 R2) regardless of slab phases.
    """
    if wavelength <= 0:
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    omega = 2.0 * np.pi * SPEED_OF_LIGHT / wavelength
    return -c1.r * np.conj(c2.r) * np.exp(-1j * omega * geometry.tau)


def steady_transmission(
    c1: SlabCoefficients,
    c2: SlabCoefficients,
    geometry: EtalonGeometry,
    wavelength: float,
) -> float:
    """Stationary power transmission |t1 t2|^2 / |1 - mu|^2."""
    mu = round_trip_factor(c1, c2, geometry, wavelength)
    if abs(mu) >= 1.0:
        raise DivergenceError(f"round-trip gain |mu| = {abs(mu):.6g} >= 1")
    return abs(c1.t * c2.t) ** 2 / abs(1.0 - mu) ** 2


def peak_transmission(c1: SlabCoefficients, c2: SlabCoefficients) -> float:
    """Transmission on a fringe peak, |t1 t2|^2 / (1 - |mu|)^2."""
    m = abs(c1.r) * abs(c2.r)
    if m >= 1.0:
        raise DivergenceError(f"round-trip gain |mu| = {m:.6g} >= 1")
    return abs(c1.t * c2.t) ** 2 / (1.0 - m) ** 2


# |mu| below which the fringe never falls to half its peak value, so a
# full width at half maximum does not exist: cos(phi) would need to be
# < -1. Solves (1-m)^2/(1+m)^2 = 1/2, i.e. m = 3 - 2 sqrt(2).
_MIN_CONTRAST = 3.0 - 2.0 * np.sqrt(2.0)


def finesse_fwhm(c1: SlabCoefficients, c2: SlabCoefficients, rel_tol: float = 1e-9) -> float:
    """Fringe spacing over full width at half maximum of the fringe.

    The normalized fringe T(phi)/T(0) = (1-m)^2 / (1 + m^2 - 2 m cos phi)
    with m = |mu| is scanned in round-trip phase; the half-maximum crossing
    phi_h is located by bisection and the ratio 2*pi / (2 phi_h) returned.

    For low-contrast fringes (m <= 3 - 2 sqrt(2), about 0.172) the fringe
    minimum stays above half the peak and the width is undefined.

    Parameters
    ----------
    rel_tol : float
        Relative bisection tolerance on phi_h.
    """
    m = abs(c1.r) * abs(c2.r)
    if m >= 1.0:
        raise DivergenceError(f"round-trip gain |mu| = {m:.6g} >= 1")
    if m <= _MIN_CONTRAST:
        raise DomainError(
            f"|mu| = {m:.4g} too small, fringe never falls to half maximum"
        )

    peak = (1.0 - m) ** 2

    def above_half(phi):
        return peak / (1.0 + m * m - 2.0 * m * np.cos(phi)) > 0.5

    lo, hi = 0.0, np.pi
    while (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if above_half(mid):
            lo = mid
        else:
            hi = mid
    phi_half = 0.5 * (lo + hi)
    return float(np.pi / phi_half)


def fringe_scan(
    c1: SlabCoefficients,
    c2: SlabCoefficients,
    geometry: EtalonGeometry,
    wavelength: float,
    displacements,
) -> SpectrumSeries:
    """Normalized transmission versus displacement of the second membrane.

    Moving the far membrane by d stretches the gap, adding -2 k d to the
    round-trip phase; the fringe repeats every lambda / 2. Transmission is
    normalized to the fringe peak, so a perfectly transparent far membrane
    (R2 = 0) gives a flat line at 1.

    Parameters
    ----------
    displacements : array_like
        Displacement grid in meters, non-empty. A grid narrower than one
        fringe period triggers a validity warning.

    Returns
    -------
    SpectrumSeries
        Columns displacement_m, transmission_norm.
    """
    d = np.asarray(displacements, dtype=float)
    if d.size == 0:
        raise DomainError("displacement grid is empty")
    span = d.max() - d.min() if d.size > 1 else 0.0
    if span < 0.5 * wavelength:
        warnings.warn(
            "displacement grid covers less than one fringe period",
            ModelValidityWarning,
            stacklevel=2,
        )
    mu0 = round_trip_factor(c1, c2, geometry, wavelength)
    if abs(mu0) >= 1.0:
        raise DivergenceError(f"round-trip gain |mu| = {abs(mu0):.6g} >= 1")
    k = 2.0 * np.pi / wavelength
    mu = mu0 * np.exp(-2j * k * d)
    trans = abs(c1.t * c2.t) ** 2 / np.abs(1.0 - mu) ** 2
    return SpectrumSeries(
        x=d,
        y=trans / peak_transmission(c1, c2),
        x_name="displacement_m",
        y_name="transmission_norm",
    )


def nearest_resonant_length(
    c1: SlabCoefficients,
    c2: SlabCoefficients,
    wavelength: float,
    target_length: float,
) -> float:
    """Gap closest to target_length for which mu is real and positive.

    arg(mu) = arg(-r1 conj(r2)) - 2 k L vanishes on a lattice of spacing
    lambda / 2; this picks the lattice point nearest the requested gap.
    """
    if target_length <= 0:
        raise DomainError(f"target length must be > 0, got {target_length}")
    k = 2.0 * np.pi / wavelength
    base = float(np.angle(-c1.r * np.conj(c2.r)))
    # 2 k L = base (mod 2 pi)
    m = np.round((2.0 * k * target_length - base) / (2.0 * np.pi))
    length = (base + 2.0 * np.pi * m) / (2.0 * k)
    if length <= 0:
        length += 0.5 * wavelength * np.ceil(-length / (0.5 * wavelength) + 1)
    return float(length)
