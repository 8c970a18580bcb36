"""Frequency-domain response of the driven etalon to membrane motion.

The internal field envelope E(t) (in the frame rotating at the drive
frequency) obeys the delay recursion

    E(t) = t1 E_in(t) + mu exp(-i Phi(t)) E(t - tau)

with Phi(t) = 2 k [dx2(t) - dx1(t)] the phase picked up from the membrane
displacements. For sinusoidal motion dx_j(t) = dx_j sin(w_mj t) the factor
exp(-i xi sin(w t)) splits into harmonics weighted by Bessel functions
(modulation index xi_j = 2 w_L dx_j / c), and to first order in xi the
field consists of a carrier plus one pair of sidebands per membrane.

Transforming the recursion gives the loop denominator

    D(s) = 1 - mu exp(-s tau) J0(xi1) J0(xi2)

and the transfer functions below. The carrier responses are

    C0(s) = t1 / D(s)
    R0(s) = -conj(r1) + rb2 |t1|^2 exp(-s tau) / D(s)

with rb2 = -conj(r2) exp(-i w_L tau) the far-membrane return factor. The
first-order sideband responses, written so that the field component
produced at s by input at s +- s_mj is

    (-1)^j xi_j [ X_j(s, +s_mj) Ein(s + s_mj) - X_j(s, -s_mj) Ein(s - s_mj) ]

are, for the internal field (X = C1),

    C1_j(s, +-s_mj) = (t1 / 2) [1 - D(s)] / D(s) exp(-+ s_mj tau) / D(s +- s_mj)

and for the reflected field (X = R1),

    R1_1(s, +-s_m1) = conj(r1)/2
        + (rb2 / 2) [1 - D(s)] / D(s) |t1|^2 exp(-(s +- s_m1) tau) / D(s +- s_m1)
    R1_2(s, +-s_m2) =
          (rb2 / 2)      1      / D(s) |t1|^2 exp(-(s +- s_m2) tau) / D(s +- s_m2)

Each membrane contributes an instantaneous piece (direct phase modulation
of the tap it sits in: the input reflection for membrane 1, the output
coupler for membrane 2) plus a cavity-filtered piece; for membrane 2 the
two combine into the single 1/D(s) form. These expressions reproduce the
time-domain recursion's sidebands to O(xi^2), which is how they are pinned
down in the test suite.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import DomainError, ModelValidityWarning
from .etalon import EtalonGeometry
from .slab import SlabCoefficients


def bessel_j0(x):
    """J0 by its power series, for small modulation indices.

    Sum_k (-q)^k / (k!)^2 with q = x^2/4, accumulated until the term
    underflows the running sum. Absolute error below 1e-14 for |x| <= 2
    (the regime the phase-modulation model is valid in anyway); arguments
    beyond 10 are rejected rather than silently losing precision to
    cancellation.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 10.0):
        raise DomainError("series evaluation of J0 limited to |x| <= 10")
    q = 0.25 * x * x
    term = np.ones_like(q)
    total = np.ones_like(q)
    for k in range(1, 60):
        term = term * (-q) / (k * k)
        total = total + term
        if np.max(np.abs(term)) < 1e-17 * max(np.max(np.abs(total)), 1e-300):
            break
    return total if total.ndim else float(total)


def bessel_j1(x):
    """J1 by its power series; same domain notes as bessel_j0."""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 10.0):
        raise DomainError("series evaluation of J1 limited to |x| <= 10")
    q = 0.25 * x * x
    term = np.ones_like(q)
    total = np.ones_like(q)
    for k in range(1, 60):
        term = term * (-q) / (k * (k + 1))
        total = total + term
        if np.max(np.abs(term)) < 1e-17 * max(np.max(np.abs(total)), 1e-300):
            break
    out = 0.5 * x * total
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ResponseParams:
    """Everything the transfer functions need.

    Parameters
    ----------
    c1, c2 : SlabCoefficients
        Near (input side) and far membrane at the drive wavelength.
    geometry : EtalonGeometry
    wavelength : float
        Drive vacuum wavelength, meters.
    xi1, xi2 : float
        Modulation indices 2 w_L dx_j / c of the two membranes. Indices
        above 0.1 strain the single-sideband truncation, so a validity
        warning is raised.
    omega_m1, omega_m2 : float
        Mechanical angular frequencies, rad/s.
    """

    c1: SlabCoefficients
    c2: SlabCoefficients
    geometry: EtalonGeometry
    wavelength: float
    xi1: float = 0.0
    xi2: float = 0.0
    omega_m1: float = 0.0
    omega_m2: float = 0.0

    def __post_init__(self):
        if self.wavelength <= 0:
            raise DomainError(f"wavelength must be > 0, got {self.wavelength}")
        if self.xi1 < 0 or self.xi2 < 0:
            raise DomainError("modulation indices must be >= 0")
        if self.omega_m1 < 0 or self.omega_m2 < 0:
            raise DomainError("mechanical frequencies must be >= 0")
        if max(self.xi1, self.xi2) > 0.1:
            warnings.warn(
                "modulation index above 0.1, first-order sideband picture degrades",
                ModelValidityWarning,
                stacklevel=3,
            )

    @property
    def omega_l(self) -> float:
        """Drive angular frequency, rad/s."""
        return 2.0 * np.pi * SPEED_OF_LIGHT / self.wavelength

    @property
    def tau(self) -> float:
        return self.geometry.tau

    def far_return_factor(self) -> complex:
        """rb2 = -conj(r2) exp(-i w_L tau), the far-membrane return."""
        return -np.conj(self.c2.r) * np.exp(-1j * self.omega_l * self.tau)

    def front_phase(self) -> complex:
        """exp(-2 i k x1): reflected-field rotation from the front rest position."""
        if self.geometry.x1 == 0.0:
            return 1.0 + 0.0j
        return complex(np.exp(-2j * (self.omega_l / SPEED_OF_LIGHT) * self.geometry.x1))

    def round_trip(self) -> complex:
        """mu = r1 rb2 (equals the steady-state round-trip factor)."""
        return self.c1.r * self.far_return_factor()

    def _omega_m(self, membrane: int) -> float:
        if membrane == 1:
            return self.omega_m1
        if membrane == 2:
            return self.omega_m2
        raise DomainError(f"membrane must be 1 or 2, got {membrane}")

    def _xi(self, membrane: int) -> float:
        return self.xi1 if membrane == 1 else self.xi2


def loop_denominator(params: ResponseParams, s):
    """D(s) = 1 - mu exp(-s tau) J0(xi1) J0(xi2).

    s is the Laplace variable of the envelope (use s = 1j*omega for a
    steady tone at offset omega from the drive); scalar or array.
    """
    depletion = bessel_j0(params.xi1) * bessel_j0(params.xi2)
    return 1.0 - params.round_trip() * np.exp(-np.asarray(s) * params.tau) * depletion


def cavity_dc_response(params: ResponseParams, s):
    """Carrier transfer into the cavity, C0(s) = t1 / D(s)."""
    return params.c1.t / loop_denominator(params, s)


def cavity_sideband_response(params: ResponseParams, membrane: int, s, shift: int):
    """First-order internal-field response C1_j(s, shift * s_mj).

    ``shift`` is +1 or -1 and selects which sideband of the input the
    response refers to, matching the sign pattern in the module docstring.
    """
    if shift not in (+1, -1):
        raise DomainError(f"shift must be +1 or -1, got {shift}")
    s = np.asarray(s)
    s_m = 1j * params._omega_m(membrane)
    d_here = loop_denominator(params, s)
    d_shift = loop_denominator(params, s + shift * s_m)
    return (
        0.5 * params.c1.t
        * (1.0 - d_here) / d_here
        * np.exp(-shift * s_m * params.tau)
        / d_shift
    )


def reflection_dc_response(params: ResponseParams, s):
    """Carrier reflection R0(s) = -conj(r1) + rb2 |t1|^2 exp(-s tau) / D(s).

    A static front-membrane offset x1 rotates the whole reflected field
    by exp(-2 i k x1); the responses carry that factor so they track the
    time-domain solver for any reference position.
    """
    s = np.asarray(s)
    return params.front_phase() * (
        -np.conj(params.c1.r)
        + (
            params.far_return_factor()
            * abs(params.c1.t) ** 2
            * np.exp(-s * params.tau)
            / loop_denominator(params, s)
        )
    )


def reflection_sideband_response(params: ResponseParams, membrane: int, s, shift: int):
    """First-order reflected-field response R1_j(s, shift * s_mj).

    Membrane 1 carries the instantaneous conj(r1)/2 term from direct phase
    modulation of the input reflection; membrane 2's instantaneous piece
    (the modulated output tap) merges with the cavity-filtered piece into
    the 1/D(s) prefactor. See the module docstring for the exact forms.
    """
    if shift not in (+1, -1):
        raise DomainError(f"shift must be +1 or -1, got {shift}")
    s = np.asarray(s)
    s_m = 1j * params._omega_m(membrane)
    d_here = loop_denominator(params, s)
    d_shift = loop_denominator(params, s + shift * s_m)
    tap = 0.5 * params.far_return_factor() * abs(params.c1.t) ** 2
    prop = np.exp(-(s + shift * s_m) * params.tau) / d_shift
    front = params.front_phase()
    if membrane == 1:
        return front * (0.5 * np.conj(params.c1.r) + tap * (1.0 - d_here) / d_here * prop)
    return front * (tap / d_here * prop)


def _membrane_sign(membrane: int) -> int:
    # (-1)^j: membrane 1 sidebands enter with the opposite overall sign
    # because Phi(t) = 2k (dx2 - dx1) carries dx1 with a minus.
    return -1 if membrane == 1 else +1


def cavity_sideband_amplitudes(params: ResponseParams, membrane: int):
    """Complex internal sideband amplitudes per unit carrier input.

    For a constant drive E_in = sqrt(P_in) and membrane j oscillating at
    w_mj, the internal envelope acquires tones a_plus e^{+i w t} and
    a_minus e^{-i w t}. Returned per unit sqrt(P_in):

        a_plus  = -(-1)^j xi_j C1_j(+s_mj, -s_mj)
        a_minus = +(-1)^j xi_j C1_j(-s_mj, +s_mj)
    """
    sgn = _membrane_sign(membrane)
    xi = params._xi(membrane)
    s_m = 1j * params._omega_m(membrane)
    a_plus = -sgn * xi * cavity_sideband_response(params, membrane, s_m, -1)
    a_minus = +sgn * xi * cavity_sideband_response(params, membrane, -s_m, +1)
    return complex(a_plus), complex(a_minus)


def reflection_sideband_amplitudes(params: ResponseParams, membrane: int):
    """Reflected sideband amplitudes per unit carrier input; see above."""
    sgn = _membrane_sign(membrane)
    xi = params._xi(membrane)
    s_m = 1j * params._omega_m(membrane)
    a_plus = -sgn * xi * reflection_sideband_response(params, membrane, s_m, -1)
    a_minus = +sgn * xi * reflection_sideband_response(params, membrane, -s_m, +1)
    return complex(a_plus), complex(a_minus)


def transmitted_sideband_amplitudes(params: ResponseParams, membrane: int):
    """Transmitted sideband amplitudes: the internal ones through the output tap.

    E_t(t) = t2 E(t - tau/2), so each internal tone at offset w picks up
    t2 exp(-i w tau / 2).
    """
    a_plus, a_minus = cavity_sideband_amplitudes(params, membrane)
    s_m = 1j * params._omega_m(membrane)
    half = 0.5 * params.tau
    return (
        complex(params.c2.t * np.exp(-s_m * half) * a_plus),
        complex(params.c2.t * np.exp(+s_m * half) * a_minus),
    )


@dataclass(frozen=True)
class BadCavityConstants:
    """Zero-frequency limits of the reflection responses.

    When both mechanical frequencies sit far inside the cavity linewidth
    (w_mj << 2 pi FSR (1 - |mu|)), the reflected sidebands follow the
    membranes adiabatically and the responses collapse to constants.
    """

    carrier: complex       # R0(0)
    sideband_1: complex    # R1_1 at s = 0, s_m1 -> 0
    sideband_2: complex    # R1_2 at s = 0, s_m2 -> 0
    within_bad_cavity: bool


def bad_cavity_constants(params: ResponseParams) -> BadCavityConstants:
    """Evaluate the reflection responses in the adiabatic limit."""
    d0 = loop_denominator(params, 0.0)
    tap = 0.5 * params.far_return_factor() * abs(params.c1.t) ** 2
    front = params.front_phase()
    carrier = complex(reflection_dc_response(params, 0.0))
    sb1 = complex(front * (0.5 * np.conj(params.c1.r) + tap * (1.0 - d0) / (d0 * d0)))
    sb2 = complex(front * tap / (d0 * d0))
    rate = 2.0 * np.pi * params.geometry.fsr * (1.0 - abs(params.round_trip()))
    within = bool(max(params.omega_m1, params.omega_m2) <= 0.01 * rate)
    if not within:
        warnings.warn(
            "mechanical frequency not far inside the cavity linewidth, "
            "adiabatic reflection constants are approximate",
            ModelValidityWarning,
            stacklevel=2,
        )
    return BadCavityConstants(
        carrier=carrier, sideband_1=sb1, sideband_2=sb2, within_bad_cavity=within
    )


@dataclass(frozen=True)
class HighFinesseParams:
    """Linewidth parametrization valid for nearly unity mirror reflectivity.

    kappa1, kappa2 : float
        Per-mirror amplitude decay rates, 1/s; kappa_j = |t_j|^2 FSR / 2.
    detuning : float
        Carrier offset from cavity resonance expressed as a rate, 1/s
        (round-trip phase over round-trip time).
    fsr : float
        Free spectral range, Hz.
    """

    kappa1: float
    kappa2: float
    detuning: float
    fsr: float

    @property
    def kappa(self) -> float:
        return self.kappa1 + self.kappa2

    @classmethod
    def from_etalon(
        cls,
        c1: SlabCoefficients,
        c2: SlabCoefficients,
        geometry: EtalonGeometry,
        wavelength: float,
    ) -> "HighFinesseParams":
        """Map slab coefficients and geometry onto linewidth parameters.

        The detuning is read off the phase of the round-trip factor, so a
        length mismatch in the geometry lands in it automatically as
        2 w_L dL / (c tau) plus any slab-phase offset.
        """
        from .etalon import round_trip_factor

        fsr = geometry.fsr
        mu = round_trip_factor(c1, c2, geometry, wavelength)
        detuning = -float(np.angle(mu)) / geometry.tau
        return cls(
            kappa1=0.5 * abs(c1.t) ** 2 * fsr,
            kappa2=0.5 * abs(c2.t) ** 2 * fsr,
            detuning=detuning,
            fsr=fsr,
        )


def high_finesse_denominator(hf: HighFinesseParams, omega):
    """Lorentzian approximation D(i omega) ~ [kappa + i (Delta + omega)] / FSR.

    Expands 1 - |mu| exp(i(arg mu - omega tau)) to first order in the
    transmissions and phases. Good to O(kappa/FSR) relative error, so use
    only when both reflectivities are close to 1; at bench reflectivities
    around 0.36 the error is tens of percent.
    """
    omega = np.asarray(omega, dtype=float)
    out = (hf.kappa + 1j * (hf.detuning + omega)) / hf.fsr
    return out if np.ndim(out) else complex(out)
