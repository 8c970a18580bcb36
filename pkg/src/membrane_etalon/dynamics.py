"""Time-domain propagation of the intracavity field with moving membranes.

Everything here works on the slowly varying envelope E(t) in the frame of
the drive laser. One round trip of the gap takes tau = 2 L / c, and the
membranes imprint the phase Phi(t) = 2 k [dx2(t) - dx1(t)] per round trip,
giving the delay recursion

    E(t) = t1 E_in(t) + mu exp(-i Phi(t)) E(t - tau),       E(t < 0) = 0

with mu the static round-trip factor. The output taps are

    E_t(t) = t2 E(t - tau/2)
    E_r(t) = -conj(r1) E_in(t) exp(-2 i k dx1(t))
             + conj(t1) rb2 E(t - tau) exp(-2 i k dx2(t))

where rb2 = -conj(r2) exp(-i w_L tau). On the sample grid dt = tau /
subdivisions the delayed sample is always exactly ``subdivisions`` steps
back, so the recursion is solved exactly (no interpolation error); the
half-trip tap interpolates only when ``subdivisions`` is odd.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import DivergenceError, DomainError, ModelValidityWarning
from .etalon import EtalonGeometry, round_trip_factor
from .kernels import BACKEND, delay_recursion
from .slab import SlabCoefficients

__all__ = [
    "DriveField",
    "MembraneTrajectory",
    "FieldRecord",
    "simulate",
    "neumann_field",
    "series_tail_bound",
    "extract_sidebands",
    "BACKEND",
]


@dataclass(frozen=True)
class DriveField:
    """Input field: carrier power, wavelength, optional envelope.

    Parameters
    ----------
    power : float
        Carrier power in W; the envelope amplitude is sqrt(power).
    wavelength : float
        Vacuum wavelength, meters.
    envelope : callable, optional
        f(t) -> complex, slowly varying modulation of the input; defaults
        to a constant 1 switched on at t = 0.
    """

    power: float
    wavelength: float
    envelope: Optional[Callable] = None

    def __post_init__(self):
        if self.power < 0:
            raise DomainError(f"power must be >= 0, got {self.power}")
        if self.wavelength <= 0:
            raise DomainError(f"wavelength must be > 0, got {self.wavelength}")

    @property
    def omega(self) -> float:
        """Carrier angular frequency, rad/s."""
        return 2.0 * np.pi * SPEED_OF_LIGHT / self.wavelength

    @property
    def wavenumber(self) -> float:
        return 2.0 * np.pi / self.wavelength

    def amplitude(self, t) -> np.ndarray:
        """Envelope amplitude sqrt(P) f(t) on an array of times."""
        a = np.full_like(np.asarray(t, dtype=float), np.sqrt(self.power), dtype=complex)
        if self.envelope is not None:
            a = a * np.asarray(self.envelope(t), dtype=complex)
        return a


@dataclass(frozen=True)
class MembraneTrajectory:
    """Sinusoidal membrane displacement dx(t) = amplitude sin(omega t + phase)."""

    amplitude: float = 0.0
    omega: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.omega < 0:
            raise DomainError(f"trajectory frequency must be >= 0, got {self.omega}")

    def displacement(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.amplitude == 0.0:
            return np.zeros_like(t)
        return self.amplitude * np.sin(self.omega * t + self.phase)

    @property
    def period(self) -> float:
        """Oscillation period in seconds, inf for a static membrane."""
        if self.omega == 0.0 or self.amplitude == 0.0:
            return np.inf
        return 2.0 * np.pi / self.omega


@dataclass
class FieldRecord:
    """Sampled envelopes from one simulation run."""

    times: np.ndarray
    intracavity: np.ndarray
    transmitted: np.ndarray
    reflected: np.ndarray
    tau: float
    subdivisions: int
    ring_up_time: float
    steady: bool
    meta: dict = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return self.tau / self.subdivisions

    @property
    def duration(self) -> float:
        return float(self.times[-1]) if self.times.size else 0.0

    def field(self, which: str) -> np.ndarray:
        try:
            return {
                "intracavity": self.intracavity,
                "transmitted": self.transmitted,
                "reflected": self.reflected,
            }[which]
        except KeyError:
            raise DomainError(
                f"unknown field '{which}', expected intracavity/transmitted/reflected"
            ) from None


def _delayed(values: np.ndarray, steps: int) -> np.ndarray:
    """values shifted right by an integer number of samples, zero before t=0."""
    out = np.zeros_like(values)
    if steps < values.shape[0]:
        out[steps:] = values[: values.shape[0] - steps]
    return out


def _half_trip_tap(intracavity: np.ndarray, subdivisions: int) -> np.ndarray:
    """E(t - tau/2) on the sample grid.

    Exact shift for even subdivisions; linear interpolation between the
    two straddling samples when odd.
    """
    if subdivisions % 2 == 0:
        return _delayed(intracavity, subdivisions // 2)
    lo = _delayed(intracavity, subdivisions // 2)
    hi = _delayed(intracavity, subdivisions // 2 + 1)
    return 0.5 * (lo + hi)


def simulate(
    c1: SlabCoefficients,
    c2: SlabCoefficients,
    geometry: EtalonGeometry,
    drive: DriveField,
    trajectory1: MembraneTrajectory = MembraneTrajectory(),
    trajectory2: MembraneTrajectory = MembraneTrajectory(),
    duration: float = 0.0,
    subdivisions: int = 64,
) -> FieldRecord:
    """Integrate the delay recursion over [0, duration].

    Parameters
    ----------
    duration : float
        Simulated span in seconds. Spans shorter than the ring-up estimate
        50 tau / (1 - |mu|) leave the transient in the record; a validity
        warning is issued and the steady flag forced False.
    subdivisions : int
        Samples per round trip (so dt = tau / subdivisions), >= 2.

    Returns
    -------
    FieldRecord
        With ``steady`` set by a drift check on the round-trip averaged
        magnitude over the trailing portion of the record.
    """
    if subdivisions < 2:
        raise DomainError(f"subdivisions must be >= 2, got {subdivisions}")
    if duration <= 0:
        raise DomainError(f"duration must be > 0, got {duration}")

    tau = geometry.tau
    mu = round_trip_factor(c1, c2, geometry, drive.wavelength)
    if abs(mu) >= 1.0:
        raise DivergenceError(f"round-trip gain |mu| = {abs(mu):.6g} >= 1")

    ring_up = 50.0 * tau / (1.0 - abs(mu))
    if duration < ring_up:
        warnings.warn(
            f"duration {duration:.3g} s shorter than ring-up estimate {ring_up:.3g} s",
            ModelValidityWarning,
            stacklevel=2,
        )

    for traj in (trajectory1, trajectory2):
        if traj.amplitude != 0.0:
            if abs(traj.amplitude) / geometry.length > 1e-3:
                warnings.warn(
                    "membrane displacement above 1e-3 of the gap, phase-only "
                    "treatment of the motion degrades",
                    ModelValidityWarning,
                    stacklevel=2,
                )
            if traj.omega * tau > 0.01:
                warnings.warn(
                    "mechanical frequency above 1% of the round-trip rate, "
                    "sidebands no longer sit well inside one free spectral range",
                    ModelValidityWarning,
                    stacklevel=2,
                )

    dt = tau / subdivisions
    n = int(np.floor(duration / dt)) + 1
    times = np.arange(n) * dt

    dx1 = trajectory1.displacement(times)
    dx2 = trajectory2.displacement(times)
    k = drive.wavenumber
    phase = np.exp(-1j * (2.0 * k) * (dx2 - dx1))

    drive_samples = np.ascontiguousarray(drive.amplitude(times), dtype=np.complex128)
    phase = np.ascontiguousarray(phase, dtype=np.complex128)

    intracavity = delay_recursion(
        drive_samples, phase, complex(c1.t), complex(mu), subdivisions
    )

    transmitted = c2.t * _half_trip_tap(intracavity, subdivisions)

    rb2 = -np.conj(c2.r) * np.exp(-1j * drive.omega * tau)
    # static front position rotates the whole reflected field; the
    # responses in the frequency domain carry the same factor
    front = np.exp(-2j * k * geometry.x1) if geometry.x1 != 0.0 else 1.0
    reflected = front * (
        -np.conj(c1.r) * drive_samples * np.exp(-2j * k * dx1)
        + np.conj(c1.t) * rb2 * _delayed(intracavity, subdivisions) * np.exp(-2j * k * dx2)
    )

    steady = duration >= ring_up and _steady_drift_ok(
        intracavity, subdivisions, (trajectory1, trajectory2), dt
    )

    return FieldRecord(
        times=times,
        intracavity=intracavity,
        transmitted=transmitted,
        reflected=reflected,
        tau=tau,
        subdivisions=subdivisions,
        ring_up_time=ring_up,
        steady=steady,
        meta={"backend": BACKEND, "mu": complex(mu), "wavelength": drive.wavelength},
    )


def _steady_drift_ok(intracavity, subdivisions, trajectories, dt) -> bool:
    """Drift of the averaged |E| below 1e-10 per round trip at the record end.

    The averaging window spans at least 100 round trips and, when a
    membrane oscillates, at least two mechanical periods, so the check sees
    the envelope rather than the modulation.
    """
    window = 100 * subdivisions
    for traj in trajectories:
        if np.isfinite(traj.period):
            window = max(window, int(np.ceil(2.0 * traj.period / dt)))
    n = intracavity.shape[0]
    if n < 2 * window:
        return False
    m1 = float(np.mean(np.abs(intracavity[n - 2 * window : n - window])))
    m2 = float(np.mean(np.abs(intracavity[n - window : n])))
    rounds = window / subdivisions
    scale = max(m2, 1e-300)
    return abs(m2 - m1) <= 1e-10 * rounds * scale


def series_tail_bound(mu_abs: float, orders: int) -> float:
    """Bound on the neglected tail of the round-trip sum.

    Truncating after N round trips discards at most
    |mu|^(N+1) / (1 - |mu|) of the input amplitude.
    """
    if not (0.0 <= mu_abs < 1.0):
        raise DomainError(f"|mu| must be in [0, 1), got {mu_abs}")
    return mu_abs ** (orders + 1) / (1.0 - mu_abs)


def neumann_field(
    c1: SlabCoefficients,
    c2: SlabCoefficients,
    geometry: EtalonGeometry,
    drive: DriveField,
    trajectory1: MembraneTrajectory,
    trajectory2: MembraneTrajectory,
    t: float,
    orders: int,
) -> complex:
    """Intracavity field at one instant by explicit round-trip summation.

    Unrolls the recursion into

        E(t) = t1 sum_n mu^n E_in(t - n tau) prod_{m<n} exp(-i Phi(t - m tau))

    truncated after ``orders`` round trips; see series_tail_bound for the
    truncation error. Independent of the sampled solver, which is what
    makes it useful as a cross-check.
    """
    if orders < 0:
        raise DomainError(f"orders must be >= 0, got {orders}")
    tau = geometry.tau
    mu = round_trip_factor(c1, c2, geometry, drive.wavelength)
    if abs(mu) >= 1.0:
        raise DivergenceError(f"round-trip gain |mu| = {abs(mu):.6g} >= 1")
    k = drive.wavenumber

    total = 0.0 + 0.0j
    mu_pow = 1.0 + 0.0j       # mu^n
    phase_prod = 1.0 + 0.0j   # prod_{m<n} exp(-i Phi(t - m tau))
    for n_trip in range(orders + 1):
        t_n = t - n_trip * tau
        if t_n >= 0:
            amp = complex(drive.amplitude(np.asarray(t_n))[()])
            total += mu_pow * phase_prod * amp
        phi = 2.0 * k * (
            float(trajectory2.displacement(t - n_trip * tau))
            - float(trajectory1.displacement(t - n_trip * tau))
        )
        phase_prod *= np.exp(-1j * phi)
        mu_pow *= mu
    return complex(c1.t * total)


def extract_sidebands(
    record: FieldRecord,
    omega_m: float,
    orders: int = 1,
    which: str = "intracavity",
    start: float | None = None,
) -> dict[int, complex]:
    """Complex tone amplitudes at offsets k * omega_m from the carrier.

    Projects the chosen envelope onto exp(i k omega_m t) over a window that
    spans a whole number of mechanical periods (absolute time reference, so
    the phases line up with the trajectory definition). The leading
    ring-up portion of the record is excluded.

    Parameters
    ----------
    omega_m : float
        Base sideband spacing, rad/s, > 0.
    orders : int
        Highest |k| returned.
    which : str
        One of intracavity, transmitted, reflected.
    start : float, optional
        Window start time in seconds; defaults to the record's ring-up
        estimate.

    Returns
    -------
    dict
        {k: amplitude} for k = -orders .. +orders; k = 0 is the carrier.

    Raises
    ------
    DomainError
        If fewer than 20 mechanical periods remain after the ring-up.
    """
    if omega_m <= 0:
        raise DomainError(f"omega_m must be > 0, got {omega_m}")
    if orders < 0:
        raise DomainError(f"orders must be >= 0, got {orders}")
    y = record.field(which)
    dt = record.dt
    t0 = record.ring_up_time if start is None else start
    i0 = int(np.ceil(t0 / dt))
    if i0 >= record.times.size:
        raise DomainError("window start beyond the end of the record")

    period = 2.0 * np.pi / omega_m
    available = (record.times.size - i0) * dt
    n_periods = int(np.floor(available / period))
    if n_periods < 20:
        raise DomainError(
            f"only {n_periods} mechanical periods after ring-up, need >= 20"
        )
    n_window = int(round(n_periods * period / dt))
    n_window = min(n_window, record.times.size - i0)

    tw = record.times[i0 : i0 + n_window]
    yw = y[i0 : i0 + n_window]
    out: dict[int, complex] = {}
    for k_order in range(-orders, orders + 1):
        out[k_order] = complex(np.mean(yw * np.exp(-1j * k_order * omega_m * tw)))
    return out
