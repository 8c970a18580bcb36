"""Balanced homodyne readout of the reflected field.

The reflected envelope beats against a local oscillator of power P_lo and
phase phi_l. The balanced photocurrent is proportional to the selected
quadrature

    e(t) = Re[ conj(f(t)) exp(-i phi_l) E_r(t) / sqrt(P_in) ]

with f the drive envelope, giving current and voltage

    I(t) = S 2 sqrt(P_lo P_in) e(t),        V(t) = g_T I(t)

(S the detector responsivity, g_T the transimpedance gain). With both
mechanical frequencies deep inside the cavity linewidth the reflected
sidebands follow the membranes adiabatically and the voltage spectral
density reduces to the closed form

    S_W(w) = (4 g_T S (w_L/c) sqrt(2 P_lo P_in))^2 *
             {  [eta_1 Im R1_1]^2 S_x1x1(w)
              + [eta_2 Im R1_2]^2 S_x2x2(w)
              - eta_1 eta_2 Im R1_1 Im R1_2 Re S_x1x2(w) }  + floor

where R1_j are the adiabatic reflection constants, eta_j the spot-mode
overlaps, and S_xjxj the displacement spectra. The relative minus sign on
the cross term comes from the opposite sign with which the two membranes
phase-modulate the round trip.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import DomainError
from .etalon import EtalonGeometry
from .mechanics import MechMode, displacement_spectra, piezo_shifted_frequency
from .response import ResponseParams, bad_cavity_constants
from .series import SpectrumSeries, SweepMap
from .slab import SlabCoefficients


@dataclass(frozen=True)
class DetectionChain:
    """Powers, phases and electronics of the homodyne receiver.

    Parameters
    ----------
    power_in : float
        Drive power on the etalon, W.
    power_lo : float
        Local oscillator power, W.
    lo_phase : float
        Homodyne phase phi_l, rad. The noise-spectrum formula assumes the
        phase-quadrature optimum; the time-domain signal uses it exactly.
    responsivity : float
        Detector responsivity S, A/W.
    transimpedance : float
        Gain g_T, V/A.
    noise_floor : float
        Detection background added to spectra, V^2/Hz.
    level : float
        Dimensionless calibration applied to the signal part of spectra
        (absorbs unmodeled gains in a measured chain).
    """

    power_in: float
    power_lo: float
    lo_phase: float = 0.5 * np.pi
    responsivity: float = 1.0
    transimpedance: float = 1.0
    noise_floor: float = 0.0
    level: float = 1.0

    def __post_init__(self):
        if self.power_in <= 0:
            raise DomainError(f"power_in must be > 0, got {self.power_in}")
        if self.power_lo < 0:
            raise DomainError(f"power_lo must be >= 0, got {self.power_lo}")
        if self.responsivity <= 0 or self.transimpedance <= 0:
            raise DomainError("responsivity and transimpedance must be > 0")
        if self.noise_floor < 0:
            raise DomainError(f"noise_floor must be >= 0, got {self.noise_floor}")
        if self.level <= 0:
            raise DomainError(f"level must be > 0, got {self.level}")


@dataclass
class HomodyneSignal:
    """Time-domain homodyne output."""

    quadrature: np.ndarray  # e(t), dimensionless
    current: np.ndarray     # A
    voltage: np.ndarray     # V


def photocurrent(reflected, chain: DetectionChain, envelope=None) -> HomodyneSignal:
    """Homodyne quadrature, current and voltage from reflected samples.

    Parameters
    ----------
    reflected : complex array
        Reflected envelope E_r(t) in sqrt(W), e.g. FieldRecord.reflected.
    envelope : complex array, optional
        Drive envelope samples f(t); default constant 1.
    """
    er = np.asarray(reflected)
    f = np.ones_like(er) if envelope is None else np.asarray(envelope)
    quad = np.real(
        np.conj(f) * np.exp(-1j * chain.lo_phase) * er / np.sqrt(chain.power_in)
    )
    current = chain.responsivity * 2.0 * np.sqrt(chain.power_lo * chain.power_in) * quad
    return HomodyneSignal(
        quadrature=quad, current=current, voltage=chain.transimpedance * current
    )


def voltage_noise_spectrum(
    chain: DetectionChain,
    params: ResponseParams,
    mode1: MechMode,
    mode2: MechMode,
    omega,
    correlation: str = "common",
) -> SpectrumSeries:
    """Homodyne voltage spectral density over an analysis-frequency grid.

    Evaluates the adiabatic closed form from the module docstring; valid
    when the mechanical resonances sit far inside the cavity linewidth
    (a validity warning from the reflection constants fires otherwise).

    Parameters
    ----------
    omega : array_like
        Analysis angular frequencies, rad/s.

    Returns
    -------
    SpectrumSeries
        Columns freq_hz, psd_v2_hz.
    """
    omega = np.asarray(omega, dtype=float)
    if omega.size == 0:
        raise DomainError("frequency grid is empty")
    consts = bad_cavity_constants(params)
    s11, s22, s12 = displacement_spectra(mode1, mode2, omega, correlation)

    pref = (
        4.0
        * chain.transimpedance
        * chain.responsivity
        * (params.omega_l / SPEED_OF_LIGHT)
        * np.sqrt(2.0 * chain.power_lo * chain.power_in)
    ) ** 2
    w1 = mode1.overlap * np.imag(consts.sideband_1)
    w2 = mode2.overlap * np.imag(consts.sideband_2)
    signal = pref * (
        w1 ** 2 * s11 + w2 ** 2 * s22 - w1 * w2 * np.real(s12)
    )
    psd = chain.level * signal + chain.noise_floor
    return SpectrumSeries(
        x=omega / (2.0 * np.pi), y=psd, x_name="freq_hz", y_name="psd_v2_hz"
    )


def sweep_map(
    chain: DetectionChain,
    c1: SlabCoefficients,
    c2: SlabCoefficients,
    geometry: EtalonGeometry,
    wavelength: float,
    mode1: MechMode,
    mode2: MechMode,
    offsets,
    omega,
    correlation: str = "common",
    piezo_beta: float = 0.0,
    piezo_membrane: int = 2,
) -> SweepMap:
    """Noise spectra across one cavity-length scan.

    Parameters
    ----------
    offsets : array_like
        Cavity length offsets in units of lambda/2 (one full fringe is
        offsets spanning [0, 1]); added to the geometry's mismatch.
    omega : array_like
        Analysis angular frequencies, rad/s, shared by all rows.
    piezo_beta : float
        Fractional mechanical frequency shift per unit scan coordinate for
        the membrane carrying the piezo; the normalized offset itself
        stands in for the piezo voltage.
    piezo_membrane : int
        Which membrane (1 or 2) the piezo tunes.

    Returns
    -------
    SweepMap
        psd[i, j] over (offset, frequency).
    """
    if piezo_membrane not in (1, 2):
        raise DomainError(f"piezo_membrane must be 1 or 2, got {piezo_membrane}")
    offsets = np.asarray(offsets, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if offsets.size == 0 or omega.size == 0:
        raise DomainError("sweep grids must be non-empty")

    rows = np.empty((offsets.size, omega.size))
    for i, dl_norm in enumerate(offsets):
        geom = EtalonGeometry(
            resonant_length=geometry.resonant_length,
            mismatch=geometry.mismatch + dl_norm * 0.5 * wavelength,
            x1=geometry.x1,
        )
        m1, m2 = mode1, mode2
        if piezo_beta != 0.0:
            shifted = piezo_shifted_frequency(
                (mode1 if piezo_membrane == 1 else mode2).omega_m, piezo_beta, dl_norm
            )
            if piezo_membrane == 1:
                m1 = MechMode(shifted, mode1.gamma_m, mode1.mass_eff,
                              mode1.overlap, mode1.force_amplitude)
            else:
                m2 = MechMode(shifted, mode2.gamma_m, mode2.mass_eff,
                              mode2.overlap, mode2.force_amplitude)
        params = ResponseParams(
            c1=c1, c2=c2, geometry=geom, wavelength=wavelength,
            omega_m1=m1.omega_m, omega_m2=m2.omega_m,
        )
        rows[i] = voltage_noise_spectrum(chain, params, m1, m2, omega, correlation).y

    return SweepMap(
        dl_grid=offsets,
        freq_grid=omega / (2.0 * np.pi),
        psd=rows,
        meta={"wavelength_m": wavelength, "correlation": correlation,
              "piezo_beta": piezo_beta, "piezo_membrane": piezo_membrane},
    )
