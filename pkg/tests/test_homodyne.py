"""Homodyne receiver: quadrature extraction, noise spectra, sweep maps."""
import numpy as np
import pytest

from membrane_etalon import (
    DetectionChain,
    DomainError,
    EtalonGeometry,
    MechMode,
    ResponseParams,
    SlabCoefficients,
    bad_cavity_constants,
    displacement_spectra,
    nearest_resonant_length,
    photocurrent,
    sweep_map,
    voltage_noise_spectrum,
)
from membrane_etalon.constants import SPEED_OF_LIGHT

WAVELENGTH = 532e-9
R_DEVICE = 0.3618


def _params(mismatch=0.0, omega_m1=2 * np.pi * 4.016e5,
            omega_m2=2 * np.pi * 4.12e5):
    c = SlabCoefficients.from_reflectivity(R_DEVICE)
    geom = EtalonGeometry(
        resonant_length=nearest_resonant_length(c, c, WAVELENGTH, 5.707e-6),
        mismatch=mismatch,
    )
    return ResponseParams(c1=c, c2=c, geometry=geom, wavelength=WAVELENGTH,
                          omega_m1=omega_m1, omega_m2=omega_m2)


def _modes(overlap2=1.0):
    m1 = MechMode(2 * np.pi * 4.016e5, 2 * np.pi * 20.0, 5.6e-11,
                  overlap=1.0, force_amplitude=1e-15)
    m2 = MechMode(2 * np.pi * 4.12e5, 2 * np.pi * 50.0, 5.5e-11,
                  overlap=overlap2, force_amplitude=1e-15)
    return m1, m2


class TestPhotocurrent:
    CHAIN = DetectionChain(power_in=1e-3, power_lo=2e-3, lo_phase=0.5 * np.pi,
                           responsivity=0.8, transimpedance=2e3)

    def test_chain_of_gains(self):
        rng = np.random.default_rng(7)
        er = rng.normal(size=64) + 1j * rng.normal(size=64)
        sig = photocurrent(er, self.CHAIN)
        quad = np.real(np.exp(-0.5j * np.pi) * er / np.sqrt(1e-3))
        assert np.allclose(sig.quadrature, quad, rtol=1e-14)
        assert np.allclose(
            sig.current, 0.8 * 2.0 * np.sqrt(2e-3 * 1e-3) * quad, rtol=1e-14
        )
        assert np.allclose(sig.voltage, 2e3 * sig.current, rtol=1e-14)

    def test_lo_phase_selects_quadrature(self):
        er = np.array([3.0 + 4.0j]) * np.sqrt(1e-3)
        in_phase = DetectionChain(power_in=1e-3, power_lo=1e-3, lo_phase=0.0)
        quadr = DetectionChain(power_in=1e-3, power_lo=1e-3,
                               lo_phase=0.5 * np.pi)
        assert photocurrent(er, in_phase).quadrature[0] == pytest.approx(3.0)
        assert photocurrent(er, quadr).quadrature[0] == pytest.approx(4.0)

    def test_envelope_reference(self):
        # drive phase rides along: conj(f) undoes a common rotation
        er = np.exp(1j * np.linspace(0, 1, 16)) * np.sqrt(1e-3)
        f = np.exp(1j * np.linspace(0, 1, 16))
        sig = photocurrent(er, self.CHAIN, envelope=f)
        assert np.allclose(sig.quadrature, 0.0, atol=1e-15)

    def test_chain_validation(self):
        with pytest.raises(DomainError):
            DetectionChain(power_in=0.0, power_lo=1e-3)
        with pytest.raises(DomainError):
            DetectionChain(power_in=1e-3, power_lo=-1e-3)
        with pytest.raises(DomainError):
            DetectionChain(power_in=1e-3, power_lo=1e-3, responsivity=0.0)
        with pytest.raises(DomainError):
            DetectionChain(power_in=1e-3, power_lo=1e-3, noise_floor=-1.0)
        with pytest.raises(DomainError):
            DetectionChain(power_in=1e-3, power_lo=1e-3, level=0.0)


class TestVoltageNoiseSpectrum:
    def test_matches_assembled_form(self):
        params = _params(mismatch=2e-9)
        m1, m2 = _modes()
        chain = DetectionChain(power_in=1e-3, power_lo=2e-3,
                               responsivity=0.8, transimpedance=2e3)
        w = 2 * np.pi * np.linspace(3.9e5, 4.2e5, 301)
        series = voltage_noise_spectrum(chain, params, m1, m2, w)
        consts = bad_cavity_constants(params)
        s11, s22, s12 = displacement_spectra(m1, m2, w)
        pref = (4 * 2e3 * 0.8 * (params.omega_l / SPEED_OF_LIGHT)
                * np.sqrt(2 * 2e-3 * 1e-3)) ** 2
        w1 = np.imag(consts.sideband_1)
        w2 = np.imag(consts.sideband_2)
        expected = pref * (w1 ** 2 * s11 + w2 ** 2 * s22
                           - w1 * w2 * np.real(s12))
        assert series.x_name == "freq_hz"
        assert series.y_name == "psd_v2_hz"
        assert np.allclose(series.x, w / (2 * np.pi), rtol=1e-15)
        assert np.allclose(series.y, expected, rtol=1e-12)

    def test_peaks_sit_on_mechanical_lines(self):
        params = _params()
        m1, m2 = _modes()
        chain = DetectionChain(power_in=1e-3, power_lo=1e-3)
        for mode in (m1, m2):
            w = mode.omega_m + 2 * np.pi * np.linspace(-500, 500, 401)
            y = voltage_noise_spectrum(chain, params, m1, m2, w).y
            peak = w[np.argmax(y)]
            assert abs(peak - mode.omega_m) <= w[1] - w[0]

    def test_level_scales_signal_floor_adds(self):
        params = _params()
        m1, m2 = _modes()
        w = 2 * np.pi * np.linspace(4.0e5, 4.2e5, 101)
        base = DetectionChain(power_in=1e-3, power_lo=1e-3)
        cooked = DetectionChain(power_in=1e-3, power_lo=1e-3,
                                noise_floor=3e-12, level=2.5)
        y0 = voltage_noise_spectrum(base, params, m1, m2, w).y
        y1 = voltage_noise_spectrum(cooked, params, m1, m2, w).y
        assert np.allclose(y1, 2.5 * y0 + 3e-12, rtol=1e-12)

    def test_overlap_scales_quadratically(self):
        # independent drives: membrane-2 contribution goes like overlap^2
        params = _params()
        chain = DetectionChain(power_in=1e-3, power_lo=1e-3)
        w = 2 * np.pi * np.linspace(4.05e5, 4.2e5, 101)

        def spectrum(overlap2):
            m1, m2 = _modes(overlap2=overlap2)
            return voltage_noise_spectrum(chain, params, m1, m2, w,
                                          correlation="independent").y

        y_off = spectrum(0.0)
        part1 = spectrum(1.0) - y_off
        part2 = spectrum(2.0) - y_off
        assert np.allclose(part2, 4.0 * part1, rtol=1e-10)

    def test_empty_grid_rejected(self):
        m1, m2 = _modes()
        chain = DetectionChain(power_in=1e-3, power_lo=1e-3)
        with pytest.raises(DomainError):
            voltage_noise_spectrum(chain, _params(), m1, m2, np.array([]))


class TestSweepMap:
    CHAIN = DetectionChain(power_in=1e-3, power_lo=1e-3)

    def _run(self, offsets, omega, **kw):
        c = SlabCoefficients.from_reflectivity(R_DEVICE)
        geom = EtalonGeometry(
            resonant_length=nearest_resonant_length(c, c, WAVELENGTH, 5.707e-6)
        )
        m1, m2 = _modes()
        return sweep_map(self.CHAIN, c, c, geom, WAVELENGTH, m1, m2,
                         offsets, omega, **kw)

    def test_layout_and_meta(self):
        offsets = np.linspace(-0.5, 0.5, 7)
        omega = 2 * np.pi * np.linspace(3.9e5, 4.3e5, 41)
        out = self._run(offsets, omega)
        assert out.psd.shape == (7, 41)
        assert np.allclose(out.freq_grid, omega / (2 * np.pi))
        assert np.all(out.dl_grid == offsets)
        assert out.meta["wavelength_m"] == WAVELENGTH
        assert out.meta["correlation"] == "common"
        assert out.meta["piezo_membrane"] == 2

    def test_half_wavelength_periodicity(self):
        omega = 2 * np.pi * np.linspace(3.9e5, 4.3e5, 61)
        out = self._run(np.array([0.3, 1.3]), omega)
        assert np.allclose(out.psd[0], out.psd[1], rtol=1e-10)

    def test_piezo_drags_mechanical_line(self):
        omega = 2 * np.pi * np.linspace(4.05e5, 4.25e5, 2001)
        beta = 0.02
        out = self._run(np.array([0.0, 0.5]), omega,
                        piezo_beta=beta, piezo_membrane=2)
        f0 = out.freq_grid[np.argmax(out.psd[0])]
        f1 = out.freq_grid[np.argmax(out.psd[1])]
        df = out.freq_grid[1] - out.freq_grid[0]
        assert abs(f0 - 4.12e5) <= df
        assert abs(f1 - 4.12e5 * (1 + beta * 0.5)) <= df
        assert out.meta["piezo_beta"] == beta

    def test_validation(self):
        omega = 2 * np.pi * np.linspace(3.9e5, 4.3e5, 11)
        with pytest.raises(DomainError):
            self._run(np.array([0.0]), omega, piezo_membrane=3)
        with pytest.raises(DomainError):
            self._run(np.array([]), omega)
