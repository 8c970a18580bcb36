"""Membrane drum modes, susceptibilities and side-length inversion."""
import numpy as np
import pytest

from membrane_etalon import (
    CONVENTIONS,
    DomainError,
    MechMode,
    MembranePlate,
    displacement_spectra,
    effective_mass,
    infer_side_lengths,
    mode_frequency,
    piezo_shifted_frequency,
    susceptibility,
)

# stoichiometric-nitride film numbers used throughout
STRESS = 1e9
DENSITY = 3100.0


def _plate(lx=1e-3, ly=1e-3):
    return MembranePlate(lx=lx, ly=ly, stress=STRESS, density=DENSITY)


class TestModeFrequency:
    def test_conventions_against_closed_form(self):
        # 1 mm square, (1,1): sqrt(sigma/rho * 2/L^2) evaluated by hand
        plate = _plate()
        assert mode_frequency(plate, 1, 1, "as-written") == pytest.approx(
            803219.3289024988, rel=1e-12
        )
        assert mode_frequency(plate, 1, 1, "half-factor") == pytest.approx(
            401609.6644512494, rel=1e-12
        )

    def test_half_factor_is_default_and_half(self):
        plate = _plate(0.9774e-3, 0.9759e-3)
        for n, m in [(1, 1), (2, 3), (4, 1)]:
            full = mode_frequency(plate, n, m, "as-written")
            assert mode_frequency(plate, n, m) == pytest.approx(0.5 * full)

    def test_scaling_relations(self):
        plate = _plate()
        f11 = mode_frequency(plate, 1, 1)
        # quadrupled stress doubles every frequency
        stiff = MembranePlate(1e-3, 1e-3, 4 * STRESS, DENSITY)
        assert mode_frequency(stiff, 1, 1) == pytest.approx(2 * f11)
        # square plate: (n,m) and (m,n) degenerate, (2,2) is double (1,1)
        assert mode_frequency(plate, 2, 1) == pytest.approx(
            mode_frequency(plate, 1, 2)
        )
        assert mode_frequency(plate, 2, 2) == pytest.approx(2 * f11)

    def test_index_and_convention_validation(self):
        plate = _plate()
        with pytest.raises(DomainError):
            mode_frequency(plate, 0, 1)
        with pytest.raises(DomainError):
            mode_frequency(plate, 1, -2)
        with pytest.raises(DomainError):
            mode_frequency(plate, 1, 1, "thirds")
        assert set(CONVENTIONS) == {"as-written", "half-factor"}

    def test_plate_validation(self):
        with pytest.raises(DomainError):
            MembranePlate(-1e-3, 1e-3, STRESS, DENSITY)
        with pytest.raises(DomainError):
            MembranePlate(1e-3, 1e-3, 0.0, DENSITY)


def test_effective_mass_quarter_rule():
    plate = _plate(0.9774e-3, 0.9759e-3)
    t = 75.2e-9
    expected = 0.25 * DENSITY * 0.9774e-3 * 0.9759e-3 * t
    assert effective_mass(plate, t) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(DomainError):
        effective_mass(plate, 0.0)


class TestSusceptibility:
    MODE = MechMode(omega_m=2 * np.pi * 4e5, gamma_m=2 * np.pi * 2.0,
                    mass_eff=5.6e-11)

    def test_dc_and_resonance(self):
        m = self.MODE
        assert susceptibility(m, 0.0) == pytest.approx(
            1.0 / (m.mass_eff * m.omega_m ** 2)
        )
        on = susceptibility(m, m.omega_m)
        # on resonance only the damping term survives: purely imaginary
        assert on.real == pytest.approx(0.0, abs=1e-30)
        assert on == pytest.approx(-1j / (m.mass_eff * m.gamma_m * m.omega_m))

    def test_reality_condition(self):
        w = np.linspace(0.1, 3.0, 7) * self.MODE.omega_m
        assert np.allclose(
            susceptibility(self.MODE, -w), np.conj(susceptibility(self.MODE, w))
        )

    def test_quality_factor(self):
        assert self.MODE.quality == pytest.approx(2e5)
        free = MechMode(1e6, 0.0, 1e-11)
        assert free.quality == np.inf

    def test_mode_validation(self):
        with pytest.raises(DomainError):
            MechMode(0.0, 1.0, 1e-11)
        with pytest.raises(DomainError):
            MechMode(1e6, -1.0, 1e-11)
        with pytest.raises(DomainError):
            MechMode(1e6, 1.0, 0.0)


class TestDisplacementSpectra:
    M1 = MechMode(2 * np.pi * 4.016e5, 2 * np.pi * 1.5, 5.6e-11,
                  force_amplitude=1e-15)
    M2 = MechMode(2 * np.pi * 4.120e5, 2 * np.pi * 3.0, 5.5e-11,
                  force_amplitude=2e-15)

    def test_diagonal_terms(self):
        w = np.linspace(0.9, 1.1, 11) * self.M1.omega_m
        s11, s22, _ = displacement_spectra(self.M1, self.M2, w)
        assert np.allclose(
            s11, np.abs(susceptibility(self.M1, w)) ** 2 * 1e-30
        )
        assert np.allclose(
            s22, np.abs(susceptibility(self.M2, w)) ** 2 * 4e-30
        )

    def test_correlation_switch(self):
        w = np.array([self.M1.omega_m])
        _, _, s12c = displacement_spectra(self.M1, self.M2, w, "common")
        _, _, s12i = displacement_spectra(self.M1, self.M2, w, "independent")
        chi1 = susceptibility(self.M1, w)
        chi2 = susceptibility(self.M2, w)
        assert np.allclose(s12c, np.conj(chi1) * chi2 * 1e-15 * 2e-15)
        assert np.all(s12i == 0)
        with pytest.raises(DomainError):
            displacement_spectra(self.M1, self.M2, w, "anti")

    def test_spectra_peak_on_resonance(self):
        w = np.linspace(0.99, 1.01, 201) * self.M1.omega_m
        s11, _, _ = displacement_spectra(self.M1, self.M2, w)
        assert abs(w[np.argmax(s11)] - self.M1.omega_m) <= (w[1] - w[0])


def test_piezo_shift_law():
    w0 = 2 * np.pi * 4.016e5
    assert piezo_shifted_frequency(w0, 0.0, 5.0) == w0
    assert piezo_shifted_frequency(w0, 1e-3, 2.0) == pytest.approx(w0 * 1.002)
    assert piezo_shifted_frequency(w0, -1e-3, 2.0) == pytest.approx(w0 * 0.998)
    with pytest.raises(DomainError):
        piezo_shifted_frequency(w0, -0.5, 2.5)


class TestInferSideLengths:
    LX, LY = 0.9774e-3, 0.9759e-3
    # measured (n, m, freq) table for that plate, half-factor convention
    MODES = [
        (1, 1, 411211.8),
        (2, 1, 649883.3),
        (1, 2, 650482.5),
        (2, 2, 822423.6),
        (3, 1, 918932.5),
    ]

    def test_roundtrip_exact(self):
        # synthesize from the closed form, invert: lstsq should be exact
        modes = [
            (n, m, 0.5 * np.sqrt(STRESS / DENSITY
                                 * ((n / self.LX) ** 2 + (m / self.LY) ** 2)))
            for n, m in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1)]
        ]
        fit = infer_side_lengths(modes, STRESS, DENSITY)
        assert fit.lx == pytest.approx(self.LX, rel=1e-10)
        assert fit.ly == pytest.approx(self.LY, rel=1e-10)
        assert np.max(np.abs(fit.residuals)) < 1e-10

    def test_rounded_table(self):
        # frequencies quoted to 0.1 Hz still pin the sides to 1e-4
        fit = infer_side_lengths(self.MODES, STRESS, DENSITY)
        assert fit.lx == pytest.approx(self.LX, rel=1e-4)
        assert fit.ly == pytest.approx(self.LY, rel=1e-4)

    def test_as_written_convention(self):
        modes = [(n, m, 2 * f) for n, m, f in self.MODES]
        fit = infer_side_lengths(modes, STRESS, DENSITY, convention="as-written")
        assert fit.lx == pytest.approx(self.LX, rel=1e-4)
        assert fit.ly == pytest.approx(self.LY, rel=1e-4)

    def test_degenerate_mode_set(self):
        # (1,1) and (2,2) rows are proportional: axes cannot be separated
        with pytest.raises(DomainError):
            infer_side_lengths(
                [(1, 1, 411211.8), (2, 2, 822423.6)], STRESS, DENSITY
            )

    def test_input_validation(self):
        with pytest.raises(DomainError):
            infer_side_lengths([(1, 1, 411211.8)], STRESS, DENSITY)
        with pytest.raises(DomainError):
            infer_side_lengths(self.MODES, -STRESS, DENSITY)
        with pytest.raises(DomainError):
            infer_side_lengths([(0, 1, 4e5), (2, 1, 6e5)], STRESS, DENSITY)
        with pytest.raises(DomainError):
            infer_side_lengths([(1, 1, -4e5), (2, 1, 6e5)], STRESS, DENSITY)

    def test_unphysical_fit_rejected(self):
        # (2,1) below (1,1) forces 1/Lx^2 negative
        with pytest.raises(DomainError):
            infer_side_lengths([(1, 1, 6e5), (2, 1, 5e5)], STRESS, DENSITY)
