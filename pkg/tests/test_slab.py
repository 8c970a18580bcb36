import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from membrane_etalon import (
    DomainError,
    SI3N4_CONSTANT,
    SI3N4_DEVICE,
    ConstantIndex,
    SellmeierSi3N4,
    SlabCoefficients,
    SlabParams,
    TabulatedIndex,
    reflectivity_curve,
    sellmeier_si3n4,
    slab_coefficients,
)


def test_reflectivity_oracle_constant_index():
    # analytic transfer through one slab: n=2.046, 75.2 nm film at 532 nm
    c = slab_coefficients(SlabParams(n=2.046, thickness=75.2e-9), 532e-9)
    assert c.reflectivity == pytest.approx(0.36313603889661755, rel=1e-12)


def test_device_table_reflectivities():
    # the calibrated table reproduces the three bench reflectivities at 75.2 nm
    for lam, r_meas in ((532e-9, 0.3618), (632.8e-9, 0.3571), (980e-9, 0.2652)):
        c = slab_coefficients(
            SlabParams(n=SI3N4_DEVICE(lam), thickness=75.2e-9), lam
        )
        assert c.reflectivity == pytest.approx(r_meas, abs=3e-4)


def test_energy_conservation_spot():
    c = slab_coefficients(SlabParams(n=1.78, thickness=130e-9), 780e-9)
    assert c.reflectivity + c.transmissivity == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(
    n=st.floats(1.01, 4.5),
    thickness=st.floats(1e-9, 5e-7),
    lam=st.floats(3e-7, 2e-6),
)
def test_energy_conservation_everywhere(n, thickness, lam):
    # lossless slab: |r|^2 + |t|^2 = 1 identically
    c = slab_coefficients(SlabParams(n=n, thickness=thickness), lam)
    assert abs(c.reflectivity + c.transmissivity - 1.0) < 1e-12


def test_from_reflectivity_roundtrip():
    c = SlabCoefficients.from_reflectivity(0.3618)
    assert c.reflectivity == pytest.approx(0.3618, rel=1e-14)
    assert c.transmissivity == pytest.approx(1.0 - 0.3618, rel=1e-14)
    # r and t of a lossless slab are always in quadrature
    assert np.angle(c.r / c.t) == pytest.approx(np.pi / 2, abs=1e-12)


def test_from_reflectivity_rejects_out_of_range():
    with pytest.raises(DomainError):
        SlabCoefficients.from_reflectivity(1.0)
    with pytest.raises(DomainError):
        SlabCoefficients.from_reflectivity(-0.1)


def test_physical_slab_phase_reference():
    # with both coefficients referenced to the slab faces, r/t comes out
    # purely real: (n^2-1) sin(knL) / 2n
    for n, thick, lam in ((2.046, 75.2e-9, 532e-9), (1.45, 200e-9, 1064e-9)):
        c = slab_coefficients(SlabParams(n=n, thickness=thick), lam)
        ratio = c.r / c.t
        k = 2 * np.pi / lam
        assert ratio.imag == pytest.approx(0.0, abs=1e-15)
        assert ratio.real == pytest.approx(
            (n * n - 1) * np.sin(k * n * thick) / (2 * n), rel=1e-12
        )


def test_slab_params_validation():
    with pytest.raises(DomainError):
        SlabParams(n=0.9, thickness=75e-9)
    with pytest.raises(DomainError):
        SlabParams(n=2.0, thickness=-1e-9)
    with pytest.raises(DomainError):
        slab_coefficients(SlabParams(n=2.0, thickness=75e-9), 0.0)


def test_index_models():
    assert ConstantIndex(2.046)(532e-9) == 2.046
    assert SI3N4_CONSTANT(980e-9) == 2.046
    tab = TabulatedIndex((500e-9, 600e-9), (2.05, 2.00))
    assert tab(550e-9) == pytest.approx(2.025)
    # flat extrapolation outside the table
    assert tab(400e-9) == 2.05
    assert tab(900e-9) == 2.00
    # stoichiometric-film dispersion model, decreasing with wavelength
    assert sellmeier_si3n4(532e-9) == pytest.approx(2.0559, abs=2e-4)
    assert SellmeierSi3N4()(980e-9) < SellmeierSi3N4()(532e-9)


def test_device_table_interpolates_between_anchors():
    n_mid = SI3N4_DEVICE(700e-9)
    assert SI3N4_DEVICE(980e-9) < n_mid < SI3N4_DEVICE(632.8e-9)


def test_reflectivity_curve_series():
    lam = np.linspace(500e-9, 1000e-9, 64)
    series = reflectivity_curve(75.2e-9, lam, SI3N4_DEVICE)
    assert series.x_name == "wavelength_m"
    assert series.y_name == "reflectivity_norm"
    assert series.y.shape == (64,)
    assert np.all((series.y >= 0.0) & (series.y < 1.0))
