import numpy as np
import pytest
from scipy import special

from membrane_etalon import (
    DomainError,
    EtalonGeometry,
    HighFinesseParams,
    ModelValidityWarning,
    ResponseParams,
    SlabCoefficients,
    bad_cavity_constants,
    bessel_j0,
    bessel_j1,
    cavity_dc_response,
    cavity_sideband_amplitudes,
    high_finesse_denominator,
    loop_denominator,
    nearest_resonant_length,
    reflection_dc_response,
    reflection_sideband_amplitudes,
    transmitted_sideband_amplitudes,
)

LAM = 532e-9


def _params(R=0.3618, length=None, detune=0.0, xi1=0.0, xi2=0.0,
            omega_m1=0.0, omega_m2=0.0):
    c = SlabCoefficients.from_reflectivity(R)
    if length is None:
        length = nearest_resonant_length(c, c, LAM, 5.7e-6)
    geom = EtalonGeometry(resonant_length=length, mismatch=detune)
    return ResponseParams(c1=c, c2=c, geometry=geom, wavelength=LAM,
                          xi1=xi1, xi2=xi2, omega_m1=omega_m1, omega_m2=omega_m2)


def test_bessel_series_against_scipy():
    for x in (-9.5, -2.3, -0.5, 0.0, 1e-8, 0.5, 2.3, 7.7, 9.9):
        assert bessel_j0(x) == pytest.approx(special.j0(x), abs=1e-13)
        assert bessel_j1(x) == pytest.approx(special.j1(x), abs=1e-13)


def test_bessel_spot_values():
    assert bessel_j0(0.5) == pytest.approx(0.938469807240813, abs=1e-14)
    assert bessel_j1(0.5) == pytest.approx(0.24226845767487387, abs=1e-14)


def test_bessel_domain_limit():
    with pytest.raises(DomainError):
        bessel_j0(11.0)
    with pytest.raises(DomainError):
        bessel_j1(-10.5)


def test_dc_buildup_on_resonance():
    # on resonance the internal carrier power is 1/(1-R) per unit drive power
    p = _params()
    c0 = cavity_dc_response(p, 0.0)
    assert abs(c0) ** 2 == pytest.approx(1.5669069257286117, rel=1e-9)


def test_loop_denominator_reduces_to_one_minus_mu():
    p = _params(xi1=0.0, xi2=0.0)
    d0 = loop_denominator(p, 0.0)
    assert d0 == pytest.approx(1.0 - p.round_trip(), rel=1e-12)
    # with modulation on, the carrier is depleted: J0 < 1 raises |D|
    with pytest.warns(ModelValidityWarning):
        p_mod = _params(xi1=0.3, xi2=0.2)
    assert abs(loop_denominator(p_mod, 0.0)) > abs(d0)


def test_carrier_energy_conservation_closed_form():
    # |E_t|^2 + |E_r|^2 = P_in for the static lossless cavity, any detuning
    rng = np.random.default_rng(11)
    for _ in range(300):
        R = 0.05 + 0.9 * rng.random()
        detune = (rng.random() - 0.5) * LAM
        p = _params(R=R, detune=detune)
        r0 = reflection_dc_response(p, 0.0)
        t0 = p.c2.t * cavity_dc_response(p, 0.0)
        assert abs(r0) ** 2 + abs(t0) ** 2 == pytest.approx(1.0, abs=1e-9)


def test_reflection_carrier_vanishes_on_resonance_identical_slabs():
    p = _params()
    assert abs(reflection_dc_response(p, 0.0)) < 1e-8


def test_sideband_amplitudes_scale_linearly_in_xi():
    base = dict(omega_m2=2 * np.pi * 50e9)
    p1 = _params(xi2=1e-4, **base)
    p2 = _params(xi2=2e-4, **base)
    for fn in (cavity_sideband_amplitudes, reflection_sideband_amplitudes,
               transmitted_sideband_amplitudes):
        a1 = fn(p1, 2)
        a2 = fn(p2, 2)
        assert abs(a2[0]) == pytest.approx(2 * abs(a1[0]), rel=1e-6)
        assert abs(a2[1]) == pytest.approx(2 * abs(a1[1]), rel=1e-6)


def test_membrane_sign_convention():
    # same drive on membrane 1 vs membrane 2 flips the leading sign of the
    # sideband pair; magnitudes differ through the cavity filtering only
    om = 2 * np.pi * 20e9
    p1 = _params(xi1=1e-4, omega_m1=om)
    p2 = _params(xi2=1e-4, omega_m2=om)
    c1u, c1l = cavity_sideband_amplitudes(p1, 1)
    c2u, c2l = cavity_sideband_amplitudes(p2, 2)
    assert abs(abs(c1u) - abs(c2u)) / abs(c2u) < 0.2
    # the shared-phase combination keeps opposite signs between membranes
    assert np.sign(np.real(c1u / c2u)) == -1.0


def test_transmitted_tap_phase():
    om = 2 * np.pi * 30e9
    p = _params(xi2=1e-4, omega_m2=om)
    cav = cavity_sideband_amplitudes(p, 2)
    tr = transmitted_sideband_amplitudes(p, 2)
    tau = p.geometry.tau
    assert tr[0] == pytest.approx(p.c2.t * np.exp(-1j * om * tau / 2) * cav[0], rel=1e-12)
    assert tr[1] == pytest.approx(p.c2.t * np.exp(+1j * om * tau / 2) * cav[1], rel=1e-12)


def test_bad_cavity_constants_match_full_response_at_low_frequency():
    # adiabatic limit: constants equal the exact responses as omega_m -> 0
    om_small = 2 * np.pi * 1e6   # far below the ~5e12 Hz linewidth scale
    p = _params(xi2=1e-5, omega_m2=om_small, detune=20e-9)
    consts = bad_cavity_constants(p)
    from membrane_etalon import reflection_sideband_response

    exact = reflection_sideband_response(p, 2, 1j * om_small, -1)
    assert consts.sideband_2 == pytest.approx(exact, rel=1e-3)
    assert consts.within_bad_cavity


def test_bad_cavity_flag_warns_when_violated():
    p = _params(omega_m2=2 * np.pi * 1e13)
    with pytest.warns(ModelValidityWarning):
        consts = bad_cavity_constants(p)
    assert not consts.within_bad_cavity


def test_high_finesse_denominator_matches_exact():
    # R -> 1, on resonance: D(i w) ~ (kappa + i(Delta + w)) / FSR within 1%
    # for w <= 0.1 kappa
    c = SlabCoefficients.from_reflectivity(0.999)
    length = nearest_resonant_length(c, c, LAM, 5.7e-6)
    geom = EtalonGeometry(resonant_length=length)
    p = ResponseParams(c1=c, c2=c, geometry=geom, wavelength=LAM)
    hf = HighFinesseParams.from_etalon(c, c, geom, LAM)
    assert hf.detuning == pytest.approx(0.0, abs=hf.kappa * 1e-6)
    for w in np.linspace(0.0, 0.1 * hf.kappa, 7):
        exact = loop_denominator(p, 1j * w)
        approx = high_finesse_denominator(hf, w)
        assert abs(approx - exact) / abs(exact) < 0.01


def test_response_params_validation():
    with pytest.raises(DomainError):
        _params(xi2=-1.0)
    with pytest.warns(ModelValidityWarning):
        _params(xi2=0.5)  # linearization degrades past xi ~ 0.1
