"""Built-in sanity checks, runnable on any install via the CLI.

Each check is fast (well under a second) and prints one PASS/FAIL line;
the suite exits nonzero if anything fails. This is a smoke layer, not
the test suite: it exists so a fresh install can be validated without
hauling in the development dependencies.
"""
from __future__ import annotations

import io as _stdio
import math
import tempfile
import warnings

import numpy as np

from . import kernels
from .dynamics import DriveField, MembraneTrajectory, extract_sidebands, simulate
from .etalon import (
    EtalonGeometry,
    finesse_fwhm,
    nearest_resonant_length,
    steady_transmission,
)
from .io import read_series, write_series
from .mechanics import MembranePlate, mode_frequency
from .response import ResponseParams, transmitted_sideband_amplitudes
from .series import SpectrumSeries
from .slab import SI3N4_DEVICE, SlabCoefficients, SlabParams, slab_coefficients


def _check_slab_energy():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(64):
        n = 1.2 + 2.8 * rng.random()
        thick = 1e-9 + 400e-9 * rng.random()
        lam = 400e-9 + 1200e-9 * rng.random()
        c = slab_coefficients(SlabParams(n=n, thickness=thick), lam)
        worst = max(worst, abs(c.reflectivity + c.transmissivity - 1.0))
    assert worst < 1e-12, f"worst |R+T-1| = {worst:.3e}"
    return f"|R+T-1| <= {worst:.1e} over 64 draws"


def _check_finesse():
    c = SlabCoefficients.from_reflectivity(0.3618)
    value = finesse_fwhm(c, c)
    assert abs(value - 2.809003) < 3e-4, f"finesse {value:.6f}"
    return f"finesse(R=0.3618) = {value:.6f}"


def _check_mode_frequency():
    plate = MembranePlate(lx=1e-3, ly=1e-3, stress=1e9, density=3100.0)
    f11 = mode_frequency(plate, 1, 1)
    assert abs(f11 - 401.6e3) < 0.5e3, f"f11 = {f11:.1f} Hz"
    return f"(1,1) mode at {f11 / 1e3:.1f} kHz"


def _check_backend():
    drive = np.full(256, 1.0 + 0.0j)
    phase = np.exp(-1j * np.linspace(0.0, 0.3, 256))
    a = kernels.delay_recursion(drive, phase, 0.8 + 0.0j, 0.3 - 0.1j, 16)
    from . import _kernels_py

    b = _kernels_py.delay_recursion(drive, phase, 0.8 + 0.0j, 0.3 - 0.1j, 16)
    # numpy's vectorized complex product uses fused multiply-adds, the
    # compiled loop does plain rounding: a couple of ulp is the floor
    err = float(np.max(np.abs(a - b) / np.abs(b)))
    assert err < 1e-14, f"backend mismatch {err:.3e}"
    return f"{kernels.BACKEND} backend agrees with numpy reference to {err:.1e}"


def _check_sideband_linear_response():
    lam = 1064e-9
    c = SlabCoefficients.from_reflectivity(0.3618)
    geom = EtalonGeometry(resonant_length=5.707e-6)
    subdivisions = 64
    period_samples = 5000
    omega_m = 2.0 * math.pi / (period_samples * geom.tau / subdivisions)
    k = 2.0 * math.pi / lam
    amp = 1e-4 / (2.0 * k)
    drive = DriveField(power=1.0, wavelength=lam)
    tr2 = MembraneTrajectory(amplitude=amp, omega=omega_m)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        mech_period = period_samples * geom.tau / subdivisions
        record = simulate(c, c, geom, drive, MembraneTrajectory(), tr2,
                          duration=60 * mech_period, subdivisions=subdivisions)
        tones = extract_sidebands(record, omega_m, orders=1, which="transmitted")
    params = ResponseParams(c1=c, c2=c, geometry=geom, wavelength=lam,
                            xi2=2.0 * k * amp, omega_m2=omega_m)
    a_plus, a_minus = transmitted_sideband_amplitudes(params, 2)
    err = max(
        abs(abs(tones[+1]) - abs(a_plus)) / abs(a_plus),
        abs(abs(tones[-1]) - abs(a_minus)) / abs(a_minus),
    )
    assert err < 0.01, f"sideband mismatch {err:.2e}"
    return f"simulated vs closed-form sidebands agree to {err:.1e}"


def _check_io_roundtrip():
    series = SpectrumSeries(
        x=np.linspace(500.0, 600.0, 11),
        y=np.sqrt(np.linspace(0.1, 0.9, 11)),
        x_name="wavelength_nm",
        y_name="reflectivity_norm",
    )
    with tempfile.NamedTemporaryFile(suffix=".csv", mode="w", delete=False) as fh:
        path = fh.name
    write_series(series, path)
    back = read_series(path)
    assert np.array_equal(series.x, back.x) and np.array_equal(series.y, back.y)
    return "CSV round-trip is exact"


def _check_device_transmission():
    lam = 532e-9
    c = slab_coefficients(SlabParams(n=SI3N4_DEVICE(lam), thickness=75.2e-9), lam)
    length = nearest_resonant_length(c, c, lam, 5.707e-6)
    geom = EtalonGeometry(resonant_length=length)
    t_res = steady_transmission(c, c, geom, lam)
    assert t_res > 1.0 - 1e-9, f"on-resonance transmission {t_res:.4f}"
    return f"on-resonance transmission {t_res:.9f} at gap {length * 1e6:.4f} um"


CHECKS = (
    ("slab-energy", _check_slab_energy),
    ("finesse-oracle", _check_finesse),
    ("mode-frequency", _check_mode_frequency),
    ("kernel-backend", _check_backend),
    ("sideband-response", _check_sideband_linear_response),
    ("csv-roundtrip", _check_io_roundtrip),
    ("device-transmission", _check_device_transmission),
)


def run_selftest(stream=None) -> int:
    import sys

    stream = stream or sys.stdout
    failures = 0
    for name, fn in CHECKS:
        try:
            detail = fn()
            print(f"PASS {name}: {detail}", file=stream)
        except Exception as exc:  # noqa: BLE001 - report, do not crash the runner
            failures += 1
            print(f"FAIL {name}: {exc}", file=stream)
    if failures:
        print(f"{failures} of {len(CHECKS)} checks failed", file=stream)
    else:
        print(f"all {len(CHECKS)} checks passed", file=stream)
    return 1 if failures else 0
