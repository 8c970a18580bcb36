"""Command line front end.

Every command takes an optional JSON config (--config); file outputs are
deterministic byte-for-byte for a fixed config and seed, independent of
--workers, and carry no timestamps.

Exit codes: 0 success, 1 bad input or out-of-domain parameters, 2 a fit
or iteration failed to converge.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ._version import __version__
from .config import RunConfig, apply_noise, config_from_dict, load_config, resolved_json
from .dynamics import DriveField, MembraneTrajectory, simulate
from .errors import ConvergenceError, DomainError, ParseError
from .etalon import finesse_fwhm, fringe_scan, steady_transmission
from .fitting import FitResult, fit_airy_timescan, fit_airy_wavelength, fit_lorentzian, fit_thickness
from .homodyne import sweep_map, voltage_noise_spectrum
from .io import (
    read_series,
    write_map_csv,
    write_map_json,
    write_record,
    write_series,
)
from .response import (
    ResponseParams,
    bad_cavity_constants,
    cavity_sideband_amplitudes,
    reflection_sideband_amplitudes,
    transmitted_sideband_amplitudes,
)
from .series import SweepMap


def _jsonable(obj):
    """Recursively make an object JSON-safe; non-finite floats become null."""
    if isinstance(obj, dict):
        return {k: _jsonable(obj[k]) for k in obj}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else config_from_dict({})
    replacements = {}
    if args.seed is not None:
        replacements["seed"] = args.seed
    if args.convention is not None:
        replacements["convention"] = args.convention
    if replacements:
        cfg = dataclasses.replace(cfg, **replacements)
    if args.resolved_config:
        with open(args.resolved_config, "w", newline="") as fh:
            fh.write(resolved_json(cfg))
    return cfg


def _response_params(cfg: RunConfig) -> ResponseParams:
    c1, c2 = cfg.coefficients()
    k = 2.0 * math.pi / cfg.wavelength()
    sim = cfg.simulate
    return ResponseParams(
        c1=c1,
        c2=c2,
        geometry=cfg.geometry.build(),
        wavelength=cfg.wavelength(),
        xi1=2.0 * k * sim.amp1_nm * 1e-9,
        xi2=2.0 * k * sim.amp2_nm * 1e-9,
        omega_m1=2.0 * math.pi * sim.freq1_khz * 1e3,
        omega_m2=2.0 * math.pi * sim.freq2_khz * 1e3,
    )


# -- commands -------------------------------------------------------------


def _cmd_slab(args) -> int:
    cfg = _load(args)
    c1, c2 = cfg.coefficients()
    geom = cfg.geometry.build()
    lam = cfg.wavelength()
    try:
        finesse = finesse_fwhm(c1, c2)
    except DomainError:
        finesse = None
    payload = {
        "wavelength_nm": cfg.drive.wavelength_nm,
        "membranes": [
            {
                "r": c.r,
                "t": c.t,
                "reflectivity_norm": c.reflectivity,
                "transmissivity_norm": c.transmissivity,
                "phase_rad": c.phase,
            }
            for c in (c1, c2)
        ],
        "fsr_hz": geom.fsr,
        "tau_s": geom.tau,
        "on_resonance_transmission_norm": steady_transmission(c1, c2, geom, lam),
        "finesse": finesse,
    }
    _emit_json(payload, args.out)
    return 0


def _cmd_fringe(args) -> int:
    cfg = _load(args)
    c1, c2 = cfg.coefficients()
    span = (args.span_nm if args.span_nm is not None else cfg.drive.wavelength_nm) * 1e-9
    displacements = np.linspace(-0.5 * span, 0.5 * span, args.points)
    series = fringe_scan(c1, c2, cfg.geometry.build(), cfg.wavelength(), displacements)
    series.y = apply_noise(series.y, cfg.noise, cfg.rng())
    if not args.out:
        raise ParseError("fringe requires --out")
    write_series(series, args.out)
    return 0


def _cmd_simulate(args) -> int:
    cfg = _load(args)
    c1, c2 = cfg.coefficients()
    sim = cfg.simulate
    drive = DriveField(power=cfg.drive.power_w, wavelength=cfg.wavelength())
    tr1 = MembraneTrajectory(
        amplitude=sim.amp1_nm * 1e-9,
        omega=2.0 * math.pi * sim.freq1_khz * 1e3,
        phase=sim.phase1_rad,
    )
    tr2 = MembraneTrajectory(
        amplitude=sim.amp2_nm * 1e-9,
        omega=2.0 * math.pi * sim.freq2_khz * 1e3,
        phase=sim.phase2_rad,
    )
    geom = cfg.geometry.build()
    record = simulate(
        c1, c2, geom, drive, tr1, tr2,
        duration=sim.duration_roundtrips * geom.tau, subdivisions=sim.subdivisions,
    )
    if not args.out:
        raise ParseError("simulate requires --out")
    write_record(record, args.out)
    return 0


def _cmd_response(args) -> int:
    cfg = _load(args)
    params = _response_params(cfg)
    consts = bad_cavity_constants(params)
    per_membrane = []
    for membrane in (1, 2):
        cav = cavity_sideband_amplitudes(params, membrane)
        refl = reflection_sideband_amplitudes(params, membrane)
        trans = transmitted_sideband_amplitudes(params, membrane)
        per_membrane.append(
            {
                "cavity": {"upper": cav[0], "lower": cav[1]},
                "reflected": {"upper": refl[0], "lower": refl[1]},
                "transmitted": {"upper": trans[0], "lower": trans[1]},
            }
        )
    payload = {
        "round_trip": params.round_trip(),
        "adiabatic": {
            "carrier": consts.carrier,
            "sideband_1": consts.sideband_1,
            "sideband_2": consts.sideband_2,
            "within_bad_cavity": consts.within_bad_cavity,
        },
        "membranes": per_membrane,
    }
    _emit_json(payload, args.out)
    return 0


def _cmd_spectrum(args) -> int:
    cfg = _load(args)
    params = _response_params(cfg)
    chain = cfg.detection.build(cfg.drive.power_w)
    series = voltage_noise_spectrum(
        chain, params, cfg.mode_1.build(), cfg.mode_2.build(),
        cfg.sweep.omega(), cfg.sweep.correlation,
    )
    series.y = apply_noise(series.y, cfg.noise, cfg.rng())
    if not args.out:
        raise ParseError("spectrum requires --out")
    write_series(series, args.out)
    return 0


def _sweep_row(task) -> list:
    """One sweep row, rebuilt from the resolved config (worker side)."""
    cfg_data, dl = task
    cfg = config_from_dict(cfg_data)
    c1, c2 = cfg.coefficients()
    chain = cfg.detection.build(cfg.drive.power_w)
    row_map = sweep_map(
        chain, c1, c2, cfg.geometry.build(), cfg.wavelength(),
        cfg.mode_1.build(), cfg.mode_2.build(),
        [dl], cfg.sweep.omega(), cfg.sweep.correlation,
        cfg.sweep.piezo_beta_per_v, cfg.sweep.piezo_membrane,
    )
    return row_map.psd[0].tolist()


def _cmd_sweep_map(args) -> int:
    cfg = _load(args)
    offsets = cfg.sweep.offsets()
    omega = cfg.sweep.omega()
    if args.workers <= 1:
        c1, c2 = cfg.coefficients()
        chain = cfg.detection.build(cfg.drive.power_w)
        smap = sweep_map(
            chain, c1, c2, cfg.geometry.build(), cfg.wavelength(),
            cfg.mode_1.build(), cfg.mode_2.build(),
            offsets, omega, cfg.sweep.correlation,
            cfg.sweep.piezo_beta_per_v, cfg.sweep.piezo_membrane,
        )
    else:
        # each row is rebuilt from the same config, so the merged map is
        # bit-identical to the serial one regardless of worker count
        cfg_data = cfg.resolved()
        cfg_data.pop("provenance")
        tasks = [(cfg_data, float(dl)) for dl in offsets]
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_row, tasks))
        smap = SweepMap(
            dl_grid=offsets,
            freq_grid=omega / (2.0 * math.pi),
            psd=np.array(rows),
            meta={
                "wavelength_m": cfg.wavelength(),
                "correlation": cfg.sweep.correlation,
                "piezo_beta": cfg.sweep.piezo_beta_per_v,
                "piezo_membrane": cfg.sweep.piezo_membrane,
            },
        )
    if not args.out:
        raise ParseError("sweep-map requires --out")
    if str(args.out).endswith(".json"):
        write_map_json(smap, args.out)
    else:
        write_map_csv(smap, args.out)
    return 0


def _fit_exit(result: FitResult, out) -> int:
    payload = {
        "params": result.params,
        "sigmas": result.sigmas,
        "residual_norm": result.residual_norm,
        "converged": result.converged,
        "iterations": result.iterations,
        "extra": result.extra,
    }
    _emit_json(payload, out)
    if not result.converged:
        print("fit did not converge within the iteration cap", file=sys.stderr)
        return 2
    return 0


def _cmd_fit_airy_lambda(args) -> int:
    cfg = _load(args)
    series = read_series(args.data)
    if cfg.membrane_1.thickness_nm is None:
        raise ParseError("fit-airy-lambda needs membrane_1.thickness_nm in the config")
    from .slab import INDEX_MODELS

    gap_guess = (args.gap_guess_um if args.gap_guess_um is not None
                 else cfg.geometry.resonant_length_um) * 1e-6
    result = fit_airy_wavelength(
        series,
        gap_guess=gap_guess,
        thickness=cfg.membrane_1.thickness_nm * 1e-9,
        index_model=INDEX_MODELS[cfg.membrane_1.index_model],
    )
    return _fit_exit(result, args.out)


def _cmd_fit_airy_scan(args) -> int:
    cfg = _load(args)
    series = read_series(args.data)
    result = fit_airy_timescan(
        series.x_si(), series.y_si(), cfg.wavelength(), args.gain_nm_v * 1e-9
    )
    return _fit_exit(result, args.out)


def _cmd_fit_thickness(args) -> int:
    cfg = _load(args)
    series = read_series(args.data)
    guess = (args.guess_nm if args.guess_nm is not None
             else (cfg.membrane_1.thickness_nm or 75.0)) * 1e-9
    from .slab import INDEX_MODELS

    result = fit_thickness(
        list(zip(series.x_si(), series.y_si())),
        thickness_guess=guess,
        index_model=INDEX_MODELS[cfg.membrane_1.index_model],
    )
    return _fit_exit(result, args.out)


def _cmd_fit_lorentzian(args) -> int:
    _load(args)
    series = read_series(args.data)
    result = fit_lorentzian(series, n_peaks=args.peaks)
    return _fit_exit(result, args.out)


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return run_selftest()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output file (default: stdout for JSON commands)")
    common.add_argument("--seed", type=int, default=None, help="override config seed")
    common.add_argument("--convention", default=None,
                        help="override the mechanics frequency convention")
    common.add_argument("--resolved-config", default=None,
                        help="also write the fully resolved config here")

    parser = argparse.ArgumentParser(
        prog="membrane-etalon",
        description="Two-membrane etalon optics, dynamics and spectra.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("slab", parents=[common],
                   help="slab coefficients and cavity figures").set_defaults(fn=_cmd_slab)

    p = sub.add_parser("fringe", parents=[common],
                       help="transmission fringe vs membrane displacement")
    p.add_argument("--span-nm", type=float, default=None,
                   help="scan span (default: one wavelength)")
    p.add_argument("--points", type=int, default=401)
    p.set_defaults(fn=_cmd_fringe)

    sub.add_parser("simulate", parents=[common],
                   help="integrate the field recursion, write a record CSV"
                   ).set_defaults(fn=_cmd_simulate)

    sub.add_parser("response", parents=[common],
                   help="carrier and sideband response constants"
                   ).set_defaults(fn=_cmd_response)

    sub.add_parser("spectrum", parents=[common],
                   help="homodyne voltage noise spectrum CSV").set_defaults(fn=_cmd_spectrum)

    p = sub.add_parser("sweep-map", parents=[common],
                       help="noise spectra across a cavity-length sweep")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel row workers (output is identical for any count)")
    p.set_defaults(fn=_cmd_sweep_map)

    p = sub.add_parser("fit-airy-lambda", parents=[common],
                       help="fit the cavity gap to a white-light spectrum CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--gap-guess-um", type=float, default=None)
    p.set_defaults(fn=_cmd_fit_airy_lambda)

    p = sub.add_parser("fit-airy-scan", parents=[common],
                       help="fit contrast and actuator law to a scanned fringe CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--gain-nm-v", type=float, default=1.0)
    p.set_defaults(fn=_cmd_fit_airy_scan)

    p = sub.add_parser("fit-thickness", parents=[common],
                       help="fit film thickness to reflectivity points CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--guess-nm", type=float, default=None)
    p.set_defaults(fn=_cmd_fit_thickness)

    p = sub.add_parser("fit-lorentzian", parents=[common],
                       help="fit Lorentzian peaks plus floor to a spectrum CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--peaks", type=int, default=None)
    p.set_defaults(fn=_cmd_fit_lorentzian)

    sub.add_parser("selftest", parents=[common],
                   help="run the built-in sanity checks").set_defaults(fn=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
