"""Optics, dynamics and readout of a two-membrane etalon.

The package models a pair of thin dielectric slabs facing each other
across a micrometer gap: their single-slab optics, the steady and
time-dependent intracavity field, the motional sidebands the membranes
imprint on it, and the homodyne spectra a scanned readout produces.
Fitters recover device parameters (gap, thickness, contrast, mechanical
linewidths) from measured curves, and a CLI exposes the lot with
deterministic file outputs.
"""
from ._version import __version__
from .constants import SPEED_OF_LIGHT
from .errors import (
    ConvergenceError,
    DivergenceError,
    DomainError,
    ModelValidityWarning,
    ParseError,
)
from .series import SpectrumSeries, SweepMap, unit_scale
from .slab import (
    DEFAULT_INDEX_MODEL,
    INDEX_MODELS,
    SI3N4_CONSTANT,
    SI3N4_DEVICE,
    ConstantIndex,
    IndexModel,
    SellmeierSi3N4,
    SlabCoefficients,
    SlabParams,
    TabulatedIndex,
    reflectivity_curve,
    sellmeier_si3n4,
    slab_coefficients,
)
from .etalon import (
    EtalonGeometry,
    finesse_fwhm,
    fringe_scan,
    nearest_resonant_length,
    peak_transmission,
    round_trip_factor,
    steady_transmission,
)
from .response import (
    BadCavityConstants,
    HighFinesseParams,
    ResponseParams,
    bad_cavity_constants,
    bessel_j0,
    bessel_j1,
    cavity_dc_response,
    cavity_sideband_amplitudes,
    cavity_sideband_response,
    high_finesse_denominator,
    loop_denominator,
    reflection_dc_response,
    reflection_sideband_amplitudes,
    reflection_sideband_response,
    transmitted_sideband_amplitudes,
)
from .kernels import BACKEND, delay_recursion
from .dynamics import (
    DriveField,
    FieldRecord,
    MembraneTrajectory,
    extract_sidebands,
    neumann_field,
    series_tail_bound,
    simulate,
)
from .mechanics import (
    CONVENTIONS,
    DEFAULT_CONVENTION,
    MechMode,
    MembranePlate,
    SideLengthFit,
    displacement_spectra,
    effective_mass,
    infer_side_lengths,
    mode_frequency,
    piezo_shifted_frequency,
    susceptibility,
)
from .homodyne import (
    DetectionChain,
    HomodyneSignal,
    photocurrent,
    sweep_map,
    voltage_noise_spectrum,
)
from .fitting import (
    FitResult,
    fit_airy_timescan,
    fit_airy_wavelength,
    fit_lorentzian,
    fit_thickness,
)
from .io import (
    read_map_csv,
    read_map_json,
    read_record_arrays,
    read_series,
    write_map_csv,
    write_map_json,
    write_record,
    write_series,
)
from .config import RunConfig, apply_noise, config_from_dict, load_config, resolved_json

__all__ = [
    "__version__",
    "SPEED_OF_LIGHT",
    "ConvergenceError",
    "DivergenceError",
    "DomainError",
    "ModelValidityWarning",
    "ParseError",
    "SpectrumSeries",
    "SweepMap",
    "unit_scale",
    "DEFAULT_INDEX_MODEL",
    "INDEX_MODELS",
    "SI3N4_CONSTANT",
    "SI3N4_DEVICE",
    "ConstantIndex",
    "IndexModel",
    "SellmeierSi3N4",
    "SlabCoefficients",
    "SlabParams",
    "TabulatedIndex",
    "reflectivity_curve",
    "sellmeier_si3n4",
    "slab_coefficients",
    "EtalonGeometry",
    "finesse_fwhm",
    "fringe_scan",
    "nearest_resonant_length",
    "peak_transmission",
    "round_trip_factor",
    "steady_transmission",
    "BadCavityConstants",
    "HighFinesseParams",
    "ResponseParams",
    "bad_cavity_constants",
    "bessel_j0",
    "bessel_j1",
    "cavity_dc_response",
    "cavity_sideband_amplitudes",
    "cavity_sideband_response",
    "high_finesse_denominator",
    "loop_denominator",
    "reflection_dc_response",
    "reflection_sideband_amplitudes",
    "reflection_sideband_response",
    "transmitted_sideband_amplitudes",
    "BACKEND",
    "delay_recursion",
    "DriveField",
    "FieldRecord",
    "MembraneTrajectory",
    "extract_sidebands",
    "neumann_field",
    "series_tail_bound",
    "simulate",
    "CONVENTIONS",
    "DEFAULT_CONVENTION",
    "MechMode",
    "MembranePlate",
    "SideLengthFit",
    "displacement_spectra",
    "effective_mass",
    "infer_side_lengths",
    "mode_frequency",
    "piezo_shifted_frequency",
    "susceptibility",
    "DetectionChain",
    "HomodyneSignal",
    "photocurrent",
    "sweep_map",
    "voltage_noise_spectrum",
    "FitResult",
    "fit_airy_timescan",
    "fit_airy_wavelength",
    "fit_lorentzian",
    "fit_thickness",
    "read_map_csv",
    "read_map_json",
    "read_record_arrays",
    "read_series",
    "write_map_csv",
    "write_map_json",
    "write_record",
    "write_series",
    "RunConfig",
    "apply_noise",
    "config_from_dict",
    "load_config",
    "resolved_json",
]
