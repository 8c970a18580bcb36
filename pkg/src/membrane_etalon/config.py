"""Run configuration: strict JSON in, fully resolved JSON out.

A config file is a nested JSON object mirroring the dataclass tree
below. Parsing is strict: an unknown key anywhere raises ParseError
naming the full dotted path, so typos never silently fall back to a
default. Field names carry unit suffixes (``_nm``, ``_khz``, ...) with
the same meaning as CSV column suffixes.

The resolved form (every default filled in, plus a provenance block
naming the RNG stream and seed) is what a run writes next to its
outputs; re-running from the resolved file reproduces the run exactly.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._version import __version__
from .errors import ParseError
from .etalon import EtalonGeometry
from .homodyne import DetectionChain
from .mechanics import CONVENTIONS, DEFAULT_CONVENTION, MechMode
from .slab import INDEX_MODELS, SlabCoefficients, SlabParams, slab_coefficients

SCHEMA_VERSION = 1

# the one RNG family used anywhere in the package
RNG_KIND = "numpy-pcg64"

NOISE_KINDS = ("none", "gaussian-amplitude")


@dataclass
class SlabConfig:
    """One membrane, given either physically or by its response.

    ``thickness_nm`` plus an index model derives the coefficients from
    first principles; setting ``reflectivity_norm`` (with an optional
    transmission phase) overrides that and uses the lossless
    parametrization directly.
    """

    thickness_nm: float | None = 75.2
    index_model: str = "si3n4-device-calibrated"
    reflectivity_norm: float | None = None
    phase_rad: float | None = None

    def coefficients(self, wavelength: float) -> SlabCoefficients:
        if self.thickness_nm is None and self.reflectivity_norm is None:
            raise ParseError(
                "membrane needs thickness_nm or reflectivity_norm"
            )
        if self.reflectivity_norm is None:
            if self.index_model not in INDEX_MODELS:
                raise ParseError(
                    f"unknown index_model {self.index_model!r}; "
                    f"known: {', '.join(sorted(INDEX_MODELS))}"
                )
            model = INDEX_MODELS[self.index_model]
            params = SlabParams(n=model(wavelength), thickness=self.thickness_nm * 1e-9)
            return slab_coefficients(params, wavelength)
        phase = math.pi / 2 if self.phase_rad is None else self.phase_rad
        return SlabCoefficients.from_reflectivity(self.reflectivity_norm, phase=phase)


@dataclass
class DriveConfig:
    wavelength_nm: float = 1064.0
    power_w: float = 1e-3


@dataclass
class GeometryConfig:
    resonant_length_um: float = 5.707
    mismatch_nm: float = 0.0
    x1_nm: float = 0.0

    def build(self) -> EtalonGeometry:
        return EtalonGeometry(
            resonant_length=self.resonant_length_um * 1e-6,
            mismatch=self.mismatch_nm * 1e-9,
            x1=self.x1_nm * 1e-9,
        )


@dataclass
class ModeConfig:
    """One mechanical mode as the spectral model sees it."""

    freq_khz: float = 401.6
    linewidth_hz: float = 1.0
    mass_eff_kg: float = 5.6e-11
    overlap_norm: float = 1.0
    force_n: float = 1e-15

    def build(self) -> MechMode:
        return MechMode(
            omega_m=2.0 * math.pi * self.freq_khz * 1e3,
            gamma_m=2.0 * math.pi * self.linewidth_hz,
            mass_eff=self.mass_eff_kg,
            overlap=self.overlap_norm,
            force_amplitude=self.force_n,
        )


@dataclass
class DetectionConfig:
    power_lo_w: float = 1e-3
    lo_phase_rad: float = math.pi / 2
    responsivity_a_w: float = 1.0
    transimpedance_v_a: float = 1.0
    noise_floor_v2_hz: float = 0.0
    level_norm: float = 1.0

    def build(self, power_in: float) -> DetectionChain:
        return DetectionChain(
            power_in=power_in,
            power_lo=self.power_lo_w,
            lo_phase=self.lo_phase_rad,
            responsivity=self.responsivity_a_w,
            transimpedance=self.transimpedance_v_a,
            noise_floor=self.noise_floor_v2_hz,
            level=self.level_norm,
        )


@dataclass
class SweepConfig:
    dl_min_halflambda: float = -1.0
    dl_max_halflambda: float = 1.0
    dl_points: int = 81
    freq_min_khz: float = 350.0
    freq_max_khz: float = 900.0
    freq_points: int = 512
    correlation: str = "common"
    piezo_beta_per_v: float = 0.0
    piezo_volts: float = 0.0
    piezo_membrane: int = 2

    def offsets(self) -> np.ndarray:
        return np.linspace(self.dl_min_halflambda, self.dl_max_halflambda, self.dl_points)

    def omega(self) -> np.ndarray:
        freqs = np.linspace(self.freq_min_khz, self.freq_max_khz, self.freq_points)
        return 2.0 * math.pi * 1e3 * freqs


@dataclass
class SimulateConfig:
    # duration counts cavity round trips: the natural clock of the
    # recursion, and the only scale-free choice (a micrometer gap makes
    # tau femtoseconds, so wall-clock durations would be astronomical)
    duration_roundtrips: float = 4000.0
    subdivisions: int = 64
    amp1_nm: float = 0.0
    amp2_nm: float = 0.0
    freq1_khz: float = 401.6
    freq2_khz: float = 803.2
    phase1_rad: float = 0.0
    phase2_rad: float = 0.0


@dataclass
class NoiseConfig:
    kind: str = "none"
    level_norm: float = 0.0


@dataclass
class RunConfig:
    schema_version: int = SCHEMA_VERSION
    seed: int = 0
    convention: str = DEFAULT_CONVENTION
    drive: DriveConfig = field(default_factory=DriveConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    membrane_1: SlabConfig = field(default_factory=SlabConfig)
    membrane_2: SlabConfig = field(default_factory=SlabConfig)
    mode_1: ModeConfig = field(default_factory=ModeConfig)
    mode_2: ModeConfig = field(default_factory=lambda: ModeConfig(freq_khz=803.2))
    detection: DetectionConfig = field(default_factory=DetectionConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    simulate: SimulateConfig = field(default_factory=SimulateConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ParseError(
                f"schema_version {self.schema_version} unsupported (expected {SCHEMA_VERSION})"
            )
        if not (0 <= self.seed < 2**64):
            raise ParseError(f"seed must fit an unsigned 64-bit integer, got {self.seed}")
        if self.convention not in CONVENTIONS:
            raise ParseError(
                f"convention must be one of {', '.join(CONVENTIONS)}, got {self.convention!r}"
            )
        if self.noise.kind not in NOISE_KINDS:
            raise ParseError(
                f"noise.kind must be one of {', '.join(NOISE_KINDS)}, got {self.noise.kind!r}"
            )

    # -- materialized library objects ------------------------------------

    def wavelength(self) -> float:
        return self.drive.wavelength_nm * 1e-9

    def coefficients(self) -> tuple[SlabCoefficients, SlabCoefficients]:
        lam = self.wavelength()
        return self.membrane_1.coefficients(lam), self.membrane_2.coefficients(lam)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def resolved(self) -> dict:
        """Full config with every default filled in, plus provenance."""
        out = dataclasses.asdict(self)
        out["provenance"] = {
            "package": "membrane-etalon",
            "version": __version__,
            "rng": RNG_KIND,
            "seed": self.seed,
            "convention": self.convention,
        }
        return out


_FIELD_TYPES = {
    RunConfig: {f.name: f for f in dataclasses.fields(RunConfig)},
}

_NESTED = {
    "drive": DriveConfig,
    "geometry": GeometryConfig,
    "membrane_1": SlabConfig,
    "membrane_2": SlabConfig,
    "mode_1": ModeConfig,
    "mode_2": ModeConfig,
    "detection": DetectionConfig,
    "sweep": SweepConfig,
    "simulate": SimulateConfig,
    "noise": NoiseConfig,
}

_INT_FIELDS = {"schema_version", "seed", "dl_points", "freq_points", "subdivisions",
               "piezo_membrane"}
_STR_FIELDS = {"convention", "index_model", "kind", "correlation"}


def _coerce(name: str, value, path: str):
    if name in _STR_FIELDS:
        if not isinstance(value, str):
            raise ParseError(f"{path}: expected a string, got {value!r}")
        return value
    if name in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"{path}: expected an integer, got {value!r}")
        return value
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{path}: expected a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise ParseError(f"{path}: value must be finite, got {value!r}")
    return float(value)


def _build(cls, data: dict, path: str):
    if not isinstance(data, dict):
        raise ParseError(f"{path or 'config'}: expected an object, got {data!r}")
    known = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        here = f"{path}.{key}" if path else key
        if key not in known:
            raise ParseError(f"unknown key {here!r}")
        if cls is RunConfig and key in _NESTED:
            kwargs[key] = _build(_NESTED[key], value, here)
        else:
            kwargs[key] = _coerce(key, value, here)
    return cls(**kwargs)


def config_from_dict(data: dict) -> RunConfig:
    return _build(RunConfig, data, "")


def load_config(path) -> RunConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
    return config_from_dict(data)


def resolved_json(cfg: RunConfig) -> str:
    return json.dumps(cfg.resolved(), sort_keys=True, indent=2) + "\n"


def apply_noise(values: np.ndarray, noise: NoiseConfig, rng: np.random.Generator) -> np.ndarray:
    """Corrupt a clean model curve the way the configured noise says to.

    gaussian-amplitude multiplies each sample by (1 + level * g) with g
    standard normal; "none" returns the input unchanged.
    """
    if noise.kind not in NOISE_KINDS:
        raise ParseError(f"noise.kind {noise.kind!r} not recognized")
    values = np.asarray(values, dtype=float)
    if noise.kind == "none" or noise.level_norm == 0.0:
        return values.copy()
    return values * (1.0 + noise.level_norm * rng.standard_normal(values.shape))
