"""Run configuration: flat ``key = value`` files with ``[section]`` headers.

Unknown sections or keys, malformed numbers and out-of-range values are
rejected with the offending key and line named. Omitted keys take the
documented defaults. ``serialize_config`` emits a canonical file that
parses back to an equal configuration.
"""

import dataclasses
import math

from dataclasses import dataclass

from .elements import ApertureSpec, GratingSpec, PhaseModel
from .interferometer import BeamlineConfig
from .kinematics import BeamEnergy
from .sensing import CradleSpec, FieldRegion

__all__ = [
    "ConfigError",
    "RunConfig",
    "parse_config",
    "serialize_config",
    "default_config",
    "build_beamline",
    "build_cradle",
    "build_field_region",
]


class ConfigError(ValueError):
    """Invalid configuration text."""


@dataclass(frozen=True)
class BeamlineSettings:
    energy_ev: float = 1e4
    source_slit_width: float = 5e-6
    source_slit_center: float = 0.0
    second_slit_width: float = 30e-6
    second_slit_center: float = 0.0
    slit_separation: float = 0.24
    slit2_to_g1: float = 0.05
    grating_gap: float = 3.06e-3
    grating_period: float = 1e-7
    open_fraction: float = 0.35
    grating_extent: float = math.inf
    g1_offset: float = 0.0
    g2_offset: float = 0.0
    g3_offset: float = 0.0
    image_charge_strength: float = 0.0
    image_charge_range: float = 2e-8
    random_phase_max: float = 0.0
    n_sources: int = 32
    propagator: str = "paraxial"
    grid_points: int = 0
    window_factor: float = 1.5


@dataclass(frozen=True)
class CradleSettings:
    edge_length: float = 0.054
    current: float = 0.071
    efficiency: float = 1.0


@dataclass(frozen=True)
class FieldSettings:
    region_length: float = 6.12e-3


@dataclass(frozen=True)
class SensingSettings:
    fringe_contrast: float = 0.06
    count_rate: float = 2.5e5
    step_field: float = 4.3e-8
    bias_offset: float = 2.5e-8
    seconds: int = 40
    block_seconds: int = 10


@dataclass(frozen=True)
class SweepSettings:
    energy_min_ev: float = 4500.0
    energy_max_ev: float = 10000.0
    energy_points: int = 23
    current_min: float = -0.15
    current_max: float = 0.15
    current_points: int = 61
    n_offsets: int = 16


@dataclass(frozen=True)
class ScaleSettings:
    base_sensitivity: float = 9.5e-9
    length_ratio: float = 10.0 / 3.0
    concentrator_gain: float = 20.0
    area_ratio: float = 1e4


@dataclass(frozen=True)
class RunSettings:
    seed: int = 12345


@dataclass(frozen=True)
class RunConfig:
    beamline: BeamlineSettings = BeamlineSettings()
    cradle: CradleSettings = CradleSettings()
    field: FieldSettings = FieldSettings()
    sensing: SensingSettings = SensingSettings()
    sweep: SweepSettings = SweepSettings()
    scale: ScaleSettings = ScaleSettings()
    run: RunSettings = RunSettings()


_SECTIONS = {
    "beamline": BeamlineSettings,
    "cradle": CradleSettings,
    "field": FieldSettings,
    "sensing": SensingSettings,
    "sweep": SweepSettings,
    "scale": ScaleSettings,
    "run": RunSettings,
}

# (section, key) -> (predicate, requirement description)
_CHECKS = {
    ("beamline", "energy_ev"): (lambda v: v > 0, "must be positive"),
    ("beamline", "source_slit_width"): (lambda v: v > 0, "must be positive"),
    ("beamline", "second_slit_width"): (lambda v: v > 0, "must be positive"),
    ("beamline", "slit_separation"): (lambda v: v > 0, "must be positive"),
    ("beamline", "slit2_to_g1"): (lambda v: v > 0, "must be positive"),
    ("beamline", "grating_gap"): (lambda v: v > 0, "must be positive"),
    ("beamline", "grating_period"): (lambda v: v > 0, "must be positive"),
    ("beamline", "open_fraction"): (lambda v: 0 < v < 1, "must lie strictly between 0 and 1"),
    ("beamline", "grating_extent"): (lambda v: v > 0, "must be positive"),
    ("beamline", "image_charge_strength"): (lambda v: v >= 0, "must be nonnegative"),
    ("beamline", "image_charge_range"): (lambda v: v > 0, "must be positive"),
    ("beamline", "random_phase_max"): (lambda v: v >= 0, "must be nonnegative"),
    ("beamline", "n_sources"): (lambda v: v >= 1, "must be at least 1"),
    ("beamline", "propagator"): (lambda v: v in ("direct", "paraxial"), "must be 'direct' or 'paraxial'"),
    ("beamline", "grid_points"): (lambda v: v == 0 or v >= 16, "must be 0 (automatic) or at least 16"),
    ("beamline", "window_factor"): (lambda v: v >= 1, "must be at least 1"),
    ("cradle", "edge_length"): (lambda v: v > 0, "must be positive"),
    ("cradle", "efficiency"): (lambda v: v > 0, "must be positive"),
    ("field", "region_length"): (lambda v: v > 0, "must be positive"),
    ("sensing", "fringe_contrast"): (lambda v: 0 <= v < 1, "must lie in [0, 1)"),
    ("sensing", "count_rate"): (lambda v: v > 0, "must be positive"),
    ("sensing", "seconds"): (lambda v: v >= 1, "must be at least 1"),
    ("sensing", "block_seconds"): (lambda v: v >= 1, "must be at least 1"),
    ("sweep", "energy_min_ev"): (lambda v: v > 0, "must be positive"),
    ("sweep", "energy_max_ev"): (lambda v: v > 0, "must be positive"),
    ("sweep", "energy_points"): (lambda v: v >= 1, "must be at least 1"),
    ("sweep", "current_points"): (lambda v: v >= 2, "must be at least 2"),
    ("sweep", "n_offsets"): (lambda v: v >= 8, "must be at least 8"),
    ("scale", "base_sensitivity"): (lambda v: v > 0, "must be positive"),
    ("scale", "length_ratio"): (lambda v: v > 0, "must be positive"),
    ("scale", "concentrator_gain"): (lambda v: v > 0, "must be positive"),
    ("scale", "area_ratio"): (lambda v: v > 0, "must be positive"),
    ("run", "seed"): (lambda v: v >= 0, "must be nonnegative"),
}


def _field_types(cls):
    return {
        f.name: f.type if isinstance(f.type, str) else f.type.__name__
        for f in dataclasses.fields(cls)
    }


def _convert(raw, type_name, key, lineno):
    if type_name == "float":
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"line {lineno}: key '{key}': malformed number {raw!r}") from None
        if math.isnan(value):
            raise ConfigError(f"line {lineno}: key '{key}': NaN is not a valid value")
        return value
    if type_name == "int":
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"line {lineno}: key '{key}': malformed integer {raw!r}") from None
    return raw


def parse_config(text: str) -> RunConfig:
    """Parse configuration text, applying defaults for omitted keys."""
    values = {name: {} for name in _SECTIONS}
    lines = {name: {} for name in _SECTIONS}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed section header {raw.strip()!r}")
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise ConfigError(f"line {lineno}: unknown section '[{name}]'")
            section = name
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if section is None:
            raise ConfigError(f"line {lineno}: key '{key}' appears before any [section] header")
        types = _field_types(_SECTIONS[section])
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key '{key}' in section [{section}]")
        value = _convert(raw_value, types[key], key, lineno)
        check = _CHECKS.get((section, key))
        if check is not None and not check[0](value):
            raise ConfigError(f"line {lineno}: key '{key}' {check[1]} (got {raw_value})")
        values[section][key] = value
        lines[section][key] = lineno
    _cross_checks(values, lines)
    parts = {name: cls(**values[name]) for name, cls in _SECTIONS.items()}
    return RunConfig(**parts)


def _cross_checks(values, lines):
    sweep = values["sweep"]
    emin = sweep.get("energy_min_ev", SweepSettings.energy_min_ev)
    emax = sweep.get("energy_max_ev", SweepSettings.energy_max_ev)
    if emin > emax:
        lineno = lines["sweep"].get("energy_max_ev") or lines["sweep"].get("energy_min_ev")
        where = f"line {lineno}: " if lineno else ""
        raise ConfigError(f"{where}key 'energy_max_ev' must be >= energy_min_ev")
    cmin = sweep.get("current_min", SweepSettings.current_min)
    cmax = sweep.get("current_max", SweepSettings.current_max)
    if cmin >= cmax:
        lineno = lines["sweep"].get("current_max") or lines["sweep"].get("current_min")
        where = f"line {lineno}: " if lineno else ""
        raise ConfigError(f"{where}key 'current_max' must be greater than current_min")


def _format_value(value) -> str:
    if isinstance(value, bool):
        raise TypeError("booleans are not part of the configuration schema")
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; round-trips exactly through parse_config."""
    chunks = []
    for name in _SECTIONS:
        chunks.append(f"[{name}]")
        part = getattr(cfg, name)
        for f in dataclasses.fields(part):
            chunks.append(f"{f.name} = {_format_value(getattr(part, f.name))}")
        chunks.append("")
    return "\n".join(chunks)


def default_config() -> RunConfig:
    return RunConfig()


def build_beamline(cfg: RunConfig) -> BeamlineConfig:
    """Assemble the simulation beamline from a run configuration."""
    b = cfg.beamline
    base = GratingSpec(
        period=b.grating_period,
        open_fraction=b.open_fraction,
        extent=b.grating_extent,
    )
    gratings = tuple(
        dataclasses.replace(base, offset=off) for off in (b.g1_offset, b.g2_offset, b.g3_offset)
    )
    phase = PhaseModel(
        image_charge_strength=b.image_charge_strength,
        image_charge_range=b.image_charge_range,
        random_phase_max=b.random_phase_max,
        rng_seed=cfg.run.seed,
    )
    return BeamlineConfig(
        source_slit=ApertureSpec(width=b.source_slit_width, center=b.source_slit_center),
        second_slit=ApertureSpec(width=b.second_slit_width, center=b.second_slit_center),
        slit_separation=b.slit_separation,
        slit2_to_g1=b.slit2_to_g1,
        grating_gap=b.grating_gap,
        gratings=gratings,
        phase_model=phase,
        energy=BeamEnergy(b.energy_ev),
        n_sources=b.n_sources,
        propagator=b.propagator,
        grid_points=b.grid_points if b.grid_points else None,
        window_factor=b.window_factor,
    )


def build_cradle(cfg: RunConfig) -> CradleSpec:
    c = cfg.cradle
    return CradleSpec(edge_length=c.edge_length, current=c.current, efficiency=c.efficiency)


def build_field_region(cfg: RunConfig, field: float = 0.0) -> FieldRegion:
    return FieldRegion(field=field, length=cfg.field.region_length)
