"""Magnetometry layer: field generation, deflection, phase, sensitivity.

Closed-form pieces around the fringe curve: the cube-edge coil ("cradle")
field per current, the impulse-approximation beam deflection per field,
the enclosed-flux quantum phase, fringe-curve readout at a deflection,
Poisson-limited sensitivity, a seeded on/off step-response simulator, and
the geometric scaling of sensitivity to larger devices.

Two field-per-fringe conventions coexist: the classical deflection formula
and the enclosed-flux phase disagree by roughly a factor of two at these
parameters. Fringe readout uses the classical deflection; the phase
formula is provided alongside for comparison.
"""

from dataclasses import dataclass, replace

import math

import numpy as np

from . import constants as const
from .interferometer import FringeCurve
from .kinematics import ELECTRON, BeamEnergy, ParticleSpec

__all__ = [
    "CradleSpec",
    "FieldRegion",
    "SensorReport",
    "cradle_field",
    "deflection_per_field",
    "classical_deflection",
    "field_for_deflection",
    "ab_phase",
    "predict_throughput",
    "fringe_slope",
    "sensor_report",
    "shot_noise_sensitivity",
    "sinusoid_fringe",
    "simulate_step_response",
    "step_snr",
    "scaled_sensitivity",
]


@dataclass(frozen=True)
class CradleSpec:
    """Cube-edge wire arrangement: edge length [m], current [A].

    ``efficiency`` rescales the nominal center field to absorb geometric
    imperfections (off-center placement, non-cubic winding). Values above 1
    are allowed: the effective deflection field can exceed the nominal
    center value when the field region extends past the gratings.
    """

    edge_length: float = 0.054
    current: float = 0.0
    efficiency: float = 1.0

    def __post_init__(self):
        if not self.edge_length > 0.0:
            raise ValueError("cradle edge length must be positive")
        if not self.efficiency > 0.0:
            raise ValueError("cradle efficiency must be positive")


@dataclass(frozen=True)
class FieldRegion:
    """Uniform field B [T] over a length L [m] along the beam."""

    field: float = 0.0
    length: float = 6.12e-3

    def __post_init__(self):
        if not self.length > 0.0:
            raise ValueError("field region length must be positive")


@dataclass(frozen=True)
class SensorReport:
    """Operating-point readout: slope [counts/s/T], rate [counts/s], sensitivity [T/sqrt(Hz)]."""

    slope: float
    count_rate: float
    sensitivity: float


def cradle_field(cradle: CradleSpec) -> float:
    """Center field of the cube-edge coil: (4/sqrt(3)) mu0 I / (pi w) [T]."""
    nominal = (4.0 / math.sqrt(3.0)) * const.MU_0 * cradle.current / (math.pi * cradle.edge_length)
    return cradle.efficiency * nominal


def deflection_per_field(region_length: float, energy: BeamEnergy, particle: ParticleSpec = ELECTRON) -> float:
    """Impulse-approximation lateral displacement per tesla [m/T].

    q L^2 / (2 sqrt(2 m E)), nonrelativistic momentum.
    """
    if not region_length > 0.0:
        raise ValueError("field region length must be positive")
    if particle.charge == 0.0:
        raise ValueError("deflection requires a charged particle")
    momentum = math.sqrt(2.0 * particle.mass * energy.joules)
    return particle.charge * region_length**2 / (2.0 * momentum)


def classical_deflection(region: FieldRegion, energy: BeamEnergy, particle: ParticleSpec = ELECTRON) -> float:
    """Lateral displacement s = q B L^2 / (2 sqrt(2 m E)) [m]."""
    return region.field * deflection_per_field(region.length, energy, particle)


def field_for_deflection(
    displacement: float,
    region_length: float,
    energy: BeamEnergy,
    particle: ParticleSpec = ELECTRON,
) -> float:
    """Field [T] that produces a given lateral displacement."""
    return displacement / deflection_per_field(region_length, energy, particle)


def ab_phase(field: float, region_length: float, wavelength: float, period: float, particle: ParticleSpec = ELECTRON) -> float:
    """Enclosed-flux phase between neighboring diffraction paths [rad].

    (q/hbar) B L^2 sin(theta) with the first-order angle sin(theta) =
    lambda / d.
    """
    for name, val in (("region_length", region_length), ("wavelength", wavelength), ("period", period)):
        if not val > 0.0:
            raise ValueError(f"{name} must be positive")
    return particle.charge / const.HBAR * field * region_length**2 * (wavelength / period)


def _curve_period(curve: FringeCurve, period=None) -> float:
    if period is not None:
        if not period > 0.0:
            raise ValueError("period must be positive")
        return float(period)
    if curve.offsets.size < 2:
        raise ValueError("cannot infer the period of a single-point curve")
    # a scan covers [0, d) in equal steps, so one step past the end closes the period
    step = curve.offsets[1] - curve.offsets[0]
    return float(curve.offsets[-1] - curve.offsets[0] + step)


def _interp_periodic(curve: FringeCurve, x, period: float):
    xs = curve.offsets
    ys = curve.throughput
    u = np.mod(np.asarray(x, dtype=float) - xs[0], period) + xs[0]
    xs_wrap = np.append(xs, xs[0] + period)
    ys_wrap = np.append(ys, ys[0])
    return np.interp(u, xs_wrap, ys_wrap)


def predict_throughput(
    curve: FringeCurve,
    field: float,
    region: FieldRegion,
    energy: BeamEnergy,
    particle: ParticleSpec = ELECTRON,
    period: float | None = None,
) -> float:
    """Fringe-curve readout at the offset a field deflects the beam by.

    Linear interpolation with periodic wrap-around; ``period`` defaults to
    the span the curve's uniform scan covers.
    """
    d = _curve_period(curve, period)
    s = classical_deflection(replace(region, field=field), energy, particle)
    return float(_interp_periodic(curve, s, d))


def fringe_slope(curve: FringeCurve, offset: float, period: float | None = None) -> float:
    """d(throughput)/d(offset) [1/m] by central difference on the interpolant."""
    d = _curve_period(curve, period)
    h = d / 1024.0
    lo, hi = _interp_periodic(curve, [offset - h, offset + h], d)
    return float((hi - lo) / (2.0 * h))


def shot_noise_sensitivity(count_rate: float, slope: float) -> float:
    """Poisson-limited field resolution sqrt(R)/|dS/dB| [T/sqrt(Hz)]."""
    if not count_rate > 0.0:
        raise ValueError("count rate must be positive")
    if slope == 0.0:
        raise ValueError("sensitivity is undefined at zero fringe slope")
    return math.sqrt(count_rate) / abs(slope)


def sensor_report(
    curve: FringeCurve,
    bias_offset: float,
    rate_scale: float,
    region: FieldRegion,
    energy: BeamEnergy,
    particle: ParticleSpec = ELECTRON,
    period: float | None = None,
) -> SensorReport:
    """Count rate, field slope and shot-noise sensitivity at a bias point.

    ``rate_scale`` converts curve throughput to counts per second.
    """
    if not rate_scale > 0.0:
        raise ValueError("rate_scale must be positive")
    d = _curve_period(curve, period)
    rate = rate_scale * float(_interp_periodic(curve, bias_offset, d))
    dx_per_field = deflection_per_field(region.length, energy, particle)
    slope = rate_scale * fringe_slope(curve, bias_offset, d) * dx_per_field
    return SensorReport(
        slope=slope,
        count_rate=rate,
        sensitivity=shot_noise_sensitivity(rate, slope),
    )


def sinusoid_fringe(period: float, contrast: float, mean: float = 1.0, n: int = 256) -> FringeCurve:
    """Analytic cosine fringe over one period, for operating-point studies."""
    if not 0.0 <= contrast < 1.0:
        raise ValueError("contrast must lie in [0, 1)")
    offsets = np.arange(n) * (period / n)
    return FringeCurve(offsets, mean * (1.0 + contrast * np.cos(2.0 * np.pi * offsets / period)))


def simulate_step_response(
    curve: FringeCurve,
    bias_offset: float,
    field_step: float,
    rate_scale: float,
    seconds: int,
    seed: int,
    region: FieldRegion = FieldRegion(),
    energy: BeamEnergy = BeamEnergy(1e4),
    particle: ParticleSpec = ELECTRON,
    period: float | None = None,
    block_seconds: int = 10,
) -> np.ndarray:
    """Per-second Poisson counts while a field step toggles on and off.

    The field is on for ``block_seconds``, off for ``block_seconds``,
    repeating, starting on. The bias offset places the operating point;
    counts are drawn from a generator seeded with ``seed``.
    """
    if seconds < 1 or block_seconds < 1:
        raise ValueError("seconds and block_seconds must be at least 1")
    d = _curve_period(curve, period)
    shift = classical_deflection(replace(region, field=field_step), energy, particle)
    t = np.arange(seconds)
    on = (t // block_seconds) % 2 == 0
    offsets = bias_offset + np.where(on, shift, 0.0)
    rates = rate_scale * _interp_periodic(curve, offsets, d)
    rng = np.random.default_rng(seed)
    return rng.poisson(rates)


def step_snr(counts: np.ndarray, block_seconds: int = 10) -> float:
    """Step amplitude over the one-second Poisson noise of a count series."""
    counts = np.asarray(counts, dtype=float)
    t = np.arange(counts.size)
    on = (t // block_seconds) % 2 == 0
    if not np.any(on) or np.all(on):
        raise ValueError("count series must contain both on and off blocks")
    signal = abs(counts[on].mean() - counts[~on].mean())
    noise = math.sqrt(counts.mean())
    return signal / noise


def scaled_sensitivity(base: float, length_ratio: float, concentrator_gain: float, area_ratio: float) -> float:
    """Project a sensitivity to a scaled device.

    The field response grows with the squared device length and the flux
    concentrator gain; throughput area improves counting statistics by its
    square root.
    """
    for name, val in (
        ("base", base),
        ("length_ratio", length_ratio),
        ("concentrator_gain", concentrator_gain),
        ("area_ratio", area_ratio),
    ):
        if not val > 0.0:
            raise ValueError(f"{name} must be positive")
    return base / (length_ratio**2 * concentrator_gain * math.sqrt(area_ratio))
