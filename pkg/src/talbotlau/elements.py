"""Amplitude and phase masks applied at beamline planes.

A plane element multiplies the field by A(x) exp(i phi(x)). Apertures are
plain window indicators. Gratings are periodic bar/slit combs with an open
fraction, a lateral offset and an optional finite extent; their phase term
is a phenomenological edge (image-charge) profile plus an optional per-slit
random phase.
"""

from dataclasses import dataclass, replace

import math

import numpy as np

from .propagation import WaveField

__all__ = [
    "ApertureSpec",
    "GratingSpec",
    "PhaseModel",
    "aperture_amplitude",
    "grating_amplitude",
    "translate_grating",
    "apply_plane",
]


@dataclass(frozen=True)
class ApertureSpec:
    """Single open window: full width and center position [m]."""

    width: float
    center: float = 0.0

    def __post_init__(self):
        if not self.width > 0.0:
            raise ValueError("aperture width must be positive")


@dataclass(frozen=True)
class GratingSpec:
    """Periodic comb of open slits.

    ``offset`` translates the comb laterally (taken modulo the period);
    ``extent`` is the illuminated span of the structure, centered on the
    beam axis, beyond which the grating is opaque.
    """

    period: float
    open_fraction: float = 0.35
    offset: float = 0.0
    extent: float = math.inf

    def __post_init__(self):
        if not self.period > 0.0:
            raise ValueError("grating period must be positive")
        if not 0.0 < self.open_fraction < 1.0:
            raise ValueError("open fraction must lie strictly between 0 and 1")
        if not self.extent > 0.0:
            raise ValueError("grating extent must be positive")


@dataclass(frozen=True)
class PhaseModel:
    """Phase modulation parameters for grating planes.

    ``image_charge_strength`` [rad m] sets the wall-edge phase via
    strength/range at the wall, decaying over ``image_charge_range`` [m]
    into the slit. ``random_phase_max`` [rad] enables one uniform random
    phase per slit, derived deterministically from (seed, plane, slit).
    """

    image_charge_strength: float = 0.0
    image_charge_range: float = 2e-8
    random_phase_max: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.image_charge_strength < 0.0:
            raise ValueError("image_charge_strength must be nonnegative")
        if not self.image_charge_range > 0.0:
            raise ValueError("image_charge_range must be positive")
        if self.random_phase_max < 0.0:
            raise ValueError("random_phase_max must be nonnegative")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be nonnegative")


def aperture_amplitude(x, aperture: ApertureSpec):
    """Window indicator; edge points count as open."""
    xs = np.asarray(x, dtype=float)
    # pad by a relative ulp so edge inclusion cannot flip with grid rounding
    half = 0.5 * aperture.width * (1.0 + 1e-12)
    out = (np.abs(xs - aperture.center) <= half).astype(float)
    return out if xs.ndim else float(out)


def _comb_coordinates(x, grating: GratingSpec):
    """Slit index and signed distance from the nearest slit center."""
    u = (np.asarray(x, dtype=float) - grating.offset) / grating.period
    n = np.floor(u + 0.5)
    v = (u - n) * grating.period
    return n.astype(int), v


def grating_amplitude(x, grating: GratingSpec):
    """Comb transmission: 1 inside an open slit, 0 on a bar.

    Slit n spans n*d + offset +- f*d/2; boundary points are open.
    """
    xs = np.asarray(x, dtype=float)
    _, v = _comb_coordinates(xs, grating)
    # pad by a relative ulp so edge inclusion cannot flip with grid rounding
    mask = np.abs(v) <= 0.5 * grating.open_fraction * grating.period * (1.0 + 1e-12)
    if math.isfinite(grating.extent):
        mask &= np.abs(xs) <= 0.5 * grating.extent
    out = mask.astype(float)
    return out if xs.ndim else float(out)


def translate_grating(grating: GratingSpec, delta: float) -> GratingSpec:
    """Shift the comb laterally: the result at x matches the original at x - delta."""
    return replace(grating, offset=grating.offset + delta)


def _zigzag(n: int) -> int:
    return 2 * n if n >= 0 else -2 * n - 1


def _slit_random_phase(seed: int, plane_index: int, slit_index: int, limit: float) -> float:
    # keyed by (seed, plane, slit) so evaluation order cannot matter
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(plane_index, _zigzag(slit_index)))
    return float(np.random.default_rng(ss).uniform(0.0, limit))


def _grating_phase(x, grating, phase, plane_index, random_phase):
    """Phase profile on open points; zero elsewhere."""
    xs = np.asarray(x, dtype=float)
    slit_idx, v = _comb_coordinates(xs, grating)
    phi = np.zeros(xs.shape)
    open_pts = np.abs(v) <= 0.5 * grating.open_fraction * grating.period
    if not np.any(open_pts):
        return phi
    if phase.image_charge_strength > 0.0:
        wall_distance = 0.5 * grating.open_fraction * grating.period - np.abs(v[open_pts])
        phi[open_pts] += (
            phase.image_charge_strength
            / phase.image_charge_range
            * np.exp(-wall_distance / phase.image_charge_range)
        )
    if random_phase and phase.random_phase_max > 0.0:
        draws = {
            n: _slit_random_phase(phase.rng_seed, plane_index, n, phase.random_phase_max)
            for n in np.unique(slit_idx[open_pts])
        }
        phi[open_pts] += np.array([draws[n] for n in slit_idx[open_pts]])
    return phi


def apply_plane(
    field: WaveField,
    element,
    phase: PhaseModel | None = None,
    plane_index: int = 0,
    random_phase: bool = False,
) -> WaveField:
    """Multiply a field by a plane element's A(x) exp(i phi(x)).

    ``plane_index`` keys the per-slit random phase stream; set
    ``random_phase`` only on the planes where the random potential acts.
    Raises if the element does not geometrically overlap the grid.
    """
    if plane_index < 0:
        raise ValueError("plane_index must be nonnegative")
    x = field.x
    lo, hi = x[0], x[-1]
    if isinstance(element, ApertureSpec):
        if element.center + 0.5 * element.width < lo or element.center - 0.5 * element.width > hi:
            raise ValueError("aperture does not overlap the field grid")
        amp = aperture_amplitude(x, element)
        out = field.amplitudes * amp
    elif isinstance(element, GratingSpec):
        if math.isfinite(element.extent) and (0.5 * element.extent < lo or -0.5 * element.extent > hi):
            raise ValueError("grating extent does not overlap the field grid")
        amp = grating_amplitude(x, element)
        out = field.amplitudes * amp
        if phase is not None and (
            phase.image_charge_strength > 0.0 or (random_phase and phase.random_phase_max > 0.0)
        ):
            out = out * np.exp(1j * _grating_phase(x, element, phase, plane_index, random_phase))
    else:
        raise TypeError(f"unsupported plane element {type(element).__name__}")
    return WaveField(out, field.x_start, field.dx, field.z, field.wavelength)
