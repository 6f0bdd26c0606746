"""Three-grating beamline assembly and its fringe observables.

A run propagates point sources placed across the first collimation slit
through the second slit and three gratings, adds their probability
distributions incoherently, and integrates the flux behind the third
grating. Throughput as a function of the third grating's lateral offset is
the fringe curve; its (max - min)/(max + min) is the contrast.

The magnetic field is not inserted into the wave propagation: a field
shifts the fringe laterally, so it is emulated downstream by translating
the third grating (see ``sensing``).
"""

from dataclasses import dataclass, replace

import math

import numpy as np

from .elements import ApertureSpec, GratingSpec, PhaseModel, apply_plane, grating_amplitude, translate_grating
from .kinematics import ELECTRON, BeamEnergy, ParticleSpec, de_broglie_wavelength
from .propagation import (
    GridSpec,
    PropagationPlan,
    SamplingError,
    SamplingReport,
    WaveField,
    required_dx,
    propagate,
)

__all__ = [
    "GUN_ENERGY_RANGE_EV",
    "BeamlineConfig",
    "FringeCurve",
    "beamline_grid",
    "leg_sampling_reports",
    "simulate_throughput",
    "scan_fringe",
    "contrast",
    "sweep_energy",
    "misalignment_factor",
]

# energy reach of the thermionic gun the defaults are modeled on
GUN_ENERGY_RANGE_EV = (4500.0, 10000.0)

_DEFAULT_GRATING = GratingSpec(period=1e-7, open_fraction=0.35)


@dataclass(frozen=True)
class FringeCurve:
    """Throughput sampled at increasing third-grating offsets."""

    offsets: np.ndarray
    throughput: np.ndarray

    def __post_init__(self):
        off = np.asarray(self.offsets, dtype=float)
        thr = np.asarray(self.throughput, dtype=float)
        if off.ndim != 1 or off.size < 1 or off.shape != thr.shape:
            raise ValueError("offsets and throughput must be 1-D arrays of equal length")
        if off.size > 1 and not np.all(np.diff(off) > 0.0):
            raise ValueError("offsets must be strictly increasing")
        if not np.all(np.isfinite(thr)) or np.any(thr < 0.0):
            raise ValueError("throughput must be finite and nonnegative")
        object.__setattr__(self, "offsets", off)
        object.__setattr__(self, "throughput", thr)


@dataclass(frozen=True)
class BeamlineConfig:
    """Geometry, masks and numerics of the full beamline.

    Distances in meters: the two collimation slits sit ``slit_separation``
    apart, the first grating ``slit2_to_g1`` behind the second slit, and
    the three gratings ``grating_gap`` apart. ``grid_step``/``grid_points``
    pin the shared transverse grid; when both are None the step is chosen
    automatically from the sampling criterion (at most 1 nm).
    """

    source_slit: ApertureSpec = ApertureSpec(width=5e-6)
    second_slit: ApertureSpec = ApertureSpec(width=30e-6)
    slit_separation: float = 0.24
    slit2_to_g1: float = 0.05
    grating_gap: float = 3.06e-3
    gratings: tuple = (_DEFAULT_GRATING, _DEFAULT_GRATING, _DEFAULT_GRATING)
    phase_model: PhaseModel = PhaseModel()
    energy: BeamEnergy = BeamEnergy(1e4)
    particle: ParticleSpec = ELECTRON
    n_sources: int = 32
    propagator: str = "paraxial"
    grid_step: float | None = None
    grid_points: int | None = None
    window_factor: float = 1.5

    def __post_init__(self):
        for name in ("slit_separation", "slit2_to_g1", "grating_gap"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if len(self.gratings) != 3:
            raise ValueError("exactly three gratings are required")
        if self.n_sources < 1:
            raise ValueError("n_sources must be at least 1")
        if self.propagator not in ("direct", "paraxial"):
            raise ValueError(f"unknown propagator {self.propagator!r}")
        if self.grid_step is not None and not self.grid_step > 0.0:
            raise ValueError("grid_step must be positive")
        if self.grid_points is not None and self.grid_points < 16:
            raise ValueError("grid_points must be at least 16")
        if not self.window_factor >= 1.0:
            raise ValueError("window_factor must be at least 1")


def _wavelength(cfg: BeamlineConfig) -> float:
    return de_broglie_wavelength(cfg.energy, cfg.particle)


def beamline_grid(cfg: BeamlineConfig) -> GridSpec:
    """Shared transverse grid used from the second slit through G3.

    The window is ``window_factor`` times the geometrically illuminated
    span at G3 (rays from the source-slit extremes through the second-slit
    edges). The automatic step is the sampling bound for the shortest leg
    with a 0.8 safety factor, capped at 1 nm.
    """
    src_edge = abs(cfg.source_slit.center) + 0.5 * cfg.source_slit.width
    slit2_lo = cfg.second_slit.center - 0.5 * cfg.second_slit.width
    slit2_hi = cfg.second_slit.center + 0.5 * cfg.second_slit.width
    z_after = cfg.slit2_to_g1 + 2.0 * cfg.grating_gap
    half = 0.0
    for s in (-src_edge, src_edge):
        for e in (slit2_lo, slit2_hi):
            half = max(half, abs(e + (e - s) * z_after / cfg.slit_separation))
    half = max(half, 4.0 * cfg.gratings[0].period)
    span = 2.0 * half * cfg.window_factor
    if cfg.grid_points is not None:
        count = cfg.grid_points
        dx = span / (count - 1)
    else:
        if cfg.grid_step is not None:
            dx = cfg.grid_step
        else:
            bound = required_dx(_wavelength(cfg), cfg.grating_gap, 0.5 * span, 0.5 * span)
            dx = min(1e-9, 0.8 * bound)
        count = int(math.ceil(span / dx)) + 1
        if count % 2 == 0:
            count += 1
    if count > 64_000_000:
        raise ValueError(
            f"beamline grid would need {count} samples; "
            "the geometry (slit centers/widths) is likely misconfigured"
        )
    x_start = -0.5 * (count - 1) * dx
    return GridSpec(x_start=x_start, dx=dx, count=count)


def _legs(cfg: BeamlineConfig):
    return (
        ("slit2_to_g1", cfg.slit2_to_g1),
        ("g1_to_g2", cfg.grating_gap),
        ("g2_to_g3", cfg.grating_gap),
    )


def leg_sampling_reports(cfg: BeamlineConfig) -> list[tuple[str, SamplingReport]]:
    """Sampling criterion for every propagation leg on the shared grid."""
    grid = beamline_grid(cfg)
    lam = _wavelength(cfg)
    half = 0.5 * grid.span
    out = [
        (
            "source_to_slit2",
            _leg_report(lam, cfg.slit_separation, 0.0, half, grid.dx),
        )
    ]
    for name, dz in _legs(cfg):
        out.append((name, _leg_report(lam, dz, half, half, grid.dx)))
    return out


def _leg_report(lam, dz, half_src, half_tgt, dx) -> SamplingReport:
    need = required_dx(lam, dz, half_src, half_tgt)
    return SamplingReport(ok=dx <= need, dx=dx, required_dx=need)


def _require_sampling(cfg: BeamlineConfig):
    for name, report in leg_sampling_reports(cfg):
        if not report.ok:
            raise SamplingError(
                f"leg {name}: grid step {report.dx:.4e} m too coarse; "
                f"required dx <= {report.required_dx:.4e} m"
            )


def _source_positions(cfg: BeamlineConfig) -> np.ndarray:
    """Midpoints of n_sources equal strips across the source slit."""
    w = cfg.source_slit.width
    k = np.arange(cfg.n_sources)
    return cfg.source_slit.center - 0.5 * w + (k + 0.5) * (w / cfg.n_sources)


def _point_source_field(x_source, distance, grid: GridSpec, wavelength, z) -> WaveField:
    # single-term direct kernel: unit-amplitude spherical wave from one point
    r = np.hypot(grid.x - x_source, distance)
    return WaveField(np.exp(2j * np.pi * r / wavelength), grid.x_start, grid.dx, z, wavelength)


def _fringe_totals(cfg: BeamlineConfig, offsets: np.ndarray) -> np.ndarray:
    """Mean throughput over point sources at each third-grating offset."""
    _require_sampling(cfg)
    grid = beamline_grid(cfg)
    lam = _wavelength(cfg)
    plan = lambda dz: PropagationPlan(delta_z=dz, target_grid=grid, method=cfg.propagator)
    g1, g2, g3 = cfg.gratings
    phase = cfg.phase_model
    randomized = phase.random_phase_max > 0.0
    masks = [grating_amplitude(grid.x, translate_grating(g3, off)) for off in offsets]
    totals = np.zeros(len(offsets))
    for x_s in _source_positions(cfg):
        psi = _point_source_field(x_s, cfg.slit_separation, grid, lam, cfg.slit_separation)
        psi = apply_plane(psi, cfg.second_slit)
        if psi.total_probability <= 0.0:
            raise ValueError("no flux passes the second collimation slit; check geometry")
        psi = propagate(psi, plan(cfg.slit2_to_g1))
        p_in = psi.total_probability
        if p_in <= 0.0:
            raise ValueError("no flux reaches the first grating; check geometry")
        psi = apply_plane(psi, g1, phase, plane_index=1, random_phase=randomized)
        psi = propagate(psi, plan(cfg.grating_gap))
        psi = apply_plane(psi, g2, phase, plane_index=2, random_phase=randomized)
        psi = propagate(psi, plan(cfg.grating_gap))
        intensity = np.abs(psi.amplitudes) ** 2 * grid.dx
        for j, mask in enumerate(masks):
            totals[j] += float(np.sum(intensity * mask)) / p_in
    return totals / cfg.n_sources


def simulate_throughput(cfg: BeamlineConfig, g3_offset: float) -> float:
    """Source-flux-normalized throughput at one third-grating offset.

    Per point source, the flux just behind G3 divided by the flux arriving
    at G1; sources are averaged with equal weight.
    """
    return float(_fringe_totals(cfg, np.array([g3_offset]))[0])


def scan_fringe(cfg: BeamlineConfig, n_offsets: int = 16) -> FringeCurve:
    """Throughput at n_offsets uniform third-grating offsets over [0, d)."""
    if n_offsets < 8:
        raise ValueError("n_offsets must be at least 8")
    d = cfg.gratings[2].period
    offsets = np.arange(n_offsets) * (d / n_offsets)
    return FringeCurve(offsets=offsets, throughput=_fringe_totals(cfg, offsets))


def contrast(curve: FringeCurve) -> float:
    """(max - min)/(max + min) of the sampled fringe."""
    hi = float(np.max(curve.throughput))
    lo = float(np.min(curve.throughput))
    if hi <= 0.0:
        raise ValueError("contrast is undefined for an all-zero fringe")
    return (hi - lo) / (hi + lo)


def sweep_energy(
    cfg: BeamlineConfig,
    energies_ev,
    n_offsets: int = 16,
    allow_out_of_range: bool = False,
) -> list[tuple[float, float]]:
    """Fringe contrast at each beam energy, all other parameters fixed."""
    lo, hi = GUN_ENERGY_RANGE_EV
    out = []
    for e_ev in energies_ev:
        if not allow_out_of_range and not lo <= e_ev <= hi:
            raise ValueError(
                f"energy {e_ev:g} eV outside the gun range [{lo:g}, {hi:g}] eV; "
                "pass allow_out_of_range=True to override"
            )
        curve = scan_fringe(replace(cfg, energy=BeamEnergy(e_ev)), n_offsets)
        out.append((float(e_ev), contrast(curve)))
    return out


def misalignment_factor(
    beam_height: float,
    misalignment: float,
    period: float,
    c_geom: float = 2.0,
) -> float:
    """Contrast multiplier for a relative roll between the gratings.

    A roll angle spreads the fringe phase across the beam height; the
    fringe displacement span is c_geom * angle * height and the surviving
    contrast is |sinc| of that span over the period.
    """
    if not beam_height > 0.0 or not period > 0.0:
        raise ValueError("beam height and period must be positive")
    if misalignment < 0.0:
        raise ValueError("misalignment angle must be nonnegative")
    u = math.pi * c_geom * misalignment * beam_height / period
    if u == 0.0:
        return 1.0
    return abs(math.sin(u) / u)
