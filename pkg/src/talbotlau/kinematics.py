"""Beam kinematics: de Broglie wavelength, Talbot length, resonance energies.

Energies are kinetic and quoted in electron-volts; everything else is SI.
Wavelengths keep the first relativistic correction, which shifts electron
values by a few tenths of a percent in the keV range.
"""

from dataclasses import dataclass

import math

from . import constants as const

__all__ = [
    "ParticleSpec",
    "BeamEnergy",
    "ELECTRON",
    "de_broglie_wavelength",
    "talbot_length",
    "resonant_energies",
]


@dataclass(frozen=True)
class ParticleSpec:
    """Charge [C], mass [kg] and rest energy [J] of the beam particle."""

    charge: float
    mass: float
    rest_energy: float

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ValueError("particle mass must be positive")
        expected = self.mass * const.C**2
        if abs(self.rest_energy - expected) > 1e-12 * expected:
            raise ValueError("rest_energy must equal mass*c^2")


ELECTRON = ParticleSpec(
    charge=-const.E_CHARGE,
    mass=const.ELECTRON_MASS,
    rest_energy=const.ELECTRON_MASS * const.C**2,
)


@dataclass(frozen=True)
class BeamEnergy:
    """Kinetic beam energy [eV], strictly positive."""

    kinetic_energy_ev: float

    def __post_init__(self):
        if not self.kinetic_energy_ev > 0.0:
            raise ValueError("beam energy must be positive")

    @property
    def joules(self) -> float:
        return self.kinetic_energy_ev * const.EV


def de_broglie_wavelength(energy: BeamEnergy, particle: ParticleSpec = ELECTRON) -> float:
    """Matter wavelength [m] for a kinetic energy.

    Uses lambda = h / sqrt(2 m E (1 + E / (2 m c^2))), i.e. h/p with the
    relativistic momentum.
    """
    e_j = energy.joules
    p = math.sqrt(2.0 * particle.mass * e_j * (1.0 + e_j / (2.0 * particle.rest_energy)))
    return const.H / p


def talbot_length(period: float, wavelength: float) -> float:
    """Grating self-imaging distance 2 d^2 / lambda [m]."""
    if not period > 0.0:
        raise ValueError("grating period must be positive")
    if not wavelength > 0.0:
        raise ValueError("wavelength must be positive")
    return 2.0 * period * period / wavelength


# Bracket for the monotone energy inversion.
_ENERGY_LO_EV = 1.0
_ENERGY_HI_EV = 1e6


def _energy_for_wavelength(wavelength, particle, rtol=1e-10):
    """Invert de_broglie_wavelength by bisection; None if out of bracket."""
    lo, hi = _ENERGY_LO_EV, _ENERGY_HI_EV
    if wavelength > de_broglie_wavelength(BeamEnergy(lo), particle):
        return None
    if wavelength < de_broglie_wavelength(BeamEnergy(hi), particle):
        return None
    # wavelength decreases monotonically with energy, so bisection is safe
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if de_broglie_wavelength(BeamEnergy(mid), particle) > wavelength:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def resonant_energies(
    separation: float,
    period: float,
    n_max: int,
    particle: ParticleSpec = ELECTRON,
    max_wavelength: float = 1e-9,
) -> list[tuple[int, float]]:
    """Energies at which the gap equals n half self-imaging lengths.

    Solves separation = n * L_T(E) / 2, i.e. lambda_n = n d^2 / L, for each
    integer n in [1, n_max]. Returns (n, energy_ev) pairs; orders whose
    wavelength exceeds ``max_wavelength`` or falls outside the inversion
    bracket are skipped.
    """
    if not separation > 0.0:
        raise ValueError("grating separation must be positive")
    if not period > 0.0:
        raise ValueError("grating period must be positive")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    out = []
    for n in range(1, n_max + 1):
        lam = n * period * period / separation
        if lam > max_wavelength:
            continue
        energy_ev = _energy_for_wavelength(lam, particle)
        if energy_ev is not None:
            out.append((n, energy_ev))
    return out
