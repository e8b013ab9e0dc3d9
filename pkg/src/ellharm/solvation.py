"""Semi-analytic two-dielectric Poisson solvation for point charges inside a
tri-axial ellipsoid.

Interior permittivity eps1, exterior eps2.  The source charges define
coefficients G, the dielectric response defines reaction coefficients B, and
the exterior potential coefficients C follow from the interface conditions:

    G_n^p = sum_k q_k [4 pi / (2n+1)] (1/gamma_n^p) E3_n^p(r_k)

    B_n^p = [(eps1 - eps2)/(eps1 eps2)] [F(a)/E(a)]
            [1 - (eps1/eps2) (E'(a)/E(a)) / (F'(a)/F(a))]^{-1} G_n^p

    C_n^p = G_n^p / eps1 + B_n^p E(a)/F(a)

The reaction potential inside is psi(r) = sum B_n^p E3_n^p(r) and the
solvation free energy is (1/2) sum_k q_k psi(r_k).

Units: lengths in Angstrom, charges in units of e, Gaussian electrostatics;
energies are reported both in e^2/Angstrom and in kcal/mol via the
configurable conversion constant KCAL_PER_E2_PER_ANGSTROM.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .coords import EllipsoidSystem, cart_to_ell
from .errors import ChargeOutsideEllipsoid, ResonantDenominator
from .harmonics import (HarmonicIndex, NormalizationTable,
                        build_normalization_table, interior_solid)
from .lame1 import N_MAX_DEFAULT, eval_lame_derivative, lame_function
from .lame2 import surface_I

__all__ = [
    "PointCharge",
    "DielectricModel",
    "ExpansionCoefficients",
    "EnergyReport",
    "source_coefficients",
    "reaction_coefficients",
    "exterior_coefficients",
    "expansion_coefficients",
    "reaction_potential",
    "solvation_energy",
    "born_energy",
    "KCAL_PER_E2_PER_ANGSTROM",
]

KCAL_PER_E2_PER_ANGSTROM = 332.0637


@dataclass(frozen=True)
class PointCharge:
    x: float
    y: float
    z: float
    q: float

    @property
    def position(self):
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class DielectricModel:
    eps1: float  # interior
    eps2: float  # exterior

    def __post_init__(self):
        if self.eps1 <= 0 or self.eps2 <= 0:
            raise ValueError("permittivities must be positive")


@dataclass(frozen=True)
class ExpansionCoefficients:
    N: int
    G: dict  # (n, p) -> float
    B: dict
    C: dict


@dataclass(frozen=True)
class EnergyReport:
    energy_kcal: float
    energy_gaussian: float  # e^2 / Angstrom
    N: int
    cancellation_degrees: tuple = ()


def _check_interior(sys: EllipsoidSystem, charges):
    for ch in charges:
        val = (ch.x / sys.a) ** 2 + (ch.y / sys.b) ** 2 + (ch.z / sys.c) ** 2
        if val >= 1.0:
            raise ChargeOutsideEllipsoid(
                f"charge at {ch.position} not strictly inside the ellipsoid")


def source_coefficients(sys: EllipsoidSystem, charges, N: int,
                        table: NormalizationTable | None = None) -> dict:
    """G_n^p for all (n <= N, p)."""
    _check_interior(sys, charges)
    if table is None:
        table = build_normalization_table(sys, N)
    pts = [cart_to_ell(sys, *ch.position) for ch in charges]
    G = {}
    for n in range(N + 1):
        for p in range(1, 2 * n + 2):
            idx = HarmonicIndex(n, p)
            pref = 4.0 * math.pi / (2 * n + 1) / table.gamma[(n, p)]
            G[(n, p)] = pref * sum(
                ch.q * interior_solid(sys, idx, pt)
                for ch, pt in zip(charges, pts))
    return G


def _surface_values(sys: EllipsoidSystem, n: int, p: int):
    """E, E', F, F' at lambda = a (positive-octant signs; the ratios used in
    the reaction coefficients are octant independent)."""
    f = lame_function(sys, n, p, n_max=max(n, N_MAX_DEFAULT))
    a = sys.a
    E, dE = eval_lame_derivative(f, a)
    I = surface_I(f)
    # at lambda = a: sqrt(a^2 - k^2) = c, sqrt(a^2 - h^2) = b
    dI = -1.0 / (E * E * sys.b * sys.c)
    F = (2 * n + 1) * E * I
    dF = (2 * n + 1) * (dE * I + E * dI)
    return E, dE, F, dF


def reaction_coefficients(G: dict, sys: EllipsoidSystem,
                          diel: DielectricModel) -> dict:
    """B_n^p from G_n^p; identically zero when eps1 == eps2."""
    e1, e2 = diel.eps1, diel.eps2
    B = {}
    for (n, p), g in G.items():
        if e1 == e2:
            B[(n, p)] = 0.0
            continue
        E, dE, F, dF = _surface_values(sys, n, p)
        denom = 1.0 - (e1 / e2) * (dE / E) / (dF / F)
        if abs(denom) < 1e-12:
            raise ResonantDenominator(
                f"reaction denominator vanishes at (n, p) = ({n}, {p})")
        B[(n, p)] = (e1 - e2) / (e1 * e2) * (F / E) / denom * g
    return B


def exterior_coefficients(G: dict, B: dict, sys: EllipsoidSystem,
                          diel: DielectricModel) -> dict:
    """C_n^p = G_n^p / eps1 + B_n^p E(a)/F(a)."""
    C = {}
    for (n, p), g in G.items():
        E, _, F, _ = _surface_values(sys, n, p)
        C[(n, p)] = g / diel.eps1 + B[(n, p)] * E / F
    return C


def expansion_coefficients(sys: EllipsoidSystem, charges, diel: DielectricModel,
                           N: int, table: NormalizationTable | None = None
                           ) -> ExpansionCoefficients:
    G = source_coefficients(sys, charges, N, table=table)
    B = reaction_coefficients(G, sys, diel)
    C = exterior_coefficients(G, B, sys, diel)
    return ExpansionCoefficients(N=N, G=G, B=B, C=C)


def reaction_potential(sys: EllipsoidSystem, B: dict, point) -> float:
    """psi(r) = sum B_n^p E3_n^p(r) at an interior Cartesian point."""
    pt = cart_to_ell(sys, *point)
    psi = 0.0
    for (n, p) in sorted(B):
        psi += B[(n, p)] * interior_solid(sys, HarmonicIndex(n, p), pt)
    return psi


def solvation_energy(sys: EllipsoidSystem, charges, diel: DielectricModel,
                     N: int = N_MAX_DEFAULT,
                     table: NormalizationTable | None = None) -> EnergyReport:
    """Solvation free energy (1/2) sum_k q_k psi(r_k)."""
    coeffs = expansion_coefficients(sys, charges, diel, N, table=table)
    pts = [cart_to_ell(sys, *ch.position) for ch in charges]
    energy = 0.0
    for ch, pt in zip(charges, pts):
        psi = 0.0
        for (n, p) in sorted(coeffs.B):
            psi += coeffs.B[(n, p)] * interior_solid(sys, HarmonicIndex(n, p), pt)
        energy += 0.5 * ch.q * psi
    return EnergyReport(energy_kcal=energy * KCAL_PER_E2_PER_ANGSTROM,
                        energy_gaussian=energy, N=N)


def born_energy(R: float, q: float, diel: DielectricModel) -> float:
    """Closed-form solvation energy (kcal/mol) of a central charge in a
    dielectric sphere of radius R."""
    if R <= 0:
        raise ValueError("R must be positive")
    return (KCAL_PER_E2_PER_ANGSTROM * q * q / (2.0 * R)
            * (1.0 / diel.eps2 - 1.0 / diel.eps1))
