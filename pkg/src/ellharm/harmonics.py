"""Solid and surface ellipsoidal harmonics, normalization constants, and the
ellipsoidal expansion of the Coulomb kernel.

Interior solid harmonic:  E3(r) = E(lam) E(mu) E(nu)
Exterior solid harmonic:  F3(r) = (2n+1) E3(r) I(|lam|)
Surface harmonic:         S(mu, nu) = E(mu) E(nu)

The normalization constant gamma_n^p is the squared norm of the surface
harmonic under the weight (mu^2 - nu^2) / (sqrt(mu^2 - h^2) sqrt(k^2 - mu^2)
sqrt(h^2 - nu^2) sqrt(k^2 - nu^2)) over the full surface.  With the
substitutions mu^2 = h^2 + (k^2 - h^2) sin^2(phi) and nu = h sin(theta) all
four inverse-square-root endpoint singularities are absorbed and the
integrand becomes smooth, so a tensor Gauss-Legendre rule converges fast;
the full-surface value is 8x the positive-octant integral.

With these conventions the Coulomb kernel expands as

    1/|r - r'| = sum_n sum_p [4 pi / (2n+1)] (1/gamma_n^p) E3(r') F3(r)

for field points on a larger confocal shell than the source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coords import EllipsoidSystem, EllipsoidalPoint, cart_to_ell
from .errors import NonConvergence, OrderOutOfRange, OrderingViolation
from .lame1 import N_MAX_DEFAULT, eval_lame, lame_function
from .lame2 import eval_I, surface_I
from .numerics import gauss_legendre

__all__ = [
    "HarmonicIndex",
    "NormalizationTable",
    "CoulombExpansion",
    "interior_solid",
    "exterior_solid",
    "surface_harmonic",
    "gamma",
    "build_normalization_table",
    "coulomb_expand",
    "CANCELLATION_THRESHOLD",
]

# a per-term intermediate magnitude this many times the running sum flags
# catastrophic cancellation in the expansion
CANCELLATION_THRESHOLD = 1e6

GAMMA_ORDER_DEFAULT = 64
GAMMA_ORDER_MAX = 256


@dataclass(frozen=True)
class HarmonicIndex:
    n: int
    p: int

    def __post_init__(self):
        if self.n < 0 or not (1 <= self.p <= 2 * self.n + 1):
            raise OrderOutOfRange(f"(n, p) = ({self.n}, {self.p}) invalid")


def _fn(sys: EllipsoidSystem, idx: HarmonicIndex):
    return lame_function(sys, idx.n, idx.p, n_max=max(idx.n, N_MAX_DEFAULT))


def interior_solid(sys: EllipsoidSystem, idx: HarmonicIndex,
                   point: EllipsoidalPoint) -> float:
    """E3_n^p at the point: triple product of first-kind evaluations."""
    f = _fn(sys, idx)
    sm, sn = point.s_mu, point.s_nu
    return (eval_lame(f, point.lam, sm, sn)
            * eval_lame(f, point.mu, sm, sn)
            * eval_lame(f, point.nu, sm, sn))


def exterior_solid(sys: EllipsoidSystem, idx: HarmonicIndex,
                   point: EllipsoidalPoint, rel_tol: float = 1e-10) -> float:
    """F3_n^p at an exterior point (|lambda| > k required by eval_I)."""
    f = _fn(sys, idx)
    lam = abs(point.lam)
    I = surface_I(f, rel_tol) if lam == sys.a else eval_I(f, lam, rel_tol)
    return (2 * idx.n + 1) * interior_solid(sys, idx, point) * I


def surface_harmonic(sys: EllipsoidSystem, idx: HarmonicIndex,
                     mu: float, nu: float,
                     s_mu: int = 1, s_nu: int = 1) -> float:
    """Product E(mu) E(nu) of the two angular factors."""
    f = _fn(sys, idx)
    return eval_lame(f, mu, s_mu, s_nu) * eval_lame(f, nu, s_mu, s_nu)


def _gamma_fixed_order(sys: EllipsoidSystem, f, order: int) -> float:
    """Octant integral at a fixed tensor Gauss-Legendre order, times 8."""
    phi, wphi = gauss_legendre(order, 0.0, math.pi / 2.0)
    theta, wtheta = gauss_legendre(order, 0.0, math.pi / 2.0)
    mu = np.sqrt(sys.h2 + (sys.k2 - sys.h2) * np.sin(phi) ** 2)
    nu = sys.h * np.sin(theta)
    Emu = eval_lame(f, mu)
    Enu = eval_lame(f, nu)
    M2 = mu[:, None] ** 2
    N2 = nu[None, :] ** 2
    W = np.outer(wphi / mu, wtheta / np.sqrt(sys.k2 - nu ** 2))
    core = (Emu[:, None] ** 2) * (Enu[None, :] ** 2) * (M2 - N2) * W
    return 8.0 * float(np.sum(core))


def gamma(sys: EllipsoidSystem, idx: HarmonicIndex,
          quad_order: int = GAMMA_ORDER_DEFAULT,
          with_error: bool = False):
    """Normalization constant gamma_n^p with an order-doubling error check."""
    if quad_order < 16:
        raise OrderOutOfRange("quad_order must be >= 16")
    f = _fn(sys, idx)
    order = quad_order
    val = _gamma_fixed_order(sys, f, order)
    while True:
        order *= 2
        val2 = _gamma_fixed_order(sys, f, order)
        err = abs(val2 - val) / max(abs(val2), 1e-300)
        if err <= 1e-8:
            return (val2, err) if with_error else val2
        if order >= GAMMA_ORDER_MAX:
            raise NonConvergence(
                f"gamma order-doubling stalled at order {order} (rel change {err:.2e})")
        val = val2


@dataclass(frozen=True)
class NormalizationTable:
    system: EllipsoidSystem
    gamma: dict            # (n, p) -> value
    quadrature_order: int
    error_estimates: dict  # (n, p) -> order-doubling relative change

    def __getitem__(self, np_pair):
        return self.gamma[np_pair]


def build_normalization_table(sys: EllipsoidSystem, N: int,
                              quad_order: int = GAMMA_ORDER_DEFAULT) -> NormalizationTable:
    gam = {}
    errs = {}
    for n in range(N + 1):
        for p in range(1, 2 * n + 2):
            v, e = gamma(sys, HarmonicIndex(n, p), quad_order, with_error=True)
            gam[(n, p)] = v
            errs[(n, p)] = e
    return NormalizationTable(system=sys, gamma=gam,
                              quadrature_order=quad_order, error_estimates=errs)


@dataclass
class CoulombExpansion:
    N: int
    terms: dict              # (n, p) -> term value
    partial_sums: list       # by degree, length N + 1
    diagnostics: dict        # (n, p) -> dict with absE, absF, gamma, amplification
    cancellation_degrees: list = field(default_factory=list)

    @property
    def value(self) -> float:
        return self.partial_sums[-1]


def coulomb_expand(sys: EllipsoidSystem, source, field_point, N: int,
                   table: NormalizationTable | None = None,
                   rel_tol: float = 1e-10) -> CoulombExpansion:
    """Degree-truncated ellipsoidal expansion of 1/|r - r'|.

    ``source`` and ``field_point`` are Cartesian triples; the field point must
    lie on a strictly larger confocal shell than the source.  Per-term
    magnitudes are recorded, and any degree whose largest intermediate
    magnitude exceeds CANCELLATION_THRESHOLD times the running sum is listed
    in ``cancellation_degrees``.
    """
    src = cart_to_ell(sys, *source)
    fld = cart_to_ell(sys, *field_point)
    if abs(fld.lam) <= abs(src.lam):
        raise OrderingViolation(
            f"field |lambda|={abs(fld.lam)} must exceed source |lambda|={abs(src.lam)}")
    if table is None:
        table = build_normalization_table(sys, N)

    terms = {}
    diagnostics = {}
    partial_sums = []
    flagged = []
    total = 0.0
    for n in range(N + 1):
        max_amp = 0.0
        for p in range(1, 2 * n + 2):
            idx = HarmonicIndex(n, p)
            g = table.gamma[(n, p)]
            E3 = interior_solid(sys, idx, src)
            F3 = exterior_solid(sys, idx, fld, rel_tol=rel_tol)
            pref = 4.0 * math.pi / (2 * n + 1) / g
            term = pref * E3 * F3
            total += term
            amp = pref * abs(E3) * abs(F3)
            max_amp = max(max_amp, amp)
            terms[(n, p)] = term
            diagnostics[(n, p)] = {
                "absE": abs(E3), "absF": abs(F3), "gamma": g, "amplification": amp,
            }
        partial_sums.append(total)
        if max_amp > CANCELLATION_THRESHOLD * abs(total):
            flagged.append(n)
    return CoulombExpansion(N=N, terms=terms, partial_sums=partial_sums,
                            diagnostics=diagnostics, cancellation_degrees=flagged)
