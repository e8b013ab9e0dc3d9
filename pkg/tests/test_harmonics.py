import math

import numpy as np
import pytest
from scipy.special import ellip_normal

from conftest import fd_laplacian, surface_inner
from ellharm.coords import cart_to_ell
from ellharm.errors import OrderOutOfRange, OrderingViolation
from ellharm.harmonics import (HarmonicIndex, build_normalization_table,
                               coulomb_expand, exterior_solid, gamma,
                               interior_solid, surface_harmonic)
from ellharm.lame1 import eval_lame, lame_function


def test_interior_monopole(sys215):
    idx = HarmonicIndex(0, 1)
    for xyz in [(0.1, 0.2, 0.3), (-1.0, 0.5, -0.2)]:
        pt = cart_to_ell(sys215, *xyz)
        assert interior_solid(sys215, idx, pt) == pytest.approx(1.0, rel=1e-12)


def test_interior_dipoles_proportional_to_cartesians(sys215):
    h, k = sys215.h, sys215.k
    consts = {1: h * k, 2: math.sqrt(k * k - h * h) * h,
              3: math.sqrt(k * k - h * h) * k}
    rng = np.random.default_rng(2)
    for _ in range(20):
        xyz = rng.uniform(-1, 1, 3) * [1.5, 1.1, 0.7]
        pt = cart_to_ell(sys215, *xyz)
        for p, cart in zip((1, 2, 3), xyz):
            v = interior_solid(sys215, HarmonicIndex(1, p), pt)
            assert v == pytest.approx(consts[p] * cart, rel=1e-9, abs=1e-12)


def test_interior_harmonicity(sys215):
    rng = np.random.default_rng(9)
    for p in range(1, 6):
        idx = HarmonicIndex(2, p)

        def phi(x, y, z):
            return interior_solid(sys215, idx, cart_to_ell(sys215, x, y, z))

        for _ in range(10):
            pt = rng.uniform(0.1, 0.5, 3) * [1.0, 1.0, 1.0] * rng.choice([-1, 1], 3)
            scale = max(abs(phi(*pt)), 1.0) / sys215.a ** 2
            assert abs(fd_laplacian(phi, pt, 1e-4 * sys215.a)) <= 1e-5 * scale


def test_exterior_monopole_far_field(sys215):
    idx = HarmonicIndex(0, 1)
    pt = cart_to_ell(sys215, 100.0, 0.0, 0.0)
    v = exterior_solid(sys215, idx, pt)
    assert abs(v - 0.01) <= 0.002 * 0.01


def test_exterior_decay_rates(sys215):
    for n in (1, 2, 3):
        idx = HarmonicIndex(n, 1)
        near = exterior_solid(sys215, idx, cart_to_ell(sys215, 100.0, 0.0, 0.0))
        far = exterior_solid(sys215, idx, cart_to_ell(sys215, 200.0, 0.0, 0.0))
        target = 2.0 ** -(n + 1)
        assert abs(far / near - target) <= 0.02 * target


def test_exterior_harmonicity(sys215):
    for (n, p) in [(1, 2), (2, 3), (4, 5)]:
        idx = HarmonicIndex(n, p)

        def phi(x, y, z):
            return exterior_solid(sys215, idx, cart_to_ell(sys215, x, y, z))

        for pt in [(2.5, 0.8, 0.6), (3.0, -1.0, 0.5), (-2.8, 1.2, -0.9)]:
            scale = max(abs(phi(*pt)), 1e-6) / sys215.a ** 2
            assert abs(fd_laplacian(phi, pt, 1e-4 * sys215.a)) <= 1e-4 * scale


def test_surface_harmonic_composition(sys215):
    idx = HarmonicIndex(2, 3)
    f = lame_function(sys215, 2, 3)
    mu, nu = 1.5, 0.5
    expect = eval_lame(f, mu) * eval_lame(f, nu)
    assert surface_harmonic(sys215, idx, mu, nu) == pytest.approx(expect, rel=1e-14)
    assert surface_harmonic(sys215, HarmonicIndex(0, 1), mu, nu) == 1.0


def _lambda_k2(sys, p):
    """The constant Lambda of the degree-2 K-class function E = s^2 - Lambda."""
    f = lame_function(sys, 2, p)
    b = f.coeffs
    return -(b[0] + b[1])


def test_gamma_closed_forms(sys215):
    h2, k2 = sys215.h2, sys215.k2
    pi = math.pi
    expected = {
        (0, 1): 4 * pi,
        (1, 1): 4 * pi * h2 * k2 / 3,
        (1, 2): 4 * pi * h2 * (k2 - h2) / 3,
        (1, 3): 4 * pi * k2 * (k2 - h2) / 3,
        (2, 3): 4 * pi * h2 ** 2 * k2 * (k2 - h2) / 15,
        (2, 4): 4 * pi * h2 * k2 ** 2 * (k2 - h2) / 15,
        (2, 5): 4 * pi * h2 * k2 * (k2 - h2) ** 2 / 15,
    }
    for p in (1, 2):
        lam = _lambda_k2(sys215, p)
        expected[(2, p)] = (-16 * pi / 135) * (
            lam * (-2 * h2 ** 3 + 3 * h2 ** 2 * k2 + 3 * h2 * k2 ** 2 - 2 * k2 ** 3)
            + h2 * k2 * (h2 ** 2 - 4 * h2 * k2 + k2 ** 2))
    for (n, p), val in expected.items():
        got = gamma(sys215, HarmonicIndex(n, p))
        # at least five significant figures
        assert got == pytest.approx(val, rel=1e-5), (n, p)


def test_gamma_positive_and_finite(sys215):
    table = build_normalization_table(sys215, 12)
    assert len(table.gamma) == sum(2 * n + 1 for n in range(13))
    for v in table.gamma.values():
        assert v > 0 and math.isfinite(v)


def test_gamma_quad_order_validated(sys215):
    with pytest.raises(OrderOutOfRange):
        gamma(sys215, HarmonicIndex(0, 1), quad_order=8)


def test_gamma_cross_check_reference_implementation(sys215):
    h2, k2 = sys215.h2, sys215.k2
    for n in range(5):
        for p in range(1, 2 * n + 2):
            mine = gamma(sys215, HarmonicIndex(n, p))
            ref = float(ellip_normal(h2, k2, n, p))
            assert mine == pytest.approx(ref, rel=1e-6), (n, p)


def test_orthogonality(sys215):
    idxs = [(n, p) for n in range(5) for p in range(1, 2 * n + 2)]
    # the inner product of solid-harmonic surface restrictions has diagonal
    # gamma * E(a)^2; normalize by the E(a) factors to compare against gamma
    Ea = {ip: eval_lame(lame_function(sys215, *ip), sys215.a) for ip in idxs}
    gam = {ip: surface_inner(sys215, HarmonicIndex(*ip), HarmonicIndex(*ip))
           / Ea[ip] ** 2 for ip in idxs}
    for ip in idxs:
        assert gam[ip] == pytest.approx(
            gamma(sys215, HarmonicIndex(*ip)), rel=1e-7)
    for i, ip1 in enumerate(idxs):
        for ip2 in idxs[i + 1:]:
            inner = (surface_inner(sys215, HarmonicIndex(*ip1), HarmonicIndex(*ip2))
                     / (Ea[ip1] * Ea[ip2]))
            assert abs(inner) <= 1e-7 * math.sqrt(gam[ip1] * gam[ip2]), (ip1, ip2)


def test_coulomb_expansion_truncation(sys215):
    exact = 1.0 / 1.5
    exp = coulomb_expand(sys215, (0.0, 0.0, 0.5), (0.0, 0.0, 2.0), 12)
    rel = abs(exp.value - exact) / exact
    assert rel <= 1e-4 * 5
    # monotone degree-truncation error up to the last degree
    errs = [abs(s - exact) for s in exp.partial_sums]
    assert all(a >= b - 1e-15 for a, b in zip(errs, errs[1:]))


def test_coulomb_monopole_dominance(sys215):
    exp = coulomb_expand(sys215, (0.0, 0.0, 0.5), (0.0, 0.0, 50.0), 0)
    assert abs(exp.value - 1.0 / 49.5) <= 0.02 / 49.5


def test_coulomb_random_pairs(sys215):
    rng = np.random.default_rng(4)
    from ellharm.harmonics import build_normalization_table
    table = build_normalization_table(sys215, 10)
    for _ in range(5):
        src = rng.uniform(-0.4, 0.4, 3)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        fld = direction * rng.uniform(4.0, 8.0)
        exact = 1.0 / np.linalg.norm(fld - src)
        exp = coulomb_expand(sys215, tuple(src), tuple(fld), 10, table=table)
        assert abs(exp.value - exact) <= 1e-2 * exact


def test_coulomb_reflection_symmetry(sys215):
    table = build_normalization_table(sys215, 6)
    src = (0.2, 0.3, 0.4)
    fld = (1.5, 2.0, 1.0)
    base = coulomb_expand(sys215, src, fld, 6, table=table).value
    for axis in range(3):
        s = list(src)
        f = list(fld)
        s[axis] *= -1
        f[axis] *= -1
        v = coulomb_expand(sys215, tuple(s), tuple(f), 6, table=table).value
        assert v == pytest.approx(base, rel=1e-12)


def test_coulomb_ordering_violation(sys215):
    with pytest.raises(OrderingViolation):
        coulomb_expand(sys215, (0.0, 0.0, 1.5), (0.0, 0.0, 0.5), 2)
