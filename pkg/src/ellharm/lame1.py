"""First-kind Lame functions E_n^p.

Each solution of the Lame equation

    (s^2 - h^2)(s^2 - k^2) E'' + s (2 s^2 - h^2 - k^2) E' + (p - n(n+1) s^2) E = 0

used here factors as E(s) = psi(s) * P(t) with t = 1 - s^2/h^2, where psi is
one of four radical prefactors labelling the solution class:

    K: s^(n mod 2)                      (r + 1 solutions, r = n // 2)
    L: s^(1 - n mod 2) * sqrt(s^2-h^2)  (n - r solutions)
    M: s^(1 - n mod 2) * sqrt(s^2-k^2)  (n - r solutions)
    N: s^(n mod 2) * sqrt(s^2-h^2) * sqrt(s^2-k^2)   (r solutions)

and P is a polynomial whose coefficients solve a tridiagonal eigenproblem;
the eigenvalue is the separation constant.  The global order p = 1..2n+1
enumerates classes K, L, M, N in that order, with ascending separation
constants inside each class.

Square-root factors are evaluated with explicit signs: each takes the sign
of the argument times a supplied octant sign (s_mu for the h-root, s_nu for
the k-root), so the same function object serves for the lambda, mu and nu
coordinate roles.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .coords import EllipsoidSystem
from .errors import BranchPointDerivative, OrderOutOfRange
from .numerics import TridiagonalSpec, solve_tridiagonal

__all__ = [
    "LameClass",
    "LameFunction",
    "class_of",
    "class_dim",
    "build_tridiagonal",
    "lame_function",
    "eval_lame",
    "eval_lame_derivative",
    "eval_lame_second_derivative",
    "lame_residual",
    "N_MAX_DEFAULT",
]

N_MAX_DEFAULT = 12

_TAGS = "KLMN"


@dataclass(frozen=True)
class LameClass:
    tag: str          # one of K, L, M, N
    n: int            # degree
    p_local: int      # 0-based index within the class

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise OrderOutOfRange(f"unknown class tag {self.tag!r}")
        if not (0 <= self.p_local < class_dim(self.tag, self.n)):
            raise OrderOutOfRange(
                f"p_local={self.p_local} out of range for class {self.tag}, n={self.n}")


def class_dim(tag: str, n: int) -> int:
    """Number of solutions of degree n in the given class."""
    r = n // 2
    return {"K": r + 1, "L": n - r, "M": n - r, "N": r}[tag]


def class_of(n: int, p: int) -> LameClass:
    """Map the global order p in 1..2n+1 to (class, local index)."""
    if n < 0 or not (1 <= p <= 2 * n + 1):
        raise OrderOutOfRange(f"order p={p} invalid for degree n={n}")
    q = p - 1
    for tag in _TAGS:
        cnt = class_dim(tag, n)
        if q < cnt:
            return LameClass(tag=tag, n=n, p_local=q)
        q -= cnt
    raise OrderOutOfRange(f"order p={p} invalid for degree n={n}")  # unreachable


def psi_exponents(tag: str, n: int):
    """Exponents (e_s, e_h, e_k) of the radical prefactor psi."""
    odd = n % 2
    if tag == "K":
        return odd, 0, 0
    if tag == "L":
        return 1 - odd, 1, 0
    if tag == "M":
        return 1 - odd, 0, 1
    return odd, 1, 1


def build_tridiagonal(sys: EllipsoidSystem, cls: LameClass) -> TridiagonalSpec:
    """Tridiagonal matrix whose eigenvalues are the admissible separation
    constants of degree ``cls.n`` in class ``cls.tag``.

    Acting on the basis psi * t^j, the Lame operator maps basis element j to
    A_j t^(j-1) + B_j t^j + C_j t^(j+1); the matrix below is the negative of
    that operator's matrix so its eigenvalues are the separation constants
    directly.  The entries follow from substituting psi * t^j into the Lame
    equation and collecting powers of t.
    """
    h2, k2 = sys.h2, sys.k2
    n = cls.n
    tag = cls.tag
    odd = n % 2
    m = class_dim(tag, n)
    e_s, e_h, e_k = psi_exponents(tag, n)
    sigma = e_s + e_h + e_k
    q = n * (n + 1)

    def B(j):
        if tag == "K":
            if odd == 0:
                return 8 * h2 * j * j - h2 * q - 4 * j * j * k2
            return (8 * h2 * j * j + 4 * h2 * j - h2 * q + h2
                    - 4 * j * j * k2 - 4 * j * k2 - k2)
        if tag == "L":
            if odd == 0:
                return (8 * h2 * j * j + 12 * h2 * j - h2 * q + 5 * h2
                        - 4 * j * j * k2 - 8 * j * k2 - 4 * k2)
            return (8 * h2 * j * j + 8 * h2 * j - h2 * q + 2 * h2
                    - 4 * j * j * k2 - 4 * j * k2 - k2)
        if tag == "M":
            if odd == 0:
                return (8 * h2 * j * j + 8 * h2 * j - h2 * q + 2 * h2
                        - 4 * j * j * k2 - 4 * j * k2 - k2)
            return 8 * h2 * j * j + 4 * h2 * j - h2 * q + h2 - 4 * j * j * k2
        if odd == 0:
            return (8 * h2 * j * j + 12 * h2 * j - h2 * q + 5 * h2
                    - 4 * j * j * k2 - 4 * j * k2 - k2)
        return (8 * h2 * j * j + 16 * h2 * j - h2 * q + 8 * h2
                - 4 * j * j * k2 - 8 * j * k2 - 4 * k2)

    def A(j):
        if tag in ("K", "M"):
            return 2 * j * (2 * j - 1) * (k2 - h2)
        return 2 * j * (2 * j + 1) * (k2 - h2)

    def C(j):
        return h2 * (q - (2 * j + sigma) * (2 * j + sigma + 1))

    diag = np.array([-B(i) for i in range(m)], dtype=float)
    upper = np.array([-A(i + 1) for i in range(m - 1)], dtype=float)
    lower = np.array([-C(i) for i in range(m - 1)], dtype=float)
    return TridiagonalSpec(diag=diag, lower=lower, upper=upper)


@dataclass(frozen=True)
class LameFunction:
    system: EllipsoidSystem
    cls: LameClass
    coeffs: np.ndarray          # b_j of P(t) = sum b_j t^j
    separation_constant: float

    @property
    def n(self) -> int:
        return self.cls.n


_memo: dict = {}
_memo_lock = threading.Lock()


def lame_function(sys: EllipsoidSystem, n: int, p: int,
                  n_max: int = N_MAX_DEFAULT) -> LameFunction:
    """Construct (or fetch from the per-system memo) the function E_n^p."""
    if n > n_max:
        raise OrderOutOfRange(f"degree n={n} exceeds configured maximum {n_max}")
    key = (sys.key(), n, p)
    f = _memo.get(key)
    if f is not None:
        return f
    cls = class_of(n, p)
    spec = build_tridiagonal(sys, cls)
    pairs = solve_tridiagonal(spec)
    m = spec.dim
    pconst = float(pairs.values[cls.p_local])
    b = pairs.vectors[:, cls.p_local].copy()
    # normalize so the coefficient of s^n in psi * P equals 1: the top basis
    # element contributes b_{m-1} * (-1/h^2)^{m-1} * s^{2(m-1)} * psi
    b *= (-sys.h2) ** (m - 1) / b[m - 1]
    f = LameFunction(system=sys, cls=cls, coeffs=b, separation_constant=pconst)
    with _memo_lock:
        _memo[key] = f
    return f


def _psi_factors(f: LameFunction, s, s_mu_sign, s_nu_sign, need_deriv):
    """Per-factor (value, d/ds, d2/ds2) triples of the radical prefactor."""
    sys = f.system
    e_s, e_h, e_k = psi_exponents(f.cls.tag, f.n)
    sgn = np.where(s >= 0, 1.0, -1.0)
    factors = []
    if e_s:
        factors.append((s, np.ones_like(s), np.zeros_like(s)))
    for present, semifocal2, octant_sign in (
            (e_h, sys.h2, s_mu_sign), (e_k, sys.k2, s_nu_sign)):
        if not present:
            continue
        w = s * s - semifocal2
        v = sgn * octant_sign * np.sqrt(np.abs(w))
        if need_deriv:
            if np.any(v == 0):
                raise BranchPointDerivative(
                    "derivative unbounded at a branch point |s| = h or k")
            dv = s * np.sign(w) / v
            ddv = -semifocal2 / v ** 3
        else:
            dv = ddv = None
        factors.append((v, dv, ddv))
    return factors


def _eval(f: LameFunction, s, s_mu_sign, s_nu_sign, nderiv):
    s_arr = np.asarray(s, dtype=float)
    scalar = s_arr.ndim == 0
    s_arr = np.atleast_1d(s_arr)
    sys = f.system
    b = f.coeffs
    t = 1.0 - s_arr * s_arr / sys.h2
    pv = np.polynomial.polynomial
    P = pv.polyval(t, b)
    factors = _psi_factors(f, s_arr, s_mu_sign, s_nu_sign, nderiv > 0)
    vals = [fac[0] for fac in factors]
    psi = np.ones_like(s_arr)
    for v in vals:
        psi = psi * v
    out = [psi * P]
    if nderiv >= 1:
        tp = -2.0 * s_arr / sys.h2
        db = pv.polyder(b)
        Pt = pv.polyval(t, db)
        dpsi = np.zeros_like(s_arr)
        for i, (_, dv, _) in enumerate(factors):
            rest = np.ones_like(s_arr)
            for j, v in enumerate(vals):
                if j != i:
                    rest = rest * v
            dpsi += dv * rest
        out.append(dpsi * P + psi * Pt * tp)
        if nderiv >= 2:
            tpp = -2.0 / sys.h2
            Ptt = pv.polyval(t, pv.polyder(db))
            ddpsi = np.zeros_like(s_arr)
            for i, (_, _, ddv) in enumerate(factors):
                rest = np.ones_like(s_arr)
                for j, v in enumerate(vals):
                    if j != i:
                        rest = rest * v
                ddpsi += ddv * rest
            for i in range(len(factors)):
                for j in range(i + 1, len(factors)):
                    rest = np.ones_like(s_arr)
                    for l, v in enumerate(vals):
                        if l != i and l != j:
                            rest = rest * v
                    ddpsi += 2.0 * factors[i][1] * factors[j][1] * rest
            out.append(ddpsi * P + 2.0 * dpsi * Pt * tp
                       + psi * (Ptt * tp * tp + Pt * tpp))
    if scalar:
        out = [float(v[0]) for v in out]
    return out[0] if nderiv == 0 else tuple(out)


def eval_lame(f: LameFunction, s, s_mu_sign: int = 1, s_nu_sign: int = 1):
    """Evaluate E(s) = psi(s) P(t(s)) with octant-signed radical factors."""
    return _eval(f, s, s_mu_sign, s_nu_sign, 0)


def eval_lame_derivative(f: LameFunction, s, s_mu_sign: int = 1, s_nu_sign: int = 1):
    """(E(s), E'(s)) by the product rule on psi * P."""
    return _eval(f, s, s_mu_sign, s_nu_sign, 1)


def eval_lame_second_derivative(f: LameFunction, s, s_mu_sign: int = 1,
                                s_nu_sign: int = 1):
    """(E, E', E'') with fully analytic derivatives."""
    return _eval(f, s, s_mu_sign, s_nu_sign, 2)


def lame_residual(f: LameFunction, s):
    """Relative residual of the Lame equation at sample points s.

    Returns max |L[E](s)| / scale where scale is the largest term magnitude,
    using analytic first and second derivatives.
    """
    sys = f.system
    s = np.asarray(s, dtype=float)
    E, dE, ddE = eval_lame_second_derivative(f, s)
    h2, k2 = sys.h2, sys.k2
    n = f.n
    t1 = (s * s - h2) * (s * s - k2) * ddE
    t2 = s * (2 * s * s - h2 - k2) * dE
    t3 = (f.separation_constant - n * (n + 1) * s * s) * E
    res = t1 + t2 + t3
    scale = np.max(np.abs(np.stack([t1, t2, t3])))
    return float(np.max(np.abs(res)) / max(scale, 1e-300))
