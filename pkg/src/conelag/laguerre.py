"""Laguerre polynomials and functions on the cone.

``L_m^nu(x) = (nu)_m sum_{n} (m, n) psi_n(-x) / (nu)_n`` and
``l_m^nu(x) = e^{-Tr x} L_m^nu(2x)``.  At rank 1 this is ``n!`` times the
classical ``L_n^{nu-1}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DegenerateCoefficient, GammaPole, UnsupportedCone, ZeroDenominator
from .finitediff import FiniteDiffSpec, directional, hessian, matrix_units
from .jordan import ConeStructure, as_matrix, eigenvalues
from .reports import FAIL, PASS, IdentityReport, compare, point_descriptor, skipped
from .spherical import (
    Partition,
    binomial_coeffs,
    c_coeff,
    dim_pm,
    gen_pochhammer,
    gindikin_gamma,
    psi_eigs,
    rising,
    step_coeff,
)


@dataclass(frozen=True)
class LaguerreSpec:
    nu: float
    m: Partition
    cone: ConeStructure

    def __init__(self, nu, m, cone: ConeStructure):
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "m", Partition(m, cone.rank))
        object.__setattr__(self, "cone", cone)

    def above_wallach(self) -> bool:
        return float(np.real(self.nu)) > self.cone.wallach_threshold


def _exact(v) -> bool:
    return isinstance(v, (int, Fraction))


@lru_cache(maxsize=None)
def _laguerre_terms(m: tuple, nu, rank: int, multiplicity: int):
    """``(n, c_n)`` with ``L_m^nu(x) = sum_n c_n psi_n(-x)``."""
    cone = ConeStructure(rank, multiplicity)
    binom = binomial_coeffs(m, cone)
    top = gen_pochhammer(nu, m, cone)
    out = []
    for n, b in binom.items():
        low = gen_pochhammer(nu, n, cone)
        if low == 0:
            raise GammaPole(0, nu)
        out.append((n, top * b / low))
    return tuple(out)


def laguerre_terms(spec: LaguerreSpec):
    nu = spec.nu
    if isinstance(nu, float) and nu.is_integer():
        nu = int(nu)
    return _laguerre_terms(tuple(spec.m), nu, spec.cone.rank, spec.cone.multiplicity)


def _signed_sum(terms, values):
    """Compensated sum of ``c * v`` with real or complex parts summed by ``fsum``."""
    prods = [complex(c) * v for c, v in zip(terms, values)]
    re = math.fsum(p.real for p in prods)
    im = math.fsum(p.imag for p in prods)
    return complex(re, im)


def laguerre_poly_eigs(spec: LaguerreSpec, eigs):
    """``L_m^nu`` at eigenvalue arrays of shape ``(..., r)`` (vectorized)."""
    eigs = np.asarray(eigs)
    total = 0
    for n, c in laguerre_terms(spec):
        sign = -1 if n.weight % 2 else 1
        total = total + (sign * complex(c) if isinstance(c, complex) else sign * float(c)) * psi_eigs(n, eigs, spec.cone)
    return total


def laguerre_poly(spec: LaguerreSpec, x):
    """``L_m^nu(x)``.

    Rational eigenvalues with rational ``nu`` are summed exactly; otherwise
    the alternating sum is accumulated with compensated summation.
    """
    cone = spec.cone
    if isinstance(x, tuple) and all(_exact(v) for v in x) and _exact(spec.nu):
        total = Fraction(0)
        for n, c in laguerre_terms(spec):
            total += c * psi_eigs(n, tuple(-Fraction(v) for v in x), cone)
        return total
    mat = as_matrix(x, cone)
    ev = eigenvalues(mat)
    terms = laguerre_terms(spec)
    vals = [psi_eigs(n, -ev, cone) for n, _ in terms]
    out = _signed_sum([c for _, c in terms], [complex(v) for v in vals])
    if not np.iscomplexobj(mat) or np.allclose(mat, mat.conj().T):
        return out.real
    return out


def laguerre_fn(spec: LaguerreSpec, x):
    """``l_m^nu(x) = e^{-Tr x} L_m^nu(2x)``."""
    mat = as_matrix(x, spec.cone)
    tr = np.trace(mat)
    val = np.exp(-tr) * laguerre_poly(spec, 2 * mat)
    if np.iscomplexobj(val) and np.imag(val) == 0:
        return float(np.real(val))
    return val


def laguerre_fn_batch(spec: LaguerreSpec, pts):
    """``l_m^nu`` over an array of matrices of shape ``(..., r, r)``."""
    pts = np.asarray(pts)
    r = spec.cone.rank
    if r == 1:
        ev = pts.reshape(pts.shape[:-2] + (1,))
    elif np.iscomplexobj(pts) and not _hermitian_batch(pts):
        ev = np.linalg.eigvals(pts)
    else:
        ev = np.linalg.eigvalsh(pts)
    tr = np.sum(ev, axis=-1)
    return np.exp(-tr) * laguerre_poly_eigs(spec, 2 * ev)


def _hermitian_batch(pts):
    return np.allclose(pts, np.conj(np.swapaxes(pts, -1, -2)))


def laguerre_norm_sq(spec: LaguerreSpec, reading: str = "standard"):
    """``||l_m^nu||^2`` in ``L^2(Omega, Delta^(nu-d/r) dx)``.

    ``reading="standard"``: ``Gamma_Omega(nu) (d/r)_m (nu)_m / (2^(r nu) d_m)``;
    this is the value for the Laguerre functions defined above.
    ``reading="alternate"`` divides by ``(nu)_m`` instead of multiplying, which
    matches the functions ``l_m^nu / (nu)_m``.
    """
    cone = spec.cone
    nu, m = spec.nu, spec.m
    r = cone.rank
    base = gindikin_gamma(nu, cone) * float(gen_pochhammer(Fraction(cone.dim, r), m, cone))
    base /= 2.0 ** (r * nu) * float(dim_pm(m, cone))
    poch = float(gen_pochhammer(nu, m, cone))
    if reading == "standard":
        return base * poch
    if reading == "alternate":
        return base / poch
    raise ValueError(f"unknown reading {reading!r}")


# --------------------------------------------------------------------------
# rank-1 classical formulas (exact rational arithmetic)


def classical_sum(n: int, alpha, x):
    """``L_n^alpha(x) = sum_k Gamma(n+alpha+1)/Gamma(k+alpha+1) (-x)^k / (k!(n-k)!)``."""
    alpha, x = Fraction(alpha), Fraction(x)
    total = Fraction(0)
    for k in range(n + 1):
        ratio = rising(k + alpha + 1, n - k)
        total += ratio * (-x) ** k / (math.factorial(k) * math.factorial(n - k))
    return total


def classical_rodrigues(n: int, alpha, x):
    """``e^x x^-alpha / n! d^n/dx^n (e^-x x^(n+alpha))`` by the Leibniz rule."""
    alpha, x = Fraction(alpha), Fraction(x)
    total = Fraction(0)
    for k in range(n + 1):
        # k derivatives on the power, n-k on the exponential
        falling = Fraction(1)
        for i in range(k):
            falling *= n + alpha - i
        total += math.comb(n, k) * (-1) ** (n - k) * falling * x ** (n - k)
    return total / math.factorial(n)


def classical_generating(nmax: int, alpha, x) -> list:
    """Taylor coefficients of ``(1-w)^(-alpha-1) exp(x w/(w-1))`` up to ``w^nmax``."""
    alpha, x = Fraction(alpha), Fraction(x)
    # exponent series: x w / (w - 1) = -x (w + w^2 + ...)
    a = [Fraction(0)] + [-x] * nmax
    # b = exp(a): n b_n = sum_k k a_k b_{n-k}
    b = [Fraction(1)] + [Fraction(0)] * nmax
    for n in range(1, nmax + 1):
        b[n] = sum(k * a[k] * b[n - k] for k in range(1, n + 1)) / n
    binom = [rising(alpha + 1, k) / math.factorial(k) for k in range(nmax + 1)]
    return [sum(binom[k] * b[n - k] for k in range(n + 1)) for n in range(nmax + 1)]



def _char_eigs(pts: np.ndarray) -> np.ndarray:
    """Eigenvalues of arbitrary (complex) matrices, from the characteristic polynomial when ``r = 2``.

    Symmetric functions of these roots are even in the square root of the
    discriminant, so near-degenerate spectra cost no accuracy.
    """
    r = pts.shape[-1]
    if r == 1:
        return pts[..., 0, :]
    if r == 2:
        e1 = pts[..., 0, 0] + pts[..., 1, 1]
        e2 = pts[..., 0, 0] * pts[..., 1, 1] - pts[..., 0, 1] * pts[..., 1, 0]
        disc = np.sqrt(np.asarray(e1 * e1 - 4 * e2, dtype=complex))
        return np.stack([(e1 + disc) / 2, (e1 - disc) / 2], axis=-1)
    return np.linalg.eigvals(pts)


def laguerre_fn_matrix(spec: LaguerreSpec, pts):
    """``l_m^nu`` continued holomorphically to arbitrary complex matrices ``(..., r, r)``.

    Used by the finite-difference checks, which perturb along non-Hermitian
    directions.
    """
    pts = np.asarray(pts)
    ev = _char_eigs(pts)
    out = np.exp(-np.sum(ev, axis=-1)) * laguerre_poly_eigs(spec, 2 * ev)
    if not np.iscomplexobj(pts):
        out = np.real(out)
    return out


# --------------------------------------------------------------------------
# identity checks


def _partition_or_none(m: Partition, k: int, step: int):
    return m.shifted(k - 1, step)


def _rhs_recurrence(spec: LaguerreSpec, reading: str):
    """Terms ``(coefficient, partition)`` of the right side, or raise ``DegenerateCoefficient``."""
    cone, m, nu = spec.cone, spec.m, spec.nu
    h = Fraction(cone.multiplicity, 2)
    terms = []
    sign = 1 if reading == "alternate" else -1
    c_reading = "direct" if reading == "alternate" else "reflected"
    for j in range(1, cone.rank + 1):
        low = _partition_or_none(m, j, -1)
        if low is not None:
            coef = step_coeff(m, j, cone) * (m[j - 1] - 1 + _as_exact(nu) - h * (j - 1))
            terms.append((coef, low))
        up = _partition_or_none(m, j, 1)
        if up is not None:
            try:
                cj = c_coeff(m, j, cone, c_reading)
            except ZeroDenominator as exc:
                raise DegenerateCoefficient(f"c_{tuple(m)}({j}) has a zero denominator") from exc
            terms.append((sign * cj, up))
    return terms


def _as_exact(nu):
    # binary floats convert to Fraction exactly
    return Fraction(nu) if isinstance(nu, float) else nu


def _combine(spec: LaguerreSpec, terms, x):
    vals = [complex(c) * complex(laguerre_fn_matrix(LaguerreSpec(spec.nu, n, spec.cone), x)) for c, n in terms]
    return sum(vals, 0j), sum(abs(v) for v in vals)


def euler(spec: LaguerreSpec, x, fd: FiniteDiffSpec):
    """``E l(x) = d/dt l(e^t x)`` at ``t = 0``, i.e. the derivative along ``x`` itself."""
    x = as_matrix(x, spec.cone)
    return complex(directional(lambda p: laguerre_fn_matrix(spec, p), x, x, fd.scaled(x) / (1 + np.linalg.norm(x))))


RECURRENCE_TOL = 1e-6


def check_euler_recurrence(spec: LaguerreSpec, x, fd: FiniteDiffSpec | None = None,
                              reading: str = "standard", tol: float = RECURRENCE_TOL):
    """Three-term recurrence in the Euler operator, plus the eigenvalue relation.

    ``reading="standard"``:
    ``-(r nu + 2E) l_m = sum_j (m; m-e_j)(m_j - 1 + nu - (a/2)(j-1)) l_{m-e_j} - sum_j c_m(j) l_{m+e_j}``
    with the raising coefficients of :func:`c_coeff` ``reading="reflected"``.
    ``reading="alternate"`` uses ``+`` on the raising sum and the direct ``c``.

    Returns ``(three_term, eigenvalue)``; the second is only evaluated at
    rank 1, where ``pi_nu(zeta)`` is ``-(t D^2 + nu D - t)``.
    """
    fd = fd or FiniteDiffSpec()
    cone = spec.cone
    x = as_matrix(x, cone)
    name = f"euler-recurrence[{reading}]"
    point = {**point_descriptor(x), "m": list(spec.m), "nu": float(spec.nu), "rank": cone.rank, "a": cone.multiplicity}
    lhs = -(cone.rank * spec.nu) * complex(laguerre_fn_matrix(spec, x)) - 2 * euler(spec, x, fd)
    try:
        terms = _rhs_recurrence(spec, reading)
    except DegenerateCoefficient as exc:
        first = skipped(name, point, str(exc), tol)
    else:
        rhs, scale = _combine(spec, terms, x)
        first = compare(name, point, lhs, rhs, tol, scale)
    if cone.rank == 1:
        second = check_classical_relations(spec.nu, spec.m[0], float(np.real(x[0, 0])), fd, tol)[0]
        second = replace(second, identity="euler-eigenvalue")
    else:
        second = skipped("euler-eigenvalue", point, "group-side operator is only realized at rank 1", tol)
    return first, second


def _diffop_parts(spec: LaguerreSpec, x, fd: FiniteDiffSpec):
    """``f``, ``tr(grad) f``, ``tr(s grad) f`` and ``tr(s grad grad) f`` at ``x``.

    ``grad_{ab} = d / d s_{ba}``, taken along the complex matrix units.
    """
    r = spec.cone.rank
    units = matrix_units(r)
    keys = list(units)
    dirs = [units[k] for k in keys]
    f = lambda p: laguerre_fn_matrix(spec, p)
    xc = x.astype(complex)
    h1, h2 = fd.scaled(x), fd.scaled(x, second=True)
    grad = {k: complex(directional(f, xc, units[k], h1)) for k in keys}
    hess = hessian(f, xc, dirs, h2)
    idx = {k: i for i, k in enumerate(keys)}
    val = complex(f(xc))
    tr_grad = sum(grad[(a, a)] for a in range(r))
    tr_sgrad = sum(x[a, b] * grad[(a, b)] for a in range(r) for b in range(r))
    # (s grad grad)_{aa} = s_ab grad_bc grad_ca = s_ab d_{cb} d_{ac}
    tr_sgg = sum(x[a, b] * hess[idx[(c, b)], idx[(a, c)]] for a in range(r) for b in range(r) for c in range(r))
    return val, tr_grad, tr_sgrad, tr_sgg


DIFFOP_TOL = 1e-5


def check_hermitian_diffops(spec: LaguerreSpec, x, fd: FiniteDiffSpec | None = None,
                            reading: str = "standard", tol: float = DIFFOP_TOL):
    """The three second-order operators on the Hermitian cone.

    With ``T = tr(s grad grad)``, ``G = tr(grad)``, ``S = tr(s grad)`` and
    ``t = Tr s``:

    1. ``-T - nu G + t``  acting as the eigenvalue ``r nu + 2|m|``
    2. ``(T + nu G + 2S + r nu + t) / 2`` lowering with ``-(m; m-e_j)(m_j-1+nu-(a/2)(j-1))``
    3. ``(-T - nu G + 2S + r nu - t) / 2`` raising with ``c_m(j)``

    ``reading="alternate"`` uses eigenvalue ``r nu + |m|``, no sign on the
    lowering side and the direct ``c``.
    """
    fd = fd or FiniteDiffSpec()
    cone = spec.cone
    if cone.multiplicity != 2 and cone.rank > 1:
        raise UnsupportedCone("the differential operators are stated for the Hermitian cone (multiplicity 2)")
    x = as_matrix(x, cone)
    nu, m, r = spec.nu, spec.m, cone.rank
    point = {**point_descriptor(x), "m": list(m), "nu": float(nu), "rank": r, "a": cone.multiplicity}
    val, G, S, T = _diffop_parts(spec, x, fd)
    t = complex(np.trace(x))
    ops = {
        "laguerre-operator": -T - nu * G + t * val,
        "lowering-operator": 0.5 * (T + nu * G + 2 * S + r * nu * val + t * val),
        "raising-operator": 0.5 * (-T - nu * G + 2 * S + r * nu * val - t * val),
    }
    op_scale = 0.5 * (abs(T) + abs(nu * G) + 2 * abs(S) + abs(r * nu * val) + abs(t * val))
    eig = r * nu + (2 if reading == "standard" else 1) * m.weight
    out = []
    name = lambda s: f"{s}[{reading}]"
    out.append(compare(name("laguerre-operator"), point, ops["laguerre-operator"], eig * val, tol,
                       abs(T) + abs(nu * G) + abs(t * val)))
    h = Fraction(cone.multiplicity, 2)
    low_terms = []
    for j in range(1, r + 1):
        low = m.shifted(j - 1, -1)
        if low is not None:
            coef = step_coeff(m, j, cone) * (m[j - 1] - 1 + _as_exact(nu) - h * (j - 1))
            low_terms.append((-coef if reading == "standard" else coef, low))
    rhs, scale = _combine(spec, low_terms, x)
    out.append(compare(name("lowering-operator"), point, ops["lowering-operator"], rhs, tol, max(scale, op_scale)))
    try:
        up_terms = []
        for j in range(1, r + 1):
            up = m.shifted(j - 1, 1)
            if up is not None:
                try:
                    cj = c_coeff(m, j, cone, "reflected" if reading == "standard" else "direct")
                except ZeroDenominator as exc:
                    raise DegenerateCoefficient(f"c_{tuple(m)}({j}) has a zero denominator") from exc
                up_terms.append((cj, up))
    except DegenerateCoefficient as exc:
        out.append(skipped(name("raising-operator"), point, str(exc), tol))
    else:
        rhs, scale = _combine(spec, up_terms, x)
        out.append(compare(name("raising-operator"), point, ops["raising-operator"], rhs, tol, max(scale, op_scale)))
    return tuple(out)


CLASSICAL_TOL = 1e-7


def classical_fn(nu, n: int, t):
    """Classical Laguerre function ``e^{-t} L_n^{nu-1}(2t)`` (vectorized in ``t``)."""
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for k in range(n + 1):
        coef = float(rising(k + nu, n - k)) / (math.factorial(k) * math.factorial(n - k))
        total = total + coef * (-2 * t) ** k
    return np.exp(-t) * total


def check_classical_relations(nu, n: int, t: float, fd: FiniteDiffSpec | None = None, tol: float = CLASSICAL_TOL):
    """The three rank-1 relations for ``e^{-t} L_n^{nu-1}(2t)`` by finite differences."""
    fd = fd or FiniteDiffSpec()
    h = fd.scaled(t, second=True)
    st = np.arange(-3, 4) * h
    v = classical_fn(nu, n, t + st)
    # sixth-order stencils for the first and second derivative
    d1 = (-v[0] + 9 * v[1] - 45 * v[2] + 45 * v[4] - 9 * v[5] + v[6]) / (60 * h)
    d2 = (2 * v[0] - 27 * v[1] + 270 * v[2] - 490 * v[3] + 270 * v[4] - 27 * v[5] + 2 * v[6]) / (180 * h * h)
    f = v[3]
    lo = classical_fn(nu, n - 1, t) if n > 0 else 0.0
    hi = classical_fn(nu, n + 1, t)
    point = {"t": t, "n": n, "nu": float(nu)}
    rows = [
        ("classical-laguerre", t * d2 + nu * d1 - t * f, -(2 * n + nu) * f, abs(t * d2) + abs(nu * d1) + abs(t * f)),
        ("classical-lowering", t * d2 + (2 * t + nu) * d1 + (t + nu) * f, -2 * (n + nu - 1) * lo,
         abs(t * d2) + abs((2 * t + nu) * d1) + abs((t + nu) * f)),
        ("classical-raising", t * d2 - (2 * t - nu) * d1 + (t - nu) * f, -2 * (n + 1) * hi,
         abs(t * d2) + abs((2 * t - nu) * d1) + abs((t - nu) * f)),
    ]
    return tuple(compare(name, point, float(l), float(r_), tol, float(s)) for name, l, r_, s in rows)


# --------------------------------------------------------------------------
# rank-1 reductions in exact arithmetic
#
# l_n(t) = e^{-t} P_n(t) with P_n(t) = L_n^nu(2t); D(e^{-t} P) = e^{-t}(P' - P).


def _padd(*polys):
    size = max(len(p) for p in polys)
    return [sum((p[i] if i < len(p) else 0) for p in polys) for i in range(size)]


def _pscale(c, p):
    return [c * v for v in p]


def _pshift(p):
    # multiply by t
    return [Fraction(0)] + list(p)


def _pderiv(p):
    return [i * p[i] for i in range(1, len(p))] or [Fraction(0)]


def _pd(p):
    """Polynomial part of ``D (e^{-t} p)``."""
    return _padd(_pderiv(p), _pscale(-1, p))


def rank1_poly(nu, n: int) -> list:
    """Exact coefficients of ``P_n(t) = L_n^nu(2t)`` (ascending), rank 1."""
    if n < 0:
        return [Fraction(0)]
    out = [Fraction(0)] * (n + 1)
    for part, c in laguerre_terms(LaguerreSpec(_as_exact(nu), (n,), ConeStructure(1))):
        k = part[0]
        out[k] += Fraction(c) * (-2) ** k
    return out


def _exact_report(name, point, residual_poly):
    size = max((abs(v) for v in residual_poly), default=Fraction(0))
    status = PASS if size == 0 else FAIL
    return IdentityReport(name, point, float(size), 0.0, float(size), float(size), 0.0, status,
                          "exact polynomial residual")


def check_recurrence_rank1_exact(nu, n: int, reading: str = "standard"):
    """The three-term recurrence and the classical list at rank 1 as exact polynomial identities.

    The recurrence's coefficients come from the general rank-``r`` code
    path specialized to ``r = 1``.  Returns four reports: the recurrence,
    then classical relations (1)-(3) for ``l^cl_n = l_n / n!``.
    """
    cone = ConeStructure(1)
    nu = _as_exact(nu)
    spec = LaguerreSpec(nu, (n,), cone)
    point = {"n": n, "nu": str(nu), "reading": reading}
    P = rank1_poly(nu, n)
    # -(nu P + 2 t (P' - P))
    lhs = _padd(_pscale(-nu, P), _pscale(-2, _pshift(_pd(P))))
    try:
        terms = _rhs_recurrence(spec, reading)
    except DegenerateCoefficient as exc:
        rec = skipped(f"euler-recurrence-rank1[{reading}]", point, str(exc))
    else:
        rhs = _padd([Fraction(0)], *[_pscale(Fraction(c), rank1_poly(nu, m[0])) for c, m in terms])
        rec = _exact_report(f"euler-recurrence-rank1[{reading}]", point, _padd(lhs, _pscale(-1, rhs)))
    # classical normalization: P^cl_n = P_n / n!
    cl = lambda k: _pscale(Fraction(1, math.factorial(k)), rank1_poly(nu, k)) if k >= 0 else [Fraction(0)]
    p = cl(n)
    d1, d2 = _pd(p), _pd(_pd(p))
    t = lambda q: _pshift(q)
    rel1 = _padd(t(d2), _pscale(nu, d1), _pscale(-1, t(p)), _pscale(2 * n + nu, p))
    rel2 = _padd(t(d2), _pscale(2, t(d1)), _pscale(nu, d1), t(p), _pscale(nu, p),
                 _pscale(2 * (n + nu - 1), cl(n - 1)))
    rel3 = _padd(t(d2), _pscale(-2, t(d1)), _pscale(nu, d1), t(p), _pscale(-nu, p),
                 _pscale(2 * (n + 1), cl(n + 1)))
    return (rec,
            _exact_report("classical-laguerre-exact", point, rel1),
            _exact_report("classical-lowering-exact", point, rel2),
            _exact_report("classical-raising-exact", point, rel3))
