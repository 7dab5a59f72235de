"""Meixner-Pollaczek polynomials on the cone.

At rank 1 ``p_{nu,n}`` is the ``x^n`` Taylor coefficient of
``(1 - x^2)^(-nu/2) ((1 + x)/(1 - x))^(i lambda)``, built exactly over the
Gaussian rationals.  In general ``p_{nu,m}(lambda)`` is the coefficient of
``psi_m`` in ``Delta(e - x^2)^(-nu/2) phi_lambda(x)``; it is extracted
numerically from samples on a torus of complex diagonal points.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy
from sympy import QQ_I, Poly

from .errors import DegenerateCoefficient, SingularCayley, TruncationWarning, ZeroDenominator
from .jordan import ConeStructure, as_matrix, cayley
from .quadrature import QuadratureSpec
from .reports import FAIL, PASS, IdentityReport, compare, skipped
from .spherical import (
    Partition,
    _psi_terms,
    c_coeff,
    orbit_power_average,
    partitions_of,
    partitions_up_to,
    spherical_poly_complex,
    step_coeff,
)

_LAM = sympy.Symbol("lam")


# --------------------------------------------------------------------------
# rank 1, exact


def _rat(v):
    v = Fraction(v)
    return sympy.Rational(v.numerator, v.denominator)


@dataclass(frozen=True)
class MPPolynomial:
    """Exact polynomial in ``lambda`` with Gaussian-rational coefficients (rank 1)."""

    nu: Fraction
    n: int
    poly: Poly

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=complex)
        out = np.zeros_like(lam)
        for c in self.coefficients_complex()[::-1]:
            out = out * lam + c
        return out if out.ndim else complex(out)

    def coefficients(self) -> list[tuple[Fraction, Fraction]]:
        """Ascending coefficients as ``(real, imag)`` rational pairs."""
        out = []
        for c in reversed(self.poly.all_coeffs()):
            re, im = sympy.re(c), sympy.im(c)
            out.append((Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q))))
        return out

    def coefficients_complex(self) -> list[complex]:
        return [complex(float(re), float(im)) for re, im in self.coefficients()]

    @property
    def degree(self) -> int:
        return self.poly.degree()

    def to_json(self) -> str:
        return json.dumps({
            "nu": str(self.nu),
            "n": self.n,
            "coefficients": [{"re": str(re), "im": str(im)} for re, im in self.coefficients()],
        })

    @classmethod
    def from_json(cls, text: str) -> "MPPolynomial":
        doc = json.loads(text)
        coeffs = [_rat(Fraction(c["re"])) + sympy.I * _rat(Fraction(c["im"])) for c in doc["coefficients"]]
        poly = Poly(list(reversed(coeffs)) or [0], _LAM, domain=QQ_I)
        return cls(Fraction(doc["nu"]), int(doc["n"]), poly)


def _binom_series(u: Poly, kmax: int) -> list[Poly]:
    """``binom(u, k)`` for ``k = 0..kmax`` as polynomials in ``lambda``."""
    out = [Poly(1, _LAM, domain=QQ_I)]
    for k in range(1, kmax + 1):
        out.append(out[-1] * (u - (k - 1)) * sympy.Rational(1, k))
    return out


@lru_cache(maxsize=None)
def _mp_rank1_table(nu: Fraction, nmax: int) -> tuple:
    half = _rat(nu) / 2
    up = Poly(sympy.I * _LAM - half, _LAM, domain=QQ_I)  # exponent of 1 + x
    down = Poly(-sympy.I * _LAM - half, _LAM, domain=QQ_I)  # exponent of 1 - x
    bu, bd = _binom_series(up, nmax), _binom_series(down, nmax)
    out = []
    for n in range(nmax + 1):
        acc = Poly(0, _LAM, domain=QQ_I)
        for k in range(n + 1):
            term = bu[k] * bd[n - k]
            acc = acc + (term if (n - k) % 2 == 0 else -term)
        out.append(acc)
    return tuple(out)


def mp_rank1(nu, n: int) -> MPPolynomial:
    """Exact ``p_{nu,n}`` from the product of the two binomial series."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    nu = Fraction(nu)
    return MPPolynomial(nu, n, _mp_rank1_table(nu, n)[n])


def check_mp_rank1_relations(nu, n: int):
    """Three-term recurrence and difference relation as exact polynomial identities.

    Returns two reports whose residual is the largest coefficient of the
    difference polynomial (zero means the identity holds exactly).
    """
    nu = Fraction(nu)
    table = _mp_rank1_table(nu, n + 1)
    p = lambda k: table[k] if k >= 0 else Poly(0, _LAM, domain=QQ_I)
    lam = Poly(_LAM, _LAM, domain=QQ_I)
    I = sympy.I
    nus = _rat(nu)
    rec = 2 * I * lam * p(n) - ((n + 1) * p(n + 1) - (nus + n - 1) * p(n - 1))
    diff = -(nus + 2 * n) * p(n) - ((-nus / 2 + I * lam) * p(n).shift(I) - (nus / 2 + I * lam) * p(n).shift(-I))
    point = {"nu": str(nu), "n": n}
    out = []
    for name, res in (("mp-three-term", rec), ("mp-difference", diff)):
        size = max((abs(complex(c)) for c in res.all_coeffs()), default=0.0)
        status = PASS if res.is_zero else FAIL
        out.append(IdentityReport(name, point, size, 0.0, size, size, 0.0, status, "exact polynomial residual"))
    return tuple(out)


# --------------------------------------------------------------------------
# spherical functions and the general extraction


@dataclass(frozen=True)
class RhoVector:
    """``rho_j = sign (a/4)(r + 1 - 2j)``.

    The default ``sign = -1`` gives ``(a/4)(2j - r - 1)``, the choice for
    which ``phi_lambda`` is invariant under permutations of ``lambda`` with
    leading principal minors.  Both difference relations hold for either sign.
    """

    rank: int
    multiplicity: int = 1
    sign: int = -1

    @property
    def rho(self) -> np.ndarray:
        j = np.arange(1, self.rank + 1)
        return self.sign * (self.multiplicity / 4) * (self.rank + 1 - 2 * j)

    @classmethod
    def for_cone(cls, cone: ConeStructure, sign: int = -1) -> "RhoVector":
        if sign not in (1, -1):
            raise ValueError("rho sign must be +1 or -1")
        return cls(cone.rank, cone.multiplicity, sign)


def _index(lam, rho: RhoVector):
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    return 1j * lam + rho.rho


def phi_lambda(lam, x, rho: RhoVector, quad: QuadratureSpec | None = None) -> complex:
    """``psi_{i lambda + rho}`` at the Cayley image of ``x``."""
    quad = quad or QuadratureSpec()
    cone = ConeStructure(rho.rank, rho.multiplicity)
    mat = as_matrix(x, cone)
    if cone.rank > 1:
        e = np.eye(cone.rank)
        if np.min(np.linalg.eigvalsh(e - 0.5 * (mat @ mat + (mat @ mat).conj().T))) <= 0 and np.isrealobj(mat):
            raise SingularCayley("x is outside the real disk (e - x^2 not positive definite)")
    return spherical_poly_complex(_index(lam, rho), cayley(mat), cone, quad)


@dataclass(frozen=True)
class ExtractionSpec:
    """Torus radius and grid size for reading off expansion coefficients.

    Samples sit at ``x = diag(R e^{i t_1}, ..., R e^{i t_r})``; the torus must
    keep Cayley images of the orbit in the right half-plane, which holds for
    ``R < tan(pi/8)`` at rank 2.
    """

    radius: float = 0.35
    grid: int = 32
    drift_tol: float = 1e-6


def _generating_samples(nu, lam, rho: RhoVector, quad: QuadratureSpec, ext: ExtractionSpec, grid: int):
    r = rho.rank
    cone = ConeStructure(r, rho.multiplicity)
    z = ext.radius * np.exp(2j * np.pi * np.arange(grid) / grid)
    c = (1 + z) / (1 - z)
    pref = (1 - z * z) ** (-nu / 2)
    alpha = _index(lam, rho)
    if r == 1:
        return pref * np.exp(alpha[0] * np.log(c))
    d = np.zeros((grid, grid, 2, 2), dtype=complex)
    d[..., 0, 0] = c[:, None]
    d[..., 1, 1] = c[None, :]
    psi = orbit_power_average(alpha, d, cone, quad)
    return pref[:, None] * pref[None, :] * psi


def _monomial_coeffs(samples: np.ndarray, radius: float):
    grid = samples.shape[0]
    if samples.ndim == 1:
        a = np.fft.fft(samples) / grid
        return a / radius ** np.arange(grid)
    a = np.fft.fft2(samples) / grid**2
    k = np.arange(grid)
    a = a / radius ** np.add.outer(k, k)
    return 0.5 * (a + a.T)


def _psi_basis_coeffs(mono, rank: int, multiplicity: int, top: int) -> dict:
    """Convert monomial coefficients to ``psi_m`` coefficients for ``|m| <= top``."""
    if rank == 1:
        return {Partition((k,)): complex(mono[k]) for k in range(top + 1)}
    out = {}
    for k in range(top + 1):
        parts = partitions_of(k, rank)  # lexicographically decreasing
        solved = {}
        for m in parts:
            target = complex(mono[m[0], m[1]])
            for big, val in solved.items():
                coef = _psi_monomial(big, m, rank, multiplicity)
                target -= val * coef
            solved[m] = target / _psi_monomial(m, m, rank, multiplicity)
        out.update(solved)
    return out


@lru_cache(maxsize=None)
def _psi_monomial_table(m: tuple, rank: int, multiplicity: int) -> dict:
    return {e: float(c) for c, e in _psi_terms(m, rank, multiplicity)}


def _psi_monomial(m, mu, rank, multiplicity) -> float:
    return _psi_monomial_table(tuple(m), rank, multiplicity).get(tuple(mu), 0.0)


def mp_expansion(nu, lam, rho: RhoVector, top: int, quad: QuadratureSpec | None = None,
                 ext: ExtractionSpec | None = None, grid: int | None = None) -> dict:
    """All ``p_{nu,m}(lambda)`` with ``|m| <= top`` from one torus sample."""
    quad = quad or QuadratureSpec()
    ext = ext or ExtractionSpec()
    grid = grid or ext.grid
    if top >= grid // 2:
        raise ValueError(f"grid {grid} too small for weight {top}")
    samples = _generating_samples(nu, lam, rho, quad, ext, grid)
    mono = _monomial_coeffs(samples, ext.radius)
    return _psi_basis_coeffs(mono, rho.rank, rho.multiplicity, top)


def mp_general(nu, m, lam, rho: RhoVector, quad: QuadratureSpec | None = None,
               ext: ExtractionSpec | None = None) -> complex:
    """``p_{nu,m}(lambda)`` by extraction, cross-checked at two grid sizes.

    Emits :class:`TruncationWarning` when the two estimates differ by more
    than ``ext.drift_tol`` (relative).
    """
    ext = ext or ExtractionSpec()
    m = Partition(m, rho.rank)
    first = mp_expansion(nu, lam, rho, m.weight, quad, ext, ext.grid)[m]
    second = mp_expansion(nu, lam, rho, m.weight, quad, ext, ext.grid + 1)[m]
    drift = abs(first - second) / max(abs(first), 1e-300)
    if drift > ext.drift_tol and abs(first - second) > ext.drift_tol:
        warnings.warn(f"p_{tuple(m)} moved by {drift:.2e} between grids {ext.grid} and {ext.grid + 1}",
                      TruncationWarning, stacklevel=2)
    return first


# --------------------------------------------------------------------------
# difference relations


DIFFERENCE_TOL = 1e-5


def _point(nu, m, lam, rho):
    return {"nu": float(nu), "m": list(m), "lambda": [complex(v).real for v in np.atleast_1d(lam)],
            "rho_sign": rho.sign, "rank": rho.rank, "a": rho.multiplicity}


def mp_recurrence_check(nu, m, lam, rho: RhoVector, quad=None, ext=None, c_reading: str = "direct",
                   tol: float = DIFFERENCE_TOL):
    """``2 sum_j (i lambda_j + rho_j) p_m = sum_j (m+e_j; m) p_{m+e_j} - (nu + m_j - 1 - (a/2)(j-1)) c_{m-e_j}(j) p_{m-e_j}``."""
    cone = ConeStructure(rho.rank, rho.multiplicity)
    m = Partition(m, cone.rank)
    name = f"mp-recurrence[c={c_reading}]"
    point = _point(nu, m, lam, rho)
    coeffs = mp_expansion(nu, lam, rho, m.weight + 1, quad, ext)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=complex))
    lhs = 2 * np.sum(1j * lam_arr + rho.rho) * coeffs[m]
    h = cone.multiplicity / 2
    rhs, scale = 0j, abs(lhs)
    try:
        for j in range(1, cone.rank + 1):
            up = m.shifted(j - 1, 1)
            if up is not None:
                t = complex(step_coeff(up, j, cone)) * coeffs[up]
                rhs += t
                scale += abs(t)
            low = m.shifted(j - 1, -1)
            if low is not None:
                try:
                    cj = complex(c_coeff(low, j, cone, c_reading))
                except ZeroDenominator as exc:
                    raise DegenerateCoefficient(f"c_{tuple(low)}({j}) has a zero denominator") from exc
                t = (nu + m[j - 1] - 1 - h * (j - 1)) * cj * coeffs[low]
                rhs -= t
                scale += abs(t)
    except DegenerateCoefficient as exc:
        return skipped(name, point, str(exc), tol)
    return compare(name, point, lhs, rhs, tol, scale)


def mp_shift_difference_check(nu, m, lam, rho: RhoVector, quad=None, ext=None, c_reading: str = "direct",
                   shifted: bool = True, tol: float = DIFFERENCE_TOL):
    """``-(r nu + 2|m|) p_m(lambda)`` against the shifted-argument combination.

    With ``n = i lambda + rho - nu/2`` the right side is
    ``sum_j (n; n - e_j) p_m(lambda + i e_j) - sum_j (nu/2 + i lambda_j + rho_j - (a/2)(j-1)) c_n(j) p_m(lambda - i e_j)``;
    ``shifted=False`` evaluates the first sum at ``lambda`` itself.
    """
    cone = ConeStructure(rho.rank, rho.multiplicity)
    m = Partition(m, cone.rank)
    r = cone.rank
    name = f"mp-shift-difference[c={c_reading},{'shifted' if shifted else 'unshifted'}]"
    point = _point(nu, m, lam, rho)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=complex))
    top = m.weight

    def p_at(shift):
        return mp_expansion(nu, lam_arr + shift, rho, top, quad, ext)[m]

    lhs = -(r * nu + 2 * top) * p_at(np.zeros(r))
    n_idx = tuple(complex(v) for v in 1j * lam_arr + rho.rho - nu / 2)
    h = cone.multiplicity / 2
    rhs, scale = 0j, abs(lhs)
    try:
        for j in range(1, r + 1):
            e = np.zeros(r)
            e[j - 1] = 1.0
            try:
                b = complex(step_coeff(n_idx, j, cone))
                cj = complex(c_coeff(n_idx, j, cone, c_reading))
            except ZeroDenominator as exc:
                raise DegenerateCoefficient(f"coefficient at index {j} has a zero denominator") from exc
            t1 = b * p_at(1j * e if shifted else np.zeros(r))
            t2 = (nu / 2 + 1j * lam_arr[j - 1] + rho.rho[j - 1] - h * (j - 1)) * cj * p_at(-1j * e)
            rhs += t1 - t2
            scale += abs(t1) + abs(t2)
    except DegenerateCoefficient as exc:
        return skipped(name, point, str(exc), tol)
    return compare(name, point, lhs, rhs, tol, scale)


def check_difference_relations_general(nu, m, lam, rho: RhoVector, quad=None, ext=None,
                                       c_reading: str = "reflected", shifted: bool = True,
                                       tol: float = DIFFERENCE_TOL):
    """Both difference relations at one ``(lambda, m)`` pair."""
    return (mp_recurrence_check(nu, m, lam, rho, quad, ext, c_reading, tol),
            mp_shift_difference_check(nu, m, lam, rho, quad, ext, c_reading, shifted, tol))


def _affine_rank1(fn):
    """``fn`` restricted to rank 1 as ``(c0, c1)`` with ``fn(z) = c0 + c1 z``, checked at a third node."""
    f0, f1, f2 = (Fraction(fn(k)) for k in (0, 1, 2))
    if f2 - f1 != f1 - f0:
        raise ValueError("coefficient is not affine at rank 1")
    return f0, f1 - f0


def check_difference_relations_rank1_exact(nu, n: int, c_reading: str = "reflected", shifted: bool = True):
    """Both general difference relations at ``r = 1`` as exact polynomial identities in ``lambda``.

    The coefficients are taken from the general formulas evaluated on a
    rank-1 cone (where ``rho = 0``), so this checks that the rank-``r``
    statements reduce to the three-term recurrence and the difference
    relation of the rank-1 polynomials.
    """
    cone = ConeStructure(1)
    nu = Fraction(nu)
    nus = _rat(nu)
    I = sympy.I
    table = _mp_rank1_table(nu, n + 1)
    zero = Poly(0, _LAM, domain=QQ_I)
    p = lambda k: table[k] if k >= 0 else zero
    lam = Poly(_LAM, _LAM, domain=QQ_I)
    point = {"nu": str(nu), "n": n, "c": c_reading, "shifted": shifted}
    # three-term relation: 2 i lambda p_n = (n+1; n) p_{n+1} - (nu + n - 1) c_{n-1}(1) p_{n-1}
    up = _rat(step_coeff((n + 1,), 1, cone))
    low = _rat(c_coeff((n - 1,), 1, cone, c_reading)) if n >= 1 else 0
    res56 = 2 * I * lam * p(n) - (up * p(n + 1) - (nus + n - 1) * low * p(n - 1))
    # shift relation with index z = i lambda - nu/2
    b0, b1 = _affine_rank1(lambda k: step_coeff((k,), 1, cone))
    c0, c1 = _affine_rank1(lambda k: c_coeff((k,), 1, cone, c_reading))
    z = Poly(I * _LAM - nus / 2, _LAM, domain=QQ_I)
    bz = _rat(b0) + _rat(b1) * z
    cz = _rat(c0) + _rat(c1) * z
    first = p(n).shift(I) if shifted else p(n)
    res61 = -(nus + 2 * n) * p(n) - (bz * first - (nus / 2 + I * lam) * cz * p(n).shift(-I))
    out = []
    for name, res in ((f"mp-recurrence-rank1[c={c_reading}]", res56),
                      (f"mp-shift-difference-rank1[c={c_reading},{'shifted' if shifted else 'unshifted'}]", res61)):
        size = max((abs(complex(c)) for c in res.all_coeffs()), default=0.0)
        out.append(IdentityReport(name, point, size, 0.0, size, size, 0.0, PASS if res.is_zero else FAIL,
                                  "exact polynomial residual"))
    return tuple(out)
