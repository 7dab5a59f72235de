"""Laplace transform on the cone, the tube basis ``q_m`` and the generating function."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from scipy import special

from .errors import NonPositiveMinor, SingularShift
from .jordan import ConeStructure, as_matrix
from .laguerre import LaguerreSpec, _char_eigs, laguerre_fn_batch, laguerre_norm_sq, laguerre_terms
from .quadrature import QuadratureSpec, _pairwise_sum, calibrate, cone_quadrature, orbit
from .reports import compare, point_descriptor
from .spherical import Partition, dim_pm, gen_pochhammer, gindikin_gamma, partitions_up_to, psi_eigs

SHIFT_RCOND = 1e-12


def _hermitian_parts(w: np.ndarray):
    a = 0.5 * (w + w.conj().T)
    b = (w - w.conj().T) / 2j
    return a, b


def tube_log_det(w) -> complex:
    """``log det w`` on the branch continuous from the cone, for ``w`` in the tube.

    ``w = A + iB`` with ``A`` positive definite factors as
    ``A^{1/2}(e + i A^{-1/2} B A^{-1/2}) A^{1/2}``; the middle factor has
    eigenvalues ``1 + i mu`` with real ``mu``, each taken on the principal
    branch.
    """
    w = as_matrix(w)
    a, b = _hermitian_parts(w.astype(complex))
    ev, vec = np.linalg.eigh(a)
    if ev[0] <= 0:
        raise NonPositiveMinor(f"real part has eigenvalue {ev[0]!r}; point is outside the tube")
    isq = vec @ np.diag(ev ** -0.5) @ vec.conj().T
    mu = np.linalg.eigvalsh(isq @ b @ isq)
    return complex(np.sum(np.log(ev)) + np.sum(np.log1p(1j * mu)))


def _check_shift(w: np.ndarray):
    s = np.linalg.svd(w, compute_uv=False)
    if s[0] == 0 or s[-1] <= SHIFT_RCOND * s[0]:
        raise SingularShift("z + e is numerically singular")


def q_basis(nu, m, z, cone: ConeStructure) -> complex:
    """``q_{m,nu}(z) = Delta(z+e)^(-nu) psi_m((z-e)(z+e)^(-1))``."""
    m = Partition(m, cone.rank)
    z = as_matrix(z, cone).astype(complex)
    e = np.eye(cone.rank)
    shift = z + e
    _check_shift(shift)
    pref = np.exp(-nu * tube_log_det(shift))
    cay = np.linalg.solve(shift.T, (z - e).T).T
    val = psi_eigs(m, _char_eigs(cay), cone)
    return complex(pref * val)


def _trace_pair(z: np.ndarray, pts: np.ndarray):
    # (z, x) = Tr(z x), complex bilinear in z
    return np.einsum("ij,...ji->...", z, pts)


def laplace_transform(nu, f, z, cone: ConeStructure, quad: QuadratureSpec, decay: float | None = None) -> complex:
    """``int_Omega e^{-(z,x)} f(x) Delta(x)^(nu - d/r) dx`` with ``(z, x) = Tr(z x)``.

    ``f`` maps points ``(..., r, r)`` to values.  The real exponential is
    absorbed into the radial rule at rate ``decay``; by default this is
    ``1 + Tr(Re z)/r``, suited to integrands carrying ``e^{-Tr x}``.  The
    phase is left in the integrand.
    """
    z = as_matrix(z, cone)
    a, _ = _hermitian_parts(z.astype(complex))
    if np.linalg.eigvalsh(a)[0] <= 0:
        raise NonPositiveMinor("Re z must lie in the cone")
    if decay is None:
        decay = 1.0 + float(np.real(np.trace(a))) / cone.rank
    zz = z.astype(complex)

    def integrand(pts):
        return np.exp(-_trace_pair(zz, pts)) * np.asarray(f(pts))

    return complex(cone_quadrature(cone, nu, integrand, quad, decay=decay))


def _ensure_calibrated(cone: ConeStructure, quad: QuadratureSpec) -> QuadratureSpec:
    if quad.calibration is None:
        return calibrate(cone, quad)
    return quad


LAPLACE_TOL = 1e-3


def laplace_laguerre_rank1_mp(nu, n: int, z, dps: int = 20) -> complex:
    """Rank-1 transform of ``l_n^nu`` by tanh-sinh quadrature in ``dps``-digit arithmetic.

    Double-precision rules lose about ``n log10|(z+1)/(z-1)|`` digits to
    cancellation here, so the rank-1 checks integrate in extended precision
    with the polynomial's exact coefficients.
    """
    return _laplace_rank1_mp(nu, int(n), complex(z), int(dps))


@lru_cache(maxsize=1024)
def _laplace_rank1_mp(nu, n: int, z: complex, dps: int) -> complex:
    nu_exact = Fraction(nu) if isinstance(nu, float) else nu
    terms = laguerre_terms(LaguerreSpec(nu_exact, (n,), ConeStructure(1)))
    with mpmath.workdps(dps):
        coeffs = [(mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator, p[0]) for p, c in terms]
        zz = mpmath.mpc(complex(z))
        nu_mp = mpmath.mpf(Fraction(nu_exact).numerator) / Fraction(nu_exact).denominator

        def integrand(x):
            poly = mpmath.fsum(c * (-2 * x) ** k for c, k in coeffs)
            return mpmath.exp(-(zz + 1) * x) * poly * x ** (nu_mp - 1)

        val = mpmath.quad(integrand, [0, 1, 4, 16, mpmath.inf])
        return complex(val)


def check_laplace_identity(nu, m, z, cone: ConeStructure, quad: QuadratureSpec | None = None,
                           tol: float = LAPLACE_TOL, extended: bool | None = None):
    """``L_nu(l_m^nu)(z) = Gamma_Omega(m + nu) q_{m,nu}(z)`` by quadrature of the left side.

    ``extended`` (default: on at rank 1) switches to
    :func:`laplace_laguerre_rank1_mp`.
    """
    spec = LaguerreSpec(nu, m, cone)
    if extended is None:
        extended = cone.rank == 1
    if extended:
        if cone.rank != 1:
            raise ValueError("extended precision is only available at rank 1")
        lhs = laplace_laguerre_rank1_mp(nu, spec.m[0], complex(as_matrix(z, cone)[0, 0]))
    else:
        quad = _ensure_calibrated(cone, quad or QuadratureSpec())
        lhs = laplace_transform(nu, lambda p: laguerre_fn_batch(spec, p), z, cone, quad)
    lam = tuple(nu + k for k in spec.m)
    rhs = complex(gindikin_gamma(lam, cone)) * q_basis(nu, spec.m, z, cone)
    point = {**point_descriptor(as_matrix(z, cone)), "m": list(spec.m), "nu": float(nu),
             "rank": cone.rank, "a": cone.multiplicity}
    return compare("laplace-identity", point, lhs, rhs, tol)


def laplace_closed_form_rank1(nu, n: int, z) -> complex:
    """Closed form of ``int e^{-xz} e^{-x} L_n^{nu-1}(2x) x^(nu-1) dx``."""
    z = complex(z)
    return complex(special.gamma(n + nu) / math.factorial(n) * ((z - 1) / (z + 1)) ** n * (z + 1) ** (-nu))


def check_laplace_rank1_closed_form(nu, n: int, z, quad: QuadratureSpec | None = None, tol: float = 1e-10,
                                    extended: bool = True):
    """Transform of the classical Laguerre function against its closed form."""
    fact = math.factorial(n)
    if extended:
        lhs = laplace_laguerre_rank1_mp(nu, n, z) / fact
    else:
        cone = ConeStructure(1)
        spec = LaguerreSpec(nu, (n,), cone)
        lhs = laplace_transform(nu, lambda p: laguerre_fn_batch(spec, p) / fact, np.array([[z]]), cone,
                                quad or QuadratureSpec())
    rhs = laplace_closed_form_rank1(nu, n, z)
    point = {"z": [complex(z).real, complex(z).imag], "n": n, "nu": float(nu)}
    return compare("laplace-rank1-closed-form", point, lhs, rhs, tol)


# --------------------------------------------------------------------------
# generating function


@dataclass(frozen=True)
class GeneratingResult:
    lhs: complex
    partial_sum: complex
    residual: float
    order: int
    reading: str


def _poch_reading(m: Partition, cone: ConeStructure, reading: str):
    if reading == "d/r":
        return gen_pochhammer(Fraction(cone.dim, cone.rank), m, cone)
    if reading == "one":
        return gen_pochhammer(1, m, cone)
    raise ValueError(f"unknown reading {reading!r}")


def generating_lhs(nu, w, x, cone: ConeStructure, quad: QuadratureSpec) -> complex:
    """``Delta(e - w)^(-nu) int_{K∩H} e^{-(k x k^*, (e+w)(e-w)^(-1))} dk``."""
    w = as_matrix(w, cone).astype(complex)
    x = as_matrix(x, cone)
    e = np.eye(cone.rank)
    pref = np.exp(-nu * tube_log_det(e - w))
    cw = np.linalg.solve((e - w).T, (e + w).T).T
    ys, wts = orbit(x, cone, quad)
    vals = np.exp(-_trace_pair(cw, ys))
    return complex(pref * _pairwise_sum(vals * wts))


def generating_series(nu, w, x, order: int, cone: ConeStructure, quad: QuadratureSpec | None = None,
                      reading: str = "d/r") -> GeneratingResult:
    """Truncated ``sum_{|m| <= N} d_m psi_m(w) l_m^nu(x) / (kappa)_m`` against the closed left side.

    ``reading`` picks ``kappa = d/r`` (``"d/r"``) or ``kappa = 1`` (``"one"``).
    """
    quad = quad or QuadratureSpec()
    w = as_matrix(w, cone)
    x = as_matrix(x, cone)
    lhs = generating_lhs(nu, w, x, cone, quad)
    w_eigs = _char_eigs(w.astype(complex))
    terms = []
    for m in partitions_up_to(cone.rank, order):
        coef = float(dim_pm(m, cone)) / float(_poch_reading(m, cone, reading))
        lm = complex(laguerre_fn_batch(LaguerreSpec(nu, m, cone), x[None])[0])
        terms.append(coef * complex(psi_eigs(m, w_eigs, cone)) * lm)
    partial = complex(math.fsum(t.real for t in terms) + 1j * math.fsum(t.imag for t in terms))
    return GeneratingResult(lhs, partial, abs(lhs - partial) / max(abs(lhs), 1e-300), order, reading)


def generating_closed_form_rank1(nu, w, x, flipped: bool = False) -> complex:
    """``(1-w)^(-nu) exp(-x (1+w)/(1-w))``; ``flipped=True`` flips both signs."""
    w = complex(w)
    if flipped:
        return complex((1 - w) ** nu * np.exp(x * (1 + w) / (1 - w)))
    return complex((1 - w) ** (-nu) * np.exp(-x * (1 + w) / (1 - w)))


def classical_generating_sum(nu, w, x, order: int) -> complex:
    """``sum_{n <= N} e^{-x} L_n^{nu-1}(2x) w^n``."""
    spec = lambda n: LaguerreSpec(nu, (n,), ConeStructure(1))
    terms = [complex(w) ** n * float(laguerre_fn_batch(spec(n), np.array([[[x]]]))[0]) / math.factorial(n)
             for n in range(order + 1)]
    return complex(math.fsum(t.real for t in terms) + 1j * math.fsum(t.imag for t in terms))


def decay_slope(residuals: dict) -> float:
    """Least-squares slope of ``log residual`` against the truncation order."""
    n = np.array(sorted(residuals), dtype=float)
    r = np.log([residuals[k] for k in sorted(residuals)])
    return float(np.polyfit(n, r, 1)[0])


# --------------------------------------------------------------------------
# Hilbert-space checks


def tube_norm_sq_rank1(nu, F, n_nodes: int = 80) -> float:
    """``beta_nu int_{x>0} int_R |F(x+iy)|^2 x^(nu-2) dy dx`` at rank 1 (``nu > 1``).

    ``y = (x+1) tan(theta)`` and ``x = u/(1-u)`` turn the weight into
    ``u^(nu-2) (1-u)^(nu-1) cos(theta)^(2 nu - 2)`` for ``|F| ~ |z+1|^-nu``;
    both factors are handled by Gauss-Jacobi rules.
    """
    if nu <= 1:
        raise ValueError("the tube norm integral needs nu > 1")
    beta = 2.0**nu / (4 * np.pi * special.gamma(nu - 1))
    u, wu = special.roots_jacobi(n_nodes, nu - 1, nu - 2)
    u, wu = 0.5 * (u + 1), wu * 0.5 ** (2 * nu - 2)
    # s = sin(theta) in (-1, 1): d theta cos^(2nu-2) = (1-s^2)^(nu-3/2) ds
    s, ws = special.roots_jacobi(n_nodes, nu - 1.5, nu - 1.5)
    x = u / (1 - u)
    xx, ss = np.meshgrid(x, s, indexing="ij")
    tan = ss / np.sqrt(1 - ss * ss)
    z = xx + 1j * (xx + 1) * tan
    g = np.abs(F(z)) ** 2 * np.abs(z + 1) ** (2 * nu)
    # |z+1|^(-2nu) dy = (x+1)^(1-2nu) cos^(2nu-2) d theta, and x^(nu-2)(x+1)^(1-2nu) dx = u^(nu-2)(1-u)^(nu-1) du
    return float(beta * np.einsum("i,j,ij->", wu, ws, g))


def gram_matrices(nu, cone: ConeStructure, coeffs: np.ndarray, quad: QuadratureSpec | None = None, max_weight: int = 2):
    """Quadrature Gram matrix of ``f_i = sum_m C_im l_m`` against the closed-form one."""
    quad = _ensure_calibrated(cone, quad or QuadratureSpec())
    parts = partitions_up_to(cone.rank, max_weight)
    specs = [LaguerreSpec(nu, m, cone) for m in parts]
    coeffs = np.asarray(coeffs)

    def combo(pts, row):
        return sum(c * laguerre_fn_batch(s, pts) for c, s in zip(row, specs))

    k = coeffs.shape[0]
    numeric = np.empty((k, k), dtype=complex)
    for i in range(k):
        for j in range(i, k):
            val = cone_quadrature(cone, nu, lambda p: np.conj(combo(p, coeffs[i])) * combo(p, coeffs[j]), quad, decay=2.0)
            numeric[i, j] = val
            numeric[j, i] = np.conj(val)
    norms = np.array([laguerre_norm_sq(s) for s in specs])
    exact = coeffs.conj() @ np.diag(norms) @ coeffs.T
    return numeric, exact


def cauchy_riemann_residual(nu, m, z, cone: ConeStructure, h: float = 1e-5) -> float:
    """Largest ``|d_iy q - i d_x q| / |grad q|`` over the coordinate directions at ``z``."""
    z = as_matrix(z, cone).astype(complex)
    r = cone.rank
    worst = 0.0
    dirs = []
    for a in range(r):
        for b in range(a, r):
            e = np.zeros((r, r), dtype=complex)
            e[a, b] = 1.0
            if cone.multiplicity == 1 or a == b:
                e[b, a] = 1.0
            dirs.append(e)
    for e in dirs:
        fx = (q_basis(nu, m, z + h * e, cone) - q_basis(nu, m, z - h * e, cone)) / (2 * h)
        fy = (q_basis(nu, m, z + 1j * h * e, cone) - q_basis(nu, m, z - 1j * h * e, cone)) / (2 * h)
        scale = max(abs(fx), abs(fy), 1e-300)
        worst = max(worst, abs(fy - 1j * fx) / scale)
    return worst
