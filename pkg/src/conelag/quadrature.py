"""Quadrature on the compact group K∩H and on the cone.

Rank-1 integrals use generalized Gauss-Laguerre rules.  Rank-2 integrals use
the eigenvalue decomposition ``x = k diag(l1, l2) k^*`` with ``s = l1 + l2``
and ``t = ((l1 - l2)/s)^2``; in these coordinates the weight
``e^{-s} Delta^{nu-d/r} |l1 - l2|^a`` factorizes into a Laguerre weight in
``s`` times a Jacobi weight in ``t``, so integrands that are polynomial in
the eigenvalues (times the factored exponential) are integrated exactly.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import UncalibratedQuadrature, UnsupportedRank
from .jordan import ConeStructure


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts and the calibrated measure constant.

    ``calibration`` multiplies the raw rank-2 eigenvalue integral; it is
    ``None`` until :func:`calibrate` has been run for the spec.
    """

    n_rank1: int = 80
    n_radial: int = 60
    n_jacobi: int = 24
    n_angle: int = 64
    n_herm: int = 24
    n_phase: int = 16
    calibration: float | None = None
    reference_nu: float = 3.0

    def with_calibration(self, value: float) -> "QuadratureSpec":
        return replace(self, calibration=float(value))


# --------------------------------------------------------------------------
# K∩H orbit nodes


@lru_cache(maxsize=64)
def _orbit_rotations(rank: int, multiplicity: int, n_angle: int, n_phase: int, full: bool = False):
    """Group elements ``k`` and probability weights for averaging over K∩H.

    For ``a = 1`` the first row of a Haar rotation is uniform on the circle
    and the trapezoid rule on ``[0, pi)`` is spectrally accurate.  For
    ``a = 2`` the first row of a Haar unitary, modulo an overall phase, has
    ``|u_1|^2`` uniform on ``[0, 1]`` and an independent uniform relative
    phase.  That reduced rule averages correctly over orbits of diagonal
    matrices only; ``full=True`` adds the second phase for general inputs.
    """
    if rank == 1:
        return np.ones((1, 1, 1)), np.ones(1)
    if rank != 2:
        raise UnsupportedRank(f"K∩H quadrature is implemented for rank <= 2, got {rank}")
    if multiplicity == 1:
        theta = np.pi * np.arange(n_angle) / n_angle
        c, s = np.cos(theta), np.sin(theta)
        k = np.empty((n_angle, 2, 2))
        k[:, 0, 0], k[:, 0, 1] = c, s
        k[:, 1, 0], k[:, 1, 1] = -s, c
        w = np.full(n_angle, 1.0 / n_angle)
        return k, w
    t, wt = special.roots_legendre(n_angle)
    t = 0.5 * (t + 1.0)
    wt = 0.5 * wt
    chi = 2 * np.pi * np.arange(n_phase) / n_phase
    eta = chi if full else np.zeros(1)
    tt, cc, ee = np.meshgrid(t, chi, eta, indexing="ij")
    ww = wt[:, None, None] * np.full((1, n_phase, eta.size), 1.0 / (n_phase * eta.size))
    u1 = (np.sqrt(tt) * np.exp(1j * ee)).ravel()
    u2 = (np.sqrt(1.0 - tt) * np.exp(1j * cc)).ravel()
    k = np.empty((u1.size, 2, 2), dtype=complex)
    k[:, 0, 0], k[:, 0, 1] = u1, u2
    k[:, 1, 0], k[:, 1, 1] = -np.conj(u2), np.conj(u1)
    return k, ww.ravel()


def _is_diagonal(x: np.ndarray) -> bool:
    r = x.shape[-1]
    off = ~np.eye(r, dtype=bool)
    return not np.any(x[..., off])


def orbit(x: np.ndarray, cone: ConeStructure, quad: QuadratureSpec):
    """Return the conjugates ``k x k^*`` over the K∩H nodes and their weights.

    ``x`` may be complex (a point of the complexification); the action
    ``x -> k x k^*`` is kept holomorphic in ``x`` because ``k`` is fixed.
    For ``a = 2`` a Hermitian ``x`` is first replaced by its eigenvalue
    matrix, which leaves the Haar average unchanged.
    """
    x = np.asarray(x)
    full = False
    if cone.multiplicity == 2 and cone.rank == 2 and not _is_diagonal(x):
        if np.allclose(x, np.conj(np.swapaxes(x, -1, -2)), rtol=0, atol=0):
            ev = np.linalg.eigvalsh(x)
            x = np.zeros(x.shape, dtype=float)
            x[..., 0, 0], x[..., 1, 1] = ev[..., 0], ev[..., 1]
        else:
            full = True
    n_t = quad.n_herm if cone.multiplicity == 2 else quad.n_angle
    k, w = _orbit_rotations(cone.rank, cone.multiplicity, n_t, quad.n_phase, full)
    kh = np.conj(np.swapaxes(k, -1, -2))
    return k @ x @ kh, w


# --------------------------------------------------------------------------
# cone measure


def _laguerre_rule(n: int, exponent: float, decay: float):
    """Nodes/weights for ``int_0^inf g(s) s^exponent e^{-decay s} ds``."""
    x, w = special.roots_genlaguerre(n, exponent)
    scale = 1.0 / decay
    return x * scale, w * scale ** (exponent + 1.0)


def _jacobi_unit(n: int, alpha: float, beta: float):
    """Nodes/weights on [0,1] for the weight ``(1 - t)^alpha t^beta``."""
    x, w = special.roots_jacobi(n, alpha, beta)
    return 0.5 * (x + 1.0), w * 0.5 ** (alpha + beta + 1.0)


def _raw_rank2(cone: ConeStructure, nu: float, f, quad: QuadratureSpec, decay: float):
    """Uncalibrated eigen-coordinate integral of ``f`` against ``Delta^(nu-d/r) dx``."""
    a = cone.multiplicity
    q = nu - cone.d_over_r
    # l1 = s(1+u)/2, l2 = s(1-u)/2, u = sqrt(t); dl1 dl2 = s/2 ds du, du = dt / (2 sqrt t)
    # Delta^q |l1-l2|^a dl = 4^-q s^(2q+a+1) (1-t)^q t^((a-1)/2) / 4 ds dt
    s, ws = _laguerre_rule(quad.n_radial, 2 * q + a + 1, decay)
    t, wt = _jacobi_unit(quad.n_jacobi, q, (a - 1) / 2)
    u = np.sqrt(t)
    l1 = 0.5 * np.multiply.outer(s, 1 + u)
    l2 = 0.5 * np.multiply.outer(s, 1 - u)
    diag = np.zeros(l1.shape + (2, 2))
    diag[..., 0, 0] = l1
    diag[..., 1, 1] = l2
    k, wk = _orbit_rotations(2, a, quad.n_herm if a == 2 else quad.n_angle, quad.n_phase)
    kh = np.conj(np.swapaxes(k, -1, -2))
    pts = k[None, None] @ diag[:, :, None] @ kh[None, None]
    if a == 1:
        pts = np.real(pts)
    vals = np.asarray(f(pts))
    expo = np.exp(decay * np.trace(np.real(pts), axis1=-2, axis2=-1))
    integrand = vals * expo
    w = (ws[:, None, None] * wt[None, :, None] * wk[None, None, :]) * 4.0 ** (-q) / 4.0
    return _pairwise_sum((w * integrand).ravel())


def _pairwise_sum(v: np.ndarray):
    # fixed reduction tree so results do not depend on chunking
    v = np.asarray(v)
    while v.size > 1:
        if v.size % 2:
            v = np.append(v, 0)
        v = v[0::2] + v[1::2]
    return v[0] if v.size else 0.0


def analytic_rank2_constant(cone: ConeStructure) -> float:
    """Exact value the rank-2 calibration constant should take.

    It is the volume factor of the eigenvalue decomposition for the Euclidean
    measure of the trace form; used only as a cross-check of the
    self-calibration.
    """
    a = cone.multiplicity
    # Gamma_Omega(d/r) / raw integral of e^{-Tr} |l1-l2|^a over l1 > l2 > 0
    nu = cone.d_over_r
    from .spherical import gindikin_gamma

    # int s^(a+1) e^-s ds = (a+1)!, int t^((a-1)/2) dt = 2/(a+1), Jacobian 1/4
    raw = math.gamma(a + 2) / 4.0 * 2.0 / (a + 1)
    return float(np.real(gindikin_gamma((nu, nu), cone)) / raw)


def cone_quadrature(cone: ConeStructure, nu: float, f, quad: QuadratureSpec, decay: float = 1.0):
    """``int_Omega f(x) Delta(x)^(nu - d/r) dx``.

    ``f`` receives an array of points of shape ``(..., r, r)`` and must
    return values of shape ``(...)``.  ``decay`` is the rate of the
    exponential ``e^{-decay Tr x}`` folded into the radial rule; the integrand
    is multiplied back by ``e^{decay Tr x}`` so ``f`` must carry its own decay.
    """
    if cone.rank == 1:
        s, w = _laguerre_rule(quad.n_rank1, nu - 1.0, decay)
        pts = s.reshape(-1, 1, 1)
        vals = np.asarray(f(pts)) * np.exp(decay * s)
        return _pairwise_sum(w * vals)
    if cone.rank != 2:
        raise UnsupportedRank(f"cone quadrature is implemented for rank <= 2, got {cone.rank}")
    if quad.calibration is None:
        raise UncalibratedQuadrature("run calibrate() before integrating over a rank-2 cone")
    return quad.calibration * _raw_rank2(cone, nu, f, quad, decay)


def calibrate(cone: ConeStructure, quad: QuadratureSpec) -> QuadratureSpec:
    """Fix the measure constant so ``int e^{-Tr} Delta^(nu0 - d/r) dx = Gamma_Omega(nu0)``."""
    from .spherical import gindikin_gamma

    if cone.rank == 1:
        return quad.with_calibration(1.0)
    nu0 = quad.reference_nu
    raw = _raw_rank2(cone, nu0, lambda x: np.exp(-np.trace(x, axis1=-2, axis2=-1)), quad, 1.0)
    target = gindikin_gamma((nu0,) * cone.rank, cone)
    return quad.with_calibration(float(np.real(target) / np.real(raw)))


def dump_nodes(cone: ConeStructure, nu: float, quad: QuadratureSpec, decay: float = 1.0) -> str:
    """CSV of node coordinates and weights (upper triangle, then weight)."""
    rows = []

    def grab(pts):
        p = np.asarray(pts)
        rows.append(p.reshape(-1, cone.rank, cone.rank))
        return np.zeros(p.shape[:-2])

    if cone.rank == 1:
        s, w = _laguerre_rule(quad.n_rank1, nu - 1.0, decay)
        pts, weights = s.reshape(-1, 1, 1), w
    else:
        q = nu - cone.d_over_r
        a = cone.multiplicity
        s, ws = _laguerre_rule(quad.n_radial, 2 * q + a + 1, decay)
        t, wt = _jacobi_unit(quad.n_jacobi, q, (a - 1) / 2)
        _, wk = _orbit_rotations(2, a, quad.n_herm if a == 2 else quad.n_angle, quad.n_phase)
        _raw_rank2(cone, nu, grab, quad, decay)
        pts = rows[0]
        c = 1.0 if quad.calibration is None else quad.calibration
        weights = (c * (ws[:, None, None] * wt[None, :, None] * wk[None, None, :]) * 4.0 ** (-q) / 4.0).ravel()
    iu = np.triu_indices(cone.rank)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = []
    for i, j in zip(*iu):
        header.append(f"x{i + 1}{j + 1}")
        if cone.is_complex and i != j:
            header[-1] = f"re_x{i + 1}{j + 1}"
            header.append(f"im_x{i + 1}{j + 1}")
    writer.writerow(header + ["weight"])
    for p, w in zip(pts, weights):
        vals = []
        for i, j in zip(*iu):
            vals.append(repr(float(np.real(p[i, j]))))
            if cone.is_complex and i != j:
                vals.append(repr(float(np.imag(p[i, j]))))
        writer.writerow(vals + [repr(float(w))])
    return buf.getvalue()
