"""Matrix Jordan algebras Sym(r, R) and Herm(r, C) and their cones.

Elements are plain numpy arrays of shape ``(r, r)``; the rank-1 cone is the
half-line and accepts bare scalars.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveMinor, SingularCayley

CAYLEY_RCOND = 1e-12


@dataclass(frozen=True)
class ConeStructure:
    """Rank ``r``, multiplicity ``a`` and real dimension ``d`` of a matrix cone.

    ``a = 1`` is the cone of real positive definite matrices, ``a = 2`` the
    complex Hermitian one.  At rank 1 both collapse to the half-line.
    """

    rank: int
    multiplicity: int = 1

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if self.multiplicity not in (1, 2):
            raise ValueError("multiplicity must be 1 or 2")

    @property
    def dim(self) -> int:
        r, a = self.rank, self.multiplicity
        return r + a * r * (r - 1) // 2

    @property
    def p(self):
        """Genus ``2d/r``."""
        return 2 * self.dim / self.rank

    @property
    def d_over_r(self):
        return self.dim / self.rank

    @property
    def wallach_threshold(self):
        return self.multiplicity * (self.rank - 1) / 2

    @property
    def is_complex(self) -> bool:
        return self.multiplicity == 2 and self.rank > 1

    def identity(self) -> np.ndarray:
        return np.eye(self.rank)


def as_matrix(x, cone: ConeStructure | None = None) -> np.ndarray:
    """Coerce ``x`` to a square 2-D array, promoting scalars to 1x1."""
    m = np.asarray(x)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if cone is not None and m.shape[0] != cone.rank:
        raise ValueError(f"expected rank {cone.rank}, got {m.shape[0]}")
    if not np.iscomplexobj(m):
        m = m.astype(float)
    return m


def element(values, cone: ConeStructure) -> np.ndarray:
    """Build a Jordan element from an upper triangle, a diagonal or a matrix.

    The stored matrix is symmetrized from its upper triangle so the
    (conjugate) transpose holds exactly.
    """
    m = as_matrix(values)
    if m.shape[0] != cone.rank:
        raise ValueError(f"expected rank {cone.rank}, got {m.shape[0]}")
    upper = np.triu(m, 1)
    diag = np.diag(np.real(np.diag(m)) if cone.is_complex else np.diag(m))
    lower = upper.conj().T if cone.is_complex else upper.T
    out = diag + upper + lower
    if not cone.is_complex and np.iscomplexobj(out):
        if np.any(np.imag(out)):
            raise ValueError("real cone element has complex entries")
        out = np.real(out)
    return out


def trace(x):
    m = as_matrix(x)
    t = np.trace(m)
    if np.iscomplexobj(m) and np.allclose(m, m.conj().T):
        return float(np.real(t))
    return t.item() if hasattr(t, "item") else t


def det_delta(x):
    m = as_matrix(x)
    if m.shape == (1, 1):
        return m[0, 0].item()
    d = np.linalg.det(m)
    if np.iscomplexobj(m) and np.allclose(m, m.conj().T):
        return float(np.real(d))
    return d.item()


def principal_minor(x, j: int):
    """Determinant of the leading ``j x j`` block."""
    m = as_matrix(x)
    r = m.shape[0]
    if not 1 <= j <= r:
        raise IndexError(f"minor index {j} outside 1..{r}")
    return det_delta(m[:j, :j])


def principal_minors(x) -> list:
    m = as_matrix(x)
    return [principal_minor(m, j) for j in range(1, m.shape[0] + 1)]


def log_minor(value, name="minor") -> complex:
    """Logarithm of a minor on the branch used throughout the package.

    Real minors must be strictly positive.  Complex minors (tube points,
    analytically continued arguments) must lie in the open right half-plane,
    where the principal logarithm is the continuation of the real one.
    """
    v = complex(value)
    if v.imag == 0.0:
        if v.real <= 0.0:
            raise NonPositiveMinor(f"{name} = {v.real!r} is not positive")
        return complex(np.log(v.real))
    if v.real <= 0.0:
        raise NonPositiveMinor(f"{name} = {v!r} is outside the right half-plane")
    return complex(np.log(v))


def power_function(x, alpha) -> complex:
    """``Delta_1^(a1-a2) Delta_2^(a2-a3) ... Delta_r^(ar)`` for complex exponents."""
    m = as_matrix(x)
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    r = m.shape[0]
    if alpha.shape != (r,):
        raise ValueError(f"exponent must have length {r}")
    expo = np.append(alpha[:-1] - alpha[1:], alpha[-1])
    total = 0j
    for j in range(1, r + 1):
        if expo[j - 1] == 0:
            # still enforce positivity so the function is defined on a fixed domain
            log_minor(principal_minor(m, j), f"Delta_{j}")
            continue
        total += expo[j - 1] * log_minor(principal_minor(m, j), f"Delta_{j}")
    return complex(np.exp(total))


def _check_conditioning(a: np.ndarray, exc, what: str):
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] <= CAYLEY_RCOND * s[0] or s[0] == 0.0:
        raise exc(f"{what} is numerically singular (rcond {s[-1] / max(s[0], 1e-300):.2e})")


def cayley(z) -> np.ndarray:
    """Cayley transform ``(e + z)(e - z)^{-1}``."""
    m = as_matrix(z)
    e = np.eye(m.shape[0])
    _check_conditioning(e - m, SingularCayley, "e - z")
    # e + z and (e - z)^{-1} commute, so either order is fine
    return np.linalg.solve((e - m).T, (e + m).T).T


def inverse_cayley(w) -> np.ndarray:
    """Inverse Cayley transform ``(w - e)(w + e)^{-1}``."""
    m = as_matrix(w)
    e = np.eye(m.shape[0])
    _check_conditioning(e + m, SingularCayley, "w + e")
    return np.linalg.solve((e + m).T, (m - e).T).T


def eigenvalues(x) -> np.ndarray:
    """Spectrum of a Jordan or tube element (general complex matrices allowed)."""
    m = as_matrix(x)
    if m.shape == (1, 1):
        return m[0].copy()
    if np.allclose(m, m.conj().T, rtol=0, atol=0):
        return np.linalg.eigvalsh(m)
    return np.linalg.eigvals(m)


def in_cone(x, tol: float = 0.0) -> bool:
    """True iff the smallest eigenvalue exceeds ``tol``."""
    m = as_matrix(x)
    herm = 0.5 * (m + m.conj().T)
    return bool(np.min(np.linalg.eigvalsh(herm)) > tol)


def in_real_disk(x) -> bool:
    """Membership in ``D_R``: ``e - x^2`` positive definite."""
    m = as_matrix(x)
    return in_cone(np.eye(m.shape[0]) - m @ m)


def inner(z, x):
    """Trace form ``(z, x) = Tr(z x)`` (complex-bilinear in ``z``)."""
    return np.trace(as_matrix(z) @ as_matrix(x))
