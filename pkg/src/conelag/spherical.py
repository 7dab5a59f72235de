"""Partitions, spherical polynomials and the coefficients built from them.

Spherical polynomials are normalized Jack polynomials with parameter
``alpha = 2/a`` in the eigenvalues.  The monomial expansion of each Jack
polynomial is obtained in exact rational arithmetic as the triangular
eigenvector of the operator

    D = sum_i x_i^2 d_i^2 + (2/alpha) sum_{i != j} x_i^2 / (x_i - x_j) d_i

on monomial symmetric functions.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np
from scipy import special
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import GammaPole, SingularInterpolation, UnsupportedRank, ZeroDenominator
from .jordan import ConeStructure, as_matrix, eigenvalues, log_minor
from .quadrature import QuadratureSpec, orbit


class Partition(tuple):
    """Weakly decreasing tuple of nonnegative integers of fixed length."""

    def __new__(cls, parts, rank: int | None = None):
        parts = tuple(int(p) for p in parts)
        if rank is not None:
            if len(parts) > rank:
                if any(parts[rank:]):
                    raise ValueError(f"{parts} has more than {rank} nonzero parts")
                parts = parts[:rank]
            parts = parts + (0,) * (rank - len(parts))
        if any(p < 0 for p in parts):
            raise ValueError(f"negative part in {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"{parts} is not weakly decreasing")
        return super().__new__(cls, parts)

    @property
    def weight(self) -> int:
        return sum(self)

    @property
    def rank(self) -> int:
        return len(self)

    def shifted(self, k: int, step: int) -> "Partition | None":
        """``self +/- e_k`` (0-based ``k``) or ``None`` if it leaves the partitions."""
        parts = list(self)
        parts[k] += step
        try:
            return Partition(parts)
        except ValueError:
            return None

    def __repr__(self):
        return f"Partition{tuple(self)}"


def is_partition(parts) -> bool:
    parts = tuple(parts)
    return all(p >= 0 for p in parts) and all(parts[i] >= parts[i + 1] for i in range(len(parts) - 1))


def partitions_of(k: int, r: int) -> list[Partition]:
    """Partitions of ``k`` with at most ``r`` parts, lexicographically decreasing."""
    out = []

    def rec(remaining, maxpart, prefix):
        if len(prefix) == r:
            if remaining == 0:
                out.append(Partition(prefix))
            return
        for p in range(min(remaining, maxpart), -1, -1):
            rec(remaining - p, p, prefix + (p,))

    rec(k, k, ())
    return out


def partitions_up_to(r: int, n: int) -> list[Partition]:
    """All partitions of length ``<= r`` and weight ``<= n`` in graded lex order."""
    if r < 1 or n < 0:
        raise ValueError("need r >= 1 and n >= 0")
    return [p for k in range(n + 1) for p in partitions_of(k, r)]


def dominates(lam, mu) -> bool:
    s1 = s2 = 0
    for x, y in zip(lam, mu):
        s1 += x
        s2 += y
        if s1 < s2:
            return False
    return s1 == s2


# --------------------------------------------------------------------------
# coefficient tables


@dataclass(frozen=True)
class CoefficientTable:
    """Immutable map from partitions to exact coefficients."""

    rank: int
    multiplicity: int
    context: str
    entries: Mapping[Partition, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in dict(self.entries).items():
            p = Partition(k, self.rank)
            if v != 0:
                clean[p] = v
        object.__setattr__(self, "entries", clean)

    def __getitem__(self, key):
        return self.entries.get(Partition(key, self.rank), Fraction(0))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def items(self):
        return self.entries.items()

    def to_json(self) -> str:
        rows = []
        for p in sorted(self.entries, key=lambda q: (q.weight, tuple(-x for x in q))):
            v = Fraction(self.entries[p])
            rows.append({"partition": list(p), "num": str(v.numerator), "den": str(v.denominator)})
        return json.dumps(
            {"rank": self.rank, "multiplicity": self.multiplicity, "context": self.context, "entries": rows}
        )

    @classmethod
    def from_json(cls, text: str) -> "CoefficientTable":
        doc = json.loads(text)
        entries = {
            Partition(e["partition"]): Fraction(int(e["num"]), int(e["den"])) for e in doc["entries"]
        }
        return cls(doc["rank"], doc["multiplicity"], doc.get("context", "generic"), entries)


# --------------------------------------------------------------------------
# gamma function and Pochhammer symbols


def _as_tuple(lam, r: int):
    if np.ndim(lam) == 0:
        return (lam,) * r
    lam = tuple(lam)
    if len(lam) != r:
        raise ValueError(f"expected {r} components, got {len(lam)}")
    return lam


def _is_pole(z) -> bool:
    z = complex(z)
    return z.imag == 0 and z.real <= 0 and float(z.real).is_integer()


def gindikin_gamma(lam, cone: ConeStructure):
    """``(2 pi)^((d-r)/2) prod_j Gamma(lam_j - (a/2)(j-1))``."""
    r, a = cone.rank, cone.multiplicity
    lam = _as_tuple(lam, r)
    value = (2 * np.pi) ** ((cone.dim - r) / 2)
    cplx = any(isinstance(x, complex) or np.iscomplexobj(x) for x in lam)
    for j, lj in enumerate(lam):
        arg = lj - a * j / 2
        if _is_pole(arg):
            raise GammaPole(j + 1, arg)
        value = value * (special.gamma(complex(arg)) if cplx else special.gamma(float(arg)))
    return complex(value) if cplx else float(value)


def rising(x, k: int):
    """Classical rising factorial ``x (x+1) ... (x+k-1)``; exact for rationals."""
    out = Fraction(1) if isinstance(x, (int, Fraction)) else 1.0
    for i in range(k):
        out = out * (x + i)
    return out


def _half(a):
    return Fraction(a, 2)


def gen_pochhammer(nu, m, cone: ConeStructure):
    """Generalized Pochhammer ``(nu)_m = prod_j (nu_j - (a/2)(j-1))_{m_j}``.

    Exact when ``nu`` is an int or Fraction.
    """
    r, a = cone.rank, cone.multiplicity
    m = Partition(m, r)
    nus = _as_tuple(nu, r)
    out = Fraction(1) if all(isinstance(v, (int, Fraction)) for v in nus) else 1.0
    for j, (nj, mj) in enumerate(zip(nus, m)):
        shift = nj - _half(a) * j if isinstance(nj, (int, Fraction)) else nj - a * j / 2
        if _is_pole(shift):
            raise GammaPole(j + 1, shift)
        out = out * rising(shift, mj)
    return out


# --------------------------------------------------------------------------
# Jack polynomials


def _monomials(mu) -> list[tuple]:
    return sorted(set(itertools.permutations(mu)))


def _apply_operator(poly: dict, r: int, inv_alpha2: Fraction) -> dict:
    """Apply ``D`` to a symmetric polynomial given as ``{exponents: coeff}``."""
    out: dict = {}

    def add(e, c):
        out[e] = out.get(e, 0) + c

    for e, c in poly.items():
        add(e, c * sum(x * (x - 1) for x in e))
        for i in range(r):
            for j in range(i + 1, r):
                p, q = e[i], e[j]
                if p < q:
                    continue  # handled together with the swapped monomial
                if p == q:
                    add(e, inv_alpha2 * c * p)
                    continue
                # (x_i^2 d_i - x_j^2 d_j)(x^e + x^{swap e}) / (x_i - x_j)
                add(e, inv_alpha2 * c * p)
                sw = list(e)
                sw[i], sw[j] = q, p
                add(tuple(sw), inv_alpha2 * c * p)
                for l in range(1, p - q):
                    f = list(e)
                    f[i], f[j] = p - l, q + l
                    add(tuple(f), inv_alpha2 * c * (p - q))
    return out


@lru_cache(maxsize=None)
def _operator_on_monomial(mu: tuple, r: int, alpha: Fraction) -> dict:
    poly = {e: Fraction(1) for e in _monomials(mu)}
    image = _apply_operator(poly, r, 2 / alpha)
    res = {}
    for e, c in image.items():
        if c and tuple(sorted(e, reverse=True)) == e:
            res[Partition(e)] = c
    return res


@lru_cache(maxsize=None)
def jack_monomial_coeffs(m: tuple, alpha: Fraction) -> dict:
    """Monomial coefficients of the monic Jack polynomial ``P_m`` in ``len(m)`` variables."""
    m = Partition(m)
    r = len(m)
    lower = [mu for mu in partitions_of(m.weight, r) if dominates(m, mu)]
    # lexicographically decreasing is a linear extension of dominance
    ops = {mu: _operator_on_monomial(tuple(mu), r, alpha) for mu in lower}
    eig = {mu: ops[mu].get(mu, Fraction(0)) for mu in lower}
    coeff = {m: Fraction(1)}
    for nu in lower[1:]:
        acc = Fraction(0)
        for mu, c in coeff.items():
            acc += c * ops[mu].get(nu, 0)
        gap = eig[m] - eig[nu]
        if gap == 0:
            raise ZeroDenominator(f"degenerate eigenvalue for {m} vs {nu}")
        if acc:
            coeff[nu] = acc / gap
    return coeff


def _alpha(cone: ConeStructure) -> Fraction:
    return Fraction(2, cone.multiplicity)


@lru_cache(maxsize=None)
def _psi_terms(m: tuple, rank: int, multiplicity: int):
    """Exact ``(coefficient, exponent)`` pairs with ``psi_m = sum c x^e``."""
    if rank == 1:
        return ((Fraction(1), (m[0],)),)
    coeffs = jack_monomial_coeffs(tuple(m), Fraction(2, multiplicity))
    at_one = sum(c * len(_monomials(mu)) for mu, c in coeffs.items())
    terms = []
    for mu, c in coeffs.items():
        for e in _monomials(mu):
            terms.append((c / at_one, e))
    return tuple(terms)


def jack_expansion(m, cone: ConeStructure) -> CoefficientTable:
    """Coefficients of ``psi_m`` on monomial symmetric functions."""
    m = Partition(m, cone.rank)
    if cone.rank == 1:
        return CoefficientTable(1, cone.multiplicity, "jack-expansion", {m: Fraction(1)})
    coeffs = jack_monomial_coeffs(tuple(m), _alpha(cone))
    at_one = sum(c * len(_monomials(mu)) for mu, c in coeffs.items())
    return CoefficientTable(
        cone.rank, cone.multiplicity, "jack-expansion", {mu: c / at_one for mu, c in coeffs.items()}
    )


def psi_eigs(m, eigs, cone: ConeStructure):
    """``psi_m`` evaluated at eigenvalue arrays of shape ``(..., r)``.

    Exact when ``eigs`` is a tuple of Fractions/ints.
    """
    m = Partition(m, cone.rank)
    terms = _psi_terms(tuple(m), cone.rank, cone.multiplicity)
    if isinstance(eigs, tuple) and all(isinstance(v, (int, Fraction)) for v in eigs):
        total = Fraction(0)
        for c, e in terms:
            prod = Fraction(1)
            for v, k in zip(eigs, e):
                prod *= Fraction(v) ** k
            total += c * prod
        return total
    eigs = np.asarray(eigs)
    top = m.weight
    powers = [np.ones_like(eigs)]
    for _ in range(top):
        powers.append(powers[-1] * eigs)
    powers = np.stack(powers)  # (top+1, ..., r)
    total = 0
    for c, e in terms:
        prod = float(c)
        for i, k in enumerate(e):
            prod = prod * powers[k][..., i]
        total = total + prod
    return total


def spherical_poly(m, x, cone: ConeStructure):
    """``psi_m(x)``: normalized Jack polynomial in the eigenvalues of ``x``."""
    mat = as_matrix(x, cone)
    ev = eigenvalues(mat)
    val = psi_eigs(m, ev, cone)
    if np.iscomplexobj(val) and not np.iscomplexobj(mat):
        val = np.real(val)
    return val.item() if hasattr(val, "item") else val


# --------------------------------------------------------------------------
# spherical functions with complex index


def _log_minors_batch(y: np.ndarray):
    """Principal-branch logs of leading minors for a batch of 1x1 / 2x2 matrices."""
    r = y.shape[-1]
    minors = [y[..., 0, 0]]
    if r == 2:
        minors.append(y[..., 0, 0] * y[..., 1, 1] - y[..., 0, 1] * y[..., 1, 0])
    logs = []
    for j, mn in enumerate(minors):
        mn = np.asarray(mn)
        if np.iscomplexobj(mn) and np.any(np.imag(mn) != 0):
            if np.any(np.real(mn) <= 0):
                bad = mn[np.real(mn) <= 0].ravel()[0]
                log_minor(bad, f"Delta_{j + 1}")
            logs.append(np.log(mn))
        else:
            mr = np.real(mn)
            if np.any(mr <= 0):
                log_minor(mr[mr <= 0].ravel()[0], f"Delta_{j + 1}")
            logs.append(np.log(mr).astype(complex))
    return logs


def orbit_power_average(alpha, x, cone: ConeStructure, quad: QuadratureSpec):
    """``int_{K∩H} Delta_alpha(k x k^*) dk`` by node quadrature.

    Works for real cone points and, by holomorphic continuation, for complex
    ``x`` whose orbit keeps every leading minor in the right half-plane.
    """
    r = cone.rank
    if r > 2:
        raise UnsupportedRank(f"orbit quadrature is implemented for rank <= 2, got {r}")
    alpha = np.asarray(_as_tuple(alpha, r), dtype=complex)
    x = np.asarray(x)
    ys, w = orbit(x[..., None, :, :], cone, quad)
    logs = _log_minors_batch(ys)
    expo = np.append(alpha[:-1] - alpha[1:], alpha[-1])
    total = sum(e * lg for e, lg in zip(expo, logs))
    return np.sum(np.exp(total) * w, axis=-1)


def spherical_poly_complex(alpha, x, cone: ConeStructure, quad: QuadratureSpec | None = None) -> complex:
    """``psi_alpha(x)`` for complex ``alpha`` from its defining orbit integral."""
    quad = quad or QuadratureSpec()
    mat = as_matrix(x, cone)
    if cone.rank == 1:
        a = complex(np.atleast_1d(alpha)[0])
        return complex(np.exp(a * log_minor(mat[0, 0], "x")))
    return complex(orbit_power_average(alpha, mat, cone, quad))


# --------------------------------------------------------------------------
# dimensions and binomial coefficients


def _hook_product(m: Partition, alpha: Fraction) -> Fraction:
    """``j_m = prod_s (alpha a(s) + l(s) + 1)(alpha a(s) + l(s) + alpha)``."""
    conj = [sum(1 for p in m if p > j) for j in range(m[0])] if m and m[0] else []
    out = Fraction(1)
    for i, row in enumerate(m):
        for j in range(row):
            arm = row - j - 1
            leg = conj[j] - i - 1
            out *= (alpha * arm + leg + 1) * (alpha * arm + leg + alpha)
    return out


def _jack_at_ones(m: Partition, n: int, alpha: Fraction) -> Fraction:
    out = Fraction(1)
    for i, row in enumerate(m):
        for j in range(row):
            out *= n - i + alpha * j
    return out


def dim_pm(m, cone: ConeStructure):
    """``d_m = dim P_m``.

    Uses ``e^{Tr x} = sum_m d_m / (d/r)_m psi_m(x)`` together with the Jack
    expansion of power sums, which gives
    ``d_m = (d/r)_m alpha^|m| J_m(1^r) / j_m`` with ``alpha = 2/a``.
    """
    r = cone.rank
    m = Partition(m, r)
    if r == 1:
        return 1
    alpha = _alpha(cone)
    d_over_r = Fraction(cone.dim, r)
    val = gen_pochhammer(d_over_r, m, cone) * alpha ** m.weight * _jack_at_ones(m, r, alpha) / _hook_product(m, alpha)
    return int(val) if val.denominator == 1 else val


def _prime_nodes(count: int, r: int, seed: int) -> list[tuple]:
    primes = [p for p in range(2, 2000) if all(p % q for q in range(2, int(p**0.5) + 1))]
    rng = np.random.default_rng(seed)
    seen = set()
    nodes = []
    while len(nodes) < count:
        pick = tuple(sorted((int(v) for v in rng.choice(primes[: 4 * count + 8], size=r, replace=False)), reverse=True))
        if pick in seen:
            continue
        seen.add(pick)
        nodes.append(tuple(Fraction(v, 7) for v in pick))
    return nodes


def _exact_solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rows)
    a = DomainMatrix([[QQ(v.numerator, v.denominator) for v in row] for row in rows], (n, n), QQ)
    if a.rank() < n:
        raise SingularInterpolation("interpolation nodes are not unisolvent")
    b = DomainMatrix([[QQ(v.numerator, v.denominator)] for v in rhs], (n, 1), QQ)
    sol = a.lu_solve(b)
    return [Fraction(int(v.numerator), int(v.denominator)) for v in sol.to_list_flat()]


@lru_cache(maxsize=None)
def _binomials(m: tuple, rank: int, multiplicity: int, seed: int) -> dict:
    cone = ConeStructure(rank, multiplicity)
    basis = partitions_up_to(rank, sum(m))
    last = None
    for attempt in range(5):
        nodes = _prime_nodes(len(basis), rank, seed + attempt)
        rows = [[psi_eigs(n, node, cone) for n in basis] for node in nodes]
        rhs = [psi_eigs(m, tuple(v + 1 for v in node), cone) for node in nodes]
        try:
            sol = _exact_solve(rows, rhs)
        except SingularInterpolation as exc:
            last = exc
            continue
        return {n: c for n, c in zip(basis, sol) if c}
    raise last


def binomial_coeffs(m, cone: ConeStructure, seed: int = 0) -> CoefficientTable:
    """Generalized binomials defined by ``psi_m(e + x) = sum_n (m, n) psi_n(x)``."""
    m = Partition(m, cone.rank)
    entries = _binomials(tuple(m), cone.rank, cone.multiplicity, seed)
    return CoefficientTable(cone.rank, cone.multiplicity, "binomial", entries)


# --------------------------------------------------------------------------
# step coefficients


def _frac_or_complex(v):
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, float) and v.is_integer():
        return Fraction(int(v))
    return complex(v)


def _ratio(num, den):
    if den == 0:
        raise ZeroDenominator("vanishing denominator")
    return num / den


def step_coeff(n, k: int, cone: ConeStructure):
    """Lowering coefficient ``(n ; n - e_k)`` for a partition or complex tuple (1-based ``k``).

    ``(n_k + (a/2)(r-k)) prod_{j != k} (n_k - n_j + (a/2)(j-k-1)) / (n_k - n_j + (a/2)(j-k))``
    """
    r = cone.rank
    if not 1 <= k <= r:
        raise IndexError(f"index {k} outside 1..{r}")
    n = [_frac_or_complex(v) for v in _as_tuple(n, r)]
    h = _half(cone.multiplicity)
    out = n[k - 1] + h * (r - k)
    for j in range(1, r + 1):
        if j == k:
            continue
        diff = n[k - 1] - n[j - 1]
        out = out * _ratio(diff + h * (j - k - 1), diff + h * (j - k))
    return out


def c_coeff(n, k: int, cone: ConeStructure, reading: str = "direct"):
    """Raising coefficient ``c_n(k)`` (1-based ``k``).

    ``reading="direct"``:   ``prod_{j != k} (n_k - n_j - (a/2)(j-k-1)) / (n_k - n_j - (a/2)(j-k))``
    ``reading="reflected"``: the same product with ``j - k`` replaced by ``k - j``.
    """
    r = cone.rank
    if not 1 <= k <= r:
        raise IndexError(f"index {k} outside 1..{r}")
    if reading not in ("direct", "reflected"):
        raise ValueError(f"unknown reading {reading!r}")
    n = [_frac_or_complex(v) for v in _as_tuple(n, r)]
    h = _half(cone.multiplicity)
    out = Fraction(1)
    for j in range(1, r + 1):
        if j == k:
            continue
        diff = n[k - 1] - n[j - 1]
        gap = (j - k) if reading == "direct" else (k - j)
        out = out * _ratio(diff - h * (gap - 1), diff - h * gap)
    return out


def psi_norm_sq(m, nu, cone: ConeStructure):
    """``||psi_m||^2 = (d/r)_m / (d_m (nu)_m)`` in the bounded-domain Hilbert space."""
    m = Partition(m, cone.rank)
    return gen_pochhammer(Fraction(cone.dim, cone.rank), m, cone) / (dim_pm(m, cone) * gen_pochhammer(nu, m, cone))
