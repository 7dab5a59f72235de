"""Central finite differences along matrix directions (fourth order)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


@dataclass(frozen=True)
class FiniteDiffSpec:
    """Step sizes relative to ``1 + ||x||``.

    ``step`` is used for first derivatives and ``step2`` for second ones;
    both stencils are fourth order, so the truncation error is
    ``O(h^4)`` and the rounding error ``O(eps / h^k)``.
    """

    step: float = 1e-4
    step2: float = 1e-3

    def scaled(self, x, second: bool = False) -> float:
        h = self.step2 if second else self.step
        return h * (1.0 + float(np.linalg.norm(np.asarray(x))))


def directional(f, x, v, h):
    """``d/de f(x + e v)`` at ``e = 0``; ``f`` maps ``(..., r, r)`` arrays to ``(...)``."""
    pts = x[None] + _OFFSETS[:, None, None] * h * v[None]
    vals = np.asarray(f(pts))
    return np.tensordot(_WEIGHTS, vals, axes=1) / h


def hessian(f, x, dirs, h):
    """Matrix of mixed second derivatives ``d_u d_v f(x)`` over ``dirs``."""
    n = len(dirs)
    o = _OFFSETS[:, None] * h
    pts = []
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    for i, j in pairs:
        grid = x[None, None] + o[:, :, None, None] * dirs[i][None, None] + (o.T)[:, :, None, None] * dirs[j][None, None]
        pts.append(grid)
    pts = np.stack(pts)  # (pairs, 4, 4, r, r)
    vals = np.asarray(f(pts))
    w = np.outer(_WEIGHTS, _WEIGHTS)
    mixed = np.einsum("pab,ab->p", vals, w) / (h * h)
    out = np.empty((n, n), dtype=mixed.dtype)
    for (i, j), v in zip(pairs, mixed):
        out[i, j] = out[j, i] = v
    return out


def matrix_units(r: int):
    """``E_ab`` for all index pairs, as complex arrays, keyed by ``(a, b)``."""
    units = {}
    for a in range(r):
        for b in range(r):
            e = np.zeros((r, r), dtype=complex)
            e[a, b] = 1.0
            units[(a, b)] = e
    return units
