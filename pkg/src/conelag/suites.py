"""Identity suites over seeded sample points.

Each suite returns a list of :class:`IdentityReport`.  Work is spread over a
thread pool whose size is capped by ``CONELAG_THREADS``; results are merged
in submission order, so reports do not depend on the thread count.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .errors import UnsupportedCone
from .finitediff import FiniteDiffSpec
from .jordan import ConeStructure
from .laguerre import (
    LaguerreSpec,
    check_classical_relations,
    check_hermitian_diffops,
    check_euler_recurrence,
    check_recurrence_rank1_exact,
    laguerre_fn_batch,
    laguerre_norm_sq,
)
from .meixner import (
    ExtractionSpec,
    RhoVector,
    check_difference_relations_general,
    check_difference_relations_rank1_exact,
    check_mp_rank1_relations,
)
from .quadrature import QuadratureSpec, calibrate, cone_quadrature
from .reports import IdentityReport, compare, skipped
from .spherical import Partition, partitions_up_to
from .transforms import (
    check_laplace_identity,
    check_laplace_rank1_closed_form,
    classical_generating_sum,
    generating_closed_form_rank1,
    generating_series,
)

SUITES = ("recurrence", "difference", "diffops", "laplace", "orthogonality", "generating")

DEFAULT_TOLERANCES = {
    "recurrence": {1: 1e-8, 2: 1e-6},
    "difference": {1: 0.0, 2: 1e-5},
    "diffops": {1: 1e-7, 2: 1e-5},
    "laplace": {1: 1e-10, 2: 1e-3},
    "orthogonality": {1: 1e-8, 2: 1e-3},
    "generating": {1: 1e-8, 2: 1e-4},
}


# The rank-1 series tail at |w| = 0.3 is about 1e-8 relative at order 15 for
# x near 2, so the suite truncates later; rank 2 uses the stated order 8.
GENERATING_ORDER = {1: 25, 2: 8}


class ConfigError(ValueError):
    """Invalid run configuration (exit code 3 in the CLI)."""


@dataclass(frozen=True)
class RunConfig:
    rank: int = 1
    multiplicity: int = 1
    nu: float = 3.0
    max_weight: int = 2
    seed: int = 0
    n_points: int = 10
    rho_sign: int = -1
    reading: str = "standard"
    tolerances: dict = field(default_factory=dict)
    quadrature: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rank not in (1, 2):
            raise ConfigError("rank must be 1 or 2")
        if self.multiplicity not in (1, 2):
            raise ConfigError("multiplicity must be 1 or 2")
        if self.rho_sign not in (1, -1):
            raise ConfigError("rho sign must be +1 or -1")
        if self.reading not in ("standard", "alternate"):
            raise ConfigError("reading must be 'standard' or 'alternate'")
        if self.max_weight < 0 or self.n_points < 1:
            raise ConfigError("max weight must be >= 0 and the point count >= 1")
        for suite, tol in self.tolerances.items():
            if suite not in SUITES:
                raise ConfigError(f"unknown suite {suite!r} in tolerances")
            if not tol > 0:
                raise ConfigError(f"tolerance for {suite} must be positive")
        bad = set(self.quadrature) - {f.name for f in fields(QuadratureSpec)}
        if bad:
            raise ConfigError(f"unknown quadrature fields {sorted(bad)}")

    @property
    def cone(self) -> ConeStructure:
        return ConeStructure(self.rank, self.multiplicity)

    def tol(self, suite: str) -> float:
        if suite in self.tolerances:
            return float(self.tolerances[suite])
        return DEFAULT_TOLERANCES[suite][self.rank]

    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(**self.quadrature)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        doc = dict(doc)
        if "cone" in doc:
            cone = doc.pop("cone")
            doc.setdefault("rank", cone.get("rank", 1))
            doc.setdefault("multiplicity", cone.get("multiplicity", 1))
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        return cls(**doc)

    def to_dict(self) -> dict:
        return asdict(self)


def _threads() -> int:
    raw = os.environ.get("CONELAG_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, min(n, 32))


def parallel_map(fn, items) -> list:
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# sample points


def random_rotation(rng: np.random.Generator, cone: ConeStructure) -> np.ndarray:
    r = cone.rank
    a = rng.normal(size=(r, r))
    if cone.multiplicity == 2:
        a = a + 1j * rng.normal(size=(r, r))
    q, rr = np.linalg.qr(a)
    return q * (np.diag(rr) / np.abs(np.diag(rr)))


def sample_cone_points(cone: ConeStructure, count: int, seed: int, low: float = 0.3, high: float = 2.0) -> list:
    """Cone points with eigenvalues uniform in ``[low, high]``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        ev = rng.uniform(low, high, size=cone.rank)
        if cone.rank == 1:
            out.append(np.array([[ev[0]]]))
            continue
        k = random_rotation(rng, cone)
        x = k @ np.diag(ev) @ k.conj().T
        x = 0.5 * (x + x.conj().T)
        out.append(np.real(x) if cone.multiplicity == 1 else x)
    return out


def sample_disk_points(cone: ConeStructure, count: int, seed: int, radius: float) -> list:
    """Real-disk points with spectral norm at most ``radius``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        ev = rng.uniform(-radius, radius, size=cone.rank)
        if cone.rank == 1:
            out.append(np.array([[ev[0]]]))
            continue
        k = random_rotation(rng, cone)
        w = k @ np.diag(ev) @ k.conj().T
        w = 0.5 * (w + w.conj().T)
        out.append(np.real(w) if cone.multiplicity == 1 else w)
    return out


def sample_lambda_pairs(cone: ConeStructure, count: int, seed: int, max_weight: int):
    rng = np.random.default_rng(seed)
    parts = partitions_up_to(cone.rank, max_weight)
    out = []
    for _ in range(count):
        lam = tuple(float(v) for v in np.round(rng.uniform(-0.5, 0.5, size=cone.rank), 6))
        out.append((lam, parts[int(rng.integers(len(parts)))]))
    return out


# --------------------------------------------------------------------------
# suites


def suite_recurrence(cfg: RunConfig) -> list[IdentityReport]:
    cone, tol = cfg.cone, cfg.tol("recurrence")
    reports = []
    if cone.rank == 1:
        for n in range(cfg.max_weight + 1):
            reports.extend(check_recurrence_rank1_exact(cfg.nu, n, cfg.reading)[:2])
    pts = sample_cone_points(cone, cfg.n_points, cfg.seed)
    jobs = [(m, x) for x in pts for m in partitions_up_to(cone.rank, cfg.max_weight)]

    def run(job):
        m, x = job
        first, second = check_euler_recurrence(LaguerreSpec(cfg.nu, m, cone), x, reading=cfg.reading, tol=tol)
        return [first] if cone.rank > 1 else [first, second]

    for rs in parallel_map(run, jobs):
        reports.extend(rs)
    return reports


def suite_diffops(cfg: RunConfig) -> list[IdentityReport]:
    cone, tol = cfg.cone, cfg.tol("diffops")
    if cone.rank > 1 and cone.multiplicity != 2:
        raise UnsupportedCone("diffops requires multiplicity 2")
    pts = sample_cone_points(cone, cfg.n_points, cfg.seed)
    jobs = [(m, x) for x in pts for m in partitions_up_to(cone.rank, cfg.max_weight)]

    def run(job):
        m, x = job
        out = list(check_hermitian_diffops(LaguerreSpec(cfg.nu, m, cone), x, reading=cfg.reading, tol=tol))
        if cone.rank == 1:
            out.extend(check_classical_relations(cfg.nu, m[0], float(x[0, 0]), tol=tol))
        return out

    reports = []
    for rs in parallel_map(run, jobs):
        reports.extend(rs)
    return reports


def suite_difference(cfg: RunConfig) -> list[IdentityReport]:
    cone, tol = cfg.cone, cfg.tol("difference")
    c_reading = "reflected" if cfg.reading == "standard" else "direct"
    shifted = cfg.reading == "standard"
    if cone.rank == 1:
        reports = []
        for n in range(max(cfg.max_weight, 0) + 1):
            reports.extend(check_mp_rank1_relations(cfg.nu, n))
            reports.extend(check_difference_relations_rank1_exact(cfg.nu, n, c_reading, shifted))
        return reports
    rho = RhoVector.for_cone(cone, cfg.rho_sign)
    quad, ext = cfg.quad(), ExtractionSpec()
    pairs = sample_lambda_pairs(cone, cfg.n_points, cfg.seed, cfg.max_weight)

    def run(pair):
        lam, m = pair
        return list(check_difference_relations_general(cfg.nu, m, lam, rho, quad, ext, c_reading, shifted, tol))

    reports = []
    for rs in parallel_map(run, pairs):
        reports.extend(rs)
    return reports


def suite_laplace(cfg: RunConfig) -> list[IdentityReport]:
    cone, tol = cfg.cone, cfg.tol("laplace")
    if cone.rank == 1:
        jobs = [(n, z) for n in range(cfg.max_weight + 1) for z in (1.5, 2 + 1j)]

        def run1(job):
            n, z = job
            return [check_laplace_rank1_closed_form(cfg.nu, n, z, tol=tol),
                    check_laplace_identity(cfg.nu, (n,), np.array([[z]]), cone, tol=tol)]

        reports = []
        for rs in parallel_map(run1, jobs):
            reports.extend(rs)
        return reports
    quad = calibrate(cone, cfg.quad())
    zs = [np.diag([2.0, 1.5]), np.diag([2.0 + 0.5j, 1.5 + 0.5j])]
    jobs = [(m, z) for z in zs for m in partitions_up_to(2, cfg.max_weight)]
    return parallel_map(lambda job: check_laplace_identity(cfg.nu, job[0], job[1], cone, quad, tol), jobs)


def gram_reports(nu, cone: ConeStructure, max_weight: int, quad: QuadratureSpec, tol: float) -> list[IdentityReport]:
    """Gram matrix of ``{l_m : |m| <= max_weight}`` against the closed-form norms."""
    quad = calibrate(cone, quad) if cone.rank > 1 else quad
    parts = partitions_up_to(cone.rank, max_weight)
    specs = [LaguerreSpec(nu, m, cone) for m in parts]
    cache = {}

    def integrate(i, j):
        f = lambda p: laguerre_fn_batch(specs[i], p) * laguerre_fn_batch(specs[j], p)
        return float(np.real(cone_quadrature(cone, nu, f, quad, decay=2.0)))

    pairs = [(i, j) for i in range(len(specs)) for j in range(i, len(specs))]
    for (i, j), v in zip(pairs, parallel_map(lambda ij: integrate(*ij), pairs)):
        cache[(i, j)] = v
    reports = []
    for i, j in pairs:
        point = {"m": list(parts[i]), "n": list(parts[j]), "nu": float(nu), "rank": cone.rank, "a": cone.multiplicity}
        if i == j:
            reports.append(compare("gram-diagonal", point, cache[(i, i)], laguerre_norm_sq(specs[i]), tol))
        else:
            scale = float(np.sqrt(abs(cache[(i, i)] * cache[(j, j)])))
            rel = abs(cache[(i, j)]) / scale
            reports.append(IdentityReport("gram-off-diagonal", point, cache[(i, j)], 0.0, abs(cache[(i, j)]), rel,
                                          tol, "pass" if rel < tol else "fail"))
    return reports


def suite_orthogonality(cfg: RunConfig) -> list[IdentityReport]:
    cone = cfg.cone
    if cfg.nu <= cone.wallach_threshold:
        raise ConfigError("orthogonality needs nu above the Wallach threshold")
    top = cfg.max_weight if cone.rank > 1 else max(cfg.max_weight, 6)
    return gram_reports(cfg.nu, cone, top, cfg.quad(), cfg.tol("orthogonality"))


def suite_generating(cfg: RunConfig) -> list[IdentityReport]:
    cone, tol = cfg.cone, cfg.tol("generating")
    reports = []
    if cone.rank == 1:
        rng = np.random.default_rng(cfg.seed)
        for _ in range(cfg.n_points):
            w = float(np.round(rng.uniform(-0.3, 0.3), 6))
            x = float(np.round(rng.uniform(0.3, 2.0), 6))
            order = GENERATING_ORDER[1]
            point = {"w": w, "x": x, "nu": float(cfg.nu), "order": order}
            closed = generating_closed_form_rank1(cfg.nu, w, x)
            reports.append(compare("generating-rank1-closed-form", point,
                                   classical_generating_sum(cfg.nu, w, x, order), closed, tol))
            res = generating_series(cfg.nu, w, x, order, cone)
            reports.append(compare("generating-series", point, res.partial_sum, res.lhs, tol))
        return reports
    quad = cfg.quad()
    ws = sample_disk_points(cone, cfg.n_points, cfg.seed, 0.15)
    xs = sample_cone_points(cone, cfg.n_points, cfg.seed + 1)

    def run(pair):
        w, x = pair
        res = {N: generating_series(cfg.nu, w, x, N, cone, quad) for N in (4, 6, 8)}
        point = {"w": np.round(w, 12).tolist() if np.isrealobj(w) else str(w.tolist()),
                 "x": np.round(x, 12).tolist() if np.isrealobj(x) else str(x.tolist()), "nu": float(cfg.nu)}
        out = [compare("generating-series", {**point, "order": 8}, res[8].partial_sum, res[8].lhs, tol)]
        r = [res[N].residual for N in (4, 6, 8)]
        decreasing = r[0] > r[1] > r[2] or r[2] < 1e-13
        out.append(IdentityReport("generating-decay", {**point, "orders": [4, 6, 8]}, r[2], r[0], r[0] - r[2],
                                  r[2] / r[0] if r[0] else 0.0, 1.0, "pass" if decreasing else "fail",
                                  "residuals at orders 4, 6, 8", {"residuals": r}))
        return out

    for rs in parallel_map(run, list(zip(ws, xs))):
        reports.extend(rs)
    return reports


RUNNERS = {
    "recurrence": suite_recurrence,
    "difference": suite_difference,
    "diffops": suite_diffops,
    "laplace": suite_laplace,
    "orthogonality": suite_orthogonality,
    "generating": suite_generating,
}


def run_suite(name: str, cfg: RunConfig) -> list[IdentityReport]:
    """Run one suite or ``"all"``; under ``"all"`` unsupported suites are recorded as skipped."""
    if name == "all":
        out = []
        for suite in SUITES:
            try:
                out.extend(RUNNERS[suite](cfg))
            except UnsupportedCone as exc:
                out.append(skipped(suite, {"rank": cfg.rank, "a": cfg.multiplicity}, str(exc)))
        return out
    if name not in RUNNERS:
        raise ConfigError(f"unknown suite {name!r}")
    return RUNNERS[name](cfg)
