"""Command-line front end: ``conelag eval|check|table``.

Exit codes: 0 success, 1 a non-skipped check failed, 2 domain error,
3 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from .errors import ConeError, UnsupportedCone
from .jordan import ConeStructure, element
from .laguerre import LaguerreSpec, laguerre_fn, laguerre_norm_sq, laguerre_poly
from .meixner import RhoVector, mp_general, mp_rank1
from .quadrature import calibrate, dump_nodes
from .reports import SKIPPED, summarize
from .spherical import (
    Partition,
    binomial_coeffs,
    gindikin_gamma,
    partitions_up_to,
    spherical_poly,
    spherical_poly_complex,
)
from .suites import SUITES, ConfigError, RunConfig, gram_reports, run_suite
from .transforms import q_basis

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_CONFIG = 0, 1, 2, 3


# --------------------------------------------------------------------------
# argument parsing helpers


def parse_number(text: str):
    """``"2"``, ``"3/2"`` and ``"0.5"`` become Fractions; anything else goes through ``complex``."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        c = complex(text.replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"not a number: {text!r}") from exc
    return c.real if c.imag == 0 else c


def _numeric(v):
    return float(v) if isinstance(v, Fraction) else v


def parse_tuple(text: str) -> tuple:
    return tuple(parse_number(p) for p in text.split(",") if p.strip())


def parse_partition(text: str, rank: int) -> Partition:
    try:
        parts = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"partition must be comma-separated integers: {text!r}") from exc
    return Partition(parts, rank)


def parse_point(text: str, cone: ConeStructure) -> np.ndarray:
    """``diag:2,4``, a scalar, or a JSON nested list (complex entries as strings)."""
    text = text.strip()
    if text.startswith("diag:"):
        vals = [_numeric(v) for v in parse_tuple(text[5:])]
        if len(vals) != cone.rank:
            raise ConfigError(f"diag needs {cone.rank} entries")
        return np.diag(np.array(vals, dtype=complex if any(isinstance(v, complex) for v in vals) else float))
    if text.startswith("["):
        rows = json.loads(text)
        mat = np.array([[_numeric(parse_number(str(v))) for v in row] for row in rows])
        if np.iscomplexobj(mat) and not np.allclose(mat, mat.conj().T):
            return mat
        return element(mat, cone)
    v = _numeric(parse_number(text))
    if cone.rank != 1:
        return v * np.eye(cone.rank)
    return np.array([[v]])


def _fmt(v, pretty: bool):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex) or np.iscomplexobj(v):
        c = complex(v)
        if c.imag == 0:
            return _fmt(c.real, pretty)
        return f"{c.real:.12g}{c.imag:+.12g}j" if pretty else f"{c.real!r}{c.imag:+}j"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}" if pretty else repr(float(v))
    if isinstance(v, (tuple, list)):
        return "(" + ",".join(str(p) for p in v) + ")"
    return str(v)


def _json_value(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, (complex, np.complexfloating)):
        c = complex(v)
        return c.real if c.imag == 0 else {"re": c.real, "im": c.imag}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, tuple):
        return list(v)
    return v


def render_rows(rows: list[dict], fmt: str, title: str) -> str:
    if fmt == "json":
        return json.dumps({"table": title, "rows": [{k: _json_value(v) for k, v in r.items()} for r in rows]}) + "\n"
    cols = list(rows[0]) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r[c], False) for c in cols])
        return buf.getvalue()
    cells = [[_fmt(r[c], True) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(x.ljust(w) for x, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# configuration


_CFG_FLAGS = {"rank": "rank", "a": "multiplicity", "nu": "nu", "max_weight": "max_weight", "seed": "seed",
              "points": "n_points", "rho_sign": "rho_sign", "reading": "reading"}


def build_config(args) -> RunConfig:
    doc = {}
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
    for flag, key in _CFG_FLAGS.items():
        val = getattr(args, flag, None)
        if val is not None:
            doc[key] = val
    if "nu" in doc:
        nu = doc["nu"]
        nu = _numeric(parse_number(str(nu)))
        if isinstance(nu, complex):
            raise ConfigError("nu must be real in a run configuration")
        doc["nu"] = float(nu)
    try:
        return RunConfig.from_dict(doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


# --------------------------------------------------------------------------
# commands


def _partition_arg(args, cfg: RunConfig) -> Partition:
    if args.m is not None:
        return parse_partition(args.m, cfg.rank)
    if args.n is not None:
        return Partition((args.n,), cfg.rank)
    raise ConfigError("give --m (or --n at rank 1)")


def _nu_arg(args, cfg: RunConfig):
    return parse_number(args.nu) if args.nu is not None else Fraction(cfg.nu)


def cmd_eval(args, cfg: RunConfig) -> tuple[list[dict], str]:
    cone = cfg.cone
    fn = args.function
    nu = _nu_arg(args, cfg)
    nu_f = _numeric(nu)
    if fn == "gamma":
        if args.lam is None:
            raise ConfigError("gamma needs --lambda")
        lam = tuple(_numeric(v) for v in parse_tuple(args.lam))
        value = gindikin_gamma(lam, cone)
        how = "product of one-dimensional gamma values"
    elif fn in ("laguerre", "laguerre-fn"):
        if args.x is None:
            raise ConfigError(f"{fn} needs --x")
        spec = LaguerreSpec(nu_f, _partition_arg(args, cfg), cone)
        x = parse_point(args.x, cone)
        if fn == "laguerre":
            value, how = laguerre_poly(spec, x), "binomial expansion in psi_n(-x)"
        else:
            value, how = laguerre_fn(spec, x), "e^{-Tr x} times the binomial expansion at 2x"
    elif fn == "spherical":
        if args.x is None:
            raise ConfigError("spherical needs --x")
        x = parse_point(args.x, cone)
        if args.lam is not None:
            alpha = tuple(_numeric(v) for v in parse_tuple(args.lam))
            value, how = spherical_poly_complex(alpha, x, cone, cfg.quad()), "orbit average of the power function"
        else:
            value, how = spherical_poly(_partition_arg(args, cfg), x, cone), "normalized Jack polynomial"
    elif fn == "mp":
        if args.lam is None:
            raise ConfigError("mp needs --lambda")
        lam = tuple(_numeric(v) for v in parse_tuple(args.lam))
        if cone.rank == 1:
            n = args.n if args.n is not None else _partition_arg(args, cfg)[0]
            value, how = mp_rank1(nu, n)(complex(lam[0])), "exact product of binomial series"
        else:
            rho = RhoVector.for_cone(cone, cfg.rho_sign)
            value = mp_general(nu_f, _partition_arg(args, cfg), lam, rho, cfg.quad())
            how = "torus extraction from the spherical generating function"
    elif fn == "q-basis":
        z = args.z if args.z is not None else args.x
        if z is None:
            raise ConfigError("q-basis needs --z")
        value = q_basis(nu_f, _partition_arg(args, cfg), parse_point(z, cone), cone)
        how = "psi_m of the Cayley image times the tube power"
    else:
        raise ConfigError(f"unknown function {fn!r}")
    return [{"function": fn, "value": value, "provenance": how}], fn


def cmd_table(args, cfg: RunConfig) -> tuple[list[dict], str]:
    cone = cfg.cone
    name = args.table
    nu = _nu_arg(args, cfg)
    if name == "norms":
        reading = cfg.reading
        rows = [{"m": m, "norm_sq": laguerre_norm_sq(LaguerreSpec(nu, m, cone), reading), "reading": reading}
                for m in partitions_up_to(cone.rank, cfg.max_weight)]
    elif name == "orthogonality":
        rows = [{"m": tuple(r.point["m"]), "n": tuple(r.point["n"]), "value": r.lhs.real,
                 "expected": r.rhs.real, "rel_residual": r.rel_residual, "status": r.status}
                for r in gram_reports(float(nu), cone, cfg.max_weight, cfg.quad(), cfg.tol("orthogonality"))]
    elif name == "mp-coeffs":
        if cone.rank != 1:
            raise ConeError("exact coefficient tables exist only at rank 1")
        n = args.n if args.n is not None else _partition_arg(args, cfg)[0]
        rows = [{"power": k, "re": re, "im": im} for k, (re, im) in enumerate(mp_rank1(nu, n).coefficients())]
    elif name == "binomials":
        table = binomial_coeffs(_partition_arg(args, cfg), cone)
        rows = [{"n": n, "value": v} for n, v in sorted(table.items(), key=lambda kv: (sum(kv[0]), kv[0]))]
    else:
        raise ConfigError(f"unknown table {name!r}")
    return rows, name


def cmd_check(args, cfg: RunConfig, out) -> int:
    reports = run_suite(args.suite, cfg)
    fmt = args.format
    if fmt == "json":
        for r in reports:
            out.write(json.dumps({**r.to_dict(), "seed": cfg.seed}) + "\n")
    else:
        rows = [{"identity": r.identity, "status": r.status, "rel_residual": r.rel_residual,
                 "tolerance": r.tolerance, "point": json.dumps(r.point), "seed": cfg.seed} for r in reports]
        out.write(render_rows(rows, fmt, args.suite))
    counts = summarize(reports)
    info = sys.stderr if out is sys.stdout else sys.stdout
    print(f"summary: {args.suite} pass={counts['pass']} fail={counts['fail']} skipped={counts[SKIPPED]}", file=info)
    for r in reports:
        if r.status == SKIPPED:
            print(f"skipped: {r.identity} {json.dumps(r.point)} {r.note}", file=info)
    return EXIT_FAIL if counts["fail"] else EXIT_OK


# --------------------------------------------------------------------------
# entry point


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--rank", type=int)
    p.add_argument("--a", type=int, help="multiplicity: 1 real symmetric, 2 complex Hermitian")
    p.add_argument("--nu")
    p.add_argument("--max-weight", dest="max_weight", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--points", type=int, help="number of seeded sample points")
    p.add_argument("--rho-sign", dest="rho_sign", type=int, choices=(1, -1))
    p.add_argument("--reading", choices=("standard", "alternate"))
    p.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument("--dump-nodes", dest="dump_nodes", help="write the quadrature nodes as CSV")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conelag", description="Laguerre and Meixner-Pollaczek functions on rank-2 symmetric cones")
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eval", help="evaluate one function")
    pe.add_argument("function", choices=("laguerre", "laguerre-fn", "spherical", "mp", "q-basis", "gamma"))
    pe.add_argument("--m")
    pe.add_argument("--n", type=int)
    pe.add_argument("--x")
    pe.add_argument("--z")
    pe.add_argument("--lambda", dest="lam")
    _add_common(pe)

    pc = sub.add_parser("check", help="run an identity suite")
    pc.add_argument("suite", choices=SUITES + ("all",))
    _add_common(pc)

    pt = sub.add_parser("table", help="print a coefficient table")
    pt.add_argument("table", choices=("norms", "orthogonality", "mp-coeffs", "binomials"))
    pt.add_argument("--m")
    pt.add_argument("--n", type=int)
    _add_common(pt)
    return parser


def _error(kind: str, exc: Exception, code: int) -> int:
    print(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
    except (ConfigError, ValueError) as exc:
        return _error("config", exc, EXIT_CONFIG)

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        if args.command == "check":
            try:
                code = cmd_check(args, cfg, out)
            except (ConfigError, UnsupportedCone) as exc:
                return _error("config", exc, EXIT_CONFIG)
            except ConeError as exc:
                return _error("domain", exc, EXIT_DOMAIN)
        else:
            try:
                rows, title = cmd_eval(args, cfg) if args.command == "eval" else cmd_table(args, cfg)
            except ConfigError as exc:
                return _error("config", exc, EXIT_CONFIG)
            except (ConeError, ValueError, ZeroDivisionError) as exc:
                return _error("domain", exc, EXIT_DOMAIN)
            if args.command == "eval" and args.format == "json":
                out.write(json.dumps({k: _json_value(v) for k, v in rows[0].items()}) + "\n")
            else:
                out.write(render_rows(rows, args.format, title))
            code = EXIT_OK
        if args.dump_nodes:
            nu = float(cfg.nu) if args.nu is None else float(_numeric(parse_number(args.nu)))
            with open(args.dump_nodes, "w") as fh:
                fh.write(dump_nodes(cfg.cone, nu, calibrate(cfg.cone, cfg.quad())))
        return code
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
