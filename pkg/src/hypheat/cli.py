"""Command-line front end.

Every subcommand evaluates on a grid and writes one table, either as CSV
with a header row or as a single JSON document.  Floats are written with 17
significant digits in both formats and exact rationals as ``"p/q"`` strings.

Exit status: 0 on success, 2 for configuration errors, 3 for numerical
failures and 4 when ``verify`` finds a failing check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .asymptotics import even_coincidence_series, extract_a_coeffs
from .effaction import (
    w_even_decomposition,
    w_from_trace,
    w_odd_decomposition,
)
from .fourier import phi_lambda, plancherel_density
from .heatkernel import QUAD_RTOL, massive, p1, p_even, p_odd
from .hypgeom import DimensionParams
from .quadrature import ConvergenceError
from .u1gauge import ghost_subtracted_partition_trace, u1_trace
from .verification import run_checks
from .wkb import ghost_subtracted_traces, scalar_coincidence, u1_traces

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4

COMMANDS = ("kernel", "trace", "coeffs", "fourier", "action", "verify")
SECTORS = ("scalar", "u1", "ghost_subtracted")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid command-line configuration."""


@dataclass
class RunConfig:
    """Validated options of one CLI invocation."""

    command: str
    dim: int = 3
    mass: float = 0.0
    r: tuple[float, ...] = ()
    t: tuple[float, ...] = ()
    lam: tuple[float, ...] = ()
    cutoff: tuple[float, ...] = ()
    sector: str = "scalar"
    format: str = "csv"
    rtol: float = QUAD_RTOL
    jobs: int = 1
    checks: tuple[int, ...] = ()
    columns: list[str] = field(default_factory=list, init=False)

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.sector not in SECTORS:
            raise ConfigError(f"unknown sector {self.sector!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        if self.command != "verify":
            if self.dim < 1 or (self.dim == 1 and self.command != "kernel"):
                raise ConfigError("dimension must be at least 2 (1 only for kernel)")
        if not (self.mass >= 0 and np.isfinite(self.mass)):
            raise ConfigError("mass must be finite and nonnegative")
        if not self.rtol > 0:
            raise ConfigError("rtol must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        for name, values, strict in (("r", self.r, False), ("t", self.t, True), ("lam", self.lam, True),
                                     ("cutoff", self.cutoff, True)):
            _check_grid(name, values, strict)
        return self


def _check_grid(name: str, values: Sequence[float], strict: bool) -> None:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"grid {name} contains non-finite values")
    if np.any(np.diff(arr) <= 0):
        raise ConfigError(f"grid {name} must be strictly increasing")
    if strict and arr[0] <= 0:
        raise ConfigError(f"grid {name} must be positive")
    if not strict and arr[0] < 0:
        raise ConfigError(f"grid {name} must be nonnegative")


def parse_grid(text: str) -> tuple[float, ...]:
    """``"a,b,c"`` as a list, or ``"start:stop:count"`` as an inclusive linspace."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return tuple(float(v) for v in np.linspace(float(start), float(stop), int(count)))
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None


# ---------------------------------------------------------------------------
# formatting


def format_value(v) -> str | None:
    """Shared scalar formatting for CSV and JSON."""
    if v is None:
        return None
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g") if np.isfinite(v) else json.dumps(format_value(v))
    return json.dumps(format_value(v))


def render(columns: Sequence[str], rows: Sequence[Sequence], fmt: str) -> str:
    """Render a table as CSV (header row first) or as one JSON document."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(["" if v is None else format_value(v) for v in row])
        return buf.getvalue()
    body = ",\n".join(
        "  {" + ", ".join(f"{json.dumps(c)}: {_json_scalar(v)}" for c, v in zip(columns, row)) + "}" for row in rows
    )
    return '{"columns": ' + json.dumps(list(columns)) + ', "rows": [\n' + body + "\n]}\n"


def _map(func: Callable, items: Sequence, jobs: int) -> list:
    """Evaluate in input order, optionally on worker threads."""
    if jobs == 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def _require(cfg: RunConfig, **grids: str) -> None:
    for name in grids:
        if not getattr(cfg, name):
            raise ConfigError(f"{cfg.command} needs --{name}")


# ---------------------------------------------------------------------------
# commands


def _kernel(cfg: RunConfig):
    _require(cfg, r="", t="")
    n = cfg.dim

    def one(rt):
        r, t = rt
        if n == 1:
            v = p1(r, t)
        elif n % 2:
            v = p_odd(DimensionParams(n), r, t)
        else:
            v = p_even(DimensionParams(n), r, t, cfg.rtol)
        v = massive(v, cfg.mass)
        return (n, cfg.mass, r, t, v.value, v.method.value if v.method else "closed_form")

    pairs = [(r, t) for t in cfg.t for r in cfg.r]
    return ["n", "m", "r", "t", "value", "method"], _map(one, pairs, cfg.jobs)


def _scalar_diagonal(n: int, m: float, t: float, rtol: float) -> float:
    p = DimensionParams(n)
    v = p_odd(p, 0.0, t) if p.is_odd else p_even(p, 0.0, t, rtol)
    return massive(v, m).value


def _u1_dimension(cfg: RunConfig) -> DimensionParams:
    if cfg.dim % 2 == 0:
        raise ConfigError("the U(1) sectors are implemented for odd dimensions")
    return DimensionParams(cfg.dim)


def _trace(cfg: RunConfig):
    _require(cfg, t="")
    n, m = cfg.dim, cfg.mass
    if cfg.sector == "scalar":
        func = lambda t: _scalar_diagonal(n, m, t, cfg.rtol)  # noqa: E731
    elif cfg.sector == "u1":
        p = _u1_dimension(cfg)
        func = lambda t: u1_trace(p, m, t)  # noqa: E731
    else:
        p = _u1_dimension(cfg)
        func = lambda t: ghost_subtracted_partition_trace(p, m, t)  # noqa: E731
    values = _map(func, list(cfg.t), cfg.jobs)
    return ["n", "m", "sector", "t", "value"], [(n, m, cfg.sector, t, v) for t, v in zip(cfg.t, values)]


def _coeffs(cfg: RunConfig):
    n = cfg.dim
    p = DimensionParams(n)
    rows = []
    if cfg.sector == "scalar":
        rows += [(n, "scalar", "b_tilde", l, c) for l, c in enumerate(scalar_coincidence(p))]
        if p.is_odd:
            rows += [(n, "scalar", "a", l, c) for l, c in enumerate(extract_a_coeffs(p.k).coeffs)]
        else:
            rows += [(n, "scalar", "diagonal_series", l, c) for l, c in enumerate(even_coincidence_series(n, 6).coeffs)]
    elif cfg.sector == "u1":
        rows += [(n, "u1", "trace_b_tilde", l, c) for l, c in enumerate(u1_traces(p))]
    else:
        rows += [(n, "ghost_subtracted", "trace_b_tilde", l, c) for l, c in enumerate(ghost_subtracted_traces(p))]
    return ["n", "sector", "kind", "index", "value"], rows


def _fourier(cfg: RunConfig):
    _require(cfg, lam="", r="")
    p = DimensionParams(cfg.dim)

    def one(lr):
        lam, r = lr
        dens = plancherel_density(p, lam) if p.is_odd else None
        return (p.n, lam, r, float(phi_lambda(p, lam, r)), dens)

    pairs = [(lam, r) for lam in cfg.lam for r in cfg.r]
    return ["n", "lam", "r", "phi", "plancherel_density"], _map(one, pairs, cfg.jobs)


def _series_subtraction(coeffs: Sequence[Fraction], n: int, m: float, factorial: bool) -> list[tuple[float, float]]:
    """Monomials ``t^(l - n/2)`` with nonpositive power of ``(4 pi t)^{-n/2} e^{-m^2 t} sum_l c_l t^l``."""
    terms = [float(c) / (float(np.prod(range(1, l + 1))) if factorial else 1.0) for l, c in enumerate(coeffs)]
    out = []
    for j in range(len(terms)):
        if j - n / 2 > 0:
            break
        # product with the exponential, truncated at order j
        cj = sum(terms[l] * (-m * m) ** (j - l) / float(np.prod(range(1, j - l + 1))) for l in range(j + 1))
        out.append((j - n / 2, (4 * np.pi) ** (-n / 2) * cj))
    return out


def _action(cfg: RunConfig):
    _require(cfg, cutoff="")
    n, m = cfg.dim, cfg.mass
    p = DimensionParams(n)
    cols = ["n", "m", "sector", "cutoff", "divergent", "regular", "total", "regular_limit"]
    if cfg.sector == "scalar":
        def one(cut):
            dec = w_odd_decomposition(p, m, cut) if p.is_odd else w_even_decomposition(p, m, cut)
            return (n, m, "scalar", cut, dec.divergent, dec.regular, dec.total, dec.regular_limit)

        return cols, _map(one, list(cfg.cutoff), cfg.jobs)
    if n != 3 or m != 0:
        raise ConfigError("U(1) actions are implemented for n = 3 and m = 0")
    if cfg.sector == "u1":
        trace = lambda t: u1_trace(p, m, t)  # noqa: E731
        sub = _series_subtraction(u1_traces(p), n, m, factorial=False)
    else:
        trace = lambda t: ghost_subtracted_partition_trace(p, m, t)  # noqa: E731
        vec = dict(_series_subtraction(u1_traces(p), n, m, factorial=False))
        ghost = dict(_series_subtraction(scalar_coincidence(p), n, 0.0, factorial=True))
        sub = [(pw, vec[pw] - 2 * ghost[pw]) for pw in vec]

    def one_u1(cut):
        dec = w_from_trace(trace, cut, sub, n=n, mass=m)
        return (n, m, cfg.sector, cut, dec.divergent, dec.regular, dec.total, None)

    return cols, _map(one_u1, list(cfg.cutoff), cfg.jobs)


def _verify(cfg: RunConfig):
    results = run_checks(cfg.checks or None)
    rows = [(r.index, r.name, r.passed, r.deviation, r.tolerance, r.scaled, r.detail) for r in results]
    cols = ["index", "name", "passed", "deviation", "tolerance", "deviation_is_ratio", "detail"]
    return cols, rows, all(r.passed for r in results)


def run(cfg: RunConfig, out=None) -> int:
    """Execute ``cfg`` and write the table to ``out`` (stdout by default)."""
    out = out if out is not None else sys.stdout
    try:
        cfg.validate()
        if cfg.command == "verify":
            cols, rows, ok = _verify(cfg)
        else:
            handler = {"kernel": _kernel, "trace": _trace, "coeffs": _coeffs, "fourier": _fourier, "action": _action}
            cols, rows = handler[cfg.command](cfg)
            ok = True
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, ArithmeticError, OverflowError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out.write(render(cols, rows, cfg.format))
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypheat", description="Heat kernels and one-loop actions on hyperbolic space.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, grids: Sequence[str], sector: bool = False):
        sp.add_argument("--dim", "-n", type=int, default=3, help="dimension n")
        sp.add_argument("--mass", "-m", type=float, default=0.0, help="field mass")
        for g in grids:
            sp.add_argument(f"--{g}", type=parse_grid, default=(), help=f"{g} grid: a,b,c or start:stop:count")
        if sector:
            sp.add_argument("--sector", choices=SECTORS, default="scalar")
        sp.add_argument("--format", choices=FORMATS, default="csv")
        sp.add_argument("--rtol", type=float, default=QUAD_RTOL, help="quadrature tolerance for even-n kernels")
        sp.add_argument("--jobs", type=int, default=1, help="worker threads for grid evaluation")
        sp.add_argument("--output", "-o", help="write to this file instead of stdout")

    common(sub.add_parser("kernel", help="scalar heat kernel on an (r, t) grid"), ("r", "t"))
    common(sub.add_parser("trace", help="coincidence trace on a t grid"), ("t",), sector=True)
    common(sub.add_parser("coeffs", help="exact small-time coefficients"), (), sector=True)
    common(sub.add_parser("fourier", help="spherical functions and Plancherel density"), ("lam", "r"))
    common(sub.add_parser("action", help="one-loop action density on a cutoff grid"), ("cutoff",), sector=True)
    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--all", action="store_true", help="run every check (the default)")
    v.add_argument("--check", type=int, action="append", default=[], help="run only this check (repeatable)")
    v.add_argument("--format", choices=FORMATS, default="csv")
    v.add_argument("--output", "-o")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    kw = {k: getattr(ns, k) for k in ("dim", "mass", "r", "t", "lam", "cutoff", "sector", "rtol", "jobs") if hasattr(ns, k)}
    if ns.command == "verify":
        kw["checks"] = tuple(ns.check)
    return RunConfig(command=ns.command, format=ns.format, **kw)


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = config_from_args(ns)
    if ns.output:
        buf = io.StringIO()
        code = run(cfg, buf)
        with open(ns.output, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
        return code
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
