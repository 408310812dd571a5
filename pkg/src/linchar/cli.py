"""Command-line front end.

Reports (``verify``, ``gof``) are JSON objects by default; curves
(``sample``, ``residual``, ``solve``, ``product``) are CSV.  Exit status is
0 on success, 2 on invalid arguments and 3 when ``--assert`` finds a
decision that contradicts the theorem's prediction.
"""

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from . import distributions as dist
from . import fixpoint, func_equations, hypothesis_tests
from .ecf import Grid, GridFunction, ecf
from .linear_forms import (CHARACTERIZED_FAMILY, TheoremId, sample_identity_pair,
                           sample_independence_pair)

EXIT_OK, EXIT_USAGE, EXIT_ASSERT = 0, 2, 3

REPORT_KEYS = ("command", "config", "statistic", "p_value", "reject", "seed",
               "runtime_ms", "version")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    n: int = 10000
    alpha: float = 0.05
    replicates: int = 199
    t_max: float = None
    grid_points: int = None
    family: str = None
    scale: float = 1.0
    theorem: str = None
    order: int = 3
    method: str = "ks"
    equation: str = None
    empirical: bool = False
    depth: int = 20
    tolerance: float = 1e-8
    terms: int = 30
    workers: int = 1

    def validate(self):
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        if self.n < 1:
            raise UsageError("--n must be a positive integer")
        if not 0 < self.alpha < 1:
            raise UsageError("--alpha must lie in (0, 1)")
        if self.replicates < 99:
            raise UsageError("--replicates must be at least 99")
        if self.t_max is not None and not (np.isfinite(self.t_max) and self.t_max > 0):
            raise UsageError("--t-max must be positive")
        if self.grid_points is not None and self.grid_points < 3:
            raise UsageError("--grid-points must be at least 3")
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise UsageError("the scale parameter must be positive")
        if self.order < 2:
            raise UsageError("--order must be at least 2")
        if self.terms < 1:
            raise UsageError("--terms must be positive")
        if self.workers < 1:
            raise UsageError("--workers must be positive")

    def public(self):
        """Config fields relevant to ``command``, for the report."""
        keep = {
            "sample": ("family", "scale", "n", "seed"),
            "verify": ("theorem", "order", "family", "scale", "n", "seed", "alpha", "method",
                       "replicates", "t_max", "grid_points"),
            "gof": ("theorem", "order", "family", "scale", "n", "seed", "alpha", "replicates",
                    "t_max", "grid_points"),
            "residual": ("equation", "family", "scale", "empirical", "n", "seed", "t_max",
                         "grid_points"),
            "solve": ("t_max", "depth", "tolerance", "grid_points"),
            "product": ("scale", "terms", "t_max", "grid_points"),
        }[self.command]
        d = asdict(self)
        return {k: d[k] for k in keep}


def _theorem(cfg):
    return TheoremId.parse(cfg.theorem, cfg.order if cfg.theorem.lower() == "t1a" else None)


def _spec(cfg):
    return dist.make(cfg.family, cfg.scale)


def _report(cfg, statistic, p_value, reject, started, extra=None):
    config = cfg.public()
    if extra:
        config.update(extra)
    return dict(zip(REPORT_KEYS, (cfg.command, config, statistic, p_value, reject, cfg.seed,
                                  round((time.perf_counter() - started) * 1e3, 3),
                                  __version__)))


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _report_csv(report):
    row = dict(report)
    row["config"] = json.dumps(report["config"], sort_keys=True)
    return _csv(REPORT_KEYS, [[row[k] for k in REPORT_KEYS]])


# --------------------------------------------------------------------------
# commands

def cmd_sample(cfg, fmt):
    started = time.perf_counter()
    batch = dist.sample(_spec(cfg), cfg.n, cfg.seed)
    if fmt == "json":
        return {"command": "sample", "config": cfg.public(), "values": batch.values.tolist(),
                "seed": cfg.seed, "runtime_ms": round((time.perf_counter() - started) * 1e3, 3),
                "version": __version__}, EXIT_OK
    return _csv(["value"], ([v] for v in batch.values)), EXIT_OK


def cmd_verify(cfg, fmt, assert_mode):
    started = time.perf_counter()
    theorem = _theorem(cfg)
    spec = _spec(cfg)
    grid = None
    if cfg.t_max is not None or cfg.grid_points is not None:
        grid = Grid.uniform(cfg.t_max or 8.0, cfg.grid_points or 33)
    if theorem.name == "T2":
        pairs = sample_independence_pair(spec, cfg.n, cfg.seed)
        res = hypothesis_tests.independence_test(pairs, grid, cfg.replicates, cfg.seed,
                                                 cfg.alpha, workers=cfg.workers)
    else:
        lhs, rhs = sample_identity_pair(theorem, spec, cfg.n, cfg.seed)
        if cfg.method == "ks":
            res = hypothesis_tests.ks_two_sample(lhs, rhs, cfg.alpha)
        else:
            res = hypothesis_tests.cf_equality_test(lhs, rhs, grid, cfg.replicates, cfg.seed,
                                                    cfg.alpha, workers=cfg.workers)
    predicted = CHARACTERIZED_FAMILY[theorem.name] != spec.family
    report = _report(cfg, res.statistic, res.p_value, res.reject, started,
                     {"test": res.method, "predicted_reject": predicted})
    status = EXIT_ASSERT if assert_mode and res.reject != predicted else EXIT_OK
    return report, status


def cmd_gof(cfg, fmt, assert_mode):
    started = time.perf_counter()
    theorem = _theorem(cfg)
    null_family = CHARACTERIZED_FAMILY[theorem.name]
    batch = dist.sample(_spec(cfg), cfg.n, cfg.seed)
    res = hypothesis_tests.characterization_gof(
        batch, null_family, theorem, cfg.replicates, cfg.seed, cfg.alpha,
        t_max=cfg.t_max or 8.0, points=cfg.grid_points or 129, workers=cfg.workers)
    predicted = null_family != _spec(cfg).family
    report = _report(cfg, res.statistic, res.p_value, res.reject, started,
                     {"test": res.method, "null_family": null_family,
                      "predicted_reject": predicted})
    status = EXIT_ASSERT if assert_mode and res.reject != predicted else EXIT_OK
    return report, status


_SOLVES = {"eq2": "two-point", "eq_odd": "two-point", "eq_even": "two-point",
           "eq21": "two-point", "eq31": "uniform", "eq35": "uniform", "eqt4": "sech2"}


def cmd_residual(cfg, fmt, assert_mode):
    started = time.perf_counter()
    eq = func_equations.EquationId.parse(cfg.equation)
    spec = _spec(cfg)
    grid = Grid.uniform(cfg.t_max or 8.0, cfg.grid_points or 257)
    if cfg.empirical:
        f = ecf(dist.sample(spec, cfg.n, cfg.seed), grid)
    else:
        f = GridFunction.from_callable(spec.cf, grid)
    if eq.name == "eq35":
        f = func_equations.k_ratio(f)
    r = func_equations.residual(eq, f)

    if isinstance(r, func_equations.GridFunction2D):
        s, t = np.meshgrid(r.s_grid.points, r.t_grid.points, indexing="ij")
        ok = np.isfinite(r.values)
        cols = [s[ok], t[ok], r.values[ok]]
        header = ["s", "t", "residual"]
        if r.se is not None:
            cols.append(r.se[ok])
            header.append("se")
    else:
        cols = [r.grid.points, r.values]
        header = ["t", "residual"]
        if r.se is not None:
            cols.append(r.se)
            header.append("se")
    max_abs = float(np.nanmax(np.abs(r.values)))

    status = EXIT_OK
    if assert_mode and not cfg.empirical:
        predicted_zero = _SOLVES[eq.name] == spec.family
        if predicted_zero != (max_abs < 1e-12):
            status = EXIT_ASSERT
    if fmt == "json":
        return _report(cfg, max_abs, None, None, started, {"rows": len(cols[0])}), status
    return _csv(header, zip(*cols)), status


def cmd_solve(cfg, fmt, assert_mode):
    started = time.perf_counter()
    try:
        config = fixpoint.FixpointConfig(t_max=cfg.t_max if cfg.t_max is not None else 4.0,
                                         depth=cfg.depth, tolerance=cfg.tolerance,
                                         points=cfg.grid_points or 257)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    k = fixpoint.solve_by_doubling(config, -1.0)
    t = k.grid.points
    err = np.abs(k.values - np.cos(t))
    max_err = float(err.max())
    status = EXIT_ASSERT if assert_mode and not max_err < cfg.tolerance else EXIT_OK
    if fmt == "json":
        return _report(cfg, max_err, None, None, started), status
    print(f"# max_abs_error={max_err!r} depth={cfg.depth} t_max={config.t_max!r}",
          file=sys.stderr)
    return _csv(["t", "K", "cos", "abs_err"], zip(t, k.values, np.cos(t), err)), status


def cmd_product(cfg, fmt, assert_mode):
    started = time.perf_counter()
    grid = Grid.uniform(cfg.t_max or 4.0, cfg.grid_points or 33)
    t = grid.points
    partial = fixpoint.viete_product(cfg.scale, t, cfg.terms)
    closed = fixpoint.viete_closed_form(cfg.scale, t)
    err = np.abs(partial - closed)
    max_err = float(err.max())
    status = EXIT_ASSERT if assert_mode and not max_err < 1e-10 else EXIT_OK
    if fmt == "json":
        return _report(cfg, max_err, None, None, started), status
    return _csv(["t", "partial", "closed_form", "abs_err"], zip(t, partial, closed, err)), status


# --------------------------------------------------------------------------
# parser

def _common(p):
    p.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    p.add_argument("--n", type=int, default=10000, help="sample size (default 10000)")
    p.add_argument("--format", choices=("json", "csv"), default=None,
                   help="output format (reports default to json, curves to csv)")
    p.add_argument("--alpha", type=float, default=0.05, help="test level (default 0.05)")
    p.add_argument("--replicates", type=int, default=199,
                   help="permutation/bootstrap replicates (default 199)")
    p.add_argument("--t-max", type=float, default=None,
                   help="grid end point (defaults depend on the command)")
    p.add_argument("--grid-points", type=int, default=None, help="number of grid points")
    p.add_argument("--assert", dest="assert_mode", action="store_true",
                   help="exit 3 if the outcome contradicts the theorem")
    p.add_argument("--workers", type=int, default=1,
                   help="threads for resampling; results do not depend on it")
    p.add_argument("--out", default=None, help="write output here instead of stdout")


def _family(p, required=True):
    p.add_argument("--family", choices=sorted(dist.FAMILIES), required=required,
                   default=None if required else "two-point")
    p.add_argument("--scale", "--a", "--A", "--sigma", dest="scale", type=float, default=1.0,
                   help="scale parameter of the family (default 1)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="linchar",
        description="Characterizations by linear forms with random coefficients.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a sample from a reference law")
    _common(p)
    _family(p)

    p = sub.add_parser("verify", help="test an identity or independence statement")
    _common(p)
    _family(p)
    p.add_argument("--theorem", choices=("t1", "t1a", "t2", "t3", "t4"), required=True)
    p.add_argument("--order", type=int, default=3, help="number of copies for t1a (default 3)")
    p.add_argument("--method", choices=("ks", "cf"), default="ks",
                   help="equality test: Kolmogorov-Smirnov or ecf permutation")

    p = sub.add_parser("gof", help="characterization-based goodness of fit")
    _common(p)
    _family(p)
    p.add_argument("--theorem", choices=("t1", "t1a", "t2", "t3", "t4"), required=True)
    p.add_argument("--order", type=int, default=3)

    p = sub.add_parser("residual", help="residual curve of a functional equation")
    _common(p)
    _family(p)
    p.add_argument("--equation", required=True,
                   help="eq2, eqn:<n>, eq21, eq31, eq35 or eqt4")
    p.add_argument("--empirical", action="store_true",
                   help="use the ecf of a sample of size --n instead of the exact cf")

    p = sub.add_parser("solve", help="solve K(2t) = 2K(t)^2 - 1 by doubling")
    _common(p)
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--tolerance", type=float, default=1e-8)

    p = sub.add_parser("product", help="partial cosine products against sin(2at)/(2at)")
    _common(p)
    p.add_argument("--scale", "--a", dest="scale", type=float, default=1.0)
    p.add_argument("--terms", type=int, default=30)
    return parser


_COMMANDS = {"verify": cmd_verify, "gof": cmd_gof, "residual": cmd_residual,
             "solve": cmd_solve, "product": cmd_product}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    fields = {k: v for k, v in vars(args).items()
              if k in RunConfig.__dataclass_fields__ and v is not None}
    cfg = RunConfig(**fields)
    fmt = args.format or ("json" if cfg.command in ("verify", "gof") else "csv")
    try:
        cfg.validate()
        if cfg.command == "sample":
            out, status = cmd_sample(cfg, fmt)
        else:
            out, status = _COMMANDS[cfg.command](cfg, fmt, args.assert_mode)
    except (UsageError, ValueError) as exc:
        print(f"linchar {cfg.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if isinstance(out, dict):
        text = _report_csv(out) if fmt == "csv" and "statistic" in out else \
            json.dumps(out) + "\n"
    else:
        text = out
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
