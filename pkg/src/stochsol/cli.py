"""Command-line experiment driver.

Every numerical subcommand writes CSV rows ``x,mean,stderr,n,oracle,abs_err,truncated``
(plus subcommand-specific trailing columns) and a diagnostics block on
stderr. Options can also come from an INI file given with ``--config``:
keys in ``[common]`` and in the section named after the subcommand are
turned into flags placed before the command-line ones, so the command line
wins.

Exit codes: 0 success, 1 configuration error, 2 non-finite estimate.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import sys
from dataclasses import dataclass, field

from . import kpz_cole_hopf as ch
from .branching_engine import iter_trees
from .diffusion_paths import DiffusionParams, SpaceTimePoint, heat_estimate
from .initial import Constant, ExpOf, parse_ic
from .kpz_direct import Db1Params, cross_check_cole_hopf, db1_estimate, db1_spec
from .label_transport import (
    estimate_derivative,
    functional_label_check,
    shortcut_consistency_check,
)
from .noise_field import (
    BoundaryPolicy,
    GridSpec,
    NoiseMode,
    NoiseRealization,
    NoiseSign,
    build_realization,
)
from .oracles import (
    FdEquation,
    PicardEquation,
    fd_integrate,
    heat_kernel_convolution,
    picard_iterate,
)
from .phi4 import Db2Params, db2_estimate, db2_spec
from .stats import Estimate
from .streams import resolve_workers

HEADER = ["x", "mean", "stderr", "n", "oracle", "abs_err", "truncated"]
SUBCOMMANDS = ("heat", "kpz-ch", "kpz-direct", "phi4", "labels", "oracle", "suite")


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class Row:
    x: float
    mean: float
    stderr: float
    n: int
    oracle: float | None = None
    truncated: int = 0
    extra: dict = field(default_factory=dict)
    estimate: Estimate | None = None

    @property
    def abs_err(self) -> float | None:
        return None if self.oracle is None else abs(self.mean - self.oracle)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.mean) and math.isfinite(self.stderr)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _row_from(x, est: Estimate, oracle=None, **extra) -> Row:
    return Row(x, est.mean, est.stderr, est.n_samples, oracle, est.n_truncated, extra, est)


# ---------------------------------------------------------------- arguments

def _grid(text: str) -> GridSpec:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 5:
        raise argparse.ArgumentTypeError("grid is x_min,x_max,nx,t_max,nt")
    try:
        return GridSpec(float(parts[0]), float(parts[1]), int(parts[2]), float(parts[3]), int(parts[4]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _ic(text: str):
    try:
        return parse_ic(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _common(noise: bool, sign_default: str | None = "plus") -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--x", type=float, nargs="+", default=[1.0], help="query points")
    p.add_argument("--t", type=float, default=0.25, help="query time")
    p.add_argument("--ic", type=_ic, default=parse_ic("sine:a=1,k=1"),
                   help="initial condition, e.g. sine:a=0.1,k=1 | gaussian:a=1,c=0,w=1 | constant:c=0.5 | poly:0,0,1 | zero")
    p.add_argument("--samples", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=int, default=1, help="master seed of the sampling streams")
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="worker processes (default: $STOCHSOL_THREADS or 1)")
    p.add_argument("--sigma-bar", type=float, default=2.0, help="diffusion variance per unit time")
    p.add_argument("--output", default="-", help="CSV path, - for stdout")
    if noise:
        p.add_argument("--grid", type=_grid, default=_grid(f"0,{2 * math.pi!r},8,1.0,16"),
                       help="noise lattice x_min,x_max,nx,t_max,nt")
        p.add_argument("--noise-seed", type=int, default=1)
        p.add_argument("--noise-mode", choices=["fixed", "resampled"], default="fixed")
        p.add_argument("--noise-sign", choices=["plus", "minus"], default=sign_default)
        p.add_argument("--boundary", choices=["periodic", "zero"], default="periodic")
        p.add_argument("--zero-noise", action="store_true", help="use xi = 0 on the grid")
        p.add_argument("--noise-load", default=None, help="read the noise realization from this file")
        p.add_argument("--noise-dump", default=None, help="write the noise realization to this file")
        p.add_argument("--max-events", type=_positive_int, default=10_000)
        p.add_argument("--trace", type=int, default=0, metavar="N",
                       help="print the events of the first N trees per query point to stderr")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stochsol", description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=None, help="INI file with [common] and per-subcommand sections")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("heat", parents=[_common(False)], help="linear heat equation by path sampling")

    p = sub.add_parser("kpz-ch", parents=[_common(True)], help="KPZ through the Cole-Hopf transform")
    p.add_argument("--lam", type=float, default=0.25)
    p.add_argument("--method", choices=["branching", "exponential"], default="branching")
    p.add_argument("--quantity", choices=["z", "h"], default="z")
    p.add_argument("--compare-exponential", action="store_true",
                   help="add the path-exponential estimate and the z-score of the difference")
    p.add_argument("--lambda-limit", type=float, nargs="+", default=None, metavar="LAM",
                   help="instead: compare the recovered height with the linear solution at these lambdas")
    p.add_argument("--oracle", choices=["none", "picard"], default="none")
    p.add_argument("--picard-iters", type=_positive_int, default=6)
    p.add_argument("--picard-refine", type=_positive_int, default=8)

    p = sub.add_parser("kpz-direct", parents=[_common(True, "minus")], help="KPZ by labelled branching")
    p.add_argument("--lam", type=float, default=0.1)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--max-label-order", type=_positive_int, default=8)
    p.add_argument("--oracle", choices=["none", "fd", "cross-check"], default="none")
    p.add_argument("--fd-nx", type=_positive_int, default=256)

    p = sub.add_parser("phi4", parents=[_common(True)], help="Phi^4 equation by ternary branching")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--literal-menu", action="store_true",
                   help="carry-on rule weight -3 (solves a shifted equation)")
    p.add_argument("--oracle", choices=["none", "ode", "fd", "picard"], default="none")
    p.add_argument("--fd-nx", type=_positive_int, default=256)
    p.add_argument("--picard-iters", type=_positive_int, default=8)
    p.add_argument("--picard-refine", type=_positive_int, default=8)

    p = sub.add_parser("labels", parents=[_common(False)], help="derivative weights and label transport")
    p.add_argument("--check", choices=["derivative", "shortcut", "functional"], default="derivative")
    p.add_argument("--order", type=int, default=1, help="derivative order")
    p.add_argument("--dt", type=float, nargs="+", default=[0.1, 0.05, 0.025])
    p.add_argument("--b-bar", type=float, default=0.0)

    p = sub.add_parser("oracle", parents=[_common(True, None)], help="deterministic reference solutions")
    p.add_argument("--equation", required=True,
                   choices=["heat", "picard-z", "picard-db1", "picard-phi4", "fd-kpz", "fd-phi4"])
    p.add_argument("--lam", type=float, default=0.25)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--iters", type=_positive_int, default=6)
    p.add_argument("--refine", type=_positive_int, default=8)
    p.add_argument("--fd-nx", type=_positive_int, default=256)

    sub.add_parser("suite", parents=[_common(True)], help="reduced acceptance battery with pass/fail column")
    return parser


def _config_argv(parser: argparse.ArgumentParser, path: str, command: str) -> list[str]:
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    subparser = parser._subparsers._group_actions[0].choices[command]
    flags = {}
    for action in subparser._actions:
        for opt in action.option_strings:
            flags[opt] = action
    argv: list[str] = []
    for section in ("common", command):
        if not cp.has_section(section):
            continue
        for key, value in cp.items(section):
            opt = "--" + key.replace("_", "-")
            action = flags.get(opt)
            if action is None:
                raise ConfigError(f"[{section}] {key}: unknown option for {command}")
            if action.nargs == 0:
                if cp.getboolean(section, key):
                    argv.append(opt)
            else:
                argv += [opt, *value.split()]
    return argv


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, rest = pre.parse_known_args(argv)
    if known.config:
        command = next((a for a in rest if a in SUBCOMMANDS), None)
        if command is None:
            raise ConfigError("no subcommand given")
        i = rest.index(command)
        rest = rest[: i + 1] + _config_argv(parser, known.config, command) + rest[i + 1:]
    return parser.parse_args(rest)


# ---------------------------------------------------------------- helpers

def _noise(args) -> NoiseRealization:
    policy = BoundaryPolicy.PERIODIC_IN_X if args.boundary == "periodic" else BoundaryPolicy.ZERO_OUTSIDE
    if args.noise_load:
        noise = NoiseRealization.load(args.noise_load)
    elif args.zero_noise:
        noise = NoiseRealization.zeros(args.grid, policy)
    else:
        noise = build_realization(args.grid, args.noise_seed, policy)
    if args.noise_dump:
        noise.dump(args.noise_dump)
    return noise


def _mode(args) -> NoiseMode:
    return NoiseMode.FIXED_REALIZATION if args.noise_mode == "fixed" else NoiseMode.RESAMPLED_PER_EVENT


def _sign(args) -> NoiseSign:
    return NoiseSign.PLUS_XI if args.noise_sign == "plus" else NoiseSign.MINUS_XI


def _trace(args, spec, noise, x):
    if not getattr(args, "trace", 0):
        return
    point = SpaceTimePoint(args.t, x)
    for i, tree in enumerate(iter_trees(spec, point, noise, _mode(args), args.trace, args.seed)):
        print(f"# tree {i} at x={x!r}: {len(tree.events)} events, truncated={tree.truncated}", file=sys.stderr)
        for line in tree.trace_lines():
            print(f"#   {line}", file=sys.stderr)


def _require_zero_noise(args, what: str):
    if not args.zero_noise:
        raise ConfigError(f"the {what} oracle is noiseless; pass --zero-noise")


# ---------------------------------------------------------------- subcommands

def run_heat(args, workers) -> list[Row]:
    params = DiffusionParams(args.sigma_bar)
    rows = []
    for x in args.x:
        est = heat_estimate(args.ic, args.t, x, params, args.samples, args.seed, workers)
        rows.append(_row_from(x, est, heat_kernel_convolution(args.ic, args.t, x, args.sigma_bar)))
    return rows


def _picard_z(args, noise, lam):
    gf = picard_iterate(PicardEquation.Z, noise, args.picard_iters, ExpOf(lam, args.ic), args.t, lam=lam,
                        sigma_bar=args.sigma_bar, noise_sign=_sign(args),
                        refine_x=args.picard_refine, refine_t=args.picard_refine)
    return gf


def run_kpz_ch(args, workers) -> list[Row]:
    noise = _noise(args)
    if args.lambda_limit:
        rows = []
        limit = ch.lambda_limit_check(args.lambda_limit, args.t, args.x[0], args.ic, noise, args.samples,
                                      args.seed, args.sigma_bar, workers=workers)
        for r in limit:
            row = Row(args.x[0], r.h_exp, r.h_exp_stderr, args.samples, r.h_linear, 0,
                      {"lam": r.lam, "bound": r.bound})
            rows.append(row)
        return rows
    params_of = lambda x: ch.KpzChParams(args.lam, args.t, x, args.sigma_bar, _sign(args))  # noqa: E731
    z0 = ExpOf(args.lam, args.ic)
    picard = _picard_z(args, noise, args.lam) if args.oracle == "picard" else None
    rows = []
    for x in args.x:
        params = params_of(x)
        if args.method == "branching":
            _trace(args, ch.z_spec(params, args.max_events), noise, x)
            est = ch.z_branching_estimate(params, z0, noise, _mode(args), args.samples, args.seed, workers)
        else:
            if _mode(args) is not NoiseMode.FIXED_REALIZATION:
                raise ConfigError("the exponential method needs --noise-mode fixed")
            est = ch.z_exponential_estimate(params, z0, noise, args.samples, args.seed, workers=workers)
        oracle = None if picard is None else picard.at(x)
        extra = {}
        if args.compare_exponential:
            other = ch.z_exponential_estimate(params, z0, noise, args.samples, args.seed, workers=workers)
            extra = {"mean_exp": other.mean, "stderr_exp": other.stderr, "z_score": est.zscore(other)}
        if args.quantity == "h":
            h, h_err = ch.h_estimate_from_z(est, args.t, args.lam)
            row = Row(x, h, h_err, est.n_samples, None, est.n_truncated, {}, est)
            if oracle is not None:
                row.oracle = ch.h_from_z(oracle, args.t, args.lam)
            if extra:
                he, he_err = ch.h_estimate_from_z(other, args.t, args.lam)
                extra = {"mean_exp": he, "stderr_exp": he_err,
                         "z_score": abs(h - he) / math.hypot(h_err, he_err) if h_err or he_err else 0.0}
            row.extra = extra
        else:
            row = _row_from(x, est, oracle, **extra)
        rows.append(row)
    return rows


def _fd_kpz(args, lam):
    g = args.grid
    return fd_integrate(FdEquation.KPZ_NOISELESS, args.ic, args.t, g.x_min, g.x_max, args.fd_nx,
                        sigma_bar=args.sigma_bar, lam=lam)


def run_kpz_direct(args, workers) -> list[Row]:
    noise = _noise(args)
    fd = None
    if args.oracle == "fd":
        _require_zero_noise(args, "finite-difference")
        fd = _fd_kpz(args, args.lam)
    rows = []
    for x in args.x:
        params = Db1Params(args.lam, args.mu, args.t, x, args.sigma_bar, _sign(args))
        _trace(args, db1_spec(params, args.max_events, args.max_label_order), noise, x)
        if args.oracle == "cross-check":
            if _mode(args) is not NoiseMode.FIXED_REALIZATION:
                raise ConfigError("the cross-check needs --noise-mode fixed")
            rep = cross_check_cole_hopf(params, args.ic, noise, args.samples, args.seed, workers)
            rows.append(_row_from(x, rep.db1, rep.h_cole_hopf, oracle_stderr=rep.h_cole_hopf_stderr,
                                  combined_stderr=rep.combined_stderr))
            continue
        est = db1_estimate(params, args.ic, noise, _mode(args), args.samples, args.seed, workers,
                           args.max_events, args.max_label_order)
        rows.append(_row_from(x, est, None if fd is None else fd.at(x)))
    return rows


def run_phi4(args, workers) -> list[Row]:
    noise = _noise(args)
    oracle_at = None
    if args.oracle == "ode":
        _require_zero_noise(args, "ODE")
        if not isinstance(args.ic, Constant):
            raise ConfigError("the ODE oracle needs a constant initial condition")
        a = args.ic.c
        value = a / math.sqrt(1 + 2 * a * a * args.t)
        oracle_at = lambda x: value  # noqa: E731
    elif args.oracle == "fd":
        _require_zero_noise(args, "finite-difference")
        g = args.grid
        oracle_at = fd_integrate(FdEquation.PHI4_NOISELESS, args.ic, args.t, g.x_min, g.x_max, args.fd_nx,
                                 sigma_bar=args.sigma_bar).at
    elif args.oracle == "picard":
        oracle_at = picard_iterate(PicardEquation.PHI4, noise, args.picard_iters, args.ic, args.t,
                                   sigma_bar=args.sigma_bar, noise_sign=_sign(args),
                                   refine_x=args.picard_refine, refine_t=args.picard_refine).at
    rows = []
    for x in args.x:
        params = Db2Params(args.t, x, args.dim, args.sigma_bar, _sign(args))
        _trace(args, db2_spec(params.noise_sign, args.sigma_bar, args.max_events, args.literal_menu), noise, x)
        est = db2_estimate(params, args.ic, noise, _mode(args), args.samples, args.seed, workers,
                           args.max_events, args.literal_menu)
        rows.append(_row_from(x, est, None if oracle_at is None else oracle_at(x)))
    return rows


def _square(y):
    return y * y


def run_labels(args, workers) -> list[Row]:
    params = DiffusionParams(args.sigma_bar, args.b_bar)
    rows = []
    for x in args.x:
        if args.check == "derivative":
            exact = float(args.ic.derivative(x, args.order))
            for dt in args.dt:
                est = estimate_derivative(args.order, args.ic, x, params, dt, args.samples, args.seed, workers)
                target = float(args.ic.evolve(dt, params.sigma_bar, params.b_bar).derivative(x, args.order))
                rows.append(_row_from(x, est, exact, dt=dt, bias=target - exact))
        elif args.check == "shortcut":
            rep = shortcut_consistency_check(args.ic, args.order, args.t, x, params, args.samples, args.seed, workers)
            rows.append(_row_from(x, rep.shortcut, rep.exact, passed=rep.passed))
        else:
            rep = functional_label_check(args.ic, _square, args.t, x, params, args.samples, args.seed, workers)
            rows.append(_row_from(x, rep.shortcut, rep.exact, passed=rep.passed))
    return rows


def run_oracle(args) -> tuple[list[str], list[list]]:
    g = args.grid
    eq = args.equation
    if eq == "heat":
        return ["x", "value"], [[x, heat_kernel_convolution(args.ic, args.t, x, args.sigma_bar)] for x in args.x]
    if eq.startswith("picard"):
        kind = {"picard-z": PicardEquation.Z, "picard-db1": PicardEquation.DB1, "picard-phi4": PicardEquation.PHI4}[eq]
        ic = ExpOf(args.lam, args.ic) if kind is PicardEquation.Z else args.ic
        sign = None if args.noise_sign is None else _sign(args)
        gf = picard_iterate(kind, _noise(args), args.iters, ic, args.t, lam=args.lam, mu=args.mu,
                            sigma_bar=args.sigma_bar, noise_sign=sign, refine_x=args.refine, refine_t=args.refine)
        print(f"# sup differences between iterates: {gf.meta['sup_diffs']}", file=sys.stderr)
    else:
        kind = FdEquation.KPZ_NOISELESS if eq == "fd-kpz" else FdEquation.PHI4_NOISELESS
        gf = fd_integrate(kind, args.ic, args.t, g.x_min, g.x_max, args.fd_nx, sigma_bar=args.sigma_bar, lam=args.lam)
    return ["x", "value"], [[x, v] for x, v in zip(gf.x.tolist(), gf.values.tolist())]


def run_suite(args, workers) -> list[Row]:
    """A reduced battery at ``--samples`` per check, each row tagged with a pass/fail status."""
    n, seed, sb, t = args.samples, args.seed, args.sigma_bar, args.t
    noise = _noise(args)
    zero = NoiseRealization.zeros(noise.spec, noise.boundary_policy)
    x = args.x[0]
    rows = []

    def add(name, row, tol):
        ok = row.finite and row.abs_err is not None and row.abs_err <= tol
        row.extra = {**row.extra, "check": name, "status": "pass" if ok else "fail"}
        rows.append(row)

    sine = parse_ic("sine:a=1,k=1")
    est = heat_estimate(sine, t, x, DiffusionParams(sb), n, seed, workers)
    add("heat", _row_from(x, est, heat_kernel_convolution(sine, t, x, sb)), 3 * est.stderr)

    params = ch.KpzChParams(0.25, t, x, sb)
    z0 = ExpOf(0.25, args.ic)
    br = ch.z_branching_estimate(params, z0, noise, NoiseMode.FIXED_REALIZATION, n, seed, workers)
    ex = ch.z_exponential_estimate(params, z0, noise, n, seed, workers=workers)
    add("z-branching-vs-exponential", _row_from(x, br, ex.mean, oracle_stderr=ex.stderr),
        3 * math.hypot(br.stderr, ex.stderr))

    if noise.periodic:
        gf = picard_iterate(PicardEquation.Z, noise, 6, z0, t, lam=0.25, sigma_bar=sb, refine_x=8, refine_t=8)
        add("z-branching-vs-picard", _row_from(x, br, gf.at(x)), max(3 * br.stderr, 5e-3))

    small = parse_ic("sine:a=0.1,k=1")
    fd = fd_integrate(FdEquation.KPZ_NOISELESS, small, t, noise.spec.x_min, noise.spec.x_max, 256,
                      sigma_bar=sb, lam=0.1)
    db1 = db1_estimate(Db1Params(0.1, 1.0, t, x, sb), small, zero, NoiseMode.FIXED_REALIZATION, n, seed, workers)
    add("db1-vs-fd", _row_from(x, db1, fd.at(x)), max(3 * db1.stderr, 2e-3))

    db2 = db2_estimate(Db2Params(t, x, 1, sb), Constant(0.5), zero, NoiseMode.FIXED_REALIZATION, n, seed, workers)
    add("db2-vs-ode", _row_from(x, db2, 0.5 / math.sqrt(1 + 0.5 * t)), max(3 * db2.stderr, 1e-3))

    d1 = estimate_derivative(1, sine, x, DiffusionParams(sb), 0.05, n, seed, workers)
    target = float(sine.evolve(0.05, sb).derivative(x, 1))
    add("first-derivative-weight", _row_from(x, d1, target), 3 * d1.stderr)
    return rows


# ---------------------------------------------------------------- output

def _write(rows: list[Row], path: str) -> None:
    extra_keys: list[str] = []
    for r in rows:
        for k in r.extra:
            if k not in extra_keys:
                extra_keys.append(k)
    # suite tags go last
    extra_keys.sort(key=lambda k: k in ("check", "status"))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER + extra_keys)
    for r in rows:
        w.writerow([_fmt(v) for v in (r.x, r.mean, r.stderr, r.n, r.oracle, r.abs_err, r.truncated)]
                   + [_fmt(r.extra.get(k)) for k in extra_keys])
    _emit(buf.getvalue(), path)


def _emit(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _summary(rows: list[Row]) -> None:
    for r in rows:
        e = r.estimate
        if e is None:
            continue
        print(f"# x={r.x!r} n={e.n_samples} truncated={e.n_truncated} nonfinite={e.n_nonfinite} "
              f"max_abs={e.max_abs:.6g} kurtosis={e.kurtosis:.6g}", file=sys.stderr)


RUNNERS = {
    "heat": run_heat,
    "kpz-ch": run_kpz_ch,
    "kpz-direct": run_kpz_direct,
    "phi4": run_phi4,
    "labels": run_labels,
    "suite": run_suite,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except ConfigError as exc:
        print(f"stochsol: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        workers = resolve_workers(args.threads)
        if args.command == "oracle":
            header, data = run_oracle(args)
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            w.writerows([[_fmt(float(v)) for v in row] for row in data])
            _emit(buf.getvalue(), args.output)
            return 0
        rows = RUNNERS[args.command](args, workers)
    except (ConfigError, ValueError, NotImplementedError, OSError) as exc:
        print(f"stochsol: error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"stochsol: numerical failure: {exc}", file=sys.stderr)
        return 2
    _write(rows, args.output)
    _summary(rows)
    if not all(r.finite for r in rows):
        print("stochsol: non-finite estimate", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
