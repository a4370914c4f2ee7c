"""``proxot`` command-line front end.

Subcommands: divergence, sweep, gaussian, flow, bench. Every option can also
come from a ``--config`` file of ``key = value`` lines; explicit flags win
over the file, the file wins over built-in defaults.

Exit codes: 0 success, 1 input error, 2 convergence warning.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .exact_ot import solve_exact_ot
from .gaussian import Gaussian1D, GaussianDiag, proximal_gaussian_1d, proximal_gaussian_diag
from .measures import CostSpec, DiscreteMeasure, build_cost
from .particle_flow import FlowConfig, energy_distance, run_flow
from .prox_solver import SolverConfig, kl_divergence, solve_curve, solve_proximal
from .report import RunReport, sha256_file

EXIT_OK, EXIT_INPUT, EXIT_CONVERGENCE = 0, 1, 2

log = logging.getLogger("proxot")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as a convergence warning
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive(text):
    x = float(text)
    if not (math.isfinite(x) and x > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return x


def parse_eps_grid(text):
    """``"start:end:count"`` -> ``count`` log-spaced values from start to end."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"--eps-grid expects start:end:count, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError(f"--eps-grid expects start:end:count, got {text!r}") from None
    if not (lo > 0 and hi > 0 and math.isfinite(lo) and math.isfinite(hi)) or n < 1:
        raise InputError("--eps-grid needs positive endpoints and count >= 1")
    if n > 1 and hi <= lo:
        raise InputError("--eps-grid end must exceed start")
    return np.geomspace(lo, hi, n) if n > 1 else np.array([lo])


def _float_list(text):
    try:
        return [float(t) for t in str(text).split(",")]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None


def read_config(path):
    """``key = value`` lines; ``#`` starts a comment; keys use - or _."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise InputError(f"{path}: cannot read config ({exc.strerror})") from None
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        out[key.replace("-", "_")] = value
    return out


# option name -> (type, default); the parser stores None so that the config
# file can fill anything not given on the command line
SOLVER_OPTS = {
    "eta_start": (_positive, None),
    "eta_end": (_positive, None),
    "max_iter": (int, 500),
    "gap_tol": (_positive, 1e-9),
}

COMMANDS = {
    "divergence": {
        "p_samples": (str, None), "q_samples": (str, None), "eps": (_positive, None),
        "cost_p": (_positive, 2.0), "out": (str, None), **SOLVER_OPTS,
    },
    "sweep": {
        "p_samples": (str, None), "q_samples": (str, None), "eps_grid": (str, None),
        "cost_p": (_positive, 2.0), "out": (str, None), "report": (str, None), **SOLVER_OPTS,
    },
    "gaussian": {
        "m1": (str, None), "s1": (str, None), "m2": (str, None), "s2": (str, None),
        "eps": (_positive, None), "eps_grid": (str, None), "out": (str, None), "report": (str, None),
    },
    "flow": {
        "source": (str, None), "target": (str, None), "eps": (_positive, 0.5), "dt": (_positive, 0.05),
        "steps": (int, 100), "snapshot_every": (int, 10), "seed": (int, 0), "cost_p": (_positive, 2.0),
        "out_trajectory": (str, "trajectory.csv"), "out_series": (str, "series.csv"),
        "report": (str, None), "gap_tol": (_positive, 1e-7),
    },
    "bench": {
        "sizes": (str, "10,50,100"), "trials": (int, 3), "seed": (int, 0), "out": (str, None),
        "eps": (_positive, 1.0),
    },
}

HELP = {
    "p_samples": "CSV of source points (optional final 'weight' column)",
    "q_samples": "CSV of target points",
    "eps": "KL weight epsilon",
    "cost_p": "exponent p of the cost |x - y|^p",
    "eps_grid": "log-spaced grid start:end:count",
    "source": "CSV of initial particles, or normal:MEAN,STD,N drawn from --seed",
    "target": "CSV of target samples, or normal:MEAN,STD,N drawn from --seed",
    "m1": "mean(s) of P, comma-separated for a diagonal Gaussian",
    "s1": "std(s) of P",
    "m2": "mean(s) of Q",
    "s2": "std(s) of Q",
    "sizes": "comma-separated problem sizes",
    "seed": "seed of the Philox generator",
}


def build_parser():
    parser = _Parser(prog="proxot", description="Proximal optimal transport divergences.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, opts in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="file of key = value defaults")
        for key, (typ, default) in opts.items():
            flag = "--" + key.replace("_", "-")
            extra = f" (default: {default})" if default is not None else ""
            p.add_argument(flag, dest=key, type=typ, default=None, help=HELP.get(key, "") + extra)
    return parser


def resolve(args):
    """Fill unset options from the config file, then from the defaults."""
    opts = COMMANDS[args.command]
    conf = read_config(args.config) if args.config else {}
    unknown = set(conf) - set(opts)
    if unknown:
        raise InputError(f"{args.config}: unknown key(s) for {args.command}: {', '.join(sorted(unknown))}")
    for key, (typ, default) in opts.items():
        if getattr(args, key) is not None:
            continue
        if key in conf:
            try:
                setattr(args, key, typ(conf[key]))
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise InputError(f"{args.config}: bad value for {key}: {exc}") from None
        else:
            setattr(args, key, default)
    return args


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise InputError(f"{args.command}: missing required option(s) {flags}")


def _solver_config(args, **kw):
    return SolverConfig(eta_start=args.eta_start, eta_end=args.eta_end,
                        max_iterations=args.max_iter, gap_tol=args.gap_tol, **kw)


def _load_pair(args):
    P = io.read_samples(args.p_samples)
    Q = io.read_samples(args.q_samples)
    if P.dim != Q.dim:
        raise InputError(f"{args.p_samples} is {P.dim}-D but {args.q_samples} is {Q.dim}-D")
    digests = {"p_samples": sha256_file(args.p_samples), "q_samples": sha256_file(args.q_samples)}
    C = np.asarray(build_cost(P, Q, CostSpec.power(args.cost_p)))
    return P, Q, C, digests


def _emit_json(report, path):
    if path:
        report.write(path)
    else:
        sys.stdout.write(report.to_json())


def cmd_divergence(args, argv):
    _require(args, "p_samples", "q_samples", "eps")
    P, Q, C, digests = _load_pair(args)
    cfg = _solver_config(args)
    t0 = time.perf_counter()
    sol = solve_proximal(P.weights, Q.weights, C, args.eps, cfg)
    ms = 1e3 * (time.perf_counter() - t0)
    report = RunReport.from_solution(sol, argv, digests, ms, cfg, {"cost_p": args.cost_p})
    _emit_json(report, args.out)
    return report


def cmd_sweep(args, argv):
    _require(args, "p_samples", "q_samples", "eps_grid")
    grid = parse_eps_grid(args.eps_grid)
    P, Q, C, digests = _load_pair(args)
    cfg = _solver_config(args)
    t0 = time.perf_counter()
    sols = solve_curve(P.weights, Q.weights, C, grid, cfg)
    ms = 1e3 * (time.perf_counter() - t0)
    rows = [(e, s.divergence, s.divergence / e, s.gap) for e, s in zip(grid, sols)]
    if args.out:
        io.write_sweep(args.out, rows)
    else:
        sys.stdout.write("eps,divergence,divergence_over_eps,gap\n")
        for r in rows:
            sys.stdout.write(",".join(repr(float(v)) for v in r) + "\n")
    exact = solve_exact_ot(P.weights, Q.weights, C)[0].value
    kl = kl_divergence(P.weights, Q.weights) if P.n == Q.n else float("nan")
    print(f"exact OT value: {exact!r}", file=sys.stderr if not args.out else sys.stdout)
    if math.isfinite(kl):
        print(f"KL(a||b) on shared indices: {kl!r}", file=sys.stderr if not args.out else sys.stdout)
    last = sols[-1]
    report = RunReport.from_solution(last, argv, digests, ms, cfg, {
        "eps_grid": [float(e) for e in grid],
        "exact_ot_value": exact,
        "all_converged": all(s.converged for s in sols),
    })
    if args.report:
        report.write(args.report)
    report.converged = all(s.converged for s in sols)
    return report


def _gaussians(args):
    _require(args, "m1", "s1", "m2", "s2")
    m1, s1, m2, s2 = (_float_list(getattr(args, k)) for k in ("m1", "s1", "m2", "s2"))
    if not len(m1) == len(s1) == len(m2) == len(s2):
        raise InputError("--m1, --s1, --m2, --s2 need the same number of entries")
    if min(s1 + s2) <= 0:
        raise InputError("standard deviations must be positive")
    if len(m1) == 1:
        return Gaussian1D(m1[0], s1[0]), Gaussian1D(m2[0], s2[0])
    return GaussianDiag(m1, s1), GaussianDiag(m2, s2)


def cmd_gaussian(args, argv):
    P, Q = _gaussians(args)
    if args.eps_grid is not None:
        grid = parse_eps_grid(args.eps_grid)
    elif args.eps is not None:
        grid = np.array([args.eps])
    else:
        raise InputError("gaussian: give --eps or --eps-grid")
    t0 = time.perf_counter()
    rows = []
    for e in grid:
        if isinstance(P, Gaussian1D):
            value, R = proximal_gaussian_1d(P, Q, float(e))
            rows.append([float(e), R.mean, R.std, value])
        else:
            value, R = proximal_gaussian_diag(P, Q, float(e))
            rows.append([float(e), ";".join(map(repr, R.mean.tolist())), ";".join(map(repr, R.std.tolist())), value])
    ms = 1e3 * (time.perf_counter() - t0)
    if args.out:
        io.write_gaussian_curve(args.out, rows)
    else:
        sys.stdout.write("eps,m_R,sigma_R,divergence\n")
        for r in rows:
            sys.stdout.write(",".join(v if isinstance(v, str) else repr(float(v)) for v in r) + "\n")
    e, m_r, s_r, value = rows[-1]
    report = RunReport(
        command=list(argv), input_digests={}, epsilon=e, divergence=value, primal_value=value,
        dual_value=value, gap=0.0, iterations=0, converged=True, weights_w=[],
        potentials={"phi": [], "psi": []}, timing_ms=ms, solver_config={"method": "closed_form"},
        extra={"m_R": m_r, "sigma_R": s_r, "rows": len(rows)},
    )
    if args.report:
        report.write(args.report)
    return report


def _samples(spec, rng, label):
    """CSV path, or ``normal:MEAN,STD,N`` drawn from the shared generator."""
    if spec.startswith("normal:"):
        vals = _float_list(spec[len("normal:"):])
        if len(vals) != 3 or vals[1] <= 0 or vals[2] < 1 or vals[2] != int(vals[2]):
            raise InputError(f"--{label}: expected normal:MEAN,STD,N, got {spec!r}")
        pts = vals[0] + vals[1] * rng.standard_normal((int(vals[2]), 1))
        return DiscreteMeasure(pts), {}
    return io.read_samples(spec), {label: sha256_file(spec)}


def cmd_flow(args, argv):
    _require(args, "source", "target")
    if args.steps < 0 or args.snapshot_every < 1:
        raise InputError("--steps must be >= 0 and --snapshot-every >= 1")
    rng = np.random.Generator(np.random.Philox(args.seed))
    src, d1 = _samples(args.source, rng, "source")
    tgt, d2 = _samples(args.target, rng, "target")
    if src.dim != tgt.dim:
        raise InputError("source and target dimensions differ")
    try:
        cfg = FlowConfig(epsilon=args.eps, step_dt=args.dt, num_steps=args.steps, p=args.cost_p,
                         snapshot_every=args.snapshot_every, seed=args.seed,
                         solver=SolverConfig(gap_tol=args.gap_tol, extra_stages=12))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    t0 = time.perf_counter()
    state = run_flow(src, tgt, cfg)
    ms = 1e3 * (time.perf_counter() - t0)
    io.write_trajectory(args.out_trajectory, state.snapshots)
    io.write_series(args.out_series, state.history)
    final = state.as_measure()
    extra = {
        "steps_completed": state.step_index,
        "flagged": state.flagged,
        "energy_distance_initial": energy_distance(src, tgt),
        "energy_distance_final": energy_distance(final, tgt),
        "seed": args.seed,
        "dt": args.dt,
    }
    sol = state.last_solution
    if sol is None:
        C = np.asarray(build_cost(final, tgt, CostSpec.power(args.cost_p)))
        sol = solve_proximal(final.weights, tgt.weights, C, args.eps, cfg.solver)
    report = RunReport.from_solution(sol, argv, {**d1, **d2}, ms, cfg.solver, extra)
    report.converged = bool(report.converged and not state.flagged)
    if args.report:
        report.write(args.report)
    return report


def cmd_bench(args, argv):
    try:
        sizes = [int(s) for s in args.sizes.split(",")]
    except ValueError:
        raise InputError(f"--sizes expects comma-separated integers, got {args.sizes!r}") from None
    if min(sizes) < 1 or args.trials < 1:
        raise InputError("sizes and --trials must be positive")
    rng = np.random.Generator(np.random.Philox(args.seed))
    cfg = SolverConfig(gap_tol=1e-9)
    rows = []
    for n in sizes:
        for trial in range(args.trials):
            x = rng.random((n, 1))
            y = rng.random((n, 1))
            a = rng.dirichlet(np.ones(n))
            b = rng.dirichlet(np.ones(n))
            C = (x - y.T) ** 2
            t0 = time.perf_counter()
            plan, _ = solve_exact_ot(a, b, C)
            t1 = time.perf_counter()
            sol = solve_proximal(a, b, C, args.eps, cfg)
            t2 = time.perf_counter()
            rows.append([n, trial, 1e3 * (t1 - t0), 1e3 * (t2 - t1), plan.value, sol.divergence, sol.gap])
    header = ["size", "trial", "exact_ms", "proximal_ms", "exact_value", "divergence", "gap"]
    if args.out:
        io.write_table(args.out, header, rows)
    table = np.array(rows, dtype=np.float64)
    print("size  median_exact_ms  median_proximal_ms  max_gap")
    for n in sizes:
        sel = table[table[:, 0] == n]
        print(f"{n:4d}  {np.median(sel[:, 2]):15.3f}  {np.median(sel[:, 3]):18.3f}  {sel[:, 6].max():.3e}")
    return None


HANDLERS = {
    "divergence": cmd_divergence,
    "sweep": cmd_sweep,
    "gaussian": cmd_gaussian,
    "flow": cmd_flow,
    "bench": cmd_bench,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        resolve(args)
        report = HANDLERS[args.command](args, ["proxot"] + argv)
    except (InputError, io.InputError, ValueError, OverflowError) as exc:
        print(f"proxot {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if report is not None and not report.converged:
        print(f"proxot {args.command}: warning: solver did not reach the gap tolerance "
              f"(gap {report.gap:.3e})", file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
