"""Command-line entry points: ``nsg verify | solve | probe``.

Exit codes: 0 success, 2 configuration problem, 3 solver breakdown
(blow-up or fixed-point divergence), 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import build_initial_data, load_config
from .diagnostics import (
    build_constants_report,
    derivative_decay_probe,
    f_n_norm,
    gevrey_epq_norm,
    radius_scaling_probe,
    write_decay_csv,
    write_radius_csv,
)
from .errors import BlowupError, ConfigError, FixedPointDivergenceError, NsgError
from .ioutils import atomic_write_text
from .lp import LPFilterBank
from .snapshots import load_trajectory, save_trajectory
from .solver import picard_solve, step_solve, time_derivative_stack
from .verify import SUITE_NAMES, run_suite

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4


def _json_text(payload) -> str:
    def default(obj):
        if isinstance(obj, float) and obj != obj:
            return "nan"
        raise TypeError(f"not JSON serializable: {type(obj)!r}")

    return json.dumps(payload, indent=2, sort_keys=True, default=default) + "\n"


def _cmd_verify(args: argparse.Namespace) -> int:
    entries, ok = run_suite(args.suite)
    payload = {"suite": args.suite, "passed": ok, "checks": entries}
    text = _json_text(payload)
    if args.out:
        atomic_write_text(Path(args.out), text)
    else:
        sys.stdout.write(text)
    for entry in entries:
        status = entry["status"].upper()
        print(f"[{status}] {entry['lemma_id']}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_solve(args: argparse.Namespace) -> int:
    plan = load_config(Path(args.config))
    u0 = build_initial_data(plan)
    if plan.method == "picard":
        traj, report = picard_solve(u0, plan.solver)
        extra = {
            "picard": {
                "converged": report.converged,
                "iterations": report.iterations,
                "distances": report.distances,
                "heat_norm": report.heat_norm,
            }
        }
    else:
        traj = step_solve(u0, plan.solver)
        extra = None
    out_dir = Path(args.out)
    save_trajectory(traj, out_dir, extra=extra)
    print(f"wrote {len(traj.times)} snapshots to {out_dir}")
    return EXIT_OK


def _load_probe_trajectory(path: str):
    traj = load_trajectory(Path(path))
    bank = LPFilterBank(traj.grid)
    return traj, bank


def _cmd_probe(args: argparse.Namespace) -> int:
    traj, bank = _load_probe_trajectory(args.trajectory)
    out = Path(args.out) if args.out else None
    if args.kind == "radius":
        rows = radius_scaling_probe(traj, kappa=args.kappa, p=args.p, q=args.q, bank=bank)
        if out is None:
            raise ConfigError("probe 'radius' writes CSV; pass --out")
        write_radius_csv(rows, out)
        print(f"wrote {len(rows)} rows to {out}")
        return EXIT_OK
    if args.kind == "decay":
        alpha = tuple(int(part) for part in args.alpha.split(",")) if args.alpha else (0,) * traj.grid.dim
        report = derivative_decay_probe(traj, alpha=alpha, n=args.n)
        if out is None:
            raise ConfigError("probe 'decay' writes CSV; pass --out")
        write_decay_csv(report, out)
        print(f"wrote decay table to {out}")
        return EXIT_OK
    if args.kind == "gevrey":
        value = gevrey_epq_norm(traj, p=args.p, q=args.q, bank=bank)
        payload = {"kind": "gevrey", "p": args.p, "q": args.q, "norm": _extended(value)}
    elif args.kind == "fn":
        time_derivative_stack(traj, args.n)
        values = {str(n): _extended(f_n_norm(traj, n, p=args.p, q=args.q, bank=bank))
                  for n in range(args.n + 1)}
        payload = {"kind": "fn", "p": args.p, "q": args.q, "norms": values}
        if args.n >= 1:
            report = build_constants_report(traj, p=args.p, q=args.q, bank=bank, n_max=args.n)
            payload["rho_inv"] = _extended(report.rho_inv)
            payload["c_growth"] = _extended(report.c_growth)
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown probe kind {args.kind!r}")
    text = _json_text(payload)
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _extended(value: float):
    if value == float("inf"):
        return "inf"
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsg",
        description="Spectral Navier-Stokes toolkit: verification, solving, diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite", choices=SUITE_NAMES)
    p_verify.add_argument("--out", help="write the JSON report here instead of stdout")
    p_verify.set_defaults(func=_cmd_verify)

    p_solve = sub.add_parser("solve", help="run a solver from a config file")
    p_solve.add_argument("config", help="key=value config file")
    p_solve.add_argument("--out", required=True, help="trajectory output directory")
    p_solve.set_defaults(func=_cmd_solve)

    p_probe = sub.add_parser("probe", help="run a diagnostic over a saved trajectory")
    p_probe.add_argument("kind", choices=["radius", "decay", "gevrey", "fn"])
    p_probe.add_argument("trajectory", help="trajectory directory written by 'nsg solve'")
    p_probe.add_argument("--kappa", type=float, default=2.0)
    p_probe.add_argument("--p", type=float, default=2.0)
    p_probe.add_argument("--q", type=float, default=2.0)
    p_probe.add_argument("--n", type=int, default=1)
    p_probe.add_argument("--alpha", help="comma-separated multi-index, e.g. 1,0")
    p_probe.add_argument("--out", help="output file (CSV or JSON depending on kind)")
    p_probe.set_defaults(func=_cmd_probe)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlowupError, FixedPointDivergenceError) as exc:
        print(f"solver breakdown: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NsgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
