"""Command-line entry point: ``bpc-sim run|compare|golden``."""

from __future__ import annotations

import argparse
import os
import sys

from .errors import BPCError, ScenarioError
from .metrics import SUMMARY_FILE, summarize, write_metrics, write_summary
from .scenario_file import load_scenario
from .sim import PROTOCOLS, run


def _load(path, seed=None, protocol=None):
    scenario = load_scenario(path)
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if protocol is not None:
        changes["protocol"] = protocol
    return scenario.with_(**changes).validate() if changes else scenario


def _report(stats, out=sys.stdout):
    conv = "not converged" if stats.convergence_s is None else f"{stats.convergence_s} s"
    print(
        f"{stats.protocol:>5} seed={stats.seed} delivery={stats.delivery.mean:.4f} "
        f"busy={stats.busy.mean:.4f} pow_u={stats.pow_u.mean:.2f} dBm "
        f"loss={stats.loss_ratio:.4f} convergence={conv}",
        file=out,
    )


def cmd_run(args) -> int:
    scenario = _load(args.scenario, args.seed, args.protocol)
    stats = write_metrics(run(scenario), args.out)
    _report(stats)
    return 0


def cmd_compare(args) -> int:
    base = _load(args.scenario, args.seed)
    results = []
    for protocol in PROTOCOLS:
        log = run(base.with_(protocol=protocol))
        results.append(write_metrics(log, os.path.join(args.out, protocol)))
    write_summary(results, os.path.join(args.out, SUMMARY_FILE))
    for stats in results:
        _report(stats)
    return 0


def cmd_golden(args) -> int:
    from .golden import replay_worked_example

    result = replay_worked_example()
    a = result.assessment
    for elp, p, f, proj, d in a.neighbors:
        name = elp.rstrip(b"\x00").decode()
        print(f"{name}: p={p:.0f}% d={d:.0f} m f={f:.3f} P={proj:.2f}%")
    print(f"F={a.F:.4f}")
    print(f"S={a.S_pct:.2f}")
    print(f"MaxBP={a.max_bp_dbm:g} MinBP={a.min_bp_dbm:g} MaMP={a.ma_mp_dbm:g} MiMP={a.mi_mp_dbm:g}")
    print(f"PD={result.pd_dbm:g}")
    print(f"PowU={result.decision.pow_u_dbm:.2f} ({result.decision.branch.value})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bpc-sim", description="Beacon power control simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario")
    p.add_argument("scenario")
    p.add_argument("--out", required=True, help="output directory for CSV files")
    p.add_argument("--seed", type=int)
    p.add_argument("--protocol", choices=PROTOCOLS)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="run bpc and fixed power on the same seed")
    p.add_argument("scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("golden", help="replay the worked example and print its values")
    p.set_defaults(func=cmd_golden)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        for msg in exc.errors:
            print(f"error: {msg}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 1
    except (BPCError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
