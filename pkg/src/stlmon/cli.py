"""Command line front end.

Subcommands:

* ``monitor``     score one episode step by step, emit NDJSON records plus a
                  final episode report; exit 0 if the episode satisfies the
                  specification, 1 if it violates it.
* ``metrics``     aggregate satisfaction rates and violation costs over a
                  directory of episode traces.
* ``window-info`` report the sampling window and minimum window length k a
                  specification needs for windowed evaluation.

Set STLMON_LOG=debug (or info, warning, ...) to enable diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .errors import StlmonError
from .formula import aggregation_k, sampling_window_upper, to_nnf
from .monitor import (
    REWARD_MODES,
    aggregate_metrics,
    episode_report,
    iter_step_records,
    prepare,
)
from .parser import load_spec
from .semantics import offline_robustness
from .trace import load_csv

log = logging.getLogger("stlmon")


def _setup_logging() -> None:
    level = os.environ.get("STLMON_LOG")
    if level:
        logging.basicConfig(
            level=getattr(logging, level.upper(), logging.INFO),
            format="%(name)s %(levelname)s %(message)s",
            stream=sys.stderr,
        )


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spec", required=True, type=Path, help="specification file")
    p.add_argument("--dt", type=float, default=1.0, help="sampling period (default 1.0)")
    p.add_argument(
        "--horizon",
        type=float,
        default=None,
        help="episode horizon used to close unbounded operators (default: trace length)",
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stlmon", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    mon = sub.add_parser("monitor", help="score a single episode step by step")
    _add_spec_args(mon)
    mon.add_argument("--trace", required=True, type=Path, help="episode trace CSV")
    mon.add_argument(
        "--mode",
        choices=("offline", "online"),
        default="online",
        help="buffer the whole record stream (offline) or emit as computed (online)",
    )
    mon.add_argument(
        "--reward",
        choices=REWARD_MODES,
        default="cau",
        help="per-step value: causation distance, robustness upper bound, or its smooth form",
    )
    mon.add_argument("--smooth", action="store_true", help="log-sum-exp smoothing for --reward cau")
    mon.add_argument("--beta", type=float, default=10.0, help="smoothing sharpness (default 10)")
    mon.add_argument(
        "--k",
        type=int,
        default=None,
        help="evaluate each step over a re-indexed window of the last k samples",
    )
    mon.add_argument("--cost", type=float, default=1.0, help="cost per violating step")
    mon.add_argument("--out", type=Path, default=None, help="write records here instead of stdout")

    met = sub.add_parser("metrics", help="aggregate metrics over a directory of traces")
    _add_spec_args(met)
    met.add_argument("--traces-dir", required=True, type=Path, help="directory of trace CSVs")
    met.add_argument(
        "--safety-spec",
        type=Path,
        default=None,
        help="explicit safety specification (default: safety part of --spec)",
    )
    met.add_argument("--cost", type=float, default=1.0, help="cost per violating step")
    met.add_argument("--out", type=Path, default=None, help="write the JSON summary here")

    win = sub.add_parser("window-info", help="sampling window required by a specification")
    _add_spec_args(win)
    return ap


def cmd_monitor(args: argparse.Namespace) -> int:
    f, decls = load_spec(args.spec)
    trace = load_csv(args.trace, args.dt)
    log.info("monitoring %s: %d steps, dt=%g", args.trace, len(trace), trace.dt)
    records = iter_step_records(
        trace,
        f,
        decls,
        reward_mode=args.reward,
        smooth=args.smooth,
        beta=args.beta,
        window_k=args.k,
        horizon=args.horizon,
    )
    sink = open(args.out, "w") if args.out else sys.stdout
    try:
        if args.mode == "offline":
            for rec in list(records):
                print(json.dumps(rec.to_json_dict()), file=sink)
        else:
            for rec in records:
                print(json.dumps(rec.to_json_dict()), file=sink, flush=sink is sys.stdout)
        report = episode_report(trace, f, decls, cost=args.cost, horizon=args.horizon)
        print(json.dumps(report.to_json_dict()), file=sink)
    finally:
        if sink is not sys.stdout:
            sink.close()
    return 0 if report.full_sat else 1


def cmd_metrics(args: argparse.Namespace) -> int:
    f, decls = load_spec(args.spec)
    safety = None
    if args.safety_spec is not None:
        safety, safety_decls = load_spec(args.safety_spec)
        if safety_decls.as_dict() != decls.as_dict():
            log.warning("safety spec declares different variable ranges than the main spec")
    paths = sorted(p for p in args.traces_dir.iterdir() if p.suffix == ".csv")
    if not paths:
        print(f"stlmon: no trace CSVs in {args.traces_dir}", file=sys.stderr)
        return 2
    reports = []
    for path in paths:
        trace = load_csv(path, args.dt)
        reports.append(
            episode_report(
                trace, f, decls, safety=safety, cost=args.cost, horizon=args.horizon
            )
        )
        log.debug("%s -> %s", path.name, reports[-1])
    summary = aggregate_metrics(reports)
    for name in ("full_sat", "safety_sat", "cost_return"):
        m = summary[name]
        print(f"{name:12s} {m['mean']:.4f} +- {m['std']:.4f}  (n={summary['episodes']})")
    if args.out:
        args.out.write_text(json.dumps(summary, indent=2) + "\n")
    return 0


def cmd_window_info(args: argparse.Namespace) -> int:
    f, decls = load_spec(args.spec)
    # an unbounded root always slides with the episode and needs no horizon;
    # unbounded operators below it do
    nf = to_nnf(f)
    try:
        upper = sampling_window_upper(nf, args.horizon)
    except ValueError:
        print(
            "stlmon: specification needs --horizon to close unbounded operators below the root",
            file=sys.stderr,
        )
        return 2
    k = aggregation_k(upper, args.dt)
    print(json.dumps({"window_lower": 0.0, "window_upper": upper, "dt": args.dt, "k": k}))
    return 0


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    ap = build_parser()
    args = ap.parse_args(argv)
    handlers = {
        "monitor": cmd_monitor,
        "metrics": cmd_metrics,
        "window-info": cmd_window_info,
    }
    try:
        return handlers[args.command](args)
    except StlmonError as exc:
        print(f"stlmon: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"stlmon: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
