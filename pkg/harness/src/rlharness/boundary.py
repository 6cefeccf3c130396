"""Reward boundary between the training loop and the monitoring core.

The harness never reimplements semantics.  Rewards come from the core either
through the in-process binding (direct calls into the installed package) or,
when isolation is wanted, through a line protocol spoken with a child
process: one JSON request per line carrying (window samples, spec id, mode,
beta), one JSON response per line carrying the reward.  A failure on the
boundary raises; it is never a silent zero.

Run ``python3 -m rlharness.boundary --spec name=file.stl ...`` to start the
server side by hand.
"""

from __future__ import annotations

import argparse
import json
import subprocess
import sys
from pathlib import Path

import numpy as np

from stlmon import CausationConfig, WindowEvaluator, load_spec

MODES = ("cau", "cls", "lse")


class BoundaryError(RuntimeError):
    pass


class InProcessBoundary:
    """Direct binding: compiled window evaluators, one per (spec, mode, beta)."""

    def __init__(
        self,
        specs: dict[str, str | Path],
        names: tuple[str, ...],
        dt: float,
        k: int,
        episode_horizon: float | None = None,
    ):
        self.names = tuple(names)
        self.dt = float(dt)
        self.k = int(k)
        self.horizon = episode_horizon
        self._specs = {sid: load_spec(path) for sid, path in specs.items()}
        self._evaluators: dict[tuple, WindowEvaluator] = {}

    def _evaluator(self, spec_id: str, smooth: bool, beta: float | None) -> WindowEvaluator:
        key = (spec_id, smooth, beta)
        ev = self._evaluators.get(key)
        if ev is None:
            try:
                f, decls = self._specs[spec_id]
            except KeyError:
                raise BoundaryError(f"unknown spec id {spec_id!r}") from None
            cfg = (
                CausationConfig(mode="smooth", beta=beta, episode_horizon=self.horizon)
                if smooth
                else CausationConfig(episode_horizon=self.horizon)
            )
            ev = WindowEvaluator(f, decls, self.names, self.dt, self.k, cfg)
            self._evaluators[key] = ev
        return ev

    def reward(self, window, spec_id: str, mode: str, beta: float | None) -> float:
        if mode not in MODES:
            raise BoundaryError(f"mode must be one of {MODES}, got {mode!r}")
        w = np.asarray(window, dtype=float)
        smooth = beta is not None if mode == "cau" else mode == "lse"
        out = self._evaluator(spec_id, smooth, beta if smooth else None).evaluate(w)
        column = "causation" if mode == "cau" else "robust_upper"
        return float(out[column][0])

    def close(self) -> None:
        pass


class LineProtocolBoundary:
    """Child-process binding speaking one JSON object per line over pipes."""

    def __init__(
        self,
        specs: dict[str, str | Path],
        names: tuple[str, ...],
        dt: float,
        k: int,
        episode_horizon: float | None = None,
    ):
        cmd = [
            sys.executable, "-m", "rlharness.boundary",
            "--names", ",".join(names),
            "--dt", repr(float(dt)),
            "--k", str(int(k)),
        ]
        if episode_horizon is not None:
            cmd += ["--horizon", repr(float(episode_horizon))]
        for sid, path in specs.items():
            cmd += ["--spec", f"{sid}={path}"]
        self._proc = subprocess.Popen(
            cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True
        )

    def reward(self, window, spec_id: str, mode: str, beta: float | None) -> float:
        request = {
            "window": np.asarray(window, dtype=float).tolist(),
            "spec": spec_id,
            "mode": mode,
            "beta": beta,
        }
        if self._proc.poll() is not None:
            raise BoundaryError("reward server exited")
        try:
            self._proc.stdin.write(json.dumps(request) + "\n")
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as e:
            raise BoundaryError(f"reward server pipe failed: {e}") from e
        if not line:
            raise BoundaryError("reward server closed the stream")
        response = json.loads(line)
        if "error" in response:
            raise BoundaryError(response["error"])
        return float(response["reward"])

    def close(self) -> None:
        if self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=10)

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass


def make_boundary(kind: str, *args, **kwargs):
    if kind == "inprocess":
        return InProcessBoundary(*args, **kwargs)
    if kind == "subprocess":
        return LineProtocolBoundary(*args, **kwargs)
    raise ValueError(f"boundary kind must be 'inprocess' or 'subprocess', got {kind!r}")


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description="line-protocol reward server")
    p.add_argument("--spec", action="append", required=True, metavar="ID=PATH")
    p.add_argument("--names", required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--horizon", type=float, default=None)
    args = p.parse_args(argv)

    specs = dict(s.split("=", 1) for s in args.spec)
    boundary = InProcessBoundary(
        specs, tuple(args.names.split(",")), args.dt, args.k, args.horizon
    )
    for line in sys.stdin:
        if not line.strip():
            continue
        try:
            req = json.loads(line)
            reward = boundary.reward(req["window"], req["spec"], req["mode"], req.get("beta"))
            print(json.dumps({"reward": reward}), flush=True)
        except Exception as e:
            print(json.dumps({"error": f"{type(e).__name__}: {e}"}), flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
