"""Command line front end: train a policy, then evaluate it."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .adapter import REWARD_MODES, wrap
from .envs import ENVS, make_env
from .evaluate import evaluate
from .nets import GaussianPolicy
from .train import TrainConfig, TrainingDiverged, train, write_curve


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--env", choices=sorted(ENVS), required=True)
    p.add_argument("--spec", type=Path, required=True, help="spec file scoring the episodes")
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--horizon", type=float, default=None, help="episode horizon replacing inf")
    p.add_argument("--max-steps", type=int, default=200)
    p.add_argument("--boundary", choices=("inprocess", "subprocess"), default="inprocess")
    p.add_argument("--out-dir", type=Path, default=Path("runs"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rlharness", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a policy against spec rewards")
    _add_common(t)
    t.add_argument("--episodes", type=int, default=100)
    t.add_argument("--actor-lr", type=float, default=1e-3)
    t.add_argument("--critic-lr", type=float, default=1e-2)
    t.add_argument("--gamma", type=float, default=0.95)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--reward", choices=REWARD_MODES, default="cau")
    t.add_argument("--beta", type=float, default=10.0)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("evaluate", help="roll out a trained policy and report metrics")
    _add_common(e)
    e.add_argument("--policy", type=Path, required=True)
    e.add_argument("--episodes", type=int, default=20)
    e.add_argument("--cost", type=float, default=1.0)
    e.add_argument("--reward", choices=REWARD_MODES, default="cau")
    e.add_argument("--beta", type=float, default=10.0)
    e.set_defaults(func=cmd_evaluate)
    return p


def _make_adapter(args: argparse.Namespace):
    horizon = args.horizon if args.horizon is not None else args.max_steps * args.dt
    return wrap(
        make_env(args.env),
        args.spec,
        reward_mode=args.reward,
        beta=args.beta,
        dt=args.dt,
        episode_horizon=horizon,
        boundary_kind=args.boundary,
    )


def cmd_train(args: argparse.Namespace) -> int:
    adapter = _make_adapter(args)
    tc = TrainConfig(
        episodes=args.episodes,
        max_steps_per_episode=args.max_steps,
        actor_lr=args.actor_lr,
        critic_lr=args.critic_lr,
        gamma=args.gamma,
        seed=args.seed,
        reward_mode=args.reward,
        beta=args.beta,
    )
    policy, curve = train(adapter, tc)
    adapter.boundary.close()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_curve(curve, args.out_dir / "curve.csv")
    policy.save(args.out_dir / "policy.npz")
    first, last = curve[0][1], curve[-1][2]
    print(f"trained {tc.episodes} episodes; first return {first:.3f}, final 50-ep avg {last:.3f}")
    print(f"wrote {args.out_dir / 'curve.csv'} and {args.out_dir / 'policy.npz'}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    adapter = _make_adapter(args)
    policy = GaussianPolicy.load(args.policy, adapter.observation_dim, adapter.action_dim)
    horizon = args.horizon if args.horizon is not None else args.max_steps * args.dt
    result = evaluate(
        policy,
        adapter,
        args.episodes,
        args.out_dir / "traces",
        spec_path=args.spec,
        max_steps=args.max_steps,
        episode_horizon=horizon,
        cost=args.cost,
    )
    adapter.boundary.close()
    for name in ("full_sat", "safety_sat", "cost_return"):
        m = result.summary[name]
        print(f"{name:12s} {m['mean']:.4f} +- {m['std']:.4f}  (n={result.summary['episodes']})")
    (args.out_dir / "metrics.json").write_text(json.dumps(result.summary, indent=2) + "\n")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TrainingDiverged, ValueError, OSError) as e:
        print(f"rlharness: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
