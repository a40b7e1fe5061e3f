"""Command-line entry point.

Commands::

    caviar generate --config CFG --out DIR [--seed N] [--set k=v ...]
    caviar train    --config CFG --out DIR [--seed N] [--set k=v ...]
    caviar evaluate --config CFG --out DIR [--policy QTABLE] [...]
    caviar report   --trace trace.csv

Exit codes: 0 ok, 1 usage error, 2 configuration error, 3 I/O or data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from caviar import kernel_backend
from caviar.agents import BaselinePolicy, QPolicy, QTable, evaluate, train
from caviar.config import DEFAULTS, ConfigError, load_config
from caviar.env import BeamSelectionEnv, generate_episode
from caviar.episodes import DatasetManifest, DatasetError, write_episodes

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _defaults_epilog() -> str:
    lines = ["configuration keys and defaults:"]
    for key, value, help_text in DEFAULTS:
        lines.append(f"  {key:<32} {json.dumps(value):<16} {help_text}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="caviar",
        description="virtual-world beam-selection simulator",
        epilog=_defaults_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override master_seed")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="dotted-path config override (repeatable)",
        )

    common(sub.add_parser("generate", help="write an episodic dataset"))
    common(sub.add_parser("train", help="train the tabular agent"))
    p_eval = sub.add_parser("evaluate", help="compare policies on seeded rollouts")
    common(p_eval)
    p_eval.add_argument("--policy", default=None, help="trained Q-table JSON to include")
    p_report = sub.add_parser("report", help="summarize an evaluation trace")
    p_report.add_argument("--trace", required=True, help="trace.csv from `caviar evaluate`")
    return parser


def cmd_generate(args) -> int:
    cfg = load_config(args.config, args.overrides, args.seed)
    episodes = [
        generate_episode(cfg.env, episode_id)
        for episode_id in range(cfg.generate_episodes)
    ]
    manifest = DatasetManifest(
        name=cfg.name,
        episodes=len(episodes),
        scenes_per_episode=cfg.env.steps,
        sampling_period_s=cfg.env.sampling_period_s,
        n_t=cfg.env.n_t,
        n_r=cfg.env.n_r,
        pair_count=cfg.env.n_t * cfg.env.n_r,
        frequency_label=cfg.frequency_label,
    )
    write_episodes(args.out, manifest, episodes)
    valid = sum(
        1 for ep in episodes for scene in ep.scenes if len(scene.paths) > 0
    )
    total = len(episodes) * cfg.env.steps
    print(f"wrote {len(episodes)} episodes x {cfg.env.steps} scenes to {args.out}")
    print(f"valid channels: {valid}/{total}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = load_config(args.config, args.overrides, args.seed)
    env = BeamSelectionEnv(cfg.env)
    table, curve = train(env, cfg.learning)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    policy_path = out / "qtable.json"
    table.save(policy_path)
    curve_path = out / "learning_curve.csv"
    with curve_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "mean_reward"])
        for episode, value in enumerate(curve):
            writer.writerow([episode, repr(value)])
    print(f"trained {cfg.learning.episodes} episodes on backend '{kernel_backend}'")
    print(f"policy: {policy_path}")
    print(f"learning curve: {curve_path}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = load_config(args.config, args.overrides, args.seed)
    env = BeamSelectionEnv(cfg.env)
    policies = [BaselinePolicy(env.tx_codebook)]
    if args.policy is not None:
        policy_path = Path(args.policy)
        if not policy_path.is_file():
            raise ConfigError("--policy", f"no such file: {policy_path}")
        policies.append(QPolicy(QTable.load(policy_path)))
    seeds = [cfg.eval_seed_base + i for i in range(cfg.eval_seeds)]
    report = evaluate(env, policies, seeds)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trace_path = out / "trace.csv"
    names = [p.name for p in policies]
    with trace_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "theta_deg", "los"] + [f"reward_{n}" for n in names] + ["optimum"])
        for t in range(len(report.steps)):
            row = [t, repr(float(report.theta_deg[t])), int(report.los[t])]
            row += [repr(float(report.rewards[n][t])) for n in names]
            row.append(repr(float(report.optimum_trace[t])))
            writer.writerow(row)
    summary = {
        "config_digest": cfg.digest,
        "seeds": list(report.seeds),
        "optimum": vars(report.optimum),
        "policies": {name: vars(s) for name, s in report.policies.items()},
        "min_optimum": report.min_optimum,
        "nlos_steps": int(np.sum(~report.los)),
    }
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"trace: {trace_path}")
    print(f"summary: {summary_path}")
    for name in names:
        print(f"mean |y| {name}: {report.policies[name].mean:.3f}")
    print(f"mean |y| optimum: {report.optimum.mean:.3f}")
    return EXIT_OK


def cmd_report(args) -> int:
    path = Path(args.trace)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError:
        raise
    if not rows:
        raise DatasetError(f"{path}: empty file, expected a header row")
    header, body = rows[0], rows[1:]
    if not body:
        print("no steps")
        return EXIT_OK
    expected_prefix = ["t", "theta_deg", "los"]
    if header[:3] != expected_prefix or header[-1] != "optimum":
        raise DatasetError(f"{path}: unexpected columns {header!r}")
    reward_names = [h.removeprefix("reward_") for h in header[3:-1]]
    try:
        np.array([float(row[1]) for row in body])  # theta column must parse
        los = np.array([int(row[2]) for row in body], dtype=bool)
        columns = {
            name: np.array([float(row[3 + i]) for row in body])
            for i, name in enumerate(reward_names)
        }
        optimum = np.array([float(row[-1]) for row in body])
    except (ValueError, IndexError) as exc:
        raise DatasetError(f"{path}: malformed row ({exc})") from exc
    print(f"steps: {len(body)} ({int(np.sum(~los))} NLOS)")
    windows = _nlos_windows(los)
    spans = ", ".join(f"[{a}..{b}]" for a, b in windows) or "none"
    print(f"NLOS windows: {len(windows)} ({spans})")
    for name, column in columns.items():
        print(f"mean |y| {name}: {np.mean(column):.3f}")
    print(f"mean |y| optimum: {np.mean(optimum):.3f}")
    print(f"min optimum: {np.min(optimum):.3f}")
    return EXIT_OK


def _nlos_windows(los: np.ndarray) -> list[tuple[int, int]]:
    windows = []
    start = None
    for t, ok in enumerate(los):
        if not ok and start is None:
            start = t
        elif ok and start is not None:
            windows.append((start, t - 1))
            start = None
    if start is not None:
        windows.append((start, len(los) - 1))
    return windows


_COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DatasetError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
