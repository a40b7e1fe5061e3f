"""JSON experiment configuration: schema, overrides, and digesting.

A single JSON file describes the scene, trajectory, channel statistics,
antenna counts, and the per-command sections (generate / train / evaluate).
CLI overrides use dotted paths (``--set channel.nlos_sigma=0.8``).  Every
loaded configuration carries a content digest that is stamped into outputs
so runs can be traced back to their exact inputs.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

from caviar.agents import LearningConfig
from caviar.channel import ChannelParams
from caviar.env import EnvConfig
from caviar.world import Phase, SceneConfig, TrajectoryPlan, Vec3, build_scene


class ConfigError(ValueError):
    """Configuration problem; the message names the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


# (dotted path, default, description) -- also rendered into the CLI help.
DEFAULTS = (
    ("name", "dataset", "dataset / experiment name"),
    ("frequency_label", "60GHz", "carrier label stored in the manifest"),
    ("sampling_period_s", 0.1, "seconds between scenes"),
    ("master_seed", 0, "seed every random stream derives from"),
    ("antennas.n_t", 64, "transmit (BS) array size"),
    ("antennas.n_r", 1, "receive (UAV) array size"),
    ("scene.bs_position", [0.0, 0.0, 0.0], "BS coordinates, meters"),
    ("scene.obstacles", [], "axis-aligned boxes as [min_corner, max_corner]"),
    ("scene.nlos_angle_masks_deg", [], "closed blocked elevation intervals"),
    ("channel.num_paths", 3, "path count including the line-of-sight one"),
    ("channel.los_amplitude", 1.0, "line-of-sight gain magnitude"),
    ("channel.nlos_sigma", 0.55, "per-axis std of reflected complex gains"),
    ("channel.nlos_aod_range_deg", [-90.0, 90.0], "reflected departure-angle window"),
    ("generate.episodes", 2, "episodes written by `caviar generate`"),
    ("generate.top_k", 5, "ranked labels stored per scene"),
    ("train.episodes", 200, "training episodes for `caviar train`"),
    ("train.learning_rate", 0.1, "Q-learning step size"),
    ("train.discount", 0.0, "future-reward discount (0 = bandit)"),
    ("train.epsilon_start", 1.0, "initial exploration rate"),
    ("train.epsilon_end", 0.05, "final exploration rate"),
    ("train.epsilon_decay_fraction", 0.5, "fraction of steps spent decaying"),
    ("train.theta_bins", 128, "elevation bins of the Q table"),
    ("train.theta_range_deg", [0.0, 90.0], "elevation range covered by the bins"),
    ("evaluate.seeds", 20, "number of evaluation rollouts"),
    ("evaluate.seed_base", 100000, "first evaluation stream id (disjoint from training)"),
)


@dataclass(frozen=True)
class SimConfig:
    """Fully resolved configuration for one run."""

    env: EnvConfig
    name: str
    frequency_label: str
    generate_episodes: int
    learning: LearningConfig
    eval_seeds: int
    eval_seed_base: int
    digest: str


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply ``key.path=value`` overrides onto the raw config dict."""
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(item, "override must look like key.path=value")
        key, _, text = item.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(item, "override has an empty key")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text  # bare strings are fine
        node = raw
        parts = key.split(".")
        for part in parts[:-1]:
            nxt = node.get(part)
            if nxt is None:
                nxt = {}
                node[part] = nxt
            if not isinstance(nxt, dict):
                raise ConfigError(key, f"{part!r} is not a section")
            node = nxt
        node[parts[-1]] = value
    return raw


def config_digest(raw: dict) -> str:
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


class _Reader:
    """Typed lookups with dotted-path error reporting."""

    def __init__(self, raw: dict):
        self.raw = raw

    def get(self, path, default=None, required=False):
        node = self.raw
        for part in path.split("."):
            if not isinstance(node, dict) or part not in node:
                if required:
                    raise ConfigError(path, "missing required field")
                return default
            node = node[part]
        return node

    def number(self, path, default=None, required=False, minimum=None):
        value = self.get(path, default, required)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(path, f"expected a number, got {value!r}")
        if minimum is not None and value < minimum:
            raise ConfigError(path, f"must be >= {minimum}, got {value}")
        return float(value)

    def integer(self, path, default=None, required=False, minimum=None):
        value = self.get(path, default, required)
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        if minimum is not None and value < minimum:
            raise ConfigError(path, f"must be >= {minimum}, got {value}")
        return int(value)

    def text(self, path, default=None, required=False):
        value = self.get(path, default, required)
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
        return value

    def triple(self, path, value=None):
        value = value if value is not None else self.get(path, required=True)
        if (
            not isinstance(value, (list, tuple))
            or len(value) != 3
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
        ):
            raise ConfigError(path, f"expected [x, y, z], got {value!r}")
        return tuple(float(v) for v in value)

    def interval(self, path, default=None):
        value = self.get(path, default)
        if (
            not isinstance(value, (list, tuple))
            or len(value) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
        ):
            raise ConfigError(path, f"expected [lo, hi], got {value!r}")
        lo, hi = float(value[0]), float(value[1])
        if lo > hi:
            raise ConfigError(path, f"interval [{lo}, {hi}] has lo > hi")
        return lo, hi


def _default(path):
    for key, value, _ in DEFAULTS:
        if key == path:
            return value
    raise KeyError(path)


def load_config(source, overrides=(), seed=None) -> SimConfig:
    """Load, override, validate, and freeze a configuration.

    ``source`` is a path to a JSON file or an already-parsed dict.  ``seed``
    (from ``--seed``) replaces the file's master seed before digesting.
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            text = path.read_text()
        except OSError:
            raise
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(str(path), f"not valid JSON ({exc})") from exc
    else:
        raw = json.loads(json.dumps(source))  # private copy
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "top level must be a JSON object")
    raw = apply_overrides(raw, overrides)
    if seed is not None:
        raw["master_seed"] = int(seed)
    digest = config_digest(raw)
    r = _Reader(raw)

    scene_cfg = SceneConfig(
        bs_position=r.triple("scene.bs_position", r.get("scene.bs_position", _default("scene.bs_position"))),
        obstacles=_read_obstacles(r),
        nlos_angle_masks_deg=_read_masks(r),
    )
    try:
        scene = build_scene(scene_cfg)
    except ValueError as exc:
        raise ConfigError("scene", str(exc)) from exc

    plan = _read_plan(r)
    lo, hi = r.interval("channel.nlos_aod_range_deg", _default("channel.nlos_aod_range_deg"))
    try:
        params = ChannelParams(
            num_paths=r.integer("channel.num_paths", _default("channel.num_paths"), minimum=1),
            los_amplitude=r.number("channel.los_amplitude", _default("channel.los_amplitude"), minimum=0.0),
            nlos_sigma=r.number("channel.nlos_sigma", _default("channel.nlos_sigma"), minimum=0.0),
            nlos_aod_range=(math.radians(lo), math.radians(hi)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("channel", str(exc)) from exc

    n_t = r.integer("antennas.n_t", _default("antennas.n_t"), minimum=1)
    n_r = r.integer("antennas.n_r", _default("antennas.n_r"), minimum=1)
    top_k = r.integer("generate.top_k", _default("generate.top_k"), minimum=1)
    if top_k > n_t * n_r:
        raise ConfigError("generate.top_k", f"exceeds the {n_t * n_r} beam pairs")
    try:
        env = EnvConfig(
            scene=scene,
            plan=plan,
            channel=params,
            n_t=n_t,
            n_r=n_r,
            master_seed=r.integer("master_seed", _default("master_seed")),
            sampling_period_s=r.number("sampling_period_s", _default("sampling_period_s"), minimum=1e-9),
            top_k=top_k,
            config_digest=digest,
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("<env>", str(exc)) from exc

    t_lo, t_hi = r.interval("train.theta_range_deg", _default("train.theta_range_deg"))
    try:
        learning = LearningConfig(
            learning_rate=r.number("train.learning_rate", _default("train.learning_rate")),
            discount=r.number("train.discount", _default("train.discount")),
            epsilon_start=r.number("train.epsilon_start", _default("train.epsilon_start")),
            epsilon_end=r.number("train.epsilon_end", _default("train.epsilon_end")),
            epsilon_decay_fraction=r.number("train.epsilon_decay_fraction", _default("train.epsilon_decay_fraction")),
            episodes=r.integer("train.episodes", _default("train.episodes"), minimum=0),
            theta_bins=r.integer("train.theta_bins", _default("train.theta_bins"), minimum=1),
            theta_range_deg=(t_lo, t_hi),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("train", str(exc)) from exc

    return SimConfig(
        env=env,
        name=r.text("name", _default("name")),
        frequency_label=r.text("frequency_label", _default("frequency_label")),
        generate_episodes=r.integer("generate.episodes", _default("generate.episodes"), minimum=0),
        learning=learning,
        eval_seeds=r.integer("evaluate.seeds", _default("evaluate.seeds"), minimum=0),
        eval_seed_base=r.integer("evaluate.seed_base", _default("evaluate.seed_base"), minimum=0),
        digest=digest,
    )


def _read_obstacles(r: _Reader):
    raw = r.get("scene.obstacles", _default("scene.obstacles"))
    if not isinstance(raw, list):
        raise ConfigError("scene.obstacles", f"expected a list, got {raw!r}")
    boxes = []
    for i, entry in enumerate(raw):
        path = f"scene.obstacles[{i}]"
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ConfigError(path, "expected [min_corner, max_corner]")
        boxes.append((r.triple(path, entry[0]), r.triple(path, entry[1])))
    return tuple(boxes)


def _read_masks(r: _Reader):
    raw = r.get("scene.nlos_angle_masks_deg", _default("scene.nlos_angle_masks_deg"))
    if not isinstance(raw, list):
        raise ConfigError("scene.nlos_angle_masks_deg", f"expected a list, got {raw!r}")
    masks = []
    for i, entry in enumerate(raw):
        path = f"scene.nlos_angle_masks_deg[{i}]"
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ConfigError(path, "expected [lo, hi] degrees")
        lo, hi = entry
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (lo, hi)):
            raise ConfigError(path, "expected numeric bounds")
        masks.append((float(lo), float(hi)))
    return tuple(masks)


def _read_plan(r: _Reader) -> TrajectoryPlan:
    raw = r.get("trajectory.phases", required=True)
    if not isinstance(raw, list) or not raw:
        raise ConfigError("trajectory.phases", "expected a non-empty list")
    phases = []
    for i, entry in enumerate(raw):
        path = f"trajectory.phases[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(path, "expected an object")
        sub = _Reader(entry)
        try:
            phases.append(
                Phase(
                    name=sub.text("name", required=True),
                    steps=sub.integer("steps", required=True, minimum=1),
                    start=Vec3(*sub.triple("start")),
                    end=Vec3(*sub.triple("end")),
                )
            )
        except ConfigError as exc:
            raise ConfigError(f"{path}.{exc.path}", exc.args[0].split(": ", 1)[-1]) from exc
        except ValueError as exc:
            raise ConfigError(path, str(exc)) from exc
    try:
        return TrajectoryPlan(tuple(phases))
    except ValueError as exc:
        raise ConfigError("trajectory.phases", str(exc)) from exc
