"""Beam-selection policies and their training/evaluation drivers.

Three policies are compared on identical seeded channel realizations:

* oracle -- privileged; reads the per-step magnitude sweep and picks the
  argmax (an exhaustive search over all pairs);
* baseline -- geometric heuristic; picks the codebook beam closest to the
  straight BS-to-UAV direction;
* tabular Q -- learns a value table over quantized elevation bins.  Beam
  choice never influences the trajectory, so the task is a contextual
  bandit and the discount defaults to zero (configurable).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from caviar.beams import optimal_index
from caviar.channel import steering_vector
from caviar.env import BeamSelectionEnv, Observation
from caviar.episodes import episode_seed

# salt for the exploration stream so it never collides with episode streams
_EXPLORE_STREAM = 0x51BEA7


@dataclass
class QTable:
    bins: int
    theta_range_deg: tuple[float, float]
    n_actions: int
    values: np.ndarray = field(default=None)
    visit_counts: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.bins < 1:
            raise ValueError("bins must be positive")
        lo, hi = self.theta_range_deg
        if not lo < hi:
            raise ValueError("theta_range_deg must be a non-empty interval")
        if self.values is None:
            self.values = np.zeros((self.bins, self.n_actions))
        if self.visit_counts is None:
            self.visit_counts = np.zeros((self.bins, self.n_actions), dtype=np.int64)

    def bin_of(self, theta_deg: float) -> int:
        lo, hi = self.theta_range_deg
        idx = int((theta_deg - lo) / (hi - lo) * self.bins)
        return min(max(idx, 0), self.bins - 1)

    def greedy_action(self, theta_deg: float) -> int:
        return int(np.argmax(self.values[self.bin_of(theta_deg)]))

    def save(self, path) -> None:
        payload = {
            "bins": self.bins,
            "theta_range_deg": list(self.theta_range_deg),
            "actions": self.n_actions,
            "values": self.values.tolist(),
            "visit_counts": self.visit_counts.tolist(),
        }
        Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "QTable":
        raw = json.loads(Path(path).read_text())
        return cls(
            bins=int(raw["bins"]),
            theta_range_deg=(float(raw["theta_range_deg"][0]), float(raw["theta_range_deg"][1])),
            n_actions=int(raw["actions"]),
            values=np.array(raw["values"], dtype=np.float64),
            visit_counts=np.array(raw["visit_counts"], dtype=np.int64),
        )


@dataclass(frozen=True)
class LearningConfig:
    learning_rate: float = 0.1
    discount: float = 0.0
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_fraction: float = 0.5
    episodes: int = 200
    theta_bins: int = 128
    theta_range_deg: tuple[float, float] = (0.0, 90.0)

    def __post_init__(self):
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning_rate must be in (0, 1]")
        if not 0 <= self.discount <= 1:
            raise ValueError("discount must be in [0, 1]")
        if not 0 < self.epsilon_decay_fraction <= 1:
            raise ValueError("epsilon_decay_fraction must be in (0, 1]")
        if self.episodes < 0:
            raise ValueError("episodes must be non-negative")


def oracle_action(magnitudes) -> int:
    """Exhaustive search: the argmax over the step's magnitude sweep."""
    return optimal_index(magnitudes)


def baseline_action(theta_deg: float, tx_codebook: np.ndarray) -> int:
    """Beam pointing along the straight BS-to-UAV direction.

    Picks the transmit beam maximising |a(theta)^H f_q| (receive beam 0),
    ties toward the lower index.
    """
    a = steering_vector(tx_codebook.shape[0], math.radians(theta_deg))
    scores = np.abs(a.conj() @ tx_codebook)
    return int(np.argmax(scores))


def q_update(
    table: QTable,
    theta_deg: float,
    action: int,
    reward: float,
    theta_next_deg: float,
    config: LearningConfig,
) -> QTable:
    """One temporal-difference backup; mutates and returns the table."""
    if not 0 <= action < table.n_actions:
        raise ValueError(f"action {action} out of range [0, {table.n_actions})")
    s = table.bin_of(theta_deg)
    target = reward
    if config.discount > 0.0:
        s_next = table.bin_of(theta_next_deg)
        target = reward + config.discount * float(np.max(table.values[s_next]))
    table.values[s, action] += config.learning_rate * (target - table.values[s, action])
    table.visit_counts[s, action] += 1
    return table


def epsilon_at(step: int, total_steps: int, config: LearningConfig) -> float:
    """Linear decay from epsilon_start to epsilon_end over the leading
    decay fraction of training, flat afterwards."""
    horizon = max(1, int(total_steps * config.epsilon_decay_fraction))
    frac = min(1.0, step / horizon)
    return config.epsilon_start + frac * (config.epsilon_end - config.epsilon_start)


def train(env: BeamSelectionEnv, config: LearningConfig) -> tuple[QTable, list[float]]:
    """Run epsilon-greedy episodes; returns the table and per-episode mean reward.

    Training episode k replays the environment stream k; the exploration
    stream is derived from the same master seed under a distinct salt, so
    the whole run is reproducible.
    """
    table = QTable(config.theta_bins, config.theta_range_deg, env.n_actions)
    explore = np.random.default_rng(
        episode_seed(env.config.master_seed, _EXPLORE_STREAM)
    )
    curve: list[float] = []
    total_steps = config.episodes * env.config.steps
    step_count = 0
    for episode in range(config.episodes):
        obs = env.reset(seed=episode)
        total = 0.0
        done = False
        while not done:
            eps = epsilon_at(step_count, total_steps, config)
            if explore.random() < eps:
                action = int(explore.integers(env.n_actions))
            else:
                action = table.greedy_action(obs.theta_deg)
            result = env.step(action)
            q_update(
                table,
                obs.theta_deg,
                action,
                result.reward,
                result.observation.theta_deg,
                config,
            )
            total += result.reward
            obs = result.observation
            done = result.done
            step_count += 1
        curve.append(total / env.config.steps)
    return table, curve


class OraclePolicy:
    name = "oracle"

    def act(self, obs: Observation, magnitudes) -> int:
        return oracle_action(magnitudes)


class BaselinePolicy:
    name = "baseline"

    def __init__(self, tx_codebook: np.ndarray):
        self._codebook = tx_codebook
        self._cache: dict[float, int] = {}

    def act(self, obs: Observation, magnitudes) -> int:
        action = self._cache.get(obs.theta_deg)
        if action is None:
            action = baseline_action(obs.theta_deg, self._codebook)
            self._cache[obs.theta_deg] = action
        return action


class QPolicy:
    name = "rl"

    def __init__(self, table: QTable):
        self.table = table

    def act(self, obs: Observation, magnitudes) -> int:
        return self.table.greedy_action(obs.theta_deg)


@dataclass(frozen=True)
class PolicySummary:
    mean: float
    mean_los: float
    mean_nlos: float


@dataclass(frozen=True)
class EvalReport:
    """Per-policy reward means plus the per-step traces behind them.

    Trace columns are averaged over the evaluation seeds; the geometry
    columns (theta, los) are seed-independent.
    """

    policies: dict[str, PolicySummary]
    optimum: PolicySummary
    steps: np.ndarray
    theta_deg: np.ndarray
    los: np.ndarray
    rewards: dict[str, np.ndarray]
    optimum_trace: np.ndarray
    seeds: tuple[int, ...]

    @property
    def min_optimum(self) -> float:
        return float(np.min(self.optimum_trace)) if self.optimum_trace.size else math.nan


def _summary(trace: np.ndarray, los: np.ndarray) -> PolicySummary:
    def mean_of(mask):
        return float(np.mean(trace[mask])) if np.any(mask) else math.nan

    return PolicySummary(
        mean=float(np.mean(trace)) if trace.size else math.nan,
        mean_los=mean_of(los),
        mean_nlos=mean_of(~los),
    )


def evaluate(env: BeamSelectionEnv, policies, seeds) -> EvalReport:
    """Run every policy over the same seeded rollouts and aggregate.

    Each step's full magnitude sweep prices all policies at once, so the
    comparison uses identical channel realizations by construction.
    """
    policies = list(policies)
    seeds = [int(s) for s in seeds]
    s_len = env.config.steps if seeds else 0
    rewards = {p.name: np.zeros(s_len) for p in policies}
    optimum = np.zeros(s_len)
    theta = None
    los = None
    for seed in seeds:
        obs = env.reset(seed=seed)
        theta_run = np.empty(s_len)
        los_run = np.empty(s_len, dtype=bool)
        for t in range(s_len):
            result = env.step(0)
            info = result.info
            theta_run[t] = info.theta_deg
            los_run[t] = info.los
            values = info.magnitudes
            optimum[t] += values[info.best_index]
            for policy in policies:
                rewards[policy.name][t] += values[policy.act(obs, values)]
            obs = result.observation
        if theta is None:
            theta, los = theta_run, los_run
    n = max(1, len(seeds))
    optimum /= n
    for name in rewards:
        rewards[name] /= n
    if theta is None:
        theta = np.empty(0)
        los = np.empty(0, dtype=bool)
    return EvalReport(
        policies={name: _summary(trace, los) for name, trace in rewards.items()},
        optimum=_summary(optimum, los),
        steps=np.arange(s_len),
        theta_deg=theta,
        los=los,
        rewards=rewards,
        optimum_trace=optimum,
        seeds=tuple(seeds),
    )
