"""Stepwise beam-selection environment over one scripted flight.

The dynamics are exogenous: the trajectory, elevation trace, and blockage
trace are fixed by the configuration, and the per-step channel draw depends
only on the seeded stream, never on the chosen action.  The action selects
a beam pair; the reward is the magnitude of the resulting equivalent
channel.  Two rollouts with the same seeds therefore see identical channels
regardless of the actions taken, which makes policy comparisons fair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from caviar import _kernels
from caviar.beams import EquivalentMagnitudes, dft_codebook
from caviar.channel import ChannelParams, paths_from_arrays
from caviar.episodes import Episode, SceneRecord, episode_seed, record_scene
from caviar.world import (
    Scene,
    TrajectoryPlan,
    UavState,
    Vec3,
    bs_to_uav_angle,
    los_blocked,
    trajectory_state,
)


@dataclass(frozen=True)
class EnvConfig:
    scene: Scene
    plan: TrajectoryPlan
    channel: ChannelParams
    n_t: int
    n_r: int
    master_seed: int = 0
    sampling_period_s: float = 0.1
    top_k: int = 5
    config_digest: str = ""

    def __post_init__(self):
        if self.n_t < 1 or self.n_r < 1:
            raise ValueError("antenna counts must be positive")
        if self.sampling_period_s <= 0:
            raise ValueError("sampling period must be positive")
        if not 1 <= self.top_k <= self.n_t * self.n_r:
            raise ValueError("top_k out of range")

    @property
    def steps(self) -> int:
        return self.plan.total_steps


@dataclass(frozen=True)
class Observation:
    theta_deg: float
    uav_position: Vec3
    t: int


@dataclass(frozen=True)
class StepResult:
    observation: Observation
    reward: float
    done: bool
    info: SceneRecord


class BeamSelectionEnv:
    """Single-flight environment; one instance is a sequential state machine."""

    def __init__(self, config: EnvConfig):
        self.config = config
        self.n_actions = config.n_t * config.n_r
        self.tx_codebook = dft_codebook(config.n_t)
        self.rx_codebook = dft_codebook(config.n_r)
        s = config.steps
        # Geometry is deterministic and action-independent: precompute the
        # pose, elevation, and blockage traces for t = 0..S once.
        self._states: list[UavState] = [
            trajectory_state(config.plan, t) for t in range(s + 1)
        ]
        self._theta_deg = np.array(
            [
                bs_to_uav_angle(config.scene.bs_position, st.position)
                for st in self._states
            ]
        )
        self._theta_rad = np.radians(self._theta_deg)
        self._blocked = np.array(
            [
                los_blocked(config.scene, config.scene.bs_position, st.position)
                for st in self._states
            ]
        )
        self._t = None
        self._episode_id = 0

    def reset(self, seed: int = 0) -> Observation:
        """Rewind to t = 0 on a fresh stream derived from (master_seed, seed).

        The whole episode's path randomness is materialized here in three
        batched draws (LOS phases, reflected gains, reflected angles); the
        per-step channels are then synthesized lazily by step().  The
        consumption scheme is fixed, so a seed always maps to the same
        channel sequence no matter which actions are taken.
        """
        rng = np.random.default_rng(episode_seed(self.config.master_seed, seed))
        s = self.config.steps
        params = self.config.channel
        k = params.num_paths - 1
        n_los = int(s - np.sum(self._blocked[:s]))
        self._los_phases = rng.uniform(0.0, 2.0 * math.pi, size=n_los)
        self._nlos_parts = rng.normal(0.0, params.nlos_sigma, size=(s, k, 2))
        lo, hi = params.nlos_aod_range
        self._nlos_angles = rng.uniform(lo, hi, size=(s, 2, k))
        self._los_drawn = 0
        self._episode_id = int(seed)
        self._t = 0
        return self._observation(0)

    def step(self, action: int) -> StepResult:
        if self._t is None:
            raise RuntimeError("call reset() before step()")
        if self._t >= self.config.steps:
            raise RuntimeError("episode finished; call reset()")
        if not 0 <= action < self.n_actions:
            raise ValueError(
                f"action {action} out of range [0, {self.n_actions})"
            )
        t = self._t
        mags = self._draw_channel(t)
        reward = float(mags.values[action])
        info = record_scene(
            episode_id=self._episode_id,
            t=t,
            sampling_period_s=self.config.sampling_period_s,
            uav_state=self._states[t],
            theta_deg=float(self._theta_deg[t]),
            los=not bool(self._blocked[t]),
            paths=self._last_paths,
            magnitudes=mags,
            k=self.config.top_k,
            expected_pairs=self.n_actions,
        )
        self._t = t + 1
        done = self._t == self.config.steps
        return StepResult(self._observation(self._t), reward, done, info)

    def _draw_channel(self, t: int) -> EquivalentMagnitudes:
        params = self.config.channel
        k = params.num_paths - 1
        has_los = not self._blocked[t]
        n = k + has_los
        gains = np.empty(n, dtype=np.complex128)
        aods = np.empty(n, dtype=np.float64)
        aoas = np.empty(n, dtype=np.float64)
        if has_los:
            chi = self._los_phases[self._los_drawn]
            self._los_drawn += 1
            gains[0] = params.los_amplitude * complex(math.cos(chi), math.sin(chi))
            aods[0] = aoas[0] = self._theta_rad[t]
        if k:
            parts = self._nlos_parts[t]
            gains[has_los:] = parts[:, 0] + 1j * parts[:, 1]
            aods[has_los:] = self._nlos_angles[t, 0]
            aoas[has_los:] = self._nlos_angles[t, 1]
        self._last_paths = paths_from_arrays(gains, aods, aoas, has_los)
        if n:
            h = _kernels.synthesize_channel(
                gains, aods, aoas, self.config.n_t, self.config.n_r
            )
            values = _kernels.pair_magnitudes(h, self.tx_codebook, self.rx_codebook)
            return EquivalentMagnitudes(values, int(np.argmax(values)))
        # single-path config under blockage: nothing arrives
        return EquivalentMagnitudes(np.zeros(self.n_actions), 0)

    def _observation(self, t: int) -> Observation:
        return Observation(
            theta_deg=float(self._theta_deg[t]),
            uav_position=self._states[t].position,
            t=t,
        )


def generate_episode(config: EnvConfig, episode_id: int) -> Episode:
    """Roll one seeded flight and collect its scene records (dataset mode)."""
    env = BeamSelectionEnv(config)
    env.reset(seed=episode_id)
    scenes = [env.step(0).info for _ in range(config.steps)]
    return Episode(
        episode_id=episode_id,
        scenes=tuple(scenes),
        seed=episode_seed(config.master_seed, episode_id),
        config_digest=config.config_digest,
    )
