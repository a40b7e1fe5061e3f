"""Episodic dataset model and on-disk format.

A dataset directory holds ``manifest.json`` plus one JSON-Lines file per
episode (``episode_00000.jsonl``, ...).  Each episode file starts with a
header line (episode id, stream seed, config digest, scene count) followed
by one scene record per line.  Angles are stored in degrees and complex
gains as [re, im] pairs; floats round-trip bit-exactly through json.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from caviar.beams import optimal_index, top_k
from caviar.channel import PathComponent
from caviar.world import UavState, Vec3

SCHEMA_VERSION = "caviar-lite/1"


class DatasetError(ValueError):
    """Raised for malformed or inconsistent dataset files."""


def episode_seed(master_seed: int, stream_id: int) -> int:
    """Stable 64-bit stream seed for (master_seed, stream_id).

    Every random stream in the simulator (episode generation, environment
    resets, training exploration) derives from this mix, so episodes are
    independent and reproducible in isolation.
    """
    ss = np.random.SeedSequence(entropy=(int(master_seed), int(stream_id)))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SceneRecord:
    episode_id: int
    scene_id: int
    timestamp: float
    uav_position: Vec3
    theta_deg: float
    los: bool
    paths: tuple[PathComponent, ...]
    magnitudes: np.ndarray
    best_index: int
    top_k_labels: tuple[int, ...]


@dataclass(frozen=True)
class Episode:
    episode_id: int
    scenes: tuple[SceneRecord, ...]
    seed: int
    config_digest: str


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    episodes: int
    scenes_per_episode: int
    sampling_period_s: float
    n_t: int
    n_r: int
    pair_count: int
    frequency_label: str
    format_version: str = SCHEMA_VERSION


def record_scene(
    episode_id: int,
    t: int,
    sampling_period_s: float,
    uav_state: UavState,
    theta_deg: float,
    los: bool,
    paths,
    magnitudes,
    k: int,
    expected_pairs: int | None = None,
) -> SceneRecord:
    """Assemble one fully-populated scene record for time step t."""
    best = getattr(magnitudes, "best_index", None)
    values = np.asarray(getattr(magnitudes, "values", magnitudes), dtype=np.float64)
    if expected_pairs is not None and values.size != expected_pairs:
        raise ValueError(
            f"magnitude vector has {values.size} entries, expected {expected_pairs}"
        )
    return SceneRecord(
        episode_id=int(episode_id),
        scene_id=int(t),
        timestamp=t * sampling_period_s,
        uav_position=uav_state.position,
        theta_deg=float(theta_deg),
        los=bool(los),
        paths=tuple(paths),
        magnitudes=values,
        best_index=optimal_index(values) if best is None else int(best),
        top_k_labels=tuple(top_k(values, k)),
    )


def to_supervised_pairs(episode: Episode) -> list[tuple[dict, dict]]:
    """Input/output pairs for classifier training: geometry in, labels out."""
    pairs = []
    for scene in episode.scenes:
        inputs = {
            "uav_position": scene.uav_position.as_tuple(),
            "theta_deg": scene.theta_deg,
            "los": scene.los,
        }
        outputs = {
            "best_index": scene.best_index,
            "top_k_labels": list(scene.top_k_labels),
        }
        pairs.append((inputs, outputs))
    return pairs


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _path_to_json(p: PathComponent) -> dict:
    return {
        "gain": [p.gain.real, p.gain.imag],
        "aod_deg": math.degrees(p.aod),
        "aoa_deg": math.degrees(p.aoa),
        "is_los": p.is_los,
    }


def _path_from_json(obj) -> PathComponent:
    re, im = obj["gain"]
    return PathComponent(
        gain=complex(re, im),
        aod=math.radians(obj["aod_deg"]),
        aoa=math.radians(obj["aoa_deg"]),
        is_los=bool(obj["is_los"]),
    )


def _scene_to_json(s: SceneRecord) -> dict:
    return {
        "episode_id": s.episode_id,
        "scene_id": s.scene_id,
        "timestamp": s.timestamp,
        "uav_position": list(s.uav_position.as_tuple()),
        "theta_deg": s.theta_deg,
        "los": s.los,
        "paths": [_path_to_json(p) for p in s.paths],
        "magnitudes": [float(v) for v in s.magnitudes],
        "best_index": s.best_index,
        "top_k_labels": list(s.top_k_labels),
    }


def _scene_from_json(obj) -> SceneRecord:
    x, y, z = obj["uav_position"]
    return SceneRecord(
        episode_id=int(obj["episode_id"]),
        scene_id=int(obj["scene_id"]),
        timestamp=float(obj["timestamp"]),
        uav_position=Vec3(x, y, z),
        theta_deg=float(obj["theta_deg"]),
        los=bool(obj["los"]),
        paths=tuple(_path_from_json(p) for p in obj["paths"]),
        magnitudes=np.array(obj["magnitudes"], dtype=np.float64),
        best_index=int(obj["best_index"]),
        top_k_labels=tuple(int(i) for i in obj["top_k_labels"]),
    )


def _episode_filename(index: int) -> str:
    return f"episode_{index:05d}.jsonl"


def write_episodes(path, manifest: DatasetManifest, episodes) -> None:
    """Write a dataset directory; deterministic bytes for identical inputs."""
    episodes = list(episodes)
    if manifest.episodes != len(episodes):
        raise DatasetError(
            f"manifest lists {manifest.episodes} episodes, got {len(episodes)}"
        )
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(_dumps(vars(manifest)) + "\n")
    for index, episode in enumerate(episodes):
        if len(episode.scenes) != manifest.scenes_per_episode:
            raise DatasetError(
                f"episode {episode.episode_id} has {len(episode.scenes)} scenes, "
                f"manifest says {manifest.scenes_per_episode}"
            )
        header = {
            "episode_id": episode.episode_id,
            "seed": episode.seed,
            "config_digest": episode.config_digest,
            "scenes": len(episode.scenes),
        }
        lines = [_dumps(header)]
        lines.extend(_dumps(_scene_to_json(s)) for s in episode.scenes)
        (out / _episode_filename(index)).write_text("\n".join(lines) + "\n")


def read_episodes(path) -> tuple[DatasetManifest, list[Episode]]:
    """Read a dataset directory back, verifying counts and schema version."""
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise DatasetError(f"{manifest_path}: missing manifest")
    try:
        raw = json.loads(manifest_path.read_text())
        manifest = DatasetManifest(**raw)
    except (json.JSONDecodeError, TypeError) as exc:
        raise DatasetError(f"{manifest_path}: bad manifest ({exc})") from exc
    if manifest.format_version != SCHEMA_VERSION:
        raise DatasetError(
            f"{manifest_path}: format version {manifest.format_version!r} "
            f"!= supported {SCHEMA_VERSION!r}"
        )
    episodes = []
    for index in range(manifest.episodes):
        file = root / _episode_filename(index)
        if not file.is_file():
            raise DatasetError(f"{file}: missing episode file")
        with file.open() as fh:
            lines = fh.read().splitlines()
        if not lines:
            raise DatasetError(f"{file}:1: empty episode file")
        header = _parse_line(file, 1, lines[0])
        scene_lines = lines[1:]
        if header.get("scenes") != len(scene_lines):
            raise DatasetError(
                f"{file}: header announces {header.get('scenes')} scenes, "
                f"found {len(scene_lines)}"
            )
        if len(scene_lines) != manifest.scenes_per_episode:
            raise DatasetError(
                f"{file}: {len(scene_lines)} scenes, manifest says "
                f"{manifest.scenes_per_episode}"
            )
        scenes = []
        for lineno, line in enumerate(scene_lines, start=2):
            obj = _parse_line(file, lineno, line)
            try:
                scenes.append(_scene_from_json(obj))
            except (KeyError, TypeError, ValueError) as exc:
                raise DatasetError(f"{file}:{lineno}: bad scene record ({exc})") from exc
        episodes.append(
            Episode(
                episode_id=int(header["episode_id"]),
                scenes=tuple(scenes),
                seed=int(header["seed"]),
                config_digest=str(header["config_digest"]),
            )
        )
    return manifest, episodes


def _parse_line(file, lineno, line):
    try:
        return json.loads(line)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{file}:{lineno}: corrupted line ({exc})") from exc
