import json
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
FIG8_CONFIG = REPO_ROOT / "configs" / "fig8.json"


@pytest.fixture(scope="session")
def fig8_path():
    return FIG8_CONFIG


def small_config(**overrides):
    """A tiny, fast scenario: 40 steps, 8 antennas, one mask window."""
    raw = {
        "name": "mini",
        "master_seed": 7,
        "antennas": {"n_t": 8, "n_r": 1},
        "scene": {
            "bs_position": [0.0, 0.0, 0.0],
            "nlos_angle_masks_deg": [[20.0, 30.0]],
        },
        "trajectory": {
            "phases": [
                {"name": "takeoff", "steps": 15, "start": [20.0, 0.0, 0.0], "end": [20.0, 0.0, 30.0]},
                {"name": "cruise", "steps": 10, "start": [20.0, 0.0, 30.0], "end": [40.0, 0.0, 30.0]},
                {"name": "land", "steps": 15, "start": [40.0, 0.0, 30.0], "end": [40.0, 0.0, 0.0]},
            ]
        },
        "channel": {
            "num_paths": 3,
            "los_amplitude": 1.0,
            "nlos_sigma": 0.5,
            "nlos_aod_range_deg": [35.0, 55.0],
        },
        "generate": {"episodes": 2, "top_k": 3},
        "train": {"episodes": 3, "theta_bins": 16, "theta_range_deg": [0.0, 70.0]},
        "evaluate": {"seeds": 2, "seed_base": 500},
    }
    for key, value in overrides.items():
        node = raw
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return raw


@pytest.fixture
def mini_config_file(tmp_path):
    def write(**overrides):
        path = tmp_path / "mini.json"
        path.write_text(json.dumps(small_config(**overrides)))
        return path

    return write
