"""Geometric multipath channel: seeded path draws and matrix synthesis.

All angles here are radians.  A channel is a sum of a few plane-wave paths;
the first path is the line-of-sight component (deterministic amplitude,
uniform random phase, angles equal to the geometric elevation) and the rest
are reflected components with circularly-symmetric complex Gaussian gains
and departure angles drawn uniformly over a configured angular window.
When the link is blocked the line-of-sight component is simply dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from caviar import _kernels


@dataclass(frozen=True)
class PathComponent:
    gain: complex
    aod: float  # departure angle at the BS, radians
    aoa: float  # arrival angle at the receiver, radians
    is_los: bool = False


@dataclass(frozen=True)
class ChannelParams:
    """Knobs of the per-step path draw.

    ``num_paths`` counts the LOS component: an unblocked draw returns
    ``num_paths`` components, a blocked one ``num_paths - 1``.
    ``nlos_sigma`` is the per-axis (real/imag) standard deviation of the
    reflected gains, so the reflected amplitudes are Rayleigh with mean
    ``nlos_sigma * sqrt(pi/2)``.
    """

    num_paths: int = 3
    los_amplitude: float = 1.0
    nlos_sigma: float = 0.55
    nlos_aod_range: tuple[float, float] = (-math.pi / 2, math.pi / 2)

    def __post_init__(self):
        if self.num_paths < 1:
            raise ValueError("num_paths must be at least 1")
        if self.los_amplitude < 0:
            raise ValueError("los_amplitude must be non-negative")
        if self.nlos_sigma < 0:
            raise ValueError("nlos_sigma must be non-negative")
        lo, hi = self.nlos_aod_range
        if lo > hi:
            raise ValueError("nlos_aod_range lower bound exceeds upper bound")


def steering_vector(n: int, theta: float) -> np.ndarray:
    """Unit-norm half-wavelength ULA response, element n = exp(j*pi*n*sin(theta))/sqrt(N)."""
    return _kernels.steering_vector(int(n), float(theta))


def draw_path_arrays(
    rng: np.random.Generator,
    theta_los: float,
    blocked: bool,
    params: ChannelParams,
):
    """Raw path draw: (gains, aods, aoas, has_los) as flat arrays.

    The consumption order of the stream is fixed (LOS phase, reflected
    gains, departure angles, arrival angles) so that identical seeds give
    bitwise-identical draws.  Index 0 is the line-of-sight path when
    ``has_los`` is true.
    """
    k = params.num_paths - 1
    has_los = not blocked
    n = k + has_los
    gains = np.empty(n, dtype=np.complex128)
    aods = np.empty(n, dtype=np.float64)
    aoas = np.empty(n, dtype=np.float64)
    if has_los:
        chi = rng.uniform(0.0, 2.0 * math.pi)
        gains[0] = params.los_amplitude * complex(math.cos(chi), math.sin(chi))
        aods[0] = theta_los
        aoas[0] = theta_los
    if k > 0:
        lo, hi = params.nlos_aod_range
        parts = rng.normal(0.0, params.nlos_sigma, size=(k, 2))
        gains[has_los:] = parts[:, 0] + 1j * parts[:, 1]
        aods[has_los:] = rng.uniform(lo, hi, size=k)
        aoas[has_los:] = rng.uniform(lo, hi, size=k)
    return gains, aods, aoas, has_los


def paths_from_arrays(gains, aods, aoas, has_los) -> list[PathComponent]:
    return [
        PathComponent(
            complex(gains[i]), float(aods[i]), float(aoas[i]), is_los=has_los and i == 0
        )
        for i in range(len(gains))
    ]


def draw_multipath(
    rng: np.random.Generator,
    theta_los: float,
    blocked: bool,
    params: ChannelParams,
) -> list[PathComponent]:
    """Draw one scene's path components from the seeded stream ``rng``."""
    return paths_from_arrays(*draw_path_arrays(rng, theta_los, blocked, params))


def synthesize_channel(paths, n_t: int, n_r: int) -> np.ndarray:
    """Narrowband channel matrix H (shape n_r x n_t) for the given paths.

    H = sqrt(n_t*n_r) * sum_l gain_l * ar(aoa_l) @ at(aod_l)^H, so a single
    unit-gain path aligned with an on-grid beam yields |w^H H f| =
    sqrt(n_t*n_r).
    """
    if not len(paths):
        raise ValueError("empty path list")
    gains = np.array([p.gain for p in paths], dtype=np.complex128)
    aods = np.array([p.aod for p in paths], dtype=np.float64)
    aoas = np.array([p.aoa for p in paths], dtype=np.float64)
    return _kernels.synthesize_channel(gains, aods, aoas, int(n_t), int(n_r))
