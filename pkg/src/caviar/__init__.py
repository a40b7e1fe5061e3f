"""CAVIAR-style 6G beam-selection simulator.

Scene/trajectory simulation, geometric multipath MIMO channels, DFT-codebook
beamforming, episodic dataset export, and a reinforcement-learning
environment with oracle / baseline / tabular-Q policies.
"""

from caviar._kernels import backend_name as kernel_backend

__version__ = "0.1.0"

__all__ = ["kernel_backend", "__version__"]
