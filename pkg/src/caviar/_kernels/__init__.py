"""Numeric kernel dispatch.

Two interchangeable backends implement the hot inner-loop math (steering
vectors, DFT codebooks, channel synthesis, beam-pair sweeps):

* ``_fast``  -- Cython extension, built when a C toolchain is available;
* ``_numpy`` -- pure numpy reference implementation.

The compiled backend is preferred when importable.  Set the environment
variable ``CAVIAR_KERNELS`` to ``python`` or ``compiled`` to force one, or
call :func:`use_backend` at runtime (used by the benchmark and parity tests).
"""

import os

from . import _numpy

_BACKENDS = {"python": _numpy}

try:
    from . import _fast

    _BACKENDS["compiled"] = _fast
except ImportError:
    _fast = None

backend_name = None
steering_vector = None
dft_codebook = None
synthesize_channel = None
pair_magnitudes = None


def available_backends():
    return sorted(_BACKENDS)


def use_backend(name):
    """Rebind the kernel entry points to the named backend."""
    global backend_name, steering_vector, dft_codebook
    global synthesize_channel, pair_magnitudes
    try:
        mod = _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown or unavailable kernel backend {name!r}; "
            f"available: {available_backends()}"
        ) from None
    backend_name = name
    steering_vector = mod.steering_vector
    dft_codebook = mod.dft_codebook
    synthesize_channel = mod.synthesize_channel
    pair_magnitudes = mod.pair_magnitudes


_requested = os.environ.get("CAVIAR_KERNELS", "auto").strip().lower()
if _requested in ("", "auto"):
    use_backend("compiled" if "compiled" in _BACKENDS else "python")
else:
    use_backend(_requested)
