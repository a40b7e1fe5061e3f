"""DFT codebooks, beam-pair indexing, and equivalent-channel evaluation.

A codebook for an N-element array is the unitary N x N DFT matrix with
beams as columns.  A transmit/receive beam pair (p, q) is flattened to the
single index i = p * n_r + q.  Applying a pair to a channel H gives the
noise-free equivalent channel y = w_q^H H f_p; beam selection ranks |y|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from caviar import _kernels


def dft_codebook(n: int) -> np.ndarray:
    """Unitary DFT codebook: beam q is column q, element n = exp(j*2*pi*n*q/N)/sqrt(N)."""
    return _kernels.dft_codebook(int(n))


def pair_index(p: int, q: int, n_r: int) -> int:
    if n_r < 1:
        raise ValueError("n_r must be positive")
    if not 0 <= q < n_r:
        raise ValueError(f"receive beam index {q} out of range [0, {n_r})")
    if p < 0:
        raise ValueError(f"transmit beam index {p} must be non-negative")
    return p * n_r + q


def unpair_index(i: int, n_r: int) -> tuple[int, int]:
    if n_r < 1:
        raise ValueError("n_r must be positive")
    if i < 0:
        raise ValueError(f"pair index {i} must be non-negative")
    return divmod(i, n_r)


@dataclass(frozen=True)
class BeamPair:
    p: int  # transmit beam
    q: int  # receive beam
    i: int  # flattened index
    m: int  # total number of pairs

    @classmethod
    def from_indices(cls, p: int, q: int, n_t: int, n_r: int) -> "BeamPair":
        if not 0 <= p < n_t:
            raise ValueError(f"transmit beam index {p} out of range [0, {n_t})")
        return cls(p, q, pair_index(p, q, n_r), n_t * n_r)

    @classmethod
    def from_flat(cls, i: int, n_t: int, n_r: int) -> "BeamPair":
        p, q = unpair_index(i, n_r)
        return cls.from_indices(p, q, n_t, n_r)


def equivalent_channel(h: np.ndarray, w: np.ndarray, f: np.ndarray) -> complex:
    """y = w^H H f for one beam pair (w receive, f transmit), noise-free."""
    h = np.asarray(h)
    w = np.asarray(w)
    f = np.asarray(f)
    if h.ndim != 2 or w.shape != (h.shape[0],) or f.shape != (h.shape[1],):
        raise ValueError(
            f"shape mismatch: H {h.shape}, w {w.shape}, f {f.shape}"
        )
    return complex(np.vdot(w, h @ f))


@dataclass(frozen=True)
class EquivalentMagnitudes:
    """|y_i| for every beam pair, in flat pair order, plus the argmax."""

    values: np.ndarray
    best_index: int


def _as_complex_matrix(a):
    if isinstance(a, np.ndarray) and a.dtype == np.complex128 and a.flags.c_contiguous:
        return a
    return np.ascontiguousarray(a, dtype=np.complex128)


def equivalent_magnitudes(h, ct, cr) -> EquivalentMagnitudes:
    """Sweep all transmit/receive beam pairs of the two codebooks over H."""
    h = _as_complex_matrix(h)
    ct = _as_complex_matrix(ct)
    cr = _as_complex_matrix(cr)
    if h.ndim != 2 or ct.shape[0] != h.shape[1] or cr.shape[0] != h.shape[0]:
        raise ValueError(
            f"shape mismatch: H {h.shape}, transmit codebook {ct.shape}, "
            f"receive codebook {cr.shape}"
        )
    values = _kernels.pair_magnitudes(h, ct, cr)
    return EquivalentMagnitudes(values, int(np.argmax(values)))


def optimal_index(m) -> int:
    """Smallest index attaining the maximum magnitude."""
    values = np.asarray(getattr(m, "values", m))
    if values.size == 0:
        raise ValueError("empty magnitude list")
    return int(np.argmax(values))


def top_k(m, k: int) -> list[int]:
    """The k best pair indices, best first; ties break toward lower index."""
    values = np.asarray(getattr(m, "values", m))
    if not 1 <= k <= values.size:
        raise ValueError(f"k={k} out of range [1, {values.size}]")
    order = np.argsort(-values, kind="stable")
    return [int(i) for i in order[:k]]
