"""Pure-numpy kernel backend (reference implementation).

Conventions shared by both backends:

* half-wavelength ULA steering, element n: exp(j*pi*n*sin(theta)) / sqrt(N);
* DFT codebook, beam q element n: exp(j*2*pi*n*q/N) / sqrt(N), beams stacked
  as columns of a unitary N x N matrix;
* channel of L paths with complex gains a_l, departure angles phi_l and
  arrival angles psi_l:

      H = sqrt(Nt*Nr) * sum_l a_l * ar(psi_l) @ at(phi_l)^H

  which reduces entrywise to H[r, t] = sum_l a_l * exp(j*pi*(r*sin(psi_l)
  - t*sin(phi_l)));
* beam-pair sweep: values[i] = |w_q^H H f_p| with the flat index
  i = p*Nr + q (p transmit beam, q receive beam).
"""

import numpy as np


def steering_vector(n, theta):
    if n < 1:
        raise ValueError("antenna count must be positive")
    phases = np.pi * np.sin(theta) * np.arange(n)
    return np.exp(1j * phases) / np.sqrt(n)


def dft_codebook(n):
    if n < 1:
        raise ValueError("antenna count must be positive")
    idx = np.arange(n)
    return np.exp(2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)


def synthesize_channel(gains, aods, aoas, n_t, n_r):
    gains = np.asarray(gains, dtype=np.complex128)
    if gains.size == 0:
        raise ValueError("empty path list")
    at = np.exp(1j * np.pi * np.outer(np.sin(aods), np.arange(n_t))) / np.sqrt(n_t)
    ar = np.exp(1j * np.pi * np.outer(np.sin(aoas), np.arange(n_r))) / np.sqrt(n_r)
    h = ar.T @ (gains[:, None] * at.conj())
    return np.sqrt(n_t * n_r) * h


def pair_magnitudes(h, ct, cr):
    y = cr.conj().T @ h @ ct  # y[q, p]
    return np.ascontiguousarray(np.abs(y).T).reshape(-1)
