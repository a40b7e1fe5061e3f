# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Same contracts as caviar._kernels._numpy; see that module for the math
conventions.  Loops are written out so the per-call overhead stays small for
the tiny matrices (N_t = 64, N_r = 1) that dominate simulator runtime.
"""

from libc.math cimport M_PI, cos, hypot, sin, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()


def steering_vector(Py_ssize_t n, double theta):
    if n < 1:
        raise ValueError("antenna count must be positive")
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef double u = M_PI * sin(theta)
    cdef double s = 1.0 / sqrt(<double>n)
    cdef double ph
    cdef Py_ssize_t i
    for i in range(n):
        ph = u * <double>i
        out[i] = s * cos(ph) + 1j * (s * sin(ph))
    return out


def dft_codebook(Py_ssize_t n):
    if n < 1:
        raise ValueError("antenna count must be positive")
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] f = np.empty((n, n), dtype=np.complex128)
    cdef double w = 2.0 * M_PI / <double>n
    cdef double s = 1.0 / sqrt(<double>n)
    cdef double ph
    cdef Py_ssize_t row, col
    for row in range(n):
        for col in range(n):
            ph = w * <double>(row * col)
            f[row, col] = s * cos(ph) + 1j * (s * sin(ph))
    return f


def synthesize_channel(object gains, object aods, object aoas,
                       Py_ssize_t n_t, Py_ssize_t n_r):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] g = \
        np.ascontiguousarray(gains, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] phi = \
        np.ascontiguousarray(aods, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] psi = \
        np.ascontiguousarray(aoas, dtype=np.float64)
    cdef Py_ssize_t n_paths = g.shape[0]
    if n_paths == 0:
        raise ValueError("empty path list")
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] h = \
        np.zeros((n_r, n_t), dtype=np.complex128)
    cdef double[:, ::1] hv = h.view(np.float64).reshape(n_r, 2 * n_t)
    # phase recurrences: exp(j*u*(t+1)) = exp(j*u*t) * exp(j*u), so each
    # element costs one complex multiply instead of a sin/cos pair
    cdef double ut, ur, ph, br, bi, er, ei, wr, wi, tr
    cdef Py_ssize_t l, r, t
    for l in range(n_paths):
        ut = M_PI * sin(phi[l])
        ur = M_PI * sin(psi[l])
        wr = cos(ut)
        wi = -sin(ut)
        for r in range(n_r):
            ph = ur * <double>r
            br = g[l].real * cos(ph) - g[l].imag * sin(ph)
            bi = g[l].real * sin(ph) + g[l].imag * cos(ph)
            er = 1.0
            ei = 0.0
            for t in range(n_t):
                hv[r, 2 * t] += br * er - bi * ei
                hv[r, 2 * t + 1] += br * ei + bi * er
                tr = er * wr - ei * wi
                ei = er * wi + ei * wr
                er = tr
    return h


def pair_magnitudes(cnp.ndarray[cnp.complex128_t, ndim=2] h,
                    cnp.ndarray[cnp.complex128_t, ndim=2] ct,
                    cnp.ndarray[cnp.complex128_t, ndim=2] cr):
    cdef Py_ssize_t n_r = h.shape[0]
    cdef Py_ssize_t n_t = h.shape[1]
    cdef Py_ssize_t nb_t = ct.shape[1]
    cdef Py_ssize_t nb_r = cr.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = \
        np.empty(nb_t * nb_r, dtype=np.float64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] tmp = \
        np.zeros((n_r, nb_t), dtype=np.complex128)
    cdef double[:, ::1] tv = tmp.view(np.float64)
    cdef double ar, ai, hr, hi, cre, cim
    cdef Py_ssize_t r, t, p, q
    # tmp = h @ ct with the beam axis innermost: codebook rows are
    # contiguous, which keeps the hot loop vectorizable
    for r in range(n_r):
        for t in range(n_t):
            hr = h[r, t].real
            hi = h[r, t].imag
            for p in range(nb_t):
                cre = ct[t, p].real
                cim = ct[t, p].imag
                tv[r, 2 * p] += hr * cre - hi * cim
                tv[r, 2 * p + 1] += hr * cim + hi * cre
    for p in range(nb_t):
        for q in range(nb_r):
            ar = 0.0
            ai = 0.0
            for r in range(n_r):
                hr = tv[r, 2 * p]
                hi = tv[r, 2 * p + 1]
                cre = cr[r, q].real
                cim = -cr[r, q].imag  # conjugate receive beam
                ar += hr * cre - hi * cim
                ai += hr * cim + hi * cre
            out[p * nb_r + q] = hypot(ar, ai)
    return out
