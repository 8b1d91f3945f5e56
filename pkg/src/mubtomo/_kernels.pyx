# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Same signatures as :mod:`mubtomo._kernels_py`."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, fabs

cnp.import_array()


def interference_pattern(const double complex[::1] coeffs, const double[::1] labels,
                         const double[::1] x, double fringe_scale, double envelope_scale):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = coeffs.shape[0]
    cdef Py_ssize_t i, l
    cdef double re, im, u, env, xi, zr, zi, wr, wi, t, step = 0.0
    cdef bint uniform = d > 1
    cdef double[::1] cr = np.ascontiguousarray(np.real(coeffs), dtype=np.float64)
    cdef double[::1] ci = np.ascontiguousarray(np.imag(coeffs), dtype=np.float64)
    if d > 1:
        step = labels[1] - labels[0]
        for l in range(2, d):
            if fabs(labels[l] - labels[l - 1] - step) > 1e-12:
                uniform = False
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            xi = x[i]
            re = 0.0
            im = 0.0
            if uniform:
                # exp(i l s x) by recurrence: two sincos per point instead of d
                zr = cos(labels[0] * fringe_scale * xi)
                zi = sin(labels[0] * fringe_scale * xi)
                wr = cos(step * fringe_scale * xi)
                wi = sin(step * fringe_scale * xi)
                for l in range(d):
                    re = re + cr[l] * zr - ci[l] * zi
                    im = im + cr[l] * zi + ci[l] * zr
                    t = zr * wr - zi * wi
                    zi = zr * wi + zi * wr
                    zr = t
            else:
                for l in range(d):
                    zr = cos(labels[l] * fringe_scale * xi)
                    zi = sin(labels[l] * fringe_scale * xi)
                    re = re + cr[l] * zr - ci[l] * zi
                    im = im + cr[l] * zi + ci[l] * zr
            u = envelope_scale * xi
            if fabs(u) < 1e-8:
                env = 1.0 - u * u / 3.0
            else:
                env = sin(u) / u
                env = env * env
            o[i] = env * (re * re + im * im)
    return out


def assemble_density(const double[:, :, ::1] probs, const double complex[:, :, ::1] vectors):
    cdef Py_ssize_t nb = probs.shape[0]
    cdef Py_ssize_t na = probs.shape[1]
    cdef Py_ssize_t d = probs.shape[2]
    cdef Py_ssize_t nk = na * d
    cdef Py_ssize_t npair = d * (d + 1) // 2
    cdef Py_ssize_t b, a, m, i, j, k, q
    cdef double re, im, pk
    v = np.asarray(vectors)
    # projector entries v_i conj(v_j) on the upper triangle, laid out [pair, (a, m)]
    iu, ju = np.triu_indices(d)
    outer = v[:, iu, :] * v[:, ju, :].conj()
    outer = outer.transpose(1, 0, 2).reshape(npair, nk)
    cdef double[:, ::1] pr = np.ascontiguousarray(outer.real)
    cdef double[:, ::1] pi = np.ascontiguousarray(outer.imag)
    cdef Py_ssize_t[::1] ii = np.ascontiguousarray(iu, dtype=np.intp)
    cdef Py_ssize_t[::1] jj = np.ascontiguousarray(ju, dtype=np.intp)
    cdef const double[:, ::1] pf = np.asarray(probs).reshape(nb, nk)
    out = np.empty((nb, d, d), dtype=np.complex128)
    cdef double complex[:, :, ::1] o = out
    with nogil:
        for b in range(nb):
            for q in range(npair):
                re = 0.0
                im = 0.0
                for k in range(nk):
                    pk = pf[b, k]
                    re = re + pk * pr[q, k]
                    im = im + pk * pi[q, k]
                i = ii[q]
                j = jj[q]
                if i == j:
                    o[b, i, i] = re - 1.0
                else:
                    o[b, i, j] = re + 1j * im
                    o[b, j, i] = re - 1j * im
    return out
