# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernel; same contract as ``rotgate._fallback.propagate_steps``."""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin
from libc.stdlib cimport free, malloc
from scipy.linalg.cython_lapack cimport dstev

cnp.import_array()


def propagate_steps(double[::1] energies, double[::1] couplings, double[:, ::1] fields,
                    double[::1] h_scale, double dt, double complex[:, ::1] Y,
                    Py_ssize_t stride, Py_ssize_t n_track):
    cdef int n = energies.shape[0]
    cdef Py_ssize_t m = Y.shape[1]
    cdef Py_ssize_t nsteps = fields.shape[0]
    cdef Py_ssize_t nexp = fields.shape[1]
    cdef Py_ssize_t nsnap = nsteps // stride if stride > 0 else 0
    snaps_arr = np.empty((nsnap, n, m), dtype=np.complex128)
    cdef double complex[:, :, ::1] snaps = snaps_arr

    cdef double *d = <double *> malloc(n * sizeof(double))
    cdef double *e = <double *> malloc(n * sizeof(double))
    cdef double *z = <double *> malloc(n * n * sizeof(double))
    cdef double *work = <double *> malloc((2 * n + 2) * sizeof(double))
    cdef double complex *W = <double complex *> malloc(n * m * sizeof(double complex))
    cdef double complex *ph = <double complex *> malloc(nexp * n * sizeof(double complex))
    cdef double complex *rot = <double complex *> malloc(n * sizeof(double complex))
    if not (d and e and z and work and W and ph and rot):
        free(d); free(e); free(z); free(work); free(W); free(ph); free(rot)
        raise MemoryError()

    cdef char jobz = b'V'
    cdef int info = 0
    cdef Py_ssize_t k, ex, i, j, c, isnap = 0
    cdef double f, a, leak, leak_max = 0.0, p
    cdef double complex acc

    for ex in range(nexp):
        for i in range(n):
            a = h_scale[ex] * energies[i] * dt
            ph[ex * n + i] = cos(a) - 1j * sin(a)

    with nogil:
        for k in range(nsteps):
            for ex in range(nexp):
                f = fields[k, ex]
                if f == 0.0:
                    for i in range(n):
                        for c in range(m):
                            Y[i, c] = Y[i, c] * ph[ex * n + i]
                    continue
                for i in range(n):
                    d[i] = h_scale[ex] * energies[i]
                for i in range(n - 1):
                    e[i] = -couplings[i] * f
                dstev(&jobz, &n, d, e, z, &n, work, &info)
                if info != 0:
                    break
                for j in range(n):
                    a = d[j] * dt
                    rot[j] = cos(a) - 1j * sin(a)
                # W = diag(rot) V^T Y, z is column-major: V[i, j] = z[i + j*n]
                for j in range(n):
                    for c in range(m):
                        acc = 0.0
                        for i in range(n):
                            acc = acc + z[i + j * n] * Y[i, c]
                        W[j * m + c] = acc * rot[j]
                for i in range(n):
                    for c in range(m):
                        acc = 0.0
                        for j in range(n):
                            acc = acc + z[i + j * n] * W[j * m + c]
                        Y[i, c] = acc
            if info != 0:
                break
            if n_track > 0:
                for c in range(n_track):
                    p = Y[0, c].real * Y[0, c].real + Y[0, c].imag * Y[0, c].imag
                    if n > 1:
                        p = p + Y[1, c].real * Y[1, c].real + Y[1, c].imag * Y[1, c].imag
                    leak = 1.0 - p
                    if leak > leak_max:
                        leak_max = leak
            if stride > 0 and (k + 1) % stride == 0:
                for i in range(n):
                    for c in range(m):
                        snaps[isnap, i, c] = Y[i, c]
                isnap += 1

    free(d); free(e); free(z); free(work); free(W); free(ph); free(rot)
    if info != 0:
        raise ArithmeticError(f"dstev failed with info={info}")
    return snaps_arr, leak_max
