# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Same signatures and return values as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, INFINITY

cnp.import_array()

cdef enum:
    OK = 0
    MAX_ITER = 1
    UNDERFLOW = 2


cdef inline void _matvec(const double[:, ::1] a, const double[::1] x, double[::1] out, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += a[i, j] * x[j]
        out[i] = s


def fixed_point(kmat, gamma, g0, double tol, long max_iter):
    cdef const double[:, ::1] K = np.ascontiguousarray(kmat, dtype=np.float64)
    cdef const double[::1] gam = np.ascontiguousarray(gamma, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] g_arr = np.array(g0, dtype=np.float64)
    cdef double[::1] g = g_arr
    cdef Py_ssize_t n = g.shape[0]
    cdef double[::1] t = np.empty(n)
    cdef long it
    cdef Py_ssize_t i
    cdef double change = INFINITY, d, new
    with nogil:
        for it in range(1, max_iter + 1):
            _matvec(K, g, t, n)
            change = 0.0
            for i in range(n):
                new = t[i] / (gam[i] + t[i])
                d = fabs(new - g[i])
                if d > change:
                    change = d
                g[i] = new
            if change < tol:
                break
    if change < tol:
        return g_arr, it, OK, change
    return g_arr, max_iter, MAX_ITER, change


cdef inline void _field(const double[:, ::1] K, const double[::1] gam, const double[::1] u,
                        double[::1] tmp, double[::1] out, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    _matvec(K, u, tmp, n)
    for i in range(n):
        out[i] = (1.0 - u[i]) * tmp[i] - gam[i] * u[i]


cdef void _rk4_step(const double[:, ::1] K, const double[::1] gam, double[::1] v, double h,
                    double[::1] k1, double[::1] k2, double[::1] k3, double[::1] k4,
                    double[::1] w, double[::1] tmp, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    _field(K, gam, v, tmp, k1, n)
    for i in range(n):
        w[i] = v[i] + 0.5 * h * k1[i]
    _field(K, gam, w, tmp, k2, n)
    for i in range(n):
        w[i] = v[i] + 0.5 * h * k2[i]
    _field(K, gam, w, tmp, k3, n)
    for i in range(n):
        w[i] = v[i] + h * k3[i]
    _field(K, gam, w, tmp, k4, n)
    for i in range(n):
        v[i] = v[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


def rk4(kmat, gamma, u0, double dt, long n_steps, long save_stride, double clamp_tol, int max_halvings):
    cdef const double[:, ::1] K = np.ascontiguousarray(kmat, dtype=np.float64)
    cdef const double[::1] gam = np.ascontiguousarray(gamma, dtype=np.float64)
    cdef double[::1] u = np.array(u0, dtype=np.float64)
    cdef Py_ssize_t n = u.shape[0]
    cdef long n_saved = n_steps // save_stride + 1 + (1 if n_steps % save_stride else 0)
    times_arr = np.empty(n_saved)
    states_arr = np.empty((n_saved, n))
    cdef double[::1] times = times_arr
    cdef double[:, ::1] states = states_arr
    cdef double[::1] v = np.empty(n)
    cdef double[::1] k1 = np.empty(n), k2 = np.empty(n), k3 = np.empty(n), k4 = np.empty(n)
    cdef double[::1] w = np.empty(n), tmp = np.empty(n)
    cdef long step, saved = 1, s, sub
    cdef int halvings, status = OK
    cdef Py_ssize_t i
    cdef double h, exc = 0.0, max_clamp = 0.0
    times[0] = 0.0
    for i in range(n):
        states[0, i] = u[i]
    with nogil:
        for step in range(1, n_steps + 1):
            halvings = 0
            while True:
                sub = 1 << halvings
                h = dt / sub
                for i in range(n):
                    v[i] = u[i]
                for s in range(sub):
                    _rk4_step(K, gam, v, h, k1, k2, k3, k4, w, tmp, n)
                exc = 0.0
                for i in range(n):
                    if v[i] - 1.0 > exc:
                        exc = v[i] - 1.0
                    if -v[i] > exc:
                        exc = -v[i]
                if exc <= clamp_tol:
                    break
                halvings += 1
                if halvings > max_halvings:
                    status = UNDERFLOW
                    break
            if status == UNDERFLOW:
                max_clamp = exc
                break
            if exc > max_clamp:
                max_clamp = exc
            for i in range(n):
                if v[i] < 0.0:
                    u[i] = 0.0
                elif v[i] > 1.0:
                    u[i] = 1.0
                else:
                    u[i] = v[i]
            if step % save_stride == 0 or step == n_steps:
                times[saved] = step * dt
                for i in range(n):
                    states[saved, i] = u[i]
                saved += 1
    return times_arr[:saved], states_arr[:saved], status, max_clamp


def power_iteration(a, double shift, double tol, long max_iter):
    cdef const double[:, ::1] A = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t n = A.shape[0]
    cdef double[::1] x = np.empty(n), y = np.empty(n)
    cdef Py_ssize_t i
    cdef long it
    cdef double lam = 0.0, new, nrm, ysum
    cdef int done = 0
    for i in range(n):
        x[i] = 1.0 / sqrt(<double>n)
    with nogil:
        for it in range(1, max_iter + 1):
            _matvec(A, x, y, n)
            new = 0.0
            ysum = 0.0
            for i in range(n):
                new += x[i] * y[i]
                ysum += fabs(y[i])
            if ysum == 0.0:
                lam = 0.0
                done = 1
                break
            if it > 1 and fabs(new - lam) <= tol * fabs(new):
                lam = new
                done = 1
                break
            lam = new
            nrm = 0.0
            for i in range(n):
                y[i] = y[i] + shift * x[i]
                nrm += y[i] * y[i]
            nrm = sqrt(nrm)
            for i in range(n):
                x[i] = y[i] / nrm
    if done:
        return lam, it, OK
    return lam, max_iter, MAX_ITER
