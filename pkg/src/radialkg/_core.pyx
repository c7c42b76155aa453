# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled solver kernels: Crout solves, scheme residual/Jacobian, Newton march.

Mirrors radialkg._kernels_py for the built-in nonlinearities (zero, odd
powers, sinh(5u) - 5u, sin(5u) - 5u); keep the two in sync — the test suite
pins their agreement.
"""

from libc.math cimport cos, cosh, fabs, pow, sin, sinh

import numpy as np

from .errors import SingularSystemError

cdef double PIVOT_FLOOR = 1e-30   # keep in sync with _kernels_py
cdef double QUOT_SWITCH = 1e-8

cdef int NLC_ZERO = 0
cdef int NLC_POWER = 1
cdef int NLC_SINH5 = 2
cdef int NLC_SIN5 = 3


cdef inline double g_general(int kind, double w) noexcept:
    if kind == NLC_SINH5:
        return (cosh(5.0 * w) - 1.0) / 5.0 - 2.5 * w * w
    elif kind == NLC_SIN5:
        return (1.0 - cos(5.0 * w)) / 5.0 - 2.5 * w * w
    return 0.0


cdef inline double gp_general(int kind, double w) noexcept:
    if kind == NLC_SINH5:
        return sinh(5.0 * w) - 5.0 * w
    elif kind == NLC_SIN5:
        return sin(5.0 * w) - 5.0 * w
    return 0.0


cdef inline double gpp_general(int kind, double w) noexcept:
    if kind == NLC_SINH5:
        return 5.0 * cosh(5.0 * w) - 5.0
    elif kind == NLC_SIN5:
        return 5.0 * cos(5.0 * w) - 5.0
    return 0.0


cdef inline double sv_quot(int kind, int p, double vp, double vm, double r) noexcept:
    cdef double diff = vp - vm
    cdef double vbar, pref, w
    if kind == NLC_ZERO:
        return 0.0
    if kind == NLC_POWER:
        pref = pow(r, 1.0 - p)
        if fabs(diff) < QUOT_SWITCH * (1.0 + fabs(vp) + fabs(vm)):
            vbar = 0.5 * (vp + vm)
            return pref * pow(vbar, <double> p)
        return pref * (pow(vp, p + 1.0) - pow(vm, p + 1.0)) / ((p + 1.0) * diff)
    if fabs(diff) < QUOT_SWITCH * (1.0 + fabs(vp) + fabs(vm)):
        w = 0.5 * (vp + vm) / r
        return r * gp_general(kind, w)
    return r * r * (g_general(kind, vp / r) - g_general(kind, vm / r)) / diff


cdef inline double sv_quot_dplus(int kind, int p, double vp, double vm, double r) noexcept:
    cdef double diff = vp - vm
    cdef double vbar, pref, w
    if kind == NLC_ZERO:
        return 0.0
    if kind == NLC_POWER:
        pref = pow(r, 1.0 - p)
        if fabs(diff) < QUOT_SWITCH * (1.0 + fabs(vp) + fabs(vm)):
            vbar = 0.5 * (vp + vm)
            return pref * 0.5 * p * pow(vbar, p - 1.0)
        return pref * (pow(vp, <double> p) * diff
                       - (pow(vp, p + 1.0) - pow(vm, p + 1.0)) / (p + 1.0)) / (diff * diff)
    if fabs(diff) < QUOT_SWITCH * (1.0 + fabs(vp) + fabs(vm)):
        w = 0.5 * (vp + vm) / r
        return 0.5 * gpp_general(kind, w)
    return (r * gp_general(kind, vp / r) * diff
            - r * r * (g_general(kind, vp / r) - g_general(kind, vm / r))) / (diff * diff)


cdef void _residual(double[::1] out, double[::1] cand, double[::1] vn, double[::1] vnm1,
                    double dr, double dt, double beta, double gamma, double m,
                    int kind, int p) noexcept:
    cdef Py_ssize_t M = cand.shape[0] - 1
    cdef Py_ssize_t j
    cdef double idt2 = 1.0 / (dt * dt)
    cdef double idr2 = 1.0 / (dr * dr)
    cdef double bsc = beta / (2.0 * dt * dr * dr)
    cdef double g2 = gamma / (2.0 * dt)
    cdef double mh = 0.5 * m * m
    for j in range(1, M):
        out[j - 1] = ((cand[j] - 2.0 * vn[j] + vnm1[j]) * idt2
                      - (vn[j + 1] - 2.0 * vn[j] + vn[j - 1]) * idr2
                      + g2 * (cand[j] - vnm1[j])
                      - bsc * ((cand[j + 1] - 2.0 * cand[j] + cand[j - 1])
                               - (vnm1[j + 1] - 2.0 * vnm1[j] + vnm1[j - 1]))
                      + mh * (cand[j] + vnm1[j])
                      + sv_quot(kind, p, cand[j], vnm1[j], j * dr))


cdef void _jacobian_main(double[::1] out, double[::1] cand, double[::1] vnm1,
                         double dr, double dt, double beta, double gamma, double m,
                         int kind, int p) noexcept:
    cdef Py_ssize_t M = cand.shape[0] - 1
    cdef Py_ssize_t j
    cdef double base = 1.0 / (dt * dt) + gamma / (2.0 * dt) + beta / (dt * dr * dr) + 0.5 * m * m
    for j in range(1, M):
        out[j - 1] = base + sv_quot_dplus(kind, p, cand[j], vnm1[j], j * dr)


cdef int MAX_BACKTRACK = 40   # keep in sync with _kernels_py


cdef inline double _supnorm(double[::1] res, Py_ssize_t n) noexcept:
    cdef Py_ssize_t i
    cdef double rnorm = 0.0
    cdef double v
    for i in range(n):
        v = fabs(res[i])
        if v > rnorm:
            rnorm = v
    return rnorm


cdef int _newton(double[::1] out, double[::1] vn, double[::1] vnm1,
                 double dr, double dt, double beta, double gamma, double m,
                 int kind, int p, double tol, int max_iter,
                 double[::1] res, double[::1] dmain, double[::1] cu, double[::1] cz,
                 double[::1] trial, double[::1] tres,
                 double* final_res, int* iters_out, int* piv_row, double* piv_val):
    # returns 1 converged, 0 not converged, -1 singular pivot
    cdef Py_ssize_t M = vn.shape[0] - 1
    cdef Py_ssize_t n = M - 1
    cdef Py_ssize_t i, j
    cdef double offd = -beta / (2.0 * dt * dr * dr)
    cdef double piv, rnorm, tnorm, step
    cdef int it = 0
    cdef int bt

    for j in range(M + 1):
        out[j] = vn[j]
    out[0] = 0.0
    out[M] = 0.0

    _residual(res, out, vn, vnm1, dr, dt, beta, gamma, m, kind, p)
    rnorm = _supnorm(res, n)

    while rnorm > tol and it < max_iter:
        _jacobian_main(dmain, out, vnm1, dr, dt, beta, gamma, m, kind, p)
        # Crout reduction with constant off-diagonals
        piv = dmain[0]
        if fabs(piv) < PIVOT_FLOOR:
            piv_row[0] = 0
            piv_val[0] = piv
            return -1
        cz[0] = res[0] / piv
        if n > 1:
            cu[0] = offd / piv
        for i in range(1, n):
            piv = dmain[i] - offd * cu[i - 1]
            if fabs(piv) < PIVOT_FLOOR:
                piv_row[0] = <int> i
                piv_val[0] = piv
                return -1
            cz[i] = (res[i] - offd * cz[i - 1]) / piv
            if i < n - 1:
                cu[i] = offd / piv
        for i in range(n - 2, -1, -1):
            cz[i] -= cu[i] * cz[i + 1]
        # backtrack until the residual sup-norm decreases
        step = 1.0
        for bt in range(MAX_BACKTRACK):
            trial[0] = 0.0
            trial[M] = 0.0
            for j in range(1, M):
                trial[j] = out[j] - step * cz[j - 1]
            _residual(tres, trial, vn, vnm1, dr, dt, beta, gamma, m, kind, p)
            tnorm = _supnorm(tres, n)
            if tnorm == tnorm and tnorm < rnorm:  # tnorm == tnorm filters NaN
                break
            step *= 0.5
        for j in range(M + 1):
            out[j] = trial[j]
        for i in range(n):
            res[i] = tres[i]
        rnorm = tnorm
        it += 1

    final_res[0] = rnorm
    iters_out[0] = it
    return 1 if rnorm <= tol else 0


def crout_solve(double[::1] sub, double[::1] main, double[::1] sup, double[::1] rhs):
    cdef Py_ssize_t n = main.shape[0]
    cdef Py_ssize_t i
    cdef double piv
    x = np.empty(n)
    u = np.empty(n - 1 if n > 1 else 0)
    cdef double[::1] xv = x
    cdef double[::1] uv = u

    piv = main[0]
    if fabs(piv) < PIVOT_FLOOR:
        raise SingularSystemError(0, piv)
    xv[0] = rhs[0] / piv
    if n > 1:
        uv[0] = sup[0] / piv
    for i in range(1, n):
        piv = main[i] - sub[i - 1] * uv[i - 1]
        if fabs(piv) < PIVOT_FLOOR:
            raise SingularSystemError(i, piv)
        xv[i] = (rhs[i] - sub[i - 1] * xv[i - 1]) / piv
        if i < n - 1:
            uv[i] = sup[i] / piv
    for i in range(n - 2, -1, -1):
        xv[i] -= uv[i] * xv[i + 1]
    return x


def residual(double[::1] cand, double[::1] vn, double[::1] vnm1,
             double dr, double dt, double beta, double gamma, double m, int kind, int p):
    out = np.empty(cand.shape[0] - 2)
    _residual(out, cand, vn, vnm1, dr, dt, beta, gamma, m, kind, p)
    return out


def jacobian_main(double[::1] cand, double[::1] vnm1,
                  double dr, double dt, double beta, double gamma, double m, int kind, int p):
    out = np.empty(cand.shape[0] - 2)
    _jacobian_main(out, cand, vnm1, dr, dt, beta, gamma, m, kind, p)
    return out


def newton_step(double[::1] vn, double[::1] vnm1,
                double dr, double dt, double beta, double gamma, double m,
                int kind, int p, double tol, int max_iter):
    cdef Py_ssize_t M = vn.shape[0] - 1
    cand = np.empty(M + 1)
    res = np.empty(M - 1)
    dmain = np.empty(M - 1)
    cu = np.empty(M - 2 if M > 2 else 0)
    cz = np.empty(M - 1)
    trial = np.empty(M + 1)
    tres = np.empty(M - 1)
    cdef double fr = 0.0
    cdef double pval = 0.0
    cdef int it = 0
    cdef int prow = 0
    cdef int status = _newton(cand, vn, vnm1, dr, dt, beta, gamma, m, kind, p,
                              tol, max_iter, res, dmain, cu, cz, trial, tres,
                              &fr, &it, &prow, &pval)
    if status == -1:
        raise SingularSystemError(prow, pval)
    return cand, it, fr, status == 1


def march(double[:, ::1] levels, double dr, double dt, double beta, double gamma, double m,
          int kind, int p, double tol, int max_iter, bint abort_on_div):
    cdef Py_ssize_t N = levels.shape[0] - 1
    cdef Py_ssize_t M = levels.shape[1] - 1
    cdef Py_ssize_t n
    iters = np.zeros(N - 1 if N > 1 else 0, dtype=np.int64)
    resids = np.zeros(N - 1 if N > 1 else 0)
    conv = np.zeros(N - 1 if N > 1 else 0, dtype=bool)
    res = np.empty(M - 1)
    dmain = np.empty(M - 1)
    cu = np.empty(M - 2 if M > 2 else 0)
    cz = np.empty(M - 1)
    trial = np.empty(M + 1)
    tres = np.empty(M - 1)
    cdef long[::1] it_v = iters
    cdef double[::1] rs_v = resids
    cdef double fr = 0.0
    cdef double pval = 0.0
    cdef int it = 0
    cdef int prow = 0
    cdef int status
    for n in range(1, N):
        status = _newton(levels[n + 1], levels[n], levels[n - 1],
                         dr, dt, beta, gamma, m, kind, p, tol, max_iter,
                         res, dmain, cu, cz, trial, tres, &fr, &it, &prow, &pval)
        if status == -1:
            raise SingularSystemError(prow, pval)
        it_v[n - 1] = it
        rs_v[n - 1] = fr
        conv[n - 1] = status == 1
        if status == 0 and abort_on_div:
            return iters, resids, conv, <int> (n + 1)
    return iters, resids, conv, -1
