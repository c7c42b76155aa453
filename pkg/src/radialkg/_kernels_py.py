"""Pure numpy/Python implementations of the hot solver kernels.

This is the fallback backend behind :mod:`radialkg.kernels`; the compiled
extension ``radialkg._core`` mirrors these routines for the built-in
nonlinearities.  Keep the two in sync — the test suite pins their agreement.

All functions here work on raw float64 arrays of length M+1 (full v-levels,
boundary entries zero) and know nothing about the dataclass layer.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularSystemError
from .model import Nonlinearity, Power

#: Pivots below this are treated as singular (far below any physical pivot).
PIVOT_FLOOR = 1e-30

#: Relative |v+ - v-| threshold below which the Strauss-Vazquez quotient and
#: its derivative switch to their analytic midpoint limits.
QUOT_SWITCH = 1e-8


def crout_solve(sub, main, sup, rhs):
    """Solve the tridiagonal system (sub, main, sup) x = rhs by Crout reduction.

    No pivoting: the factorization walks the diagonal once, so a near-zero
    pivot (|pivot| < PIVOT_FLOOR) raises :class:`SingularSystemError` with
    the offending row.
    """
    # plain-float loops: numpy scalar indexing is several times slower
    b = np.asarray(main, dtype=float).tolist()
    n = len(b)
    a = np.asarray(sub, dtype=float).tolist()
    c = np.asarray(sup, dtype=float).tolist()
    d = np.asarray(rhs, dtype=float).tolist()

    piv = b[0]
    if abs(piv) < PIVOT_FLOOR:
        raise SingularSystemError(0, piv)
    u = [0.0] * (n - 1)
    z = [0.0] * n
    z[0] = d[0] / piv
    if n > 1:
        u[0] = c[0] / piv
    for i in range(1, n):
        piv = b[i] - a[i - 1] * u[i - 1]
        if abs(piv) < PIVOT_FLOOR:
            raise SingularSystemError(i, piv)
        z[i] = (d[i] - a[i - 1] * z[i - 1]) / piv
        if i < n - 1:
            u[i] = c[i] / piv
    for i in range(n - 2, -1, -1):
        z[i] -= u[i] * z[i + 1]
    return np.array(z)


def sv_quotient(nl: Nonlinearity, vplus, vminus, r):
    """Strauss-Vazquez quotient of the radial nonlinear term at radius r.

    Power case:    r**(1-p) * (G(v+) - G(v-)) / (v+ - v-)
    General case:  r**2 * (G(v+/r) - G(v-/r)) / (v+ - v-)

    The two agree exactly for G(w) = w**(p+1)/(p+1).  When v+ and v- nearly
    coincide (relative gap below QUOT_SWITCH) the analytic limit at the
    midpoint vbar is used instead, keeping the expression smooth across the
    0/0 point.
    """
    vp = np.asarray(vplus, dtype=float)
    vm = np.asarray(vminus, dtype=float)
    rr = np.asarray(r, dtype=float)
    diff = vp - vm
    small = np.abs(diff) < QUOT_SWITCH * (1.0 + np.abs(vp) + np.abs(vm))
    safe = np.where(small, 1.0, diff)
    vbar = 0.5 * (vp + vm)
    if isinstance(nl, Power):
        p = nl.p
        pref = rr ** (1 - p)
        gen = pref * (vp ** (p + 1) - vm ** (p + 1)) / ((p + 1) * safe)
        lim = pref * vbar ** p
    else:
        gen = rr * rr * (nl.G(vp / rr) - nl.G(vm / rr)) / safe
        lim = rr * nl.Gp(vbar / rr)
    out = np.where(small, lim, gen)
    return out if out.ndim else float(out)


def sv_quotient_dplus(nl: Nonlinearity, vplus, vminus, r):
    """Derivative of :func:`sv_quotient` with respect to its v+ argument.

    Direct branch: [G'(x)(x - b) - (G(x) - G(b))] / (x - b)^2 with the same
    radial prefactors; limit branch: G''(vbar)/2-based, switching on the
    same threshold as the quotient so residual and Jacobian stay consistent.
    """
    vp = np.asarray(vplus, dtype=float)
    vm = np.asarray(vminus, dtype=float)
    rr = np.asarray(r, dtype=float)
    diff = vp - vm
    small = np.abs(diff) < QUOT_SWITCH * (1.0 + np.abs(vp) + np.abs(vm))
    safe = np.where(small, 1.0, diff)
    vbar = 0.5 * (vp + vm)
    if isinstance(nl, Power):
        p = nl.p
        pref = rr ** (1 - p)
        gen = pref * (vp ** p * safe - (vp ** (p + 1) - vm ** (p + 1)) / (p + 1)) / (safe * safe)
        lim = pref * 0.5 * p * vbar ** (p - 1)
    else:
        gen = (rr * nl.Gp(vp / rr) * safe - rr * rr * (nl.G(vp / rr) - nl.G(vm / rr))) / (safe * safe)
        lim = 0.5 * nl.Gpp(vbar / rr)
    out = np.where(small, lim, gen)
    return out if out.ndim else float(out)


def residual(cand, vn, vnm1, dr, dt, beta, gamma, m, nl):
    """Scheme residual at the interior points j = 1..M-1 (length M-1).

    ``cand`` plays the role of the unknown level v^{n+1}; all three input
    arrays are full levels of length M+1 with zero boundary entries.
    """
    c = np.asarray(cand, dtype=float)
    v1 = np.asarray(vn, dtype=float)
    v0 = np.asarray(vnm1, dtype=float)
    M = c.size - 1
    d2t = (c[1:-1] - 2.0 * v1[1:-1] + v0[1:-1]) / (dt * dt)
    d2r = (v1[2:] - 2.0 * v1[1:-1] + v1[:-2]) / (dr * dr)
    damp = gamma * (c[1:-1] - v0[1:-1]) / (2.0 * dt)
    mixed = (
        -beta
        * ((c[2:] - 2.0 * c[1:-1] + c[:-2]) - (v0[2:] - 2.0 * v0[1:-1] + v0[:-2]))
        / (2.0 * dt * dr * dr)
    )
    mass = 0.5 * m * m * (c[1:-1] + v0[1:-1])
    r_int = dr * np.arange(1, M)
    quot = sv_quotient(nl, c[1:-1], v0[1:-1], r_int)
    return d2t - d2r + damp + mixed + mass + quot


def jacobian_main(cand, vnm1, dr, dt, beta, gamma, m, nl):
    """Main diagonal of d(residual)/d(cand) at the interior points."""
    c = np.asarray(cand, dtype=float)
    v0 = np.asarray(vnm1, dtype=float)
    M = c.size - 1
    base = 1.0 / (dt * dt) + gamma / (2.0 * dt) + beta / (dt * dr * dr) + 0.5 * m * m
    r_int = dr * np.arange(1, M)
    return base + sv_quotient_dplus(nl, c[1:-1], v0[1:-1], r_int)


def jacobian_offdiag(dr, dt, beta):
    """Constant sub/super diagonal of the scheme Jacobian."""
    return -beta / (2.0 * dt * dr * dr)


#: Backtracking halvings allowed per Newton update before accepting the trial.
MAX_BACKTRACK = 40


def newton_step(vn, vnm1, dr, dt, beta, gamma, m, nl, tol, max_iter):
    """One implicit time step: Newton iteration with warm start cand = vn.

    Each update backtracks (halves the step) until the residual sup-norm
    decreases; stiff nonlinearities (sinh-type at large amplitude) overshoot
    the Newton basin otherwise.  Full steps are accepted whenever they work,
    so affine problems converge in exactly one iteration.

    Returns ``(cand, iterations, final_residual, converged)``.  Boundary
    entries stay pinned to zero; ``iterations`` counts Newton updates (an
    already-satisfied residual converges with zero iterations).
    """
    cand = np.array(vn, dtype=float)
    cand[0] = cand[-1] = 0.0
    M = cand.size - 1
    offd = jacobian_offdiag(dr, dt, beta)
    off = np.full(M - 2, offd)
    res = residual(cand, vn, vnm1, dr, dt, beta, gamma, m, nl)
    rnorm = float(np.max(np.abs(res)))
    iters = 0
    while rnorm > tol and iters < max_iter:
        dmain = jacobian_main(cand, vnm1, dr, dt, beta, gamma, m, nl)
        delta = crout_solve(off, dmain, off, res)
        step = 1.0
        for _ in range(MAX_BACKTRACK):
            trial = cand.copy()
            trial[1:-1] -= step * delta
            tres = residual(trial, vn, vnm1, dr, dt, beta, gamma, m, nl)
            tnorm = float(np.max(np.abs(tres)))
            if np.isfinite(tnorm) and tnorm < rnorm:
                break
            step *= 0.5
        cand, res, rnorm = trial, tres, tnorm
        iters += 1
    return cand, iters, rnorm, bool(rnorm <= tol)


def march(levels, dr, dt, beta, gamma, m, nl, tol, max_iter, abort_on_div):
    """Fill time levels 2..N of ``levels`` by repeated Newton steps.

    ``levels`` is an (N+1, M+1) array with rows 0 and 1 already populated.
    Returns ``(iterations, residuals, converged, failed_step)`` where the
    stats arrays have one entry per produced level and ``failed_step`` is
    the index of the first non-converged level under the abort policy
    (-1 when the march completed).
    """
    N = levels.shape[0] - 1
    iters = np.zeros(max(N - 1, 0), dtype=np.int64)
    resids = np.zeros(max(N - 1, 0))
    conv = np.zeros(max(N - 1, 0), dtype=bool)
    for n in range(1, N):
        cand, it, rn, ok = newton_step(
            levels[n], levels[n - 1], dr, dt, beta, gamma, m, nl, tol, max_iter
        )
        levels[n + 1] = cand
        iters[n - 1] = it
        resids[n - 1] = rn
        conv[n - 1] = ok
        if not ok and abort_on_div:
            return iters, resids, conv, n + 1
    return iters, resids, conv, -1
