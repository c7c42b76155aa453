"""Implicit time marching for the transformed field v = r*w.

The three-level scheme at interior points j = 1..M-1 reads

    (v_j^{n+1} - 2 v_j^n + v_j^{n-1}) / dt^2
      - (v_{j+1}^n - 2 v_j^n + v_{j-1}^n) / dr^2
      + gamma * (v_j^{n+1} - v_j^{n-1}) / (2 dt)
      - beta * (d2 v_j^{n+1} - d2 v_j^{n-1}) / (2 dt dr^2)
      + (m^2/2) * (v_j^{n+1} + v_j^{n-1})
      + Q_j(v_j^{n+1}, v_j^{n-1}) = 0,

where d2 u_j = u_{j+1} - 2 u_j + u_{j-1} and Q_j is the Strauss-Vazquez
quotient of the nonlinear term (see :func:`sv_quotient`).  Averaging the
nonlinearity between levels n+1 and n-1 is what makes the discrete energy
exactly conserved when both dampings vanish.

Each step solves the resulting nonlinear system for v^{n+1} by Newton's
method with the exact tridiagonal Jacobian and Crout reduction; boundary
values v_0 = v_M = 0 are pinned throughout.  The first level v^1 comes from
a second-order Taylor expansion in time that evaluates the PDE at t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels, stability
from ._kernels_py import jacobian_offdiag, sv_quotient as _sv_quotient_arrays
from .errors import NewtonDivergenceError
from .model import (
    GridSpec,
    InitialData,
    NewtonConfig,
    Nonlinearity,
    PhysicsParams,
    Power,
    RadialField,
    sample_initial_levels,
)
from .tridiag import TridiagonalSystem

__all__ = [
    "RadialField",
    "StepStats",
    "Trajectory",
    "sv_quotient",
    "residual",
    "jacobian",
    "newton_solve_step",
    "first_step",
    "run",
]


@dataclass(frozen=True)
class StepStats:
    """Newton bookkeeping for one accepted time step."""

    newton_iterations: int
    final_residual: float
    converged: bool


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A full run: time levels, per-step Newton stats, and the setup.

    ``levels`` is an (N+1, M+1) array; row n is the v-field at t = n*dt.
    ``stats`` has one entry per Newton-produced level (levels 2..N).  The
    stability advisory computed before the march is carried along for
    reporting; runs proceed regardless of it.
    """

    levels: np.ndarray
    stats: tuple
    grid: GridSpec
    params: PhysicsParams
    stability: stability.StabilityReport

    def field(self, n: int) -> RadialField:
        return RadialField(self.levels[n])

    @property
    def num_levels(self) -> int:
        return self.levels.shape[0]


def sv_quotient(nl: Nonlinearity, vplus: float, vminus: float, r: float) -> float:
    """Strauss-Vazquez quotient of the radial nonlinear term at radius r > 0.

    Power case   r**(1-p) * (G(v+) - G(v-)) / (v+ - v-);
    General case r**2 * (G(v+/r) - G(v-/r)) / (v+ - v-), which reduces to
    the power form exactly when G(w) = w**(p+1)/(p+1).  Near v+ = v- the
    analytic midpoint limit is substituted (r**(1-p)*G'(vbar), respectively
    r*G'(vbar/r)).
    """
    if r <= 0:
        raise ValueError("sv_quotient needs a positive radius")
    return float(_sv_quotient_arrays(nl, vplus, vminus, r))


def _values(field) -> np.ndarray:
    if isinstance(field, RadialField):
        return field.values
    return np.asarray(field, dtype=float)


def residual(cand, vn, vnm1, grid: GridSpec, params: PhysicsParams) -> np.ndarray:
    """Scheme residual over interior points with cand in the v^{n+1} slot."""
    c, v1, v0 = _values(cand), _values(vn), _values(vnm1)
    if not (c.size == v1.size == v0.size == grid.M + 1):
        raise ValueError("fields do not match the grid")
    return kernels.residual(
        c, v1, v0, grid.dr, grid.dt, params.beta, params.gamma, params.m, params.nonlinearity
    )


def jacobian(cand, vnm1, grid: GridSpec, params: PhysicsParams) -> TridiagonalSystem:
    """Exact derivative of :func:`residual` with respect to cand (order M-1)."""
    c, v0 = _values(cand), _values(vnm1)
    main = kernels.jacobian_main(
        c, v0, grid.dr, grid.dt, params.beta, params.gamma, params.m, params.nonlinearity
    )
    off = np.full(grid.M - 2, jacobian_offdiag(grid.dr, grid.dt, params.beta))
    return TridiagonalSystem(sub=off, main=main, sup=off.copy())


def newton_solve_step(vn, vnm1, grid: GridSpec, params: PhysicsParams, cfg: NewtonConfig):
    """Advance one time level: Newton iteration warm-started at vn.

    Returns ``(RadialField, StepStats)``.  Non-convergence is reported in
    the stats, not raised; callers decide the policy.
    """
    v1, v0 = _values(vn), _values(vnm1)
    cand, iters, resid, ok = kernels.newton_step(
        v1, v0, grid.dr, grid.dt, params.beta, params.gamma, params.m,
        params.nonlinearity, cfg.tol, cfg.max_iter,
    )
    return RadialField(cand), StepStats(iters, resid, ok)


def _radial_gprime(nl: Nonlinearity, v: np.ndarray, r: np.ndarray) -> np.ndarray:
    # r * G'(v/r); power form r**(1-p) * v**p avoids the v/r division
    if isinstance(nl, Power):
        return r ** (1 - nl.p) * v ** nl.p
    return r * nl.Gp(v / r)


def first_step(v0, vt0, grid: GridSpec, params: PhysicsParams) -> RadialField:
    """Second-order Taylor start for v^1 from sampled v(.,0) and v_t(.,0).

    v^1 = v^0 + dt*v_t^0 + (dt^2/2) * v_tt^0 with v_tt^0 read off the PDE:
    v_tt = v_rr + beta*(v_t)_rr - gamma*v_t - m^2 v - r G'(v/r), the spatial
    derivatives replaced by centered second differences of the sampled data.
    """
    a0, b0 = _values(v0), _values(vt0)
    dr, dt = grid.dr, grid.dt
    d2v = a0[2:] - 2.0 * a0[1:-1] + a0[:-2]
    d2vt = b0[2:] - 2.0 * b0[1:-1] + b0[:-2]
    r_int = dr * np.arange(1, grid.M)
    accel = (
        d2v / dr**2
        + params.beta * d2vt / dr**2
        - params.gamma * b0[1:-1]
        - params.m**2 * a0[1:-1]
        - _radial_gprime(params.nonlinearity, a0[1:-1], r_int)
    )
    v1 = np.zeros(grid.M + 1)
    v1[1:-1] = a0[1:-1] + dt * b0[1:-1] + 0.5 * dt**2 * accel
    return RadialField(v1)


def run(
    grid: GridSpec,
    params: PhysicsParams,
    ic: InitialData,
    cfg: NewtonConfig | None = None,
    on_divergence: str = "abort",
) -> Trajectory:
    """March the scheme from sampled initial data to t = T.

    ``on_divergence`` is "abort" (raise :class:`NewtonDivergenceError` at the
    first step that exhausts the Newton budget) or "mark" (record the failure
    in the stats and continue).
    """
    if on_divergence not in ("abort", "mark"):
        raise ValueError("on_divergence must be 'abort' or 'mark'")
    if cfg is None:
        cfg = NewtonConfig()
    report = stability.necessary_condition(grid.dt, grid.dr, params)

    v0, vt0 = sample_initial_levels(grid, ic)
    levels = np.zeros((grid.N + 1, grid.M + 1))
    levels[0] = v0.values
    levels[1] = first_step(v0, vt0, grid, params).values

    iters, resids, conv, failed = kernels.march(
        levels, grid.dr, grid.dt, params.beta, params.gamma, params.m,
        params.nonlinearity, cfg.tol, cfg.max_iter, on_divergence == "abort",
    )
    if failed >= 0:
        raise NewtonDivergenceError(failed, float(resids[failed - 2]))
    stats = tuple(
        StepStats(int(iters[k]), float(resids[k]), bool(conv[k])) for k in range(len(iters))
    )
    return Trajectory(levels=levels, stats=stats, grid=grid, params=params, stability=report)
