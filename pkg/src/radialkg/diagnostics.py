"""Discrete energy, dissipation rate, norms, and amplitude monitors.

The discrete energy attached to the staggered level pair (n, n+1) is

    E0^n = dr * [  1/2 * sum_{j<M} ((v_j^{n+1} - v_j^n)/dt)^2
                 + 1/2 * sum_{j<M} ((v_{j+1}^{n+1} - v_j^{n+1})/dr) * ((v_{j+1}^n - v_j^n)/dr)
                 + (m^2/2) * sum_{j<M} ((v_j^{n+1})^2 + (v_j^n)^2)/2
                 + sum_{0<j<M} (G(v_j^{n+1}) + G(v_j^n)) / (2 (j dr)^{p-1}) ],

the general-G variant replacing the last sum by r_j^2 * (G(v/r) + ...)/2.
(The mass factor on the third sum keeps the expression consistent with the
continuous transformed energy density m^2 v^2 / 2.)  Because the stepper
averages the nonlinearity between levels n+1 and n-1, E0^n is exactly
conserved by the scheme when beta = gamma = 0, and otherwise changes at the
rate

    (E0^n - E0^{n-1})/dt =
        - beta * sum_{0<j<M} ct_j * (ct_j - ct_{j-1}) * 2/dr^2 * dr ... (see
          discrete_energy_rate for the exact form)
        - gamma * sum_{0<j<M} ct_j^2 * dr,          ct_j = (v_j^{n+1} - v_j^{n-1})/(2 dt),

up to the Newton solve tolerance.  The continuous energy is 4*pi*E0 — the
factor cancels in every comparison and is never applied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import G_eval, GridSpec, PhysicsParams, Power, RadialField

__all__ = [
    "EnergySeries",
    "discrete_energy",
    "discrete_energy_rate",
    "energy_series",
    "dissipation_series",
    "l2_dx_norm",
    "relative_difference",
    "recover_w",
    "amplitude",
    "amplitude_bound_report",
]


def _values(field) -> np.ndarray:
    if isinstance(field, RadialField):
        return field.values
    return np.asarray(field, dtype=float)


def _nonlinear_density(v: np.ndarray, r_int: np.ndarray, params: PhysicsParams) -> np.ndarray:
    """G-contribution of one level at the interior radii: G(v)/r^{p-1} or r^2 G(v/r)."""
    nl = params.nonlinearity
    if isinstance(nl, Power):
        return G_eval(nl, v) / r_int ** (nl.p - 1)
    return r_int**2 * nl.G(v / r_int)


def discrete_energy(vn, vnp1, grid: GridSpec, params: PhysicsParams) -> float:
    """E0^n for the consecutive level pair (vn, vnp1)."""
    v0 = _values(vn)
    v1 = _values(vnp1)
    dr, dt = grid.dr, grid.dt
    kinetic = 0.5 * np.sum(((v1[:-1] - v0[:-1]) / dt) ** 2)
    gradient = 0.5 * np.sum(((v1[1:] - v1[:-1]) / dr) * ((v0[1:] - v0[:-1]) / dr))
    mass = 0.5 * params.m**2 * np.sum((v1[:-1] ** 2 + v0[:-1] ** 2) / 2.0)
    r_int = dr * np.arange(1, grid.M)
    nonlin = 0.5 * np.sum(
        _nonlinear_density(v1[1:-1], r_int, params) + _nonlinear_density(v0[1:-1], r_int, params)
    )
    return float(dr * (kinetic + gradient + mass + nonlin))


def discrete_energy_rate(vnm1, vn, vnp1, grid: GridSpec, params: PhysicsParams) -> float:
    """Dissipation form of (E0^n - E0^{n-1})/dt from three consecutive levels.

    Identically zero for beta = gamma = 0; strictly negative for gamma > 0,
    beta = 0 and any nonzero motion (a negated sum of squares).
    """
    v0 = _values(vnm1)
    v2 = _values(vnp1)
    dr, dt = grid.dr, grid.dt
    dv = v2 - v0
    ct = dv / (2.0 * dt)
    beta_sum = np.sum(ct[1:-1] * (dv[1:-1] - dv[:-2]) / (dt * dr * dr)) * dr
    gamma_sum = np.sum(ct[1:-1] ** 2) * dr
    return float(-params.beta * beta_sum - params.gamma * gamma_sum)


@dataclass(frozen=True, eq=False)
class EnergySeries:
    """E0^n for n = 0..N-1 and the backward-difference rates (E0^n - E0^{n-1})/dt."""

    values: np.ndarray
    rates: np.ndarray


def energy_series(traj) -> EnergySeries:
    """Energy of every staggered level pair of a trajectory, plus lhs rates."""
    N = traj.grid.N
    vals = np.array(
        [discrete_energy(traj.levels[n], traj.levels[n + 1], traj.grid, traj.params) for n in range(N)]
    )
    rates = (vals[1:] - vals[:-1]) / traj.grid.dt
    return EnergySeries(values=vals, rates=rates)


def dissipation_series(traj) -> np.ndarray:
    """discrete_energy_rate at n = 1..N-1 of a trajectory (rhs of the rate identity)."""
    N = traj.grid.N
    return np.array(
        [
            discrete_energy_rate(traj.levels[n - 1], traj.levels[n], traj.levels[n + 1], traj.grid, traj.params)
            for n in range(1, N)
        ]
    )


def l2_dx_norm(u, dr: float) -> float:
    """Grid-weighted Euclidean norm sqrt(dr * sum u_j^2)."""
    v = _values(u)
    return float(np.sqrt(dr * np.sum(v * v)))


def relative_difference(u_damped, u_ref, dr: float = 1.0) -> float:
    """||u_damped - u_ref|| / ||u_ref|| in the grid-weighted norm.

    The dr weight cancels in the quotient but is applied consistently to
    both norms.  A zero reference norm has no meaningful quotient and
    raises ValueError.
    """
    a = _values(u_damped)
    b = _values(u_ref)
    denom = l2_dx_norm(b, dr)
    if denom == 0.0:
        raise ValueError("relative difference is undefined for a zero reference field")
    return l2_dx_norm(a - b, dr) / denom


def recover_w(v, grid: GridSpec) -> np.ndarray:
    """Original field w = v/r, with the origin value from the one-sided derivative.

    w(0) = dv/dr(0) by L'Hopital (v(0) = 0); the second-order one-sided
    formula (4 v_1 - v_2) / (2 dr) supplies it.
    """
    vv = _values(v)
    r = grid.radii()
    w = np.empty_like(vv)
    w[1:] = vv[1:] / r[1:]
    w[0] = (4.0 * vv[1] - vv[2]) / (2.0 * grid.dr)
    return w


def amplitude(v, grid: GridSpec) -> float:
    """max_j |w_j| of the recovered original field."""
    return float(np.max(np.abs(recover_w(v, grid))))


def amplitude_bound_report(vn, vnp1, grid: GridSpec, params: PhysicsParams) -> np.ndarray:
    """Per-point slack of the amplitude bound |w(r)| <= sqrt(2 E0)/r at level n.

    Returns s_j = sqrt(2 E0^n)/(j dr) - |w_j^n| for j = 1..M (length M).
    The bound is a continuous-level statement, so this is a monitoring
    diagnostic: discretely it should hold with small slack, not exactly.
    """
    e0 = discrete_energy(vn, vnp1, grid, params)
    w = recover_w(vn, grid)
    r = grid.radii()
    return np.sqrt(2.0 * e0) / r[1:] - np.abs(w[1:])
