"""von Neumann stability analysis of the linearized scheme (G' = 0).

Writing R = dt/dr and freezing a Fourier mode exp(i*xi*j), one step of the
scheme acts on the two-level state (v^{n+1}, v^n) through the amplification
matrix

    A(xi) = [ 2*q/khat   -hhat/khat ]        q = 1 - 2 R^2 sin^2(xi/2),
            [ 1           0         ]

with symbols

    khat(xi) = 1 + gamma*dt/2 + 2*beta*dt*sin^2(xi/2)/dr^2 + m^2*dt^2/2,
    hhat(xi) = 1 - gamma*dt/2 - 2*beta*dt*sin^2(xi/2)/dr^2 + m^2*dt^2/2.

Its eigenvalues solve lambda^2 - (2*q/khat)*lambda + hhat/khat = 0, i.e.

    lambda_pm = (q +- sqrt(q^2 - hhat*khat)) / khat

(note the squared q under the radical, as the characteristic polynomial
demands).  Requiring the worst mode xi = pi not to blow up yields the
necessary condition

    (dt/dr)^2 < 1 + gamma*dt/4 + beta*dt/dr^2 + m^2*dt^2/4,

equivalently 1 - 2 R^2 > -khat(pi).  This is necessary, not sufficient; the
report is an advisory that runs print but do not enforce.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .model import PhysicsParams

__all__ = [
    "StabilityReport",
    "SymbolPair",
    "necessary_condition",
    "symbols",
    "amplification_eigenvalues",
    "spectral_radius_scan",
]


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of the necessary stability condition for one grid/parameter set."""

    R: float
    lhs: float
    rhs: float
    satisfied: bool
    margin: float


@dataclass(frozen=True)
class SymbolPair:
    """khat(xi), hhat(xi) — the symbol values entering the amplification matrix."""

    khat: float
    hhat: float


def necessary_condition(dt: float, dr: float, params: PhysicsParams) -> StabilityReport:
    """Evaluate (dt/dr)^2 < 1 + gamma*dt/4 + beta*dt/dr^2 + m^2*dt^2/4."""
    if dt <= 0 or dr <= 0:
        raise ValueError("step sizes must be positive")
    R = dt / dr
    lhs = R * R
    rhs = 1.0 + params.gamma * dt / 4.0 + params.beta * dt / (dr * dr) + params.m**2 * dt * dt / 4.0
    margin = rhs - lhs
    return StabilityReport(R=R, lhs=lhs, rhs=rhs, satisfied=margin > 0.0, margin=margin)


def symbols(xi: float, dt: float, dr: float, params: PhysicsParams) -> SymbolPair:
    """khat and hhat at Fourier angle xi."""
    s2 = np.sin(xi / 2.0) ** 2
    half_mass = params.m**2 * dt * dt / 2.0
    spread = 2.0 * params.beta * dt * s2 / (dr * dr)
    khat = 1.0 + params.gamma * dt / 2.0 + spread + half_mass
    hhat = 1.0 - params.gamma * dt / 2.0 - spread + half_mass
    return SymbolPair(khat=float(khat), hhat=float(hhat))


def amplification_eigenvalues(xi: float, dt: float, dr: float, params: PhysicsParams):
    """Both eigenvalues of A(xi) as complex numbers."""
    pair = symbols(xi, dt, dr, params)
    if pair.khat == 0.0:
        raise ValueError("degenerate symbol: khat(xi) = 0")
    R = dt / dr
    q = 1.0 - 2.0 * R * R * np.sin(xi / 2.0) ** 2
    root = cmath.sqrt(q * q - pair.hhat * pair.khat)
    return (q + root) / pair.khat, (q - root) / pair.khat


def spectral_radius_scan(dt: float, dr: float, params: PhysicsParams, n_xi: int = 1024) -> float:
    """max |lambda_pm(xi)| over n_xi uniform angles xi in [0, pi].

    The symbol is smooth and pi-periodic in sin^2(xi/2), so the default
    resolution is ample.
    """
    if n_xi < 2:
        raise ValueError("need at least the xi = 0 and xi = pi sample points")
    xi = np.linspace(0.0, np.pi, n_xi)
    s2 = np.sin(xi / 2.0) ** 2
    R = dt / dr
    half_mass = params.m**2 * dt * dt / 2.0
    spread = 2.0 * params.beta * dt * s2 / (dr * dr)
    khat = 1.0 + params.gamma * dt / 2.0 + spread + half_mass
    hhat = 1.0 - params.gamma * dt / 2.0 - spread + half_mass
    if np.any(khat == 0.0):
        raise ValueError("degenerate symbol: khat(xi) = 0")
    q = 1.0 - 2.0 * R * R * s2
    root = np.sqrt((q * q - hhat * khat).astype(complex))
    lam_abs = np.maximum(np.abs((q + root) / khat), np.abs((q - root) / khat))
    return float(lam_abs.max())
