"""Problem setup for the damped radial Klein-Gordon solver.

The solver targets radially symmetric solutions w(r, t) of

    w_tt - lap(w) - beta * d/dt(lap(w)) + gamma * w_t + m^2 w + G'(w) = 0

on a ball of radius ``a``, with smooth compactly supported initial data
w(r, 0) = phi(r) and w_t(r, 0) = psi(r).  Everything downstream works on the
transformed field v(r, t) = r * w(r, t), which turns the radial Laplacian
into a plain second derivative:

    v_tt - v_rr - beta * v_trr + gamma * v_t + m^2 v + r G'(v/r) = 0,
    v(0, t) = 0.

This module holds the immutable value types (grid, physics parameters,
Newton settings), the nonlinearity catalog, the compactly supported bump
used by the stock initial-data presets, and the sampling of (v, v_t) onto
the grid.  All values are safe to share across threads once constructed;
callables stored in ``General``/``InitialData`` must be pure and accept
numpy arrays as well as floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

__all__ = [
    "GridSpec",
    "Power",
    "General",
    "Nonlinearity",
    "PhysicsParams",
    "InitialData",
    "NewtonConfig",
    "RadialField",
    "ZERO",
    "SINH5",
    "SIN5",
    "PRESET_A",
    "PRESET_B",
    "PRESET_C",
    "DEFAULT_GRID",
    "bump_h",
    "bump_h_prime",
    "G_eval",
    "G_prime",
    "G_second",
    "derivative_defect",
    "sample_initial_levels",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform space-time grid over [0, a] x [0, T] with M x N subintervals."""

    a: float
    T: float
    M: int
    N: int

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError("spatial radius a must be positive and finite")
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError("final time T must be positive and finite")
        if self.M < 3:
            raise ValueError("need M >= 3 spatial subintervals (one interior point with two neighbors)")
        if self.N < 1:
            raise ValueError("need N >= 1 time subintervals")

    @property
    def dr(self) -> float:
        return self.a / self.M

    @property
    def dt(self) -> float:
        return self.T / self.N

    def radii(self) -> np.ndarray:
        """Grid radii r_j = j*dr, j = 0..M."""
        return self.dr * np.arange(self.M + 1)

    def times(self) -> np.ndarray:
        """Grid times t_n = n*dt, n = 0..N."""
        return self.dt * np.arange(self.N + 1)

    @classmethod
    def from_steps(cls, a: float, T: float, dr: float, dt: float) -> "GridSpec":
        """Build a grid from step sizes; dr must divide a and dt divide T."""
        if dr <= 0 or dt <= 0:
            raise ValueError("step sizes must be positive")
        M = round(a / dr)
        N = round(T / dt)
        if M < 1 or abs(M * dr - a) > 1e-9 * a:
            raise ValueError(f"dr = {dr} does not evenly divide a = {a}")
        if N < 1 or abs(N * dt - T) > 1e-9 * T:
            raise ValueError(f"dt = {dt} does not evenly divide T = {T}")
        return cls(a=a, T=T, M=M, N=N)


@dataclass(frozen=True)
class Power:
    """Odd-power nonlinearity G'(w) = w**p, i.e. G(w) = w**(p+1)/(p+1)."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int):
            raise ValueError("power exponent p must be an integer")
        if self.p <= 1 or self.p % 2 == 0:
            raise ValueError("power exponent p must be odd and > 1")


@dataclass(frozen=True)
class General:
    """Caller-supplied nonlinearity as a (G, G', G'') triple with G(0) = 0.

    The callables must be pure, vectorized over numpy arrays, and satisfy
    Gp = dG/dw and Gpp = dGp/dw (see :func:`derivative_defect`).
    """

    G: Callable
    Gp: Callable
    Gpp: Callable
    label: str = "custom"


Nonlinearity = Union[Power, General]


def _g_zero(w):
    return 0.0 * w


def _g_sinh5(w):
    return (np.cosh(5.0 * w) - 1.0) / 5.0 - 2.5 * w * w


def _gp_sinh5(w):
    return np.sinh(5.0 * w) - 5.0 * w


def _gpp_sinh5(w):
    return 5.0 * np.cosh(5.0 * w) - 5.0


def _g_sin5(w):
    return (1.0 - np.cos(5.0 * w)) / 5.0 - 2.5 * w * w


def _gp_sin5(w):
    return np.sin(5.0 * w) - 5.0 * w


def _gpp_sin5(w):
    return 5.0 * np.cos(5.0 * w) - 5.0


#: Linear equation, G' identically zero.
ZERO = General(G=_g_zero, Gp=_g_zero, Gpp=_g_zero, label="zero")

#: G'(w) = sinh(5w) - 5w, normalized so G(0) = 0.
SINH5 = General(G=_g_sinh5, Gp=_gp_sinh5, Gpp=_gpp_sinh5, label="sinh5")

#: G'(w) = sin(5w) - 5w, normalized so G(0) = 0.
SIN5 = General(G=_g_sin5, Gp=_gp_sin5, Gpp=_gpp_sin5, label="sin5")


def G_eval(nl: Nonlinearity, w):
    """G(w); for Power this is w**(p+1)/(p+1)."""
    if isinstance(nl, Power):
        return w ** (nl.p + 1) / (nl.p + 1)
    return nl.G(w)


def G_prime(nl: Nonlinearity, w):
    """G'(w); for Power this is w**p."""
    if isinstance(nl, Power):
        return w ** nl.p
    return nl.Gp(w)


def G_second(nl: Nonlinearity, w):
    """G''(w); for Power this is p*w**(p-1)."""
    if isinstance(nl, Power):
        return nl.p * w ** (nl.p - 1)
    return nl.Gpp(w)


def derivative_defect(nl: Nonlinearity, points, step: float = 1e-6):
    """Max relative defect of (G' vs dG/dw, G'' vs dG'/dw) by centered differences.

    The relative scale is |derivative| + 1, so the probe stays meaningful
    through zeros of G'.
    """
    pts = np.asarray(points, dtype=float)
    fd_gp = (G_eval(nl, pts + step) - G_eval(nl, pts - step)) / (2.0 * step)
    fd_gpp = (G_prime(nl, pts + step) - G_prime(nl, pts - step)) / (2.0 * step)
    d1 = np.max(np.abs(fd_gp - G_prime(nl, pts)) / (np.abs(G_prime(nl, pts)) + 1.0))
    d2 = np.max(np.abs(fd_gpp - G_second(nl, pts)) / (np.abs(G_second(nl, pts)) + 1.0))
    return float(d1), float(d2)


@dataclass(frozen=True)
class PhysicsParams:
    """Damping coefficients, mass, and nonlinear term of the equation."""

    beta: float
    gamma: float
    m: float
    nonlinearity: Nonlinearity

    def __post_init__(self):
        for name in ("beta", "gamma", "m"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.beta < 0:
            raise ValueError("internal damping beta must be >= 0")
        if self.m < 0:
            raise ValueError("mass m must be >= 0")


@dataclass(frozen=True)
class NewtonConfig:
    """Residual sup-norm tolerance and iteration budget for the per-step solve."""

    tol: float = 1e-5
    max_iter: int = 20

    def __post_init__(self):
        if not (self.tol > 0):
            raise ValueError("Newton tolerance must be positive")
        if self.max_iter < 1:
            raise ValueError("Newton iteration budget must be >= 1")


def bump_h(r: float) -> float:
    """Compactly supported bump: 5*exp(100*(1 - 1/(1 - (10r - 1)^2))) on [0, 0.2).

    Vanishes identically for r >= 0.2 and in the limit r -> 0+; peaks at
    h(0.1) = 5.  Values analytically far below machine epsilon are returned
    as exact zeros so the support stays compact in floating point.
    """
    if r < 0:
        raise ValueError("bump_h is defined for r >= 0")
    if r >= 0.2:
        return 0.0
    s = 10.0 * r - 1.0
    den = 1.0 - s * s
    if den <= 0.0:  # r == 0, or rounding put us on the support edge
        return 0.0
    expo = 100.0 * (1.0 - 1.0 / den)
    if expo < -600.0:
        return 0.0
    return 5.0 * math.exp(expo)


def bump_h_prime(r: float) -> float:
    """Analytic derivative of :func:`bump_h`: -2000*s*h(r)/(1 - s^2)^2, s = 10r - 1."""
    if r < 0:
        raise ValueError("bump_h_prime is defined for r >= 0")
    if r >= 0.2:
        return 0.0
    h = bump_h(r)
    if h == 0.0:
        return 0.0
    s = 10.0 * r - 1.0
    den = 1.0 - s * s
    return -2000.0 * s * h / (den * den)


def _phi_zero(r):
    return 0.0 * r


def _psi_outgoing(r):
    # psi = h'(r) + h(r)/r, with the analytic limit 0 at r = 0
    # (h vanishes to all orders there).
    if r == 0.0:
        return 0.0
    return bump_h_prime(r) + bump_h(r) / r


def _psi_kick(r):
    return 100.0 * bump_h(r)


@dataclass(frozen=True)
class InitialData:
    """Initial displacement phi and velocity psi for w; scalar callables of r."""

    phi: Callable
    psi: Callable
    label: str = "custom"


#: phi = h, psi = h' + h/r  (travelling bump).
PRESET_A = InitialData(phi=bump_h, psi=_psi_outgoing, label="presetA")

#: phi = 0, psi = 100*h  (velocity kick).
PRESET_B = InitialData(phi=_phi_zero, psi=_psi_kick, label="presetB")

#: phi = h, psi = 0  (released bump).
PRESET_C = InitialData(phi=bump_h, psi=_phi_zero, label="presetC")


@dataclass(frozen=True, eq=False)
class RadialField:
    """One time level of v-values on the grid; entry j is v(j*dr).

    Both boundary entries are exactly zero: v(0, t) = 0 comes from the
    radial transformation, v(a, t) = 0 from the Dirichlet truncation.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 4:
            raise ValueError("field must be a 1-D vector with at least 4 entries (M >= 3)")
        if v[0] != 0.0 or v[-1] != 0.0:
            raise ValueError("boundary entries of a radial field must be exactly zero")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size


#: The stock experiment grid: dr = dt = 0.002 on [0, 0.4] x [0, 0.2].
DEFAULT_GRID = GridSpec(a=0.4, T=0.2, M=200, N=100)


def sample_initial_levels(grid: GridSpec, ic: InitialData):
    """Sample v(r, 0) = r*phi(r) and v_t(r, 0) = r*psi(r) onto the grid.

    Returns a ``(v0, vt0)`` pair of :class:`RadialField`.  Index 0 is forced
    to exactly zero (the r = 0 boundary), and so is index M (the Dirichlet
    truncation at r = a), even if the supplied data does not quite vanish
    there.
    """
    r = grid.radii()
    v0 = np.empty(grid.M + 1)
    vt0 = np.empty(grid.M + 1)
    for j in range(grid.M + 1):
        v0[j] = r[j] * ic.phi(r[j])
        vt0[j] = r[j] * ic.psi(r[j])
    v0[0] = vt0[0] = 0.0
    v0[-1] = vt0[-1] = 0.0
    return RadialField(v0), RadialField(vt0)
