"""Tridiagonal linear solves by Crout reduction.

Every Newton iteration of the implicit stepper solves one system

    [ main[0]  sup[0]                        ] [x0]   [b0]
    [ sub[0]   main[1]  sup[1]               ] [x1]   [b1]
    [          sub[1]   main[2]  .           ] [..] = [..]
    [                   .        .   sup[n-2]] [..]   [..]
    [                       sub[n-2] main[n-1]] [xn-1] [bn-1]

The factorization is plain Crout LU without pivoting: the scheme Jacobian is
strictly diagonally dominant for the damping ranges this package targets
(diagonal ~ 1/dt^2 + beta/(dt*dr^2) against off-diagonals beta/(2*dt*dr^2)),
and genuinely singular systems are reported through
:class:`~radialkg.errors.SingularSystemError`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from ._kernels_py import PIVOT_FLOOR
from .errors import SingularSystemError

__all__ = ["TridiagonalSystem", "crout_solve", "PIVOT_FLOOR", "SingularSystemError"]


@dataclass(frozen=True, eq=False)
class TridiagonalSystem:
    """Sub-, main and super-diagonal of an n x n tridiagonal matrix."""

    sub: np.ndarray
    main: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        sub = np.asarray(self.sub, dtype=float)
        main = np.asarray(self.main, dtype=float)
        sup = np.asarray(self.sup, dtype=float)
        n = main.size
        if n < 1 or main.ndim != 1:
            raise ValueError("main diagonal must be a vector of length >= 1")
        if sub.shape != (max(n - 1, 0),) or sup.shape != (max(n - 1, 0),):
            raise ValueError("sub/super diagonals must have length n - 1")
        object.__setattr__(self, "sub", sub)
        object.__setattr__(self, "main", main)
        object.__setattr__(self, "sup", sup)

    @property
    def n(self) -> int:
        return self.main.size

    def dense(self) -> np.ndarray:
        """Dense matrix copy (for oracles and small checks)."""
        A = np.diag(self.main)
        if self.n > 1:
            A += np.diag(self.sub, -1) + np.diag(self.sup, 1)
        return A


def crout_solve(system: TridiagonalSystem, rhs) -> np.ndarray:
    """Solve system * x = rhs; raises SingularSystemError on a near-zero pivot."""
    b = np.asarray(rhs, dtype=float)
    if b.shape != (system.n,):
        raise ValueError(f"rhs must have length {system.n}")
    return kernels.crout_solve(system.sub, system.main, system.sup, b)
