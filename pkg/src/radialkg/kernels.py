"""Backend selection for the hot solver kernels.

The compiled extension :mod:`radialkg._core` (Cython) covers the built-in
nonlinearities — zero, odd powers, sinh(5u) - 5u, sin(5u) - 5u — and is used
whenever it imported successfully.  Everything else (and every call while
the ``python`` backend is forced) goes through the numpy fallback
:mod:`radialkg._kernels_py`, which is the reference implementation.

Force a backend with :func:`select` or the ``RADIALKG_BACKEND`` environment
variable (``auto``/``python``/``compiled``).  Custom ``General``
nonlinearities always take the Python path regardless of the selection.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py as _py
from . import model
from .model import Nonlinearity, Power

try:
    from . import _core
except ImportError:  # extension not built; fall back to numpy
    _core = None

__all__ = [
    "select",
    "selected",
    "compiled_available",
    "active_backend",
    "kernel_code",
    "crout_solve",
    "residual",
    "jacobian_main",
    "jacobian_offdiag",
    "newton_step",
    "march",
]

NL_ZERO = 0
NL_POWER = 1
NL_SINH5 = 2
NL_SIN5 = 3

_MODES = ("auto", "python", "compiled")
_mode = os.environ.get("RADIALKG_BACKEND", "auto")
if _mode not in _MODES:
    _mode = "auto"


def select(mode: str) -> None:
    """Pick the kernel backend: 'auto' (default), 'python', or 'compiled'."""
    global _mode
    if mode not in _MODES:
        raise ValueError(f"unknown backend {mode!r}; expected one of {_MODES}")
    if mode == "compiled" and _core is None:
        raise RuntimeError("compiled backend requested but radialkg._core is not built")
    _mode = mode


def selected() -> str:
    return _mode


def compiled_available() -> bool:
    return _core is not None


def kernel_code(nl: Nonlinearity):
    """(kind, p) code for nonlinearities the compiled core understands, else None."""
    if isinstance(nl, Power):
        return (NL_POWER, nl.p)
    if nl is model.ZERO:
        return (NL_ZERO, 0)
    if nl is model.SINH5:
        return (NL_SINH5, 0)
    if nl is model.SIN5:
        return (NL_SIN5, 0)
    return None


def _compiled_for(code) -> bool:
    return _core is not None and _mode != "python" and code is not None


def active_backend(nl: Nonlinearity | None = None) -> str:
    """Name of the backend a call would use ('compiled' or 'python')."""
    code = (NL_ZERO, 0) if nl is None else kernel_code(nl)
    return "compiled" if _compiled_for(code) else "python"


def _c_arr(x):
    return np.ascontiguousarray(x, dtype=float)


def crout_solve(sub, main, sup, rhs):
    if _core is not None and _mode != "python":
        return _core.crout_solve(_c_arr(sub), _c_arr(main), _c_arr(sup), _c_arr(rhs))
    return _py.crout_solve(sub, main, sup, rhs)


def residual(cand, vn, vnm1, dr, dt, beta, gamma, m, nl):
    code = kernel_code(nl)
    if _compiled_for(code):
        return _core.residual(_c_arr(cand), _c_arr(vn), _c_arr(vnm1), dr, dt, beta, gamma, m, *code)
    return _py.residual(cand, vn, vnm1, dr, dt, beta, gamma, m, nl)


def jacobian_main(cand, vnm1, dr, dt, beta, gamma, m, nl):
    code = kernel_code(nl)
    if _compiled_for(code):
        return _core.jacobian_main(_c_arr(cand), _c_arr(vnm1), dr, dt, beta, gamma, m, *code)
    return _py.jacobian_main(cand, vnm1, dr, dt, beta, gamma, m, nl)


def jacobian_offdiag(dr, dt, beta):
    return _py.jacobian_offdiag(dr, dt, beta)


def newton_step(vn, vnm1, dr, dt, beta, gamma, m, nl, tol, max_iter):
    code = kernel_code(nl)
    if _compiled_for(code):
        return _core.newton_step(_c_arr(vn), _c_arr(vnm1), dr, dt, beta, gamma, m, *code, tol, max_iter)
    return _py.newton_step(vn, vnm1, dr, dt, beta, gamma, m, nl, tol, max_iter)


def march(levels, dr, dt, beta, gamma, m, nl, tol, max_iter, abort_on_div):
    code = kernel_code(nl)
    if _compiled_for(code):
        return _core.march(levels, dr, dt, beta, gamma, m, *code, tol, max_iter, abort_on_div)
    return _py.march(levels, dr, dt, beta, gamma, m, nl, tol, max_iter, abort_on_div)
