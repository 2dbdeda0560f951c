"""Kernel dispatch.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy fallback is used. Set ``RENORMQP_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("RENORMQP_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"


def get_backend(name=None):
    """Return the kernel module for ``name`` ("cython", "python") or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def horner(coeffs, center, z):
    z = np.ascontiguousarray(np.atleast_1d(z), dtype=np.complex128)
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    return _impl.horner(c, float(center), z.ravel()).reshape(z.shape)


def qp_eval(table, center, theta, z):
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    z, theta = np.broadcast_arrays(z, theta)
    shape = z.shape
    out = _impl.qp_eval(
        np.ascontiguousarray(table, dtype=np.complex128),
        float(center),
        np.ascontiguousarray(theta.ravel()),
        np.ascontiguousarray(z.ravel()),
    )
    return out.reshape(shape)


def flm_orbit(alpha, eps, omega, theta, x, steps, additive=False):
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    x, theta = np.broadcast_arrays(x, theta)
    shape = x.shape
    xo, do = _impl.flm_orbit(
        float(alpha), float(eps), float(omega),
        np.ascontiguousarray(theta.ravel()), np.ascontiguousarray(x.ravel()),
        int(steps), bool(additive),
    )
    return xo.reshape(shape), do.reshape(shape)
