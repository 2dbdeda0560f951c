"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def horner(coeffs, center, z):
    w = np.asarray(z, dtype=np.complex128) - center
    acc = np.zeros_like(w)
    for c in np.asarray(coeffs, dtype=np.complex128)[::-1]:
        acc = acc * w + c
    return acc


def qp_eval(table, center, theta, z):
    table = np.asarray(table, dtype=np.complex128)
    w = np.asarray(z, dtype=np.complex128) - center
    theta = np.asarray(theta, dtype=np.float64)
    K = (table.shape[0] - 1) // 2
    # modes[k, i] = c_k(z_i)
    modes = np.zeros((table.shape[0], w.size), dtype=np.complex128)
    for j in range(table.shape[1] - 1, -1, -1):
        modes = modes * w[None, :] + table[:, j][:, None]
    ks = np.arange(-K, K + 1)
    phase = np.exp(2j * np.pi * ks[:, None] * theta[None, :])
    return (modes * phase).sum(axis=0)


def flm_orbit(alpha, eps, omega, theta, x, steps, additive):
    th = np.array(theta, dtype=np.float64)
    xx = np.array(x, dtype=np.float64)
    dd = np.ones_like(xx)
    for _ in range(int(steps)):
        force = np.cos(2 * np.pi * th)
        if additive:
            dd = dd * alpha * (1.0 - 2.0 * xx)
            xx = alpha * xx * (1.0 - xx) + eps * force
        else:
            dd = dd * alpha * (1.0 + eps * force) * (1.0 - 2.0 * xx)
            xx = alpha * xx * (1.0 - xx) * (1.0 + eps * force)
        th = th + omega
    return xx, dd
