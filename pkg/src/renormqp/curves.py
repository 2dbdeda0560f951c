"""Periodic invariant curves of skew products ``(theta, x) -> (theta + w, f(theta, x))``.

A curve of period ``P`` satisfies ``x(theta + P w) = f^P(theta, x(theta))``.
It is solved by Newton's method on its values at equispaced nodes; the shift
``theta -> theta + P w`` acts on node values through Fourier interpolation.
"""

import numpy as np

from .analytic import PeriodicFn
from .errors import NoConvergence, OrbitEscape

LOG_FLOOR = np.log(1e-300)


def shift_matrix(n, s):
    """Real ``n x n`` matrix mapping node values of a trigonometric interpolant to values at ``theta_j + s``."""
    k = np.fft.fftfreq(n, 1.0 / n)
    F = np.fft.fft(np.eye(n), axis=0)
    return np.real(np.fft.ifft(np.exp(2j * np.pi * k * s)[:, None] * F, axis=0))


def power(step, omega, period, theta, x):
    """``f^P`` and its x-derivative by the chain rule. ``step(theta, x) -> (f, D_x f)``.

    A ``step`` object with its own ``power(omega, period, theta, x)`` method
    (a fused kernel) is used directly.
    """
    if hasattr(step, "power"):
        xx, d = step.power(omega, period, theta, x)
        if not np.all(np.isfinite(xx)):
            raise OrbitEscape("orbit diverged")
        return xx, d
    th = np.asarray(theta, dtype=float)
    xx = np.asarray(x, dtype=float)
    d = np.ones(np.broadcast(th, xx).shape)
    for _ in range(period):
        xx, di = step(th, xx)
        d = d * di
        th = th + omega
    if not np.all(np.isfinite(xx)):
        raise OrbitEscape("orbit diverged")
    return xx, d


def solve_curve(step, omega, period, x0, tol=1e-13, max_iter=50):
    """Newton collocation; ``x0`` are initial values at ``theta_j = j / len(x0)``."""
    x = np.array(x0, dtype=float)
    n = x.size
    theta = np.arange(n) / n
    S = shift_matrix(n, period * omega)
    res_norm = np.inf
    for it in range(max_iter):
        fx, d = power(step, omega, period, theta, x)
        F = fx - S @ x
        res_norm = np.abs(F).max()
        J = np.diag(d) - S
        try:
            dx = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular collocation Jacobian: {exc}") from exc
        lam = 1.0
        while lam > 1e-4:
            xt = x + lam * dx
            try:
                ft, _ = power(step, omega, period, theta, xt)
                if np.abs(ft - S @ xt).max() <= max(res_norm, 1e-300) or np.abs(dx).max() < 1e-10:
                    break
            except (OrbitEscape, ArithmeticError):
                pass
            lam *= 0.5
        x = x + lam * dx
        if np.abs(lam * dx).max() <= tol * max(1.0, np.abs(x).max()) and res_norm < 1e-8:
            fx, _ = power(step, omega, period, theta, x)
            return x, it + 1, float(np.abs(fx - S @ x).max())
    raise NoConvergence(f"invariant curve Newton did not converge (residual {res_norm:.3g})")


def dense_check(step, omega, period, x: PeriodicFn, m=4096):
    """``(residual, lyapunov)`` of a curve on ``m`` equispaced angles."""
    th = np.arange(m) / m
    xv = x(th)
    fx, d = power(step, omega, period, th, xv)
    res = float(np.abs(fx - x(th + period * omega)).max())
    logs = np.log(np.maximum(np.abs(d), 1e-300))
    return res, float(logs.mean())


def derivative_along(step, omega, period, x: PeriodicFn, m=None):
    """``theta -> D_x f^P(theta, x(theta))`` as a trigonometric interpolant on ``m`` nodes."""
    m = m or max(256, 4 * x.coeffs.size)
    th = np.arange(m) / m
    _, d = power(step, omega, period, th, x(th))
    return PeriodicFn.from_samples(d)


def forward_seed(step, omega, period, nodes, x_start=0.0, transient=10_000):
    """Iterate from ``x_start`` so that each orbit lands on angle ``theta_j`` after a multiple of ``period`` steps."""
    steps = (transient // period + 1) * period
    theta = np.arange(nodes) / nodes - steps * omega
    x = np.full(nodes, float(x_start))
    if hasattr(step, "power"):
        x, _ = power(step, omega, steps, theta, x)
        return x
    for _ in range(steps):
        x, _ = step(theta, x)
        theta = theta + omega
        if not np.all(np.isfinite(x)):
            raise OrbitEscape("forward iteration diverged")
    return x
