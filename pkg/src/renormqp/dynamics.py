"""Direct dynamics: orbits, periodic invariant curves, the reducibility indicator
and continuation of the curves where the indicator's minimum (or maximum)
over theta vanishes.

Everything here works from the map itself, never from the renormalization
operators, so it serves as an independent check of the slope formulas.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from . import curves, kernels
from .analytic import PeriodicFn, QPMap, max_theta, min_theta
from .config import RenormConfig
from .errors import NoConvergence, OrbitEscape, PeriodMismatch, RenormError, RootLost
from .families import FLM, NormalizedFamily, superstable_alpha

MAX_PERIOD_EXP = 10


class FLMMap:
    """``y -> alpha y (1 - y) (1 + eps cos 2 pi theta)`` (or ``+ eps cos`` when additive), logistic coordinates."""

    def __init__(self, alpha, eps, additive=False):
        self.alpha = float(alpha)
        self.eps = float(eps)
        self.additive = bool(additive)

    @classmethod
    def from_family(cls, fam: NormalizedFamily, alpha, eps):
        return cls(alpha, eps, fam.forcing == "additive")

    def __call__(self, theta, y):
        return kernels.flm_orbit(self.alpha, self.eps, 0.0, theta, y, 1, self.additive)

    def power(self, omega, period, theta, y):
        return kernels.flm_orbit(self.alpha, self.eps, omega, theta, y, period, self.additive)

    # the critical point, where transients start
    critical = 0.5

    def __repr__(self):
        kind = "additive" if self.additive else "multiplicative"
        return f"FLMMap(alpha={self.alpha}, eps={self.eps}, {kind})"


class QPStep:
    """Adapter giving a ``QPMap`` the ``(theta, x) -> (f, D_x f)`` interface."""

    critical = 0.0

    def __init__(self, f: QPMap):
        self.f = f
        self.df = f.derivative_x()

    def __call__(self, theta, x):
        return self.f.value(theta, x), np.real(self.df(theta, x))


def as_step(f):
    if isinstance(f, QPMap):
        return QPStep(f)
    return f


def iterate_x(f, omega, theta, x, steps):
    """x-component of the orbit of ``(theta, x)`` after ``steps`` steps."""
    xx, _ = curves.power(as_step(f), omega, int(steps), theta, x)
    return xx


def f_pow(f, omega, n):
    """Evaluator ``(theta, x) -> (f^{2^n}(theta, x), D_x f^{2^n}(theta, x))``."""
    step = as_step(f)
    period = 2**n

    def ev(theta, x):
        return curves.power(step, omega, period, theta, x)

    return ev


@dataclass
class InvariantCurve:
    n: int
    omega: float
    x: PeriodicFn
    lyapunov: float
    residual: float
    lyapunov_floor: bool = False
    nodes: np.ndarray | None = None

    @property
    def period(self):
        return 2**self.n


def settled_period(step, omega, x_nodes, tol=1e-6, max_exp=MAX_PERIOD_EXP):
    """Smallest ``p = 2^j`` such that the sampled set is the graph of a ``p``-periodic curve."""
    n = x_nodes.size
    theta = np.arange(n) / n
    X = PeriodicFn.from_samples(x_nodes)
    scale = max(1.0, float(np.abs(x_nodes).max()))
    for j in range(max_exp + 1):
        p = 2**j
        fx, _ = curves.power(step, omega, p, theta, x_nodes)
        if np.abs(fx - X(theta + p * omega)).max() <= tol * scale:
            return p
    return None


def find_invariant_curve(f, omega, n, cfg: RenormConfig = RenormConfig(), seed=None, transient=10_000, fiber_nodes=256) -> InvariantCurve:
    """The attracting ``2^n``-periodic curve.

    Without ``seed`` the curve is seeded by forward iteration of the critical
    point on a fibre grid; the settled period must be ``2^n``. A ``seed``
    (``PeriodicFn`` or node values) skips the transient, for continuation.
    """
    step = as_step(f)
    period = 2**n
    m = cfg.curve_nodes
    th = np.arange(m) / m
    if seed is None:
        raw = curves.forward_seed(step, omega, period, fiber_nodes, getattr(step, "critical", 0.0), transient)
        p = settled_period(step, omega, raw)
        if p != period:
            raise PeriodMismatch(f"attractor settled on period {p}, expected {period}")
        x0 = PeriodicFn.from_samples(raw)(th)
    elif isinstance(seed, PeriodicFn):
        x0 = seed(th)
    else:
        x0 = np.asarray(seed, dtype=float)
        if x0.size != m:
            x0 = PeriodicFn.from_samples(x0)(th)
    xs, _, _ = curves.solve_curve(step, omega, period, x0, tol=cfg.tol_newton, max_iter=cfg.max_newton)
    x = PeriodicFn.from_samples(xs)
    res, lyap = curves.dense_check(step, omega, period, x, cfg.lyapunov_nodes)
    if res > cfg.tol_residual:
        raise NoConvergence(f"curve residual {res:.3g} on the dense grid exceeds {cfg.tol_residual:.3g}")
    # a 2^n curve that is really 2^(n-1) periodic is the wrong object
    if n > 0:
        half = period // 2
        fx, _ = curves.power(step, omega, half, th, xs)
        if np.abs(fx - x(th + half * omega)).max() < 1e-7:
            raise PeriodMismatch(f"curve has period {half}, expected {period}")
    _, d = curves.power(step, omega, period, np.arange(cfg.lyapunov_nodes) / cfg.lyapunov_nodes,
                        x(np.arange(cfg.lyapunov_nodes) / cfg.lyapunov_nodes))
    floor = bool(np.any(np.abs(d) <= 1e-300))
    return InvariantCurve(n, omega, x, lyap, res, floor, xs)


class Indicator(NamedTuple):
    min: float
    max: float
    theta_min: float
    theta_max: float
    degenerate: bool


def indicator_fn(c: InvariantCurve, f, omega) -> PeriodicFn:
    """``theta -> D_x f^{2^n}(theta, x(theta))``."""
    return curves.derivative_along(as_step(f), omega, c.period, c.x, 4 * c.x.coeffs.size)


def reducibility_indicator(c: InvariantCurve, f, omega, cfg: RenormConfig = RenormConfig()) -> Indicator:
    D = indicator_fn(c, f, omega)
    lo = min_theta(D, cfg.tol_degenerate, cfg.tol_residual)
    hi = max_theta(D, cfg.tol_degenerate, cfg.tol_residual)
    return Indicator(lo.value, hi.value, lo.theta, hi.theta, lo.degenerate or hi.degenerate)


# ---------------------------------------------------------------------------
# boundaries


@dataclass
class BoundaryPoint:
    eps: float
    alpha: float
    indicator_min: float
    indicator_max: float
    lyapunov: float


def _indicator_at(fam, n, omega, alpha, eps, cfg, seed):
    f = FLMMap.from_family(fam, alpha, eps)
    c = find_invariant_curve(f, omega, n, cfg, seed=seed)
    return c, reducibility_indicator(c, f, omega, cfg)


def trace_boundary(n, omega, fam: NormalizedFamily = FLM, eps_list=(1e-3, 5e-4, 2.5e-4), which="plus",
                   cfg: RenormConfig = RenormConfig(), alpha_tol=1e-12, max_expand=40):
    """Points ``(eps, alpha)`` where ``min_theta`` (plus) or ``max_theta`` (minus) of the indicator vanishes.

    Each root is bracketed by expanding outwards from the previous one (``alpha_n``
    for the first) and refined with Brent's method; the previous curve seeds
    the next solve.
    """
    if which not in ("plus", "minus"):
        raise ValueError("which must be 'plus' or 'minus'")
    eps_list = [float(e) for e in eps_list]
    if any(e <= 0 for e in eps_list):
        raise ValueError("eps values must be positive")
    alpha_n = superstable_alpha(n)
    # continuation runs from small to large eps
    order = np.argsort(eps_list)
    out = [None] * len(eps_list)
    guess = alpha_n
    seed_curve = None
    for idx in order:
        eps = eps_list[idx]
        state = {"seed": seed_curve}

        def g(alpha):
            try:
                c, ind = _indicator_at(fam, n, omega, alpha, eps, cfg, state["seed"])
            except RenormError:
                c, ind = _indicator_at(fam, n, omega, alpha, eps, cfg, None)
            state["seed"] = c.x
            return ind.min if which == "plus" else ind.max

        try:
            g0 = g(guess)
        except RenormError as exc:
            raise RootLost(f"no 2^{n} curve at alpha={guess}, eps={eps}: {exc}") from exc
        h = max(20 * eps, 1e-8)
        bracket = None
        for _ in range(max_expand):
            for cand in (guess - h, guess + h):
                try:
                    gc = g(cand)
                except RenormError:
                    continue
                if np.sign(gc) != np.sign(g0):
                    bracket = (min(guess, cand), max(guess, cand))
                    break
            if bracket:
                break
            h *= 1.6
        if bracket is None:
            raise RootLost(f"could not bracket the {which} boundary at eps={eps}")
        try:
            alpha = brentq(g, *bracket, xtol=alpha_tol, rtol=4 * np.finfo(float).eps, maxiter=200)
        except (ValueError, RenormError) as exc:
            raise RootLost(f"root search failed at eps={eps}: {exc}") from exc
        c, ind = _indicator_at(fam, n, omega, alpha, eps, cfg, state["seed"])
        out[idx] = BoundaryPoint(eps, float(alpha), ind.min, ind.max, c.lyapunov)
        guess, seed_curve = alpha, c.x
    return out


def extrapolate(points, degree=None):
    """``(alpha(0), d alpha / d eps (0))`` from a polynomial through the traced points.

    With the ratio-two ladder and ``degree = len(points) - 1`` this is
    Richardson extrapolation of the intercept and of the slope.
    """
    eps = np.array([p.eps for p in points])
    alpha = np.array([p.alpha for p in points])
    degree = len(points) - 1 if degree is None else degree
    c = np.polynomial.polynomial.polyfit(eps, alpha, degree)
    return float(c[0]), float(c[1])


def richardson_slope(points):
    return extrapolate(points)[1]


def write_boundary_csv(points, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eps", "alpha", "indicator_min", "indicator_max", "lyapunov"])
        for p in points:
            w.writerow([format(v, ".17g") for v in (p.eps, p.alpha, p.indicator_min, p.indicator_max, p.lyapunov)])


# ---------------------------------------------------------------------------
# membership and scans


@dataclass
class Membership:
    in_plus: bool
    in_minus: bool
    lyapunov: float
    degenerate_extremum: bool
    indicator_min: float = float("nan")
    indicator_max: float = float("nan")
    margin: float = float("nan")  # -K0 - lyapunov; positive when attracting enough


def upsilon_membership(f, omega, n, cfg: RenormConfig = RenormConfig(), tol=None, seed=None) -> Membership:
    """Whether ``f`` has an attracting ``2^n`` curve whose indicator has min (plus) or max (minus) zero."""
    tol = cfg.tol_residual if tol is None else tol
    try:
        c = find_invariant_curve(f, omega, n, cfg, seed=seed)
    except RenormError:
        return Membership(False, False, float("nan"), False)
    ind = reducibility_indicator(c, f, omega, cfg)
    attracting = c.lyapunov < -cfg.k0
    return Membership(
        in_plus=attracting and abs(ind.min) <= tol,
        in_minus=attracting and abs(ind.max) <= tol,
        lyapunov=c.lyapunov,
        degenerate_extremum=ind.degenerate,
        indicator_min=ind.min,
        indicator_max=ind.max,
        margin=-cfg.k0 - c.lyapunov,
    )


CLASSES = ("reducible", "boundary_plus", "boundary_minus", "nonreducible", "no_curve")


@dataclass
class ReducibilityScanPoint:
    alpha: float
    eps: float
    indicator_min: float
    indicator_max: float
    classification: str


def classify(ind_min, ind_max, tol):
    """Sign pattern of the indicator. A map with both extrema zero counts as ``boundary_plus``."""
    if abs(ind_min) <= tol and ind_max >= -tol:
        return "boundary_plus"
    if abs(ind_max) <= tol:
        return "boundary_minus"
    if ind_min > 0 or ind_max < 0:
        return "reducible"
    return "nonreducible"


def scan(n, omega, alphas, epss, fam: NormalizedFamily = FLM, cfg: RenormConfig = RenormConfig(), tol=1e-8):
    out = []
    for eps in epss:
        for alpha in alphas:
            f = FLMMap.from_family(fam, alpha, eps)
            try:
                c = find_invariant_curve(f, omega, n, cfg)
                ind = reducibility_indicator(c, f, omega, cfg)
            except (RenormError, OrbitEscape):
                out.append(ReducibilityScanPoint(alpha, eps, float("nan"), float("nan"), "no_curve"))
                continue
            out.append(ReducibilityScanPoint(alpha, eps, ind.min, ind.max, classify(ind.min, ind.max, tol)))
    return out


def write_scan_csv(points, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha", "eps", "indicator_min", "indicator_max", "classification"])
        for p in points:
            w.writerow([format(p.alpha, ".17g"), format(p.eps, ".17g"),
                        format(p.indicator_min, ".17g"), format(p.indicator_max, ".17g"), p.classification])


# ---------------------------------------------------------------------------
# covariance under renormalization


def covariance_check(g: QPMap, omega, n, cfg: RenormConfig = RenormConfig()):
    """Compare the ``2^n`` curve of ``g`` with the ``2^(n-1)`` curve of ``T_w(g)``.

    Returns ``(curve_residual, indicator_gap)``: the residual of ``x0 / a``
    as a curve of ``T_w(g)`` at rotation ``2w``, and the difference between
    the minima of the two indicators.
    """
    from .qp import hat_a, qp_renorm

    if n < 1:
        raise ValueError("level must be >= 1")
    a = hat_a(g)
    f = qp_renorm(omega, g, cfg, check=False)
    cg = find_invariant_curve(g, omega, n, cfg)
    x1 = cg.x * (1.0 / a)
    res, _ = curves.dense_check(QPStep(f), 2 * omega, 2 ** (n - 1), x1, cfg.lyapunov_nodes)
    cf = find_invariant_curve(f, 2 * omega, n - 1, cfg)
    ig = reducibility_indicator(cg, g, omega, cfg)
    if_ = reducibility_indicator(cf, f, 2 * omega, cfg)
    return res, abs(ig.min - if_.min), abs(ig.max - if_.max)
