"""The Forced Logistic Map in normalized coordinates and the slope formulas.

With ``s = (alpha - 2) / 4`` the affine change ``y = 1/2 + s x`` moves the
logistic critical point to 0 and gives ``psi(0) = 1``:

    F(theta, x) = (f(theta, 1/2 + s x) - 1/2) / s.

At ``eps = 0`` this is ``psi_alpha(x) = 1 - (alpha (alpha - 2) / 4) x^2``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from . import curves
from .analytic import AnalyticMap1D, ModePair, PeriodicFn, QPMap, max_theta, min_theta
from .config import RenormConfig
from .errors import (
    ConfigError,
    DegenerateExtremum,
    DomainError,
    NoConvergence,
    NonAttracting,
    NotOnSigma1,
    NotRenormalizable,
    WindowNotFound,
    ZeroDenominator,
)
from .qp import mode_block
from .renorm1d import check_D_R_delta, d_renorm_1d, even_domain, renorm_1d

VARIANTS = ("multiplicative", "additive")


@dataclass(frozen=True)
class NormalizedFamily:
    forcing: str = "multiplicative"

    def __post_init__(self):
        if self.forcing not in VARIANTS:
            raise ConfigError(f"unknown forcing {self.forcing!r}; expected one of {VARIANTS}")

    @staticmethod
    def scale(alpha):
        if not alpha > 2:
            raise DomainError(f"alpha must exceed 2 for the normalization, got {alpha}")
        return (alpha - 2.0) / 4.0

    def coefficients(self, alpha, eps):
        """``(c0, c1)`` power-series coefficients (about 0) of mode 0 and of the ``cos`` part."""
        s = self.scale(alpha)
        c0 = np.array([1.0, 0.0, -alpha * s])
        if self.forcing == "multiplicative":
            c1 = eps * np.array([alpha / (4 * s), 0.0, -alpha * s])
        else:
            c1 = np.array([eps / s, 0.0, 0.0])
        return c0, c1

    def __call__(self, alpha, eps, domain=None, K=1, n=2) -> QPMap:
        domain = domain or RenormConfig().disc
        c0, c1 = self.coefficients(alpha, eps)
        m0 = AnalyticMap1D.from_power_series(c0, domain).with_degree(n)
        m1 = AnalyticMap1D.from_power_series(c1 / 2, domain).with_degree(n)
        return QPMap.from_modes({0: m0, 1: m1}, domain, K, n)

    def psi(self, alpha, domain=None, n=2) -> AnalyticMap1D:
        domain = domain or RenormConfig().disc
        c0, _ = self.coefficients(alpha, 0.0)
        return AnalyticMap1D.from_power_series(c0, domain).with_degree(n)

    def partial_alpha(self, alpha, domain=None, n=2) -> AnalyticMap1D:
        domain = domain or RenormConfig().disc
        self.scale(alpha)
        return AnalyticMap1D.from_power_series(np.array([0.0, 0.0, -(alpha - 1.0) / 2.0]), domain).with_degree(n)

    def partial_eps(self, alpha, domain=None, n=2) -> ModePair:
        domain = domain or RenormConfig().disc
        _, c1 = self.coefficients(alpha, 1.0)
        u = AnalyticMap1D.from_power_series(c1, domain).with_degree(n)
        return ModePair(u, u * 0.0, 1)

    def raw_step(self, alpha, eps):
        """The logistic-coordinate map ``(theta, y) -> (f, D_y f)``."""
        mult = self.forcing == "multiplicative"

        def step(theta, y):
            force = np.cos(2 * np.pi * theta)
            if mult:
                g = alpha * (1 + eps * force)
                return g * y * (1 - y), g * (1 - 2 * y)
            return alpha * y * (1 - y) + eps * force, alpha * (1 - 2 * y)

        return step

    def to_dict(self):
        return {"family": "flm", "forcing": self.forcing}

    @classmethod
    def from_dict(cls, data):
        if data.get("family", "flm") != "flm":
            raise ConfigError(f"unsupported family {data.get('family')!r}")
        return cls(data.get("forcing", "multiplicative"))


FLM = NormalizedFamily("multiplicative")
FLM_ADDITIVE = NormalizedFamily("additive")


def load_family(path) -> NormalizedFamily:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return NormalizedFamily.from_dict(data)


# ---------------------------------------------------------------------------
# superstable parameters


def _logistic_power(alpha, steps):
    y = 0.5
    for _ in range(steps):
        y = alpha * y * (1.0 - y)
    return y


@lru_cache(maxsize=64)
def superstable_alpha(n: int, xtol=1e-15) -> float:
    """Parameter of the logistic map ``alpha y (1-y)`` whose critical point has period ``2^n``."""
    if n < 0:
        raise ValueError("level must be non-negative")
    if n == 0:
        return 2.0
    if n == 1:
        return 1.0 + np.sqrt(5.0)
    prev, prev2 = superstable_alpha(n - 1, xtol), superstable_alpha(n - 2, xtol)
    period = 2**n
    F = lambda al: _logistic_power(al, period) - 0.5  # noqa: E731
    step = (prev - prev2) / 40.0
    lo = prev + 0.5 * step
    flo = F(lo)
    while True:
        hi = lo + step
        if hi >= 4.0:
            raise WindowNotFound(f"no superstable parameter of period {period} found below 4")
        fhi = F(hi)
        if np.sign(fhi) != np.sign(flo):
            break
        lo, flo = hi, fhi
    root = brentq(F, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    # the orbit of 1/2 must not close up earlier
    if abs(_logistic_power(root, period // 2) - 0.5) < 1e-6:
        raise NoConvergence(f"root at {root} has period below {period}")
    return float(root)


# ---------------------------------------------------------------------------
# renormalization sequences


@dataclass
class RenormSequences:
    alpha: float
    omegas: list
    f: list
    u: list
    v: list


def renorm_sequences(n, omega0, fam: NormalizedFamily = FLM, cfg: RenormConfig = RenormConfig(), alpha=None, v0=None) -> RenormSequences:
    """``f_k = R(f_{k-1})``, ``u_k = DR(f_{k-1}) u_{k-1}``, ``v_k`` = mode-1 block of ``DT`` applied to ``v_{k-1}``."""
    if n < 1:
        raise ValueError("level must be >= 1")
    alpha = superstable_alpha(n) if alpha is None else alpha
    dom = even_domain(cfg)
    f = fam.psi(alpha, dom, cfg.n_x)
    u = fam.partial_alpha(alpha, dom, cfg.n_x)
    v = fam.partial_eps(alpha, dom, cfg.n_x) if v0 is None else v0
    seq = RenormSequences(alpha, [omega0 % 1.0], [f], [u], [v])
    for k in range(1, n):
        rep = check_D_R_delta(f, cfg)
        if not rep.in_D_R_delta:
            raise NotRenormalizable(k, rep.reason)
        om = seq.omegas[-1]
        f, u, v = renorm_1d(f, check=False), d_renorm_1d(f, u), mode_block(f, om, v)
        seq.omegas.append((2.0 * om) % 1.0)
        seq.f.append(f)
        seq.u.append(u)
        seq.v.append(v)
    return seq


# ---------------------------------------------------------------------------
# period-two curve and the multiplier functionals


def _qp_step(g: QPMap):
    dg = g.derivative_x()

    def step(theta, x):
        return g.value(theta, x), np.real(dg(theta, x))

    return step


def invariant_curve_period2(omega, g: QPMap, cfg: RenormConfig = RenormConfig(), seed=None) -> PeriodicFn:
    """The period-two curve ``x(theta + 2w) = g(theta + w, g(theta, x(theta)))`` through the branch of 0."""
    n = cfg.curve_nodes
    step = _qp_step(g)
    x0 = np.zeros(n) if seed is None else np.asarray(seed(np.arange(n) / n) if callable(seed) else seed, dtype=float)
    xs, _, _ = curves.solve_curve(step, omega, 2, x0, tol=cfg.tol_newton)
    x = PeriodicFn.from_samples(xs)
    res, lyap = curves.dense_check(step, omega, 2, x, cfg.lyapunov_nodes)
    if res > cfg.tol_residual:
        raise NoConvergence(f"period-two curve residual {res:.3g} on the dense grid")
    if lyap >= -cfg.k0:
        raise NonAttracting(f"period-two curve has Lyapunov exponent {lyap:.4g} >= -K0")
    return x


def G1(omega, g: QPMap, cfg: RenormConfig = RenormConfig(), curve: PeriodicFn | None = None) -> PeriodicFn:
    """``theta -> D_x g(theta+w, g(theta, x(theta))) D_x g(theta, x(theta))`` along the period-two curve."""
    x = curve if curve is not None else invariant_curve_period2(omega, g, cfg)
    return curves.derivative_along(_qp_step(g), omega, 2, x, max(256, 8 * g.K + 8))


def two_cycle(f: AnalyticMap1D, x0=0.0, tol=1e-14, max_iter=100):
    """A point of period two of ``f`` found by Newton on ``f(f(x)) - x`` from ``x0``."""
    df = f.derivative()
    x = float(x0)
    for _ in range(max_iter):
        y = float(np.real(f(x)))
        F = float(np.real(f(y))) - x
        J = float(np.real(df(y) * df(x))) - 1.0
        if J == 0:
            break
        dx = -F / J
        x += dx
        if abs(dx) <= tol * max(1.0, abs(x)):
            return x
    raise NoConvergence("two-cycle Newton did not converge")


def hatG1(f: AnalyticMap1D, cfg: RenormConfig = RenormConfig()) -> float:
    """Multiplier of the two-cycle of ``f`` through the branch containing 0."""
    x = two_cycle(f)
    df = f.derivative()
    return float(np.real(df(f(x)) * df(x)))


def _eval(h, theta, x):
    if isinstance(h, AnalyticMap1D):
        return np.real(h(x)) * np.ones_like(np.asarray(theta, dtype=float))
    if isinstance(h, ModePair):
        return np.real(h(theta, x))
    return h.value(theta, x)


def _deval(h, theta, x):
    if isinstance(h, AnalyticMap1D):
        return np.real(h.derivative()(x)) * np.ones_like(np.asarray(theta, dtype=float))
    if isinstance(h, ModePair):
        return np.real(ModePair(h.u.derivative(), h.v.derivative(), h.k)(theta, x))
    return np.real(h.derivative_x()(theta, x))


def _modes(h):
    if isinstance(h, AnalyticMap1D):
        return 0
    if isinstance(h, ModePair):
        return h.k
    return h.K


def _check_sigma1(f1, tol=1e-7):
    v = float(np.real(f1(f1(0.0))))
    if abs(v) > tol:
        raise NotOnSigma1(f"f(f(0)) = {v:.3g}; the map does not have the superstable two-cycle")
    if not isinstance(f1, AnalyticMap1D):
        raise NotOnSigma1("expected an uncoupled map")


def numerator_fn(f1: AnalyticMap1D, omega, h) -> PeriodicFn:
    """``f''(0) (f'(1) h(theta-2w, 0) + h(theta-w, 1)) + D_x h(theta, 0)``."""
    d1 = f1.derivative()
    d2 = d1.derivative()
    c2 = float(np.real(d2(0.0)))
    f1p = float(np.real(d1(1.0)))
    m = max(64, 8 * _modes(h) + 8)
    th = np.arange(m) / m
    vals = c2 * (f1p * _eval(h, th - 2 * omega, 0.0) + _eval(h, th - omega, 1.0)) + _deval(h, th, 0.0)
    return PeriodicFn.from_samples(vals)


def denominator(f1: AnalyticMap1D, h: AnalyticMap1D) -> float:
    d1 = f1.derivative()
    c2 = float(np.real(d1.derivative()(0.0)))
    return c2 * (float(np.real(d1(1.0))) * float(np.real(h(0.0))) + float(np.real(h(1.0)))) + float(np.real(h.derivative()(0.0)))


def d_G1_at_Sigma1(f1: AnalyticMap1D, omega, h) -> PeriodicFn:
    """Derivative of ``G1`` at an uncoupled map with the superstable two-cycle ``{0, 1}``."""
    _check_sigma1(f1)
    f1p = float(np.real(f1.derivative()(1.0)))
    return numerator_fn(f1, omega, h) * f1p


def d_hatG1_at_Sigma1(f1: AnalyticMap1D, h: AnalyticMap1D) -> float:
    _check_sigma1(f1)
    return float(np.real(f1.derivative()(1.0))) * denominator(f1, h)


# ---------------------------------------------------------------------------
# slopes


@dataclass
class SlopeResult:
    n: int
    alpha_n: float
    slope_plus: float
    slope_minus: float
    theta_star_plus: float
    theta_star_minus: float
    degenerate: bool
    numerator_min: float = float("nan")
    numerator_max: float = float("nan")
    denominator: float = float("nan")
    extra: dict = field(default_factory=dict)

    def row(self):
        return [self.n, self.alpha_n, self.slope_plus, self.slope_minus,
                self.theta_star_plus, self.theta_star_minus, int(self.degenerate)]


def slopes(n, omega0, fam: NormalizedFamily = FLM, cfg: RenormConfig = RenormConfig(), v0=None) -> SlopeResult:
    """Derivatives ``d alpha_n^{+-} / d eps`` at ``eps = 0``.

    ``alpha_n^+`` is where the minimum over theta of the fibre derivative along
    the curve vanishes. With ``DG1 v = f'(1) N`` and ``f'(1) < 0`` the minimum
    of ``DG1 v`` sits at the maximum of ``N``, so

        slope_plus = -max N / D,     slope_minus = -min N / D.
    """
    seq = renorm_sequences(n, omega0, fam, cfg, v0=v0)
    f, u, v, om = seq.f[-1], seq.u[-1], seq.v[-1], seq.omegas[-1]
    _check_sigma1(f)
    N = numerator_fn(f, om, v)
    D = denominator(f, u)
    if abs(D) < cfg.tol_degenerate:
        raise ZeroDenominator(f"transversality fails: denominator {D:.3g}")
    lo = min_theta(N, cfg.tol_degenerate, cfg.tol_residual)
    hi = max_theta(N, cfg.tol_degenerate, cfg.tol_residual)
    flat = float(np.abs(N.coeffs[N.ks != 0]).max(initial=0.0)) <= cfg.tol_residual * max(1.0, abs(N.mean()))
    if (lo.degenerate or hi.degenerate) and not flat:
        raise DegenerateExtremum(f"extremum of the numerator is not unique or not non-degenerate at level {n}")
    return SlopeResult(
        n=n,
        alpha_n=seq.alpha,
        slope_plus=-hi.value / D + 0.0,  # no negative zero in the output
        slope_minus=-lo.value / D + 0.0,
        theta_star_plus=hi.theta,
        theta_star_minus=lo.theta,
        degenerate=bool(lo.degenerate or hi.degenerate),
        numerator_min=lo.value,
        numerator_max=hi.value,
        denominator=D,
        extra={"omega": om, "f_prime_1": float(np.real(f.derivative()(1.0)))},
    )


def slopes_theorem_form(n, omega0, fam: NormalizedFamily = FLM, cfg: RenormConfig = RenormConfig(), v0=None):
    """``(-m(DG1 v) / DG1hat u, -M(DG1 v) / DG1hat u)`` from the derivative functionals directly."""
    seq = renorm_sequences(n, omega0, fam, cfg, v0=v0)
    f, u, v, om = seq.f[-1], seq.u[-1], seq.v[-1], seq.omegas[-1]
    dg = d_G1_at_Sigma1(f, om, v)
    dh = d_hatG1_at_Sigma1(f, u)
    lo = min_theta(dg, cfg.tol_degenerate, cfg.tol_residual)
    hi = max_theta(dg, cfg.tol_degenerate, cfg.tol_residual)
    return -lo.value / dh, -hi.value / dh


SLOPE_COLUMNS = ["n", "alpha_n", "slope_plus", "slope_minus", "theta_star_plus", "theta_star_minus", "degenerate"]


def write_slopes_csv(results, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SLOPE_COLUMNS)
        for r in results:
            w.writerow([x if isinstance(x, int) else format(x, ".17g") for x in r.row()])
