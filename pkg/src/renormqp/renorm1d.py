"""One-dimensional doubling renormalization ``R(psi)(x) = psi(psi(a x)) / a``, ``a = psi(1)``.

The operator works on any ``AnalyticMap1D``. The fixed-point solver and the
spectrum use even maps expanded about 0 on a disc of radius
``cfg.even_radius`` and solve only for the coefficients of ``x^2, x^4, ...``;
the normalization ``psi(0) = 1`` is eliminated rather than imposed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .analytic import AnalyticMap1D, _check_image, circle_nodes, from_dict, refit, to_dict
from .config import DiscDomain, RenormConfig
from .errors import DomainError, MissingArtifact, NoConvergence

FEIGENBAUM_GUESS = (1.0, 0.0, -1.5276330, 0.0, 0.1048152)


@dataclass(frozen=True)
class UnimodalCheckReport:
    psi0: float
    monotone_ok: bool
    range_ok: bool
    a: float
    a_prime: float
    b_prime: float
    in_M_delta: bool
    in_D_R_delta: bool
    reason: str = ""


@dataclass(frozen=True)
class FixedPointResult:
    phi: AnalyticMap1D
    residual: float
    a: float
    iterations: int


def even_domain(cfg: RenormConfig) -> DiscDomain:
    return DiscDomain(0.0, cfg.even_radius)


def quadratic(c2=-1.4, domain=None, degree=2) -> AnalyticMap1D:
    """``1 + c2 x^2`` on ``domain`` (default: the disc W)."""
    domain = domain or DiscDomain()
    f = AnalyticMap1D.from_power_series(np.array([1.0, 0.0, c2]), domain)
    return f.with_degree(max(degree, 2))


def _real_grid(cfg, n=512):
    lo, hi = cfg.interval
    x = np.linspace(lo, hi, n + 1)
    return x[x != 0.0]


def check_M_delta(psi: AnalyticMap1D, cfg: RenormConfig = RenormConfig()) -> UnimodalCheckReport:
    lo, hi = cfg.interval
    tol = cfg.tol_residual
    psi0 = float(np.real(psi(0.0)))
    x = _real_grid(cfg)
    dpsi = psi.derivative()
    monotone_ok = bool(np.all(x * np.real(dpsi(x)) < 0))
    vals = np.real(psi(x))
    range_ok = bool(vals.min() >= lo - tol and vals.max() <= hi + tol)
    reasons = []
    if abs(psi0 - 1.0) > tol:
        reasons.append(f"psi(0) = {psi0:.12g} != 1")
    if not monotone_ok:
        reasons.append("x psi'(x) < 0 fails")
    if not range_ok:
        reasons.append("psi(I) not inside I")
    in_m = not reasons
    a = float(np.real(psi(1.0)))
    ap = (1 + cfg.delta) * a
    bp = float(np.real(psi(ap))) if psi.domain.contains(ap) else float("nan")
    return UnimodalCheckReport(psi0, monotone_ok, range_ok, a, ap, bp, in_m, False, "; ".join(reasons))


def check_D_R_delta(psi: AnalyticMap1D, cfg: RenormConfig = RenormConfig()) -> UnimodalCheckReport:
    rep = check_M_delta(psi, cfg)
    tol = cfg.tol_residual
    reasons = [rep.reason] if rep.reason else []
    a, ap, bp = rep.a, rep.a_prime, rep.b_prime
    if not a < -tol:
        reasons.append(f"a = psi(1) = {a:.6g} is not negative")
    elif not (1 - tol > bp > -ap + tol):
        reasons.append(f"b' = {bp:.6g} outside (-a', 1)")
    elif not float(np.real(psi(bp))) < -ap - tol:
        reasons.append("psi(b') >= -a'")
    ok = rep.in_M_delta and not reasons
    return UnimodalCheckReport(rep.psi0, rep.monotone_ok, rep.range_ok, a, ap, bp, rep.in_M_delta, ok, "; ".join(reasons))


def _nodes(psi, m_nodes=None):
    n = psi.degree
    m = m_nodes or 4 * n + 16
    return circle_nodes(psi.domain, m)


def renorm_1d(psi: AnalyticMap1D, cfg: RenormConfig | None = None, check=True) -> AnalyticMap1D:
    """``(1/a) psi(psi(a x))`` refitted to ``psi.degree``."""
    if check:
        rep = check_D_R_delta(psi, cfg or RenormConfig())
        if not rep.in_D_R_delta:
            raise DomainError(f"map not in the renormalization domain: {rep.reason}")
    a = float(np.real(psi(1.0)))
    if a == 0.0:
        raise DomainError("a = psi(1) vanishes")
    z, _ = _nodes(psi)
    inner = psi.raw(a * z)
    _check_image(inner, psi.domain)
    vals = psi.raw(inner) / a
    co = refit(vals, psi.domain, psi.degree)
    return AnalyticMap1D(psi.domain, np.real(co) if psi.is_real else co)


def d_renorm_1d(psi: AnalyticMap1D, h: AnalyticMap1D, cfg: RenormConfig | None = None) -> AnalyticMap1D:
    """Derivative of ``renorm_1d`` at ``psi`` in direction ``h``."""
    if h.domain != psi.domain:
        raise ValueError("psi and h must share a disc")
    n = max(psi.degree, h.degree)
    a = float(np.real(psi(1.0)))
    b = float(np.real(h(1.0)))
    if a == 0.0:
        raise DomainError("a = psi(1) vanishes")
    m = 4 * n + 16
    z, _ = circle_nodes(psi.domain, m)
    dpsi = psi.derivative()
    w = a * z
    p = psi.raw(w)
    _check_image(p, psi.domain)
    dp = dpsi.raw(p)
    vals = (dp * h.raw(w) + h.raw(p) + b * dp * dpsi.raw(w) * z) / a - b * psi.raw(p) / a**2
    co = refit(vals, psi.domain, n)
    real = psi.is_real and h.is_real
    return AnalyticMap1D(psi.domain, np.real(co) if real else co)


# ---------------------------------------------------------------------------
# even fixed point


def _even_map(c, domain):
    """``1 + sum_j c_j x^{2j}``."""
    full = np.zeros(2 * len(c) + 1)
    full[0] = 1.0
    full[2::2] = c
    return AnalyticMap1D(domain, full)


def _jacobian(psi, nu, scaled=False):
    """Matrix of ``h -> even part of DR(psi) h`` on ``x^{2j}``, j = 1..nu."""
    r = psi.domain.radius
    J = np.empty((nu, nu))
    for j in range(1, nu + 1):
        e = np.zeros(2 * nu + 1)
        e[2 * j] = 1.0 / r ** (2 * j) if scaled else 1.0
        col = d_renorm_1d(psi, AnalyticMap1D(psi.domain, e)).coeffs
        col = np.real(col[2: 2 * nu + 1: 2])
        if scaled:
            col = col * r ** (2 * np.arange(1, nu + 1))
        J[:, j - 1] = col
    return J


def sup_residual(psi: AnalyticMap1D, other: AnalyticMap1D, m=512):
    """Max of ``|psi - other|`` on the sampling circle (bounds the interior by the maximum principle)."""
    z, _ = circle_nodes(psi.domain, m)
    return float(np.abs(psi.raw(z) - other.raw(z)).max())


def solve_fixed_point(initial: AnalyticMap1D | None = None, cfg: RenormConfig = RenormConfig()) -> FixedPointResult:
    """Newton iteration for the even fixed point of ``renorm_1d``."""
    dom = even_domain(cfg)
    nu = cfg.n_x // 2
    if initial is None:
        initial = quadratic(-1.4, dom)
    if initial.domain != dom:
        initial = AnalyticMap1D.from_power_series(initial.to_power_series(), dom)
    c0 = np.real(initial.coeffs)
    if abs(c0[0] - 1.0) > cfg.tol_residual:
        raise DomainError(f"initial map has psi(0) = {c0[0]:.6g}, expected 1")
    if np.any(np.abs(c0[1::2]) > cfg.tol_residual):
        raise DomainError("initial map is not even")
    c = np.zeros(nu)
    ev = c0[2::2][:nu]
    c[: ev.size] = ev

    def residual_of(c):
        psi = _even_map(c, dom)
        rep = check_D_R_delta(psi, cfg)
        if not rep.in_D_R_delta:
            raise DomainError(f"Newton iterate left the renormalization domain: {rep.reason}")
        rpsi = renorm_1d(psi, check=False)
        return psi, rpsi, sup_residual(psi, rpsi)

    psi, rpsi, res = residual_of(c)
    for it in range(cfg.max_newton + 1):
        if res <= cfg.tol_newton:
            return FixedPointResult(psi, res, float(psi(1.0)), it)
        if it == cfg.max_newton:
            break
        # solve in the scaled basis (x/r)^{2j}; the monomials overflow the guard
        scale = dom.radius ** (2 * np.arange(1, nu + 1))
        F = (np.real(rpsi.coeffs[2: 2 * nu + 1: 2]) - c) * scale
        J = _jacobian(psi, nu, scaled=True) - np.eye(nu)
        step = np.linalg.solve(J, -F) / scale
        lam = 1.0
        while True:
            try:
                trial = residual_of(c + lam * step)
            except DomainError:
                trial = None
            if trial is not None and (trial[2] < res or lam < 2 ** -10):
                break
            lam *= 0.5
            if lam < 2 ** -20:
                raise NoConvergence("damped Newton step failed to reduce the residual")
        c = c + lam * step
        psi, rpsi, res = trial
        if np.abs(lam * step).max() < 1e-16 and res < 1e3 * cfg.tol_newton:
            return FixedPointResult(psi, res, float(psi(1.0)), it + 1)
    raise NoConvergence(f"no fixed point after {cfg.max_newton} Newton steps (residual {res:.3g})")


@lru_cache(maxsize=8)
def feigenbaum(cfg: RenormConfig = RenormConfig()) -> FixedPointResult:
    """Cached fixed point for ``cfg``, started from the coarse Feigenbaum polynomial."""
    guess = AnalyticMap1D.from_power_series(np.array(FEIGENBAUM_GUESS), even_domain(cfg))
    return solve_fixed_point(guess, cfg)


def dr_matrix(phi: AnalyticMap1D, cfg: RenormConfig = RenormConfig()):
    """Matrix of ``DR(phi)`` on the even basis ``(x/r)^{2j}``, j = 1..n_x/2."""
    nu = min(cfg.n_x, phi.degree) // 2
    return _jacobian(phi, nu, scaled=True)


def dr_spectrum(phi: AnalyticMap1D, cfg: RenormConfig = RenormConfig()):
    """Eigenvalues of ``DR(phi)``, sorted by modulus (descending)."""
    ev = np.linalg.eigvals(dr_matrix(phi, cfg))
    return ev[np.argsort(-np.abs(ev), kind="stable")]


# ---------------------------------------------------------------------------
# artifact


def save_fixed_point(result: FixedPointResult, cfg: RenormConfig, path):
    data = {
        "phi": to_dict(result.phi),
        "a": result.a,
        "residual": result.residual,
        "iterations": result.iterations,
        "n_x": cfg.n_x,
        "delta": cfg.delta,
    }
    Path(path).write_text(json.dumps(data, indent=1) + "\n")


def load_fixed_point(path) -> FixedPointResult:
    p = Path(path)
    if not p.exists():
        raise MissingArtifact(f"{p} not found; run the fixed-point command first")
    try:
        data = json.loads(p.read_text())
        return FixedPointResult(from_dict(data["phi"]), data["residual"], data["a"], data["iterations"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise MissingArtifact(f"{p} is not a usable fixed point ({exc!r}); rerun the fixed-point command") from exc
