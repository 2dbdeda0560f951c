"""Quasi-periodic renormalization ``T_w(g)(theta, x) = g(theta + w, g(theta, a x)) / a``.

``a = int_0^1 g(theta, 1) d theta`` is a scalar. On a Fourier mode
``u(x) cos(2 pi k theta) + v(x) sin(2 pi k theta)`` the derivative at an
uncoupled map ``psi`` acts through

    L1 g = psi'(psi(a z)) g(a z) / a,      L2 g = g(psi(a z)) / a,

combined into ``L_w(u, v) = (L1 u, L1 v) + Rot(2 pi w) (L2 u, L2 v)``.
Note the sign: the action of the derivative on mode ``k`` is ``L_{-k w}``
(see ``mode_block``), which is conjugate to ``L_{k w}`` under ``v -> -v``.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment

from .analytic import (
    AnalyticMap1D,
    ModePair,
    QPMap,
    _check_image,
    circle_nodes,
    p0,
    refit,
    table_from_samples,
)
from .config import DiscDomain, RenormConfig
from .errors import DomainError, NotInX
from .renorm1d import feigenbaum

__all__ = [
    "ModePair", "SpectrumSweep", "H0Report", "hat_a", "qp_renorm", "renorm_pair",
    "d_qp_renorm", "L1", "L2", "L_omega", "mode_block", "R_gamma", "check_h0",
    "check_X", "block_matrices", "l_omega_matrix", "l_omega_spectrum", "spectrum_sweep",
    "pairing_defect", "on_disc", "phi_on_W",
]


def on_disc(psi: AnalyticMap1D, domain: DiscDomain, n=None) -> AnalyticMap1D:
    """Re-expand a polynomial about ``domain.center`` (exact binomial shift)."""
    if psi.domain == domain and (n is None or n == psi.degree):
        return psi
    f = AnalyticMap1D.from_power_series(psi.to_power_series(), domain)
    n = max(psi.degree, n or 0)
    return f.with_degree(n)


@lru_cache(maxsize=8)
def phi_on_W(cfg: RenormConfig = RenormConfig()) -> AnalyticMap1D:
    """The fixed point of the 1-D operator, expanded on the disc ``cfg.disc``."""
    return on_disc(feigenbaum(cfg).phi, cfg.disc, cfg.n_x)


def hat_a(g) -> float:
    if isinstance(g, AnalyticMap1D):
        return float(np.real(g(1.0)))
    return float(np.real(p0(g)(1.0)))


def _tensor(g: QPMap, cfg, n=None):
    n = g.degree if n is None else n
    m = max(cfg.m_nodes, 4 * n + 16) if cfg is not None else 4 * n + 16
    nt = 4 * g.K + 4
    z, _ = circle_nodes(g.domain, m)
    theta = np.arange(nt) / nt
    return theta[:, None], z[None, :], n


def check_X(f: QPMap, cfg: RenormConfig = RenormConfig(), n_theta=32, n_x=257):
    """Sampled membership test: ``f(theta, I) inside I`` and ``x D_x f < 0`` off 0.

    Returns ``(ok, reason)``. The normalization ``f(theta, 0) = 1`` is not
    required, since coupled iterates of ``T_w`` do not keep it.
    """
    lo, hi = cfg.interval
    th = (np.arange(n_theta) / n_theta)[:, None]
    x = np.linspace(lo, hi, n_x)
    x = x[x != 0][None, :]
    vals = f.value(th, x)
    if vals.min() < lo - cfg.tol_residual or vals.max() > hi + cfg.tol_residual:
        return False, "f(theta, I) is not inside I"
    dv = np.real(f.derivative_x()(th, x))
    if not np.all(x * dv < 0):
        return False, "x D_x f(theta, x) < 0 fails"
    return True, ""


def qp_renorm(omega: float, g: QPMap, cfg: RenormConfig = RenormConfig(), check=True) -> QPMap:
    a = hat_a(g)
    if not -1.0 < a < 0.0:
        raise DomainError(f"a = {a:.6g} is outside (-1, 0)")
    theta, z, n = _tensor(g, cfg)
    inner = g(theta, a * z)
    _check_image(inner, g.domain)
    vals = g(theta + omega, inner) / a
    out = QPMap(g.domain, table_from_samples(vals, g.domain, g.K, n), g.rho)
    if check:
        ok, why = check_X(out, cfg)
        if not ok:
            raise NotInX(why)
    return out


def renorm_pair(omega: float, g: QPMap, cfg: RenormConfig = RenormConfig(), check=True):
    return (2.0 * omega) % 1.0, qp_renorm(omega, g, cfg, check)


def d_qp_renorm(omega: float, psi: QPMap, h: QPMap, cfg: RenormConfig | None = None) -> QPMap:
    """Derivative of ``T_w`` at ``psi`` in direction ``h``."""
    if h.domain != psi.domain:
        raise ValueError("psi and h must share a disc")
    K = max(psi.K, h.K)
    n = max(psi.degree, h.degree)
    psi_, h_ = psi.reshaped(K, psi.degree), h.reshaped(K, h.degree)
    a = hat_a(psi_)
    b = hat_a(h_)
    if not -1.0 < a < 0.0:
        raise DomainError(f"a = {a:.6g} is outside (-1, 0)")
    theta, z, n = _tensor(psi_.reshaped(K, n), cfg, n)
    dpsi = psi_.derivative_x()
    w = a * z
    inner = psi_(theta, w)
    _check_image(inner, psi.domain)
    d_outer = dpsi(theta + omega, inner)
    vals = (
        h_(theta + omega, inner)
        + d_outer * h_(theta, w)
        + b * d_outer * dpsi(theta, w) * z
    ) / a - b * psi_(theta + omega, inner) / a**2
    return QPMap(psi.domain, table_from_samples(vals, psi.domain, K, n), psi.rho)


# ---------------------------------------------------------------------------
# Fourier-block operators


def _inner(psi: AnalyticMap1D, m):
    a = hat_a(psi)
    z, _ = circle_nodes(psi.domain, m)
    w = a * z
    _check_image(w, psi.domain, "a W")
    p = psi.raw(w)
    _check_image(p, psi.domain, "psi(a W)")
    return a, z, w, p


def _out(co, real):
    return np.real(co) if real else co


def L1(psi: AnalyticMap1D, g: AnalyticMap1D, n=None) -> AnalyticMap1D:
    n = g.degree if n is None else n
    a, z, w, p = _inner(psi, 4 * max(n, psi.degree) + 16)
    vals = psi.derivative().raw(p) * g.raw(w) / a
    return AnalyticMap1D(g.domain, _out(refit(vals, g.domain, n), g.is_real and psi.is_real))


def L2(psi: AnalyticMap1D, g: AnalyticMap1D, n=None) -> AnalyticMap1D:
    n = g.degree if n is None else n
    a, z, w, p = _inner(psi, 4 * max(n, psi.degree) + 16)
    vals = g.raw(p) / a
    return AnalyticMap1D(g.domain, _out(refit(vals, g.domain, n), g.is_real and psi.is_real))


def _rot(gamma, x, y):
    c, s = np.cos(2 * np.pi * gamma), np.sin(2 * np.pi * gamma)
    return c * x - s * y, s * x + c * y


def R_gamma(gamma: float, p: ModePair) -> ModePair:
    u, v = _rot(gamma, p.u, p.v)
    return ModePair(u, v, p.k)


def L_omega(psi: AnalyticMap1D, omega: float, p: ModePair) -> ModePair:
    n = max(p.u.degree, p.v.degree)
    u, v = p.u.with_degree(n), p.v.with_degree(n)
    ru, rv = _rot(omega, L2(psi, u), L2(psi, v))
    return ModePair(L1(psi, u) + ru, L1(psi, v) + rv, p.k)


def mode_block(psi: AnalyticMap1D, omega: float, p: ModePair) -> ModePair:
    """Action of ``DT_w(psi)`` on the mode-``k`` pair ``p``: ``L_{-k w}``."""
    return L_omega(psi, -p.k * omega, p)


# ---------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class H0Report:
    ok: bool
    ratio_aW: float
    ratio_psi_aW: float


def check_h0(psi: AnalyticMap1D, m=512) -> H0Report:
    """Sampled check that ``a W`` and ``psi(a W)`` lie inside ``W`` (ratios < 1)."""
    dom = psi.domain
    a = hat_a(psi)
    bd = dom.center + dom.radius * np.exp(2j * np.pi * np.arange(m) / m)
    r1 = float(np.abs(a * bd - dom.center).max() / dom.radius)
    r2 = float(np.abs(psi.raw(a * bd) - dom.center).max() / dom.radius) if r1 < 1 else float("inf")
    return H0Report(r1 < 1 and r2 < 1, r1, r2)


def _key(psi):
    return (psi.coeffs.tobytes(), psi.domain)


_BLOCK_CACHE: dict = {}


def block_matrices(psi: AnalyticMap1D, n=None):
    """Matrices of ``L1``, ``L2`` on the scaled basis ``((z - c)/R)^k``, k = 0..n."""
    n = psi.degree if n is None else n
    key = (_key(psi), n)
    hit = _BLOCK_CACHE.get(key)
    if hit is not None:
        return hit
    rep = check_h0(psi)
    if not rep.ok:
        raise DomainError(
            f"H0 fails on the disc: max|aW - c|/R = {rep.ratio_aW:.4g}, "
            f"max|psi(aW) - c|/R = {rep.ratio_psi_aW:.4g}"
        )
    dom = psi.domain
    m = 4 * max(n, psi.degree) + 16
    a, z, w, p = _inner(psi, m)
    dp = psi.derivative().raw(p)
    R = dom.radius
    scale = R ** np.arange(n + 1)
    ew = (w - dom.center) / R
    ep = (p - dom.center) / R
    k = np.arange(n + 1)[:, None]
    # rows of basis samples, refit each to Taylor, then move to the scaled basis
    m1 = refit(dp[None, :] * ew[None, :] ** k / a, dom, n) * scale
    m2 = refit(ep[None, :] ** k / a, dom, n) * scale
    A1, A2 = np.real(m1).T.copy(), np.real(m2).T.copy()
    if len(_BLOCK_CACHE) > 16:
        _BLOCK_CACHE.clear()
    _BLOCK_CACHE[key] = (A1, A2)
    return A1, A2


def l_omega_matrix(psi: AnalyticMap1D, omega: float, n=None):
    A1, A2 = block_matrices(psi, n)
    c, s = np.cos(2 * np.pi * omega), np.sin(2 * np.pi * omega)
    return np.block([[A1 + c * A2, -s * A2], [s * A2, A1 + c * A2]])


def _sorted(ev):
    return ev[np.lexsort((-ev.imag, -np.round(np.abs(ev), 12)))]


def l_omega_spectrum(psi: AnalyticMap1D, omega: float, cfg: RenormConfig | None = None):
    """Eigenvalues of ``L_w`` on ``B + B``, sorted by modulus (descending)."""
    n = cfg.n_x if cfg is not None else psi.degree
    return _sorted(np.linalg.eigvals(l_omega_matrix(psi, omega, n)))


def pairing_defect(ev, floor=1e-6):
    """How far the spectrum is from the structure forced by the rotation symmetry.

    Every eigenvalue must come with its conjugate and real eigenvalues must
    repeat. Eigenvalues are greedily paired with the nearest conjugate of
    another eigenvalue; returns the largest pairing distance relative to
    the spectral radius, ignoring eigenvalues below ``floor`` times it.
    """
    ev = np.asarray(ev)
    scale = np.abs(ev).max(initial=0.0)
    if scale == 0:
        return 0.0
    ev = ev[np.abs(ev) > floor * scale]
    if ev.size % 2:
        # a cut through a pair at the floor; drop the smallest
        ev = ev[np.argsort(-np.abs(ev))][:-1]
    cost = np.abs(ev[:, None] - np.conj(ev)[None, :])
    np.fill_diagonal(cost, np.inf)
    cost = np.where(np.isfinite(cost), cost, 1e300)
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max() / scale) if ev.size else 0.0


@dataclass
class SpectrumSweep:
    omega_grid: np.ndarray
    eigenvalues: np.ndarray  # (n_omega, top), sorted by modulus at each omega
    tracked: np.ndarray = field(default=None)  # same values, matched along omega
    crossings: list = field(default_factory=list)

    def leading_jump(self):
        lead = self.eigenvalues[:, 0]
        return float(np.abs(np.diff(np.abs(lead))).max()) if lead.size > 1 else 0.0

    def tracked_jump(self):
        t = self.tracked if self.tracked is not None else self.eigenvalues
        return float(np.abs(np.diff(t, axis=0)).max()) if t.shape[0] > 1 else 0.0

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["omega", "j", "re_lambda", "im_lambda"])
            for om, row in zip(self.omega_grid, self.eigenvalues):
                for j, lam in enumerate(row, 1):
                    w.writerow([format(om, ".17g"), j, format(lam.real, ".17g"), format(lam.imag, ".17g")])

    def to_json(self):
        return json.dumps({
            "omega": [float(x) for x in self.omega_grid],
            "eigenvalues": [[[float(l.real), float(l.imag)] for l in row] for row in self.eigenvalues],
        })


def _track(rows):
    """Match eigenvalues between neighbouring omegas by minimal total distance."""
    out = [rows[0]]
    for row in rows[1:]:
        prev = out[-1]
        cost = np.abs(prev[:, None] - row[None, :])
        _, col = linear_sum_assignment(cost)
        out.append(row[col])
    return np.array(out)


def spectrum_sweep(psi: AnalyticMap1D, grid, cfg: RenormConfig | None = None, top=12, jobs=1) -> SpectrumSweep:
    if top < 1:
        raise ValueError("top must be positive")
    grid = np.asarray(grid, dtype=float)
    n = cfg.n_x if cfg is not None else psi.degree
    block_matrices(psi, n)  # build once, before the workers start

    def one(om):
        return l_omega_spectrum(psi, om, cfg)[:top]

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(one, grid))
    else:
        rows = [one(om) for om in grid]
    ev = np.array(rows)
    tracked = _track(ev) if len(ev) else ev
    crossings = []
    for i in range(1, len(ev)):
        # the modulus order changed between neighbours: a crossing (flagged, not resolved)
        if not np.allclose(np.abs(tracked[i]), np.abs(ev[i]), rtol=0, atol=1e-9 * max(1.0, np.abs(ev[i, 0]))):
            crossings.append(i)
    return SpectrumSweep(grid, ev, tracked, crossings)
