"""Truncated representations of real-analytic functions.

``AnalyticMap1D``
    Taylor polynomial about the centre of a disc ``W``.
``PeriodicFn``
    Trigonometric polynomial on the circle ``T = R/Z``.
``QPMap``
    ``f(theta, z) = sum_k c_k(z) exp(2 pi i k theta)`` with each ``c_k`` a
    Taylor polynomial on ``W``; stored as a ``(2K+1, N+1)`` complex table.

Nonlinear operations (composition, rescaling) are done by sampling on a circle
of radius ``0.9 * W.radius`` and recovering Taylor coefficients with an FFT.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .config import DiscDomain
from .errors import (
    DegenerateMinimum,
    DomainEscape,
    IllConditioned,
    ImageEscape,
    ModeOutOfRange,
)

SAMPLE_FRACTION = 0.9
OVERFLOW_GUARD = 1e12
_SLACK = 1e-12


def _frozen(a, dtype=None):
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


def circle_nodes(domain: DiscDomain, m: int):
    """Return ``(z, r)``: ``m`` equispaced points on the sampling circle and its radius."""
    r = SAMPLE_FRACTION * domain.radius
    return domain.center + r * np.exp(2j * np.pi * np.arange(m) / m), r


def refit(values, domain: DiscDomain, n: int):
    """Taylor coefficients (degree <= n) from samples on the sampling circle."""
    values = np.asarray(values)
    m = values.shape[-1]
    if m < n + 1:
        raise ValueError(f"need at least {n + 1} samples, got {m}")
    r = SAMPLE_FRACTION * domain.radius
    co = np.fft.fft(values, axis=-1) / m
    co = co[..., : n + 1] / r ** np.arange(n + 1)
    bound = np.abs(co) * domain.radius ** np.arange(n + 1)
    if not np.all(np.isfinite(bound)) or bound.max(initial=0.0) > OVERFLOW_GUARD:
        raise IllConditioned("recovered Taylor coefficients exceed the overflow guard")
    return co


def _check_image(w, domain: DiscDomain, what="composition"):
    d = np.abs(np.asarray(w) - domain.center)
    if d.max(initial=0.0) > domain.radius * (1 + _SLACK):
        raise ImageEscape(
            f"{what} leaves the disc |z-{domain.center}|<={domain.radius} "
            f"(max distance {d.max():.6g})"
        )


def _default_nodes(n):
    return 4 * n + 16


# ---------------------------------------------------------------------------
# one-dimensional maps


@dataclass(frozen=True, eq=False)
class AnalyticMap1D:
    domain: DiscDomain
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a non-empty 1-D sequence")
        if np.iscomplexobj(c):
            c = c.astype(np.complex128)
        else:
            c = c.astype(np.float64)
        object.__setattr__(self, "coeffs", _frozen(c))

    @property
    def degree(self):
        return self.coeffs.size - 1

    @property
    def is_real(self):
        return not np.iscomplexobj(self.coeffs) or not np.any(self.coeffs.imag)

    # construction ---------------------------------------------------------

    @classmethod
    def constant(cls, value, domain=DiscDomain(), degree=0):
        c = np.zeros(degree + 1, dtype=np.result_type(value, float))
        c[0] = value
        return cls(domain, c)

    @classmethod
    def from_power_series(cls, coeffs0, domain=DiscDomain()):
        """Re-expand ``sum_k a_k x^k`` (about 0) about ``domain.center``, exactly."""
        a = np.asarray(coeffs0)
        p = np.polynomial.Polynomial(a)
        shifted = p(np.polynomial.Polynomial([domain.center, 1.0]))
        c = np.zeros(a.size, dtype=a.dtype if np.iscomplexobj(a) else float)
        c[: shifted.coef.size] = shifted.coef[: a.size]
        return cls(domain, c)

    @classmethod
    def fit(cls, fn, domain=DiscDomain(), n=20, m_nodes=None):
        """Sample ``fn`` on the sampling circle of ``domain`` and refit to degree ``n``."""
        m = m_nodes or _default_nodes(n)
        z, _ = circle_nodes(domain, m)
        vals = np.asarray(fn(z), dtype=np.complex128)
        co = refit(vals, domain, n)
        return cls(domain, _realify(co))

    # evaluation -----------------------------------------------------------

    def __call__(self, z):
        return eval_1d(self, z)

    def raw(self, z):
        """Horner evaluation without the domain check."""
        out = kernels.horner(self.coeffs, self.domain.center, z)
        if np.isscalar(z) or np.ndim(z) == 0:
            out = out.reshape(())[()]
        return out

    def real_at(self, x):
        return np.real(self(x))

    # algebra --------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, AnalyticMap1D):
            if other.domain != self.domain:
                raise ValueError("maps live on different discs")
            n = max(self.coeffs.size, other.coeffs.size)
            return _pad(self.coeffs, n), _pad(other.coeffs, n)
        return None

    def __add__(self, other):
        if np.isscalar(other):
            c = self.coeffs.astype(np.result_type(self.coeffs, other)).copy()
            c[0] += other
            return AnalyticMap1D(self.domain, c)
        a, b = self._coerce(other)
        return AnalyticMap1D(self.domain, a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return AnalyticMap1D(self.domain, -self.coeffs)

    def __mul__(self, s):
        if not np.isscalar(s):
            return NotImplemented
        return AnalyticMap1D(self.domain, self.coeffs * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1.0 / s)

    def derivative(self):
        return derivative_1d(self)

    def with_degree(self, n):
        return AnalyticMap1D(self.domain, _pad(self.coeffs, n + 1))

    @property
    def real(self):
        return AnalyticMap1D(self.domain, np.real(self.coeffs))

    @property
    def imag(self):
        return AnalyticMap1D(self.domain, np.imag(self.coeffs))

    def sup_norm(self):
        """Upper bound ``sum |c_k| r^k`` of the supremum on the disc."""
        return float(np.sum(np.abs(self.coeffs) * self.domain.radius ** np.arange(self.coeffs.size)))

    def tail(self, count=4):
        """Largest scaled magnitude among the last ``count`` coefficients."""
        k = np.arange(self.coeffs.size)
        scaled = np.abs(self.coeffs) * self.domain.radius ** k
        return float(scaled[-count:].max())

    def recenter(self, domain: DiscDomain, n=None, m_nodes=None):
        """Re-expand on another disc by sampling this polynomial."""
        n = self.degree if n is None else n
        return AnalyticMap1D.fit(self.raw, domain, n, m_nodes)

    def to_power_series(self):
        """Coefficients about 0 (exact binomial shift)."""
        p = np.polynomial.Polynomial(self.coeffs)
        q = p(np.polynomial.Polynomial([-self.domain.center, 1.0]))
        return _pad(q.coef, self.coeffs.size)

    def __repr__(self):
        return f"AnalyticMap1D(center={self.domain.center}, radius={self.domain.radius}, degree={self.degree})"


def _pad(c, n):
    c = np.asarray(c)
    if c.size >= n:
        return c[:n].copy()
    out = np.zeros(n, dtype=c.dtype)
    out[: c.size] = c
    return out


def _realify(co, tol=1e-13):
    """Drop an imaginary part that is round-off relative to the real part."""
    scale = max(np.abs(co).max(initial=0.0), 1e-300)
    if np.abs(co.imag).max(initial=0.0) <= tol * scale:
        return co.real.copy()
    return co


def eval_1d(f: AnalyticMap1D, z):
    zz = np.asarray(z)
    if np.any(np.abs(zz - f.domain.center) > f.domain.radius * (1 + _SLACK)):
        raise DomainEscape(f"evaluation point outside disc of radius {f.domain.radius} about {f.domain.center}")
    out = f.raw(z)
    if f.is_real and not np.iscomplexobj(zz):
        out = np.real(out)
    return out


def compose_1d(f: AnalyticMap1D, g: AnalyticMap1D, n=None, m_nodes=None) -> AnalyticMap1D:
    """Taylor coefficients of ``f o g`` on ``g``'s disc."""
    if n is None:
        n = min(max(f.degree * max(g.degree, 1), f.degree, g.degree), 80)
    m = m_nodes or _default_nodes(n)
    z, _ = circle_nodes(g.domain, m)
    inner = g.raw(z)
    _check_image(inner, f.domain)
    co = refit(f.raw(inner), g.domain, n)
    return AnalyticMap1D(g.domain, _realify(co))


def scale_arg(f: AnalyticMap1D, a: float, n=None, m_nodes=None) -> AnalyticMap1D:
    """``x -> f(a x)`` on the same disc."""
    n = f.degree if n is None else n
    m = m_nodes or _default_nodes(n)
    z, _ = circle_nodes(f.domain, m)
    _check_image(a * z, f.domain, "rescaled argument")
    co = refit(f.raw(a * z), f.domain, n)
    return AnalyticMap1D(f.domain, _realify(co))


def derivative_1d(f: AnalyticMap1D) -> AnalyticMap1D:
    if f.degree == 0:
        return AnalyticMap1D(f.domain, np.zeros(1, dtype=f.coeffs.dtype))
    k = np.arange(1, f.coeffs.size)
    return AnalyticMap1D(f.domain, f.coeffs[1:] * k)


# ---------------------------------------------------------------------------
# periodic functions


@dataclass(frozen=True, eq=False)
class PeriodicFn:
    """Real trigonometric polynomial, coefficients ``c_{-K} .. c_K``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValueError("PeriodicFn needs an odd number of coefficients")
        c = 0.5 * (c + np.conj(c[::-1]))
        object.__setattr__(self, "coeffs", _frozen(c))

    @property
    def K(self):
        return (self.coeffs.size - 1) // 2

    @property
    def ks(self):
        return np.arange(-self.K, self.K + 1)

    @classmethod
    def constant(cls, value, K=0):
        c = np.zeros(2 * K + 1, dtype=np.complex128)
        c[K] = value
        return cls(c)

    @classmethod
    def from_samples(cls, values):
        """Interpolant of samples on the grid ``theta_j = j/n``."""
        v = np.asarray(values, dtype=float)
        n = v.size
        F = np.fft.fft(v) / n
        K = n // 2
        c = np.zeros(2 * K + 1, dtype=np.complex128)
        pos = np.arange(0, (n + 1) // 2)
        c[K + pos] = F[pos]
        c[K - pos[1:]] = F[-pos[1:]]
        if n % 2 == 0:
            # split the Nyquist term evenly
            c[0] = 0.5 * F[K]
            c[-1] = 0.5 * F[K]
        return cls(c)

    @classmethod
    def from_function(cls, fn, n=256):
        theta = np.arange(n) / n
        return cls.from_samples(fn(theta))

    @classmethod
    def trig(cls, a=(), b=(), c0=0.0):
        """``c0 + sum_k a_k cos(2 pi k th) + b_k sin(2 pi k th)`` (k from 1)."""
        K = max(len(a), len(b), 0)
        c = np.zeros(2 * K + 1, dtype=np.complex128)
        c[K] = c0
        for k in range(1, K + 1):
            ak = a[k - 1] if k - 1 < len(a) else 0.0
            bk = b[k - 1] if k - 1 < len(b) else 0.0
            c[K + k] = (ak - 1j * bk) / 2
            c[K - k] = (ak + 1j * bk) / 2
        return cls(c)

    def __call__(self, theta):
        th = np.asarray(theta, dtype=float)
        ph = np.exp(2j * np.pi * np.multiply.outer(th, self.ks))
        return np.real(ph @ self.coeffs)

    def sample(self, n):
        return self(np.arange(n) / n)

    def derivative(self, order=1):
        return PeriodicFn(self.coeffs * (2j * np.pi * self.ks) ** order)

    def shift(self, s):
        """``theta -> self(theta + s)``."""
        return PeriodicFn(self.coeffs * np.exp(2j * np.pi * self.ks * s))

    def padded(self, K):
        if K == self.K:
            return self
        if K > self.K:
            c = np.zeros(2 * K + 1, dtype=np.complex128)
            c[K - self.K: K + self.K + 1] = self.coeffs
            return PeriodicFn(c)
        return PeriodicFn(self.coeffs[self.K - K: self.K + K + 1])

    def __add__(self, other):
        if np.isscalar(other):
            c = self.coeffs.copy()
            c[self.K] += other
            return PeriodicFn(c)
        K = max(self.K, other.K)
        return PeriodicFn(self.padded(K).coeffs + other.padded(K).coeffs)

    __radd__ = __add__

    def __neg__(self):
        return PeriodicFn(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        if not np.isscalar(s):
            return NotImplemented
        return PeriodicFn(self.coeffs * s)

    __rmul__ = __mul__

    def mean(self):
        return float(self.coeffs[self.K].real)

    def sup_norm(self):
        return float(np.abs(self.coeffs).sum())

    def __repr__(self):
        return f"PeriodicFn(K={self.K})"


class Extremum(NamedTuple):
    theta: float
    value: float
    degenerate: bool


def _extremum(g: PeriodicFn, sign, tol_degenerate, tol_residual, grid):
    h = g if sign > 0 else -g
    n = max(grid, 8 * (2 * h.K + 1))
    theta = np.arange(n) / n
    vals = h(theta)
    d1, d2 = h.derivative(), h.derivative(2)

    def polish(t0):
        t = t0
        for _ in range(30):
            s2 = d2(t)
            if s2 <= 0:
                break
            step = d1(t) / s2
            if abs(step) > 1.0 / n:
                step = np.sign(step) / n
            t -= step
            if abs(step) < 1e-15:
                break
        t %= 1.0
        # never accept a polish that made things worse than the grid point
        if h(t) > h(t0):
            t = t0 % 1.0
        return float(t)

    i0 = int(np.argmin(vals))
    t0 = polish(theta[i0])
    v0 = float(h(t0))
    degenerate = bool(d2(t0) < tol_degenerate)
    # competing local minima on the grid
    left, right = np.roll(vals, 1), np.roll(vals, -1)
    local = np.nonzero((vals <= left) & (vals <= right))[0]
    for i in local:
        if min(abs(i - i0), n - abs(i - i0)) <= 2:
            continue
        if vals[i] - vals[i0] > 10 * tol_residual + 1e-3 * (vals.max() - vals.min()):
            continue
        t1 = polish(theta[i])
        dist = min(abs(t1 - t0), 1 - abs(t1 - t0))
        if dist > 2.0 / n and abs(float(h(t1)) - v0) <= tol_residual:
            degenerate = True
    value = v0 if sign > 0 else -v0
    return Extremum(t0, value, degenerate)


def min_theta(g: PeriodicFn, tol_degenerate=1e-8, tol_residual=1e-10, grid=1024) -> Extremum:
    """Global minimum on T: grid scan, Newton polish on ``g' = 0``, degeneracy flag."""
    return _extremum(g, +1, tol_degenerate, tol_residual, grid)


def max_theta(g: PeriodicFn, tol_degenerate=1e-8, tol_residual=1e-10, grid=1024) -> Extremum:
    return _extremum(g, -1, tol_degenerate, tol_residual, grid)


def dmin(g0: PeriodicFn, g1: PeriodicFn, **kw) -> float:
    """Derivative of the minimum operator at ``g0`` in direction ``g1``: ``g1(theta_0)``."""
    ext = min_theta(g0, **kw)
    if ext.degenerate:
        raise DegenerateMinimum("minimum is not unique or not non-degenerate")
    return float(g1(ext.theta))


def dmax(g0: PeriodicFn, g1: PeriodicFn, **kw) -> float:
    ext = max_theta(g0, **kw)
    if ext.degenerate:
        raise DegenerateMinimum("maximum is not unique or not non-degenerate")
    return float(g1(ext.theta))


# ---------------------------------------------------------------------------
# quasi-periodic maps


@dataclass(frozen=True, eq=False)
class ModePair:
    """``u(x) cos(2 pi k theta) + v(x) sin(2 pi k theta)``."""

    u: AnalyticMap1D
    v: AnalyticMap1D
    k: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("mode index must be positive")
        if self.u.domain != self.v.domain:
            raise ValueError("u and v must share a disc")

    @property
    def domain(self):
        return self.u.domain

    def __call__(self, theta, x):
        ph = 2 * np.pi * self.k * np.asarray(theta)
        return self.u(x) * np.cos(ph) + self.v(x) * np.sin(ph)

    def __add__(self, other):
        return ModePair(self.u + other.u, self.v + other.v, self.k)

    def __sub__(self, other):
        return ModePair(self.u - other.u, self.v - other.v, self.k)

    def __mul__(self, s):
        return ModePair(self.u * s, self.v * s, self.k)

    __rmul__ = __mul__

    def coeffs(self, n):
        """Stacked coefficient vector ``[u_0..u_n, v_0..v_n]``."""
        return np.concatenate([_pad(np.real(self.u.coeffs), n + 1), _pad(np.real(self.v.coeffs), n + 1)])

    @classmethod
    def from_coeffs(cls, vec, domain, k=1):
        vec = np.asarray(vec)
        n1 = vec.size // 2
        return cls(AnalyticMap1D(domain, vec[:n1]), AnalyticMap1D(domain, vec[n1:]), k)

    def norm(self):
        return self.u.sup_norm() + self.v.sup_norm()


@dataclass(frozen=True, eq=False)
class QPMap:
    domain: DiscDomain
    table: np.ndarray
    rho: float = 0.1

    def __post_init__(self):
        t = np.atleast_2d(np.asarray(self.table, dtype=np.complex128))
        if t.shape[0] % 2 == 0:
            raise ValueError("mode table needs 2K+1 rows")
        # enforce c_{-k} = conj(c_k) for real coefficients of the Taylor basis
        t = 0.5 * (t + np.conj(t[::-1]))
        object.__setattr__(self, "table", _frozen(t))

    @property
    def K(self):
        return (self.table.shape[0] - 1) // 2

    @property
    def degree(self):
        return self.table.shape[1] - 1

    # construction ---------------------------------------------------------

    @classmethod
    def uncoupled(cls, psi: AnalyticMap1D, K=1, rho=0.1):
        t = np.zeros((2 * K + 1, psi.coeffs.size), dtype=np.complex128)
        t[K] = psi.coeffs
        return cls(psi.domain, t, rho)

    @classmethod
    def from_modes(cls, modes: dict, domain, K, n, rho=0.1):
        """``modes`` maps ``k >= 0`` to the complex coefficient map ``c_k``."""
        t = np.zeros((2 * K + 1, n + 1), dtype=np.complex128)
        for k, ck in modes.items():
            c = _pad(np.asarray(ck.coeffs, dtype=np.complex128), n + 1)
            t[K + k] = c
            if k:
                t[K - k] = np.conj(c)
        return cls(domain, t, rho)

    @classmethod
    def from_mode_pair(cls, p: ModePair, K=None, n=None, base: AnalyticMap1D | None = None):
        K = p.k if K is None else K
        if p.k > K:
            raise ModeOutOfRange(f"mode {p.k} does not fit in K={K}")
        n = max(p.u.degree, p.v.degree) if n is None else n
        ck = AnalyticMap1D(p.domain, 0.5 * (_pad(p.u.coeffs, n + 1) - 1j * _pad(p.v.coeffs, n + 1)))
        modes = {p.k: ck}
        if base is not None:
            modes[0] = base
        return cls.from_modes(modes, p.domain, K, n)

    @classmethod
    def fit(cls, fn, domain, K, n, n_theta=None, m_nodes=None, rho=0.1):
        """Sample ``fn(theta, z)`` on a tensor grid and refit."""
        nt = n_theta or 4 * K + 4
        m = m_nodes or _default_nodes(n)
        z, _ = circle_nodes(domain, m)
        theta = np.arange(nt) / nt
        vals = fn(theta[:, None], z[None, :])
        return cls(domain, table_from_samples(vals, domain, K, n), rho)

    # evaluation -----------------------------------------------------------

    def __call__(self, theta, z):
        zz = np.asarray(z)
        if np.any(np.abs(zz - self.domain.center) > self.domain.radius * (1 + _SLACK)):
            raise DomainEscape("evaluation point outside the disc")
        out = kernels.qp_eval(self.table, self.domain.center, theta, z)
        if np.ndim(theta) == 0 and np.ndim(z) == 0:
            out = out.reshape(())[()]
        return out

    def value(self, theta, x):
        """Real value at real ``(theta, x)``."""
        return np.real(self(theta, x))

    # projections ----------------------------------------------------------

    def mode(self, k) -> AnalyticMap1D:
        return fourier_mode(self, k)

    def p0(self) -> AnalyticMap1D:
        return p0(self)

    def mode_pair(self, k) -> ModePair:
        ck = fourier_mode(self, k).coeffs
        return ModePair(
            AnalyticMap1D(self.domain, 2 * ck.real),
            AnalyticMap1D(self.domain, -2 * ck.imag),
            k,
        )

    def derivative_x(self):
        return derivative_x(self)

    def coupling_norm(self):
        """Sup bound of ``f - p0(f)``."""
        t = self.table.copy()
        t[self.K] = 0
        return float(np.sum(np.abs(t) * self.domain.radius ** np.arange(t.shape[1])))

    def is_uncoupled(self, tol=0.0):
        return self.coupling_norm() <= tol

    def reshaped(self, K, n):
        t = np.zeros((2 * K + 1, n + 1), dtype=np.complex128)
        kk = min(K, self.K)
        nn = min(n, self.degree)
        t[K - kk: K + kk + 1, : nn + 1] = self.table[self.K - kk: self.K + kk + 1, : nn + 1]
        return QPMap(self.domain, t, self.rho)

    # algebra --------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, AnalyticMap1D):
            other = QPMap.uncoupled(other, self.K, self.rho)
        if other.domain != self.domain:
            raise ValueError("maps live on different discs")
        K = max(self.K, other.K)
        n = max(self.degree, other.degree)
        return QPMap(self.domain, self.reshaped(K, n).table + other.reshaped(K, n).table, self.rho)

    def __neg__(self):
        return QPMap(self.domain, -self.table, self.rho)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        if not np.isscalar(s):
            return NotImplemented
        return QPMap(self.domain, self.table * s, self.rho)

    __rmul__ = __mul__

    def sup_norm(self):
        return float(np.sum(np.abs(self.table) * self.domain.radius ** np.arange(self.table.shape[1])))

    def __repr__(self):
        return f"QPMap(K={self.K}, degree={self.degree}, center={self.domain.center}, radius={self.domain.radius})"


def table_from_samples(vals, domain, K, n):
    """Mode table from samples ``vals[j, m]`` at ``theta_j = j/nt`` and circle node ``m``."""
    vals = np.asarray(vals, dtype=np.complex128)
    nt = vals.shape[0]
    if nt < 2 * K + 1:
        raise ValueError("not enough theta samples for the requested modes")
    co = refit(vals, domain, n)  # Taylor along axis 1
    F = np.fft.fft(co, axis=0) / nt
    t = np.zeros((2 * K + 1, n + 1), dtype=np.complex128)
    for k in range(-K, K + 1):
        t[K + k] = F[k % nt]
    return t


def fourier_mode(f: QPMap, k: int) -> AnalyticMap1D:
    """``c_k(z) = int_0^1 f(theta, z) exp(-2 pi i k theta) d theta``."""
    if abs(k) > f.K:
        raise ModeOutOfRange(f"mode {k} outside |k| <= {f.K}")
    c = f.table[f.K + k]
    return AnalyticMap1D(f.domain, c.real.copy() if k == 0 else c.copy())


def p0(f: QPMap) -> AnalyticMap1D:
    """Average over theta."""
    return AnalyticMap1D(f.domain, f.table[f.K].real.copy())


def derivative_x(f: QPMap) -> QPMap:
    if f.degree == 0:
        return QPMap(f.domain, np.zeros_like(f.table), f.rho)
    k = np.arange(1, f.table.shape[1])
    return QPMap(f.domain, f.table[:, 1:] * k[None, :], f.rho)


# ---------------------------------------------------------------------------
# serialization


def _enc(c):
    c = np.asarray(c)
    if np.iscomplexobj(c):
        return [[float(x.real), float(x.imag)] for x in c.ravel()]
    return [float(x) for x in c.ravel()]


def _dec(data):
    a = np.asarray(data, dtype=float)
    if a.ndim >= 2 and a.shape[-1] == 2:
        return a[..., 0] + 1j * a[..., 1]
    return a


def to_dict(obj) -> dict:
    if isinstance(obj, AnalyticMap1D):
        return {
            "type": "AnalyticMap1D",
            "domain": {"center": obj.domain.center, "radius": obj.domain.radius},
            "coeffs": _enc(obj.coeffs),
        }
    if isinstance(obj, PeriodicFn):
        return {"type": "PeriodicFn", "domain": None, "coeffs": _enc(obj.coeffs)}
    if isinstance(obj, QPMap):
        return {
            "type": "QPMap",
            "domain": {"center": obj.domain.center, "radius": obj.domain.radius},
            "rho": obj.rho,
            "coeffs": [_enc(row) for row in obj.table],
        }
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_dict(data: dict):
    kind = data.get("type")
    if kind == "AnalyticMap1D":
        return AnalyticMap1D(DiscDomain(**data["domain"]), _dec(data["coeffs"]))
    if kind == "PeriodicFn":
        return PeriodicFn(_dec(data["coeffs"]))
    if kind == "QPMap":
        rows = np.array([_dec(r) for r in data["coeffs"]], dtype=np.complex128)
        return QPMap(DiscDomain(**data["domain"]), rows, data.get("rho", 0.1))
    raise ValueError(f"unknown serialized type {kind!r}")
