"""End-to-end acceptance checks.

Each test prints one ``PASS`` or ``FAIL`` line with the measured value, the
tolerance and the wall time, then asserts. Run with ``pytest -s`` or read
the lines from the normal ``-v`` output.
"""

import os
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pytest

from renormqp.analytic import AnalyticMap1D, ModePair, PeriodicFn, QPMap, circle_nodes, dmin, min_theta, p0
from renormqp.cli import _trace, default_eps_ladder
from renormqp.config import GOLDEN_MEAN, RenormConfig
from renormqp.dynamics import covariance_check
from renormqp.families import FLM, FLM_ADDITIVE, G1, d_G1_at_Sigma1, slopes, superstable_alpha
from renormqp.qp import (
    L_omega,
    R_gamma,
    d_qp_renorm,
    l_omega_matrix,
    l_omega_spectrum,
    pairing_defect,
    phi_on_W,
    qp_renorm,
)
from renormqp.renorm1d import d_renorm_1d, dr_spectrum, feigenbaum, renorm_1d, sup_residual

STEPS = (1e-4, 1e-5, 1e-6)


@pytest.fixture
def report(capsys):
    def emit(k, ok, text, elapsed, limit):
        ok = ok and elapsed < limit
        line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {text} (time {elapsed:.1f} s, limit {limit:.0f} s)"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


def first_order(errs):
    """Error at the smallest step is small, and the error falls with the step (or is at rounding level)."""
    return errs[-1] <= 1e-4 and (errs[1] <= 0.2 * errs[0] or errs[0] <= 1e-8)


def pair_dist(p, q, m=128):
    z, _ = circle_nodes(p.domain, m)
    return max(np.abs(p.u.raw(z) - q.u.raw(z)).max(), np.abs(p.v.raw(z) - q.v.raw(z)).max())


def random_pair(rng, dom, n, k=1, scale=0.2):
    r = dom.radius
    u = AnalyticMap1D(dom, rng.normal(size=n + 1) * scale / r ** np.arange(n + 1))
    v = AnalyticMap1D(dom, rng.normal(size=n + 1) * scale / r ** np.arange(n + 1))
    return ModePair(u, v, k)


def dT_block(psi_q, omega, k, n, cfg):
    dom = psi_q.domain
    R = dom.radius
    zero = AnalyticMap1D(dom, np.zeros(n + 1))
    cols = []
    for which in (0, 1):
        for j in range(n + 1):
            e = np.zeros(n + 1)
            e[j] = R**-j
            b = AnalyticMap1D(dom, e)
            p = ModePair(b, zero, k) if which == 0 else ModePair(zero, b, k)
            d = d_qp_renorm(omega, psi_q, QPMap.from_mode_pair(p, K=psi_q.K, n=n), cfg).mode_pair(k)
            cols.append(np.concatenate([np.real(d.u.coeffs), np.real(d.v.coeffs)]) * np.tile(R ** np.arange(n + 1), 2))
    return np.array(cols).T


# ---------------------------------------------------------------------------


def test_criterion_1_feigenbaum_constant(report):
    t0 = time.perf_counter()
    cfg = RenormConfig(n_x=60)
    lead = dr_spectrum(feigenbaum(cfg).phi, cfg)[0]
    err = abs(lead - 4.66920)
    report(1, err <= 1e-3 and lead.imag == 0, f"delta = {lead.real:.12f}, |delta - 4.66920| = {err:.2e} <= 1e-3",
           time.perf_counter() - t0, 30)


def test_criterion_2_fixed_point_quality(report):
    t0 = time.perf_counter()
    c40, c80 = RenormConfig(n_x=40), RenormConfig(n_x=80)
    fp40, fp80 = feigenbaum(c40), feigenbaum(c80)
    res = max(sup_residual(fp40.phi, renorm_1d(fp40.phi, c40)), sup_residual(fp80.phi, renorm_1d(fp80.phi, c80)))
    gap = abs(fp40.a - fp80.a)
    ok = res <= 1e-10 and -1 < fp40.a < 0 and gap <= 1e-10 * abs(fp40.a)
    report(2, ok, f"residual {res:.2e} <= 1e-10, Phi(1) = {fp40.a:.15f}, N_x 40 vs 80 gap {gap:.1e} (10 digits)",
           time.perf_counter() - t0, 60)


def test_criterion_3_cascade_ratios(report):
    t0 = time.perf_counter()
    delta = dr_spectrum(feigenbaum(RenormConfig(n_x=60)).phi, RenormConfig(n_x=60))[0].real
    a = [superstable_alpha(n) for n in range(8)]
    ratio = (a[5] - a[4]) / (a[6] - a[5])
    rel = abs(ratio - delta) / delta
    report(3, rel <= 0.01, f"ratio at n = 6 is {ratio:.8f}, relative gap to delta {rel:.2e} <= 1e-2",
           time.perf_counter() - t0, 60)


def test_criterion_4_operator_consistency(report, cfg):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    phi_w = phi_on_W(cfg)
    W = phi_w.domain
    n = phi_w.degree
    z, _ = circle_nodes(W, 64)

    # (a) uncoupled maps: T_w acts as R on mode 0 and creates no coupling
    ea = 0.0
    for _ in range(5):
        c = np.zeros(n + 1)
        c[2:9:2] = rng.normal(size=4) * 0.01 / 1.3 ** np.arange(2, 9, 2)
        psi = phi_w + AnalyticMap1D.from_power_series(c, W)
        f = qp_renorm(rng.random(), QPMap.uncoupled(psi, K=3), cfg)
        ea = max(ea, np.abs(p0(f).raw(z) - renorm_1d(psi, cfg).raw(z)).max(), f.coupling_norm())

    # (b) DT_w(Phi) keeps each Fourier mode
    eb = 0.0
    psi_q = QPMap.uncoupled(phi_w, K=4)
    for k in (1, 2, 3):
        h = QPMap.from_mode_pair(random_pair(rng, W, 6, k), K=4, n=n)
        d = d_qp_renorm(GOLDEN_MEAN, psi_q, h, cfg)
        eb = max(eb, max(d.mode(j).sup_norm() for j in range(-4, 5) if abs(j) != k))

    # (c) mode-k block equals the mode-1 block at k w
    ec = 0.0
    for k in (2, 3):
        full = dT_block(QPMap.uncoupled(phi_w, K=3), GOLDEN_MEAN, k, n, cfg)
        one = dT_block(QPMap.uncoupled(phi_w, K=1), k * GOLDEN_MEAN, 1, n, cfg)
        ec = max(ec, np.abs(full - one).max(), np.abs(full - l_omega_matrix(phi_w, -k * GOLDEN_MEAN, n)).max())

    # (d) L_w commutes with rotations
    ed = 0.0
    for _ in range(10):
        om, gam = rng.random(2)
        p = random_pair(rng, W, 6)
        ed = max(ed, pair_dist(L_omega(phi_w, om, R_gamma(gam, p)), R_gamma(gam, L_omega(phi_w, om, p))))

    # (e) eigenvalues come in conjugate pairs or with even multiplicity
    ee = max(pairing_defect(l_omega_spectrum(phi_w, om, cfg)) for om in np.arange(64) / 64)

    ok = ea <= 1e-10 and eb <= 1e-10 and ec <= 1e-10 and ed <= 1e-12 and ee <= 1e-8
    report(4, ok, f"(a) {ea:.1e} (b) {eb:.1e} (c) {ec:.1e} <= 1e-10, (d) {ed:.1e} <= 1e-12, "
           f"(e) pairing defect {ee:.1e} <= 1e-8 over 64 omegas", time.perf_counter() - t0, 300)


def test_criterion_5_derivatives(report, cfg, phi):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = {}
    ok = True

    def record(name, errs):
        nonlocal ok
        ok = ok and first_order(errs)
        worst[name] = max(worst.get(name, 0.0), errs[-1])

    # d_renorm_1d at the fixed point
    dom = phi.domain
    zc, _ = circle_nodes(dom, 256)
    base = renorm_1d(phi, check=False)
    for _ in range(10):
        h = AnalyticMap1D(dom, rng.normal(size=7) * 0.3 / dom.radius ** np.arange(7))
        d = d_renorm_1d(phi, h).raw(zc)
        record("d_renorm_1d", [np.abs(((renorm_1d(phi + h * t, check=False) - base) * (1 / t)).raw(zc) - d).max() for t in STEPS])

    # d_qp_renorm at a forced map
    W = cfg.disc
    g = FLM(3.5, 1e-3, W, K=2, n=4)
    th = rng.random(64)[:, None]
    zz = (W.center + 1.2 * np.exp(2j * np.pi * rng.random(64)))[None, :]
    gb = qp_renorm(GOLDEN_MEAN, g, cfg, check=False)(th, zz)
    for _ in range(10):
        h = QPMap(W, (rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))) * 0.2 * 0.3 ** np.arange(5))
        d = d_qp_renorm(GOLDEN_MEAN, g, h, cfg)(th, zz)
        record("d_qp_renorm", [np.abs((qp_renorm(GOLDEN_MEAN, g + h * t, cfg, check=False)(th, zz) - gb) / t - d).max() for t in STEPS])

    # d_G1 at the superstable two-cycle
    f1 = FLM.psi(superstable_alpha(1), W, 4)
    g1 = QPMap.uncoupled(f1, K=2)
    tt = np.arange(64) / 64
    G0 = G1(GOLDEN_MEAN, g1, cfg)(tt)
    for _ in range(10):
        h = QPMap(W, (rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))) * 0.2 * 0.3 ** np.arange(5))
        d = d_G1_at_Sigma1(f1, GOLDEN_MEAN, h)(tt)
        record("d_G1_at_Sigma1", [np.abs((G1(GOLDEN_MEAN, g1 + h * t, cfg)(tt) - G0) / t - d).max() for t in STEPS])

    # dmin on random trigonometric polynomials
    for _ in range(10):
        q0 = PeriodicFn.trig(rng.normal(size=4), rng.normal(size=4))
        q1 = PeriodicFn.trig(rng.normal(size=4), rng.normal(size=4), rng.normal())
        d = dmin(q0, q1)
        m0 = min_theta(q0).value
        record("dmin", [abs((min_theta(q0 + q1 * t).value - m0) / t - d) for t in STEPS])

    text = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(5, ok, f"worst error at t = 1e-6 over 10 directions: {text} (<= 1e-4, O(t))", time.perf_counter() - t0, 120)


COVARIANCE_MAPS = [
    (FLM, 3.4986, 1e-3, 2),
    (FLM, 3.51, 1e-3, 2),
    (FLM_ADDITIVE, 3.5, 1e-3, 2),
    (FLM, 3.5546, 1e-4, 3),
    (FLM, 3.5667, 2e-5, 4),
]


def test_criterion_6_covariance(report, cfg):
    t0 = time.perf_counter()
    worst = 0.0
    for fam, alpha, eps, n in COVARIANCE_MAPS:
        g = fam(alpha, eps, cfg.disc, K=4, n=4)
        worst = max(worst, *covariance_check(g, GOLDEN_MEAN, n, cfg))
    report(6, worst <= 1e-8, f"largest curve residual or indicator gap over {len(COVARIANCE_MAPS)} maps {worst:.1e} <= 1e-8",
           time.perf_counter() - t0, 120)


@pytest.fixture(scope="module")
def traced():
    cfg = RenormConfig()
    t0 = time.perf_counter()
    tasks = [(n, GOLDEN_MEAN, "multiplicative", which, default_eps_ladder(n), cfg)
             for n in (1, 2, 3) for which in ("plus", "minus")]
    with ProcessPoolExecutor(max_workers=min(len(tasks), os.cpu_count() or 1)) as ex:
        out = list(ex.map(_trace, tasks))
    return {(n, which): (a0, s) for n, which, _, a0, s in out}, time.perf_counter() - t0


def test_criterion_7_slope_agreement(report, traced, cfg):
    dyn, elapsed = traced
    t0 = time.perf_counter()
    worst, parts = 0.0, []
    for n in (1, 2, 3):
        r = slopes(n, GOLDEN_MEAN, FLM, cfg)
        for which, want in (("plus", r.slope_plus), ("minus", r.slope_minus)):
            rel = abs(dyn[n, which][1] - want) / abs(want)
            worst = max(worst, rel)
            parts.append(f"n={n}{'+' if which == 'plus' else '-'} {want:.4f}/{dyn[n, which][1]:.4f}")
    report(7, worst <= 0.05, f"largest relative slope gap {worst:.1e} <= 5e-2 [{'; '.join(parts)}]",
           elapsed + time.perf_counter() - t0, 600)


def test_criterion_8_collapse(report, traced):
    dyn, elapsed = traced
    worst = max(abs(a0 - superstable_alpha(n)) for (n, _), (a0, _) in dyn.items())
    report(8, worst <= 1e-6, f"largest |alpha_n^(+-)(0) - alpha_n| {worst:.1e} <= 1e-6", elapsed, 600)
