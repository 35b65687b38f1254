"""Acceptance suite: one test per top-level claim, one verdict line each.

Each test prints a single ``[criterion N] PASS/FAIL`` line with the
measured quantities before asserting, so the log carries the evidence
either way.
"""

import time

import numpy as np
import pytest

from elastica import catalog as cat
from elastica import cli
from elastica import flow as fl
from elastica import monitor as mon
from elastica.curve import (
    DiscreteCurve,
    curvature,
    hausdorff_distance,
    resample_arclength,
)
from elastica.energy import (
    EnergyParams,
    coercivity_check,
    first_variation_check,
    potential_F,
)


def report(num, ok, detail):
    print(f"[criterion {num}] {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {num}: {detail}"


def sine_initial(n=256, R=1.0, amp=0.1):
    x = np.linspace(0.0, R, n + 1)
    c = DiscreteCurve(np.column_stack([x, amp * np.sin(np.pi * x / R)]))
    return resample_arclength(c, n)


def navier_setup(lam=2.0):
    params = EnergyParams(lam=lam, alpha=0.0, mode="navier")
    bc = fl.BoundarySpec(kind="navier", R=1.0, alpha=0.0)
    return params, bc


@pytest.fixture(scope="module")
def reference_catalog():
    return cat.find_navier_equilibria(1.0, 0.0, 1.0, 30.0)


def test_criterion_01_energy_decay_identity():
    t0 = time.perf_counter()
    params, bc = navier_setup()

    def residual(dt):
        traj = fl.run(sine_initial(), bc, params,
                      {"dt": dt, "t_end": 5e-4, "grad_tol": 0.0,
                       "snapshot_every": 1, "resample_tol": 0.0})
        res = np.asarray(fl.energy_decay_residual(traj))
        # skip the initial transient while the discrete boundary
        # layers of the fresh initial data equilibrate
        return float(np.max(res[traj.times[:-1] >= 2e-4]))

    r1 = residual(1e-5)
    r2 = residual(5e-6)
    elapsed = time.perf_counter() - t0
    ok = r1 < 5e-2 and r1 / r2 >= 1.7 and elapsed < 60.0
    report(1, ok, f"residual {r1:.2e} (< 5e-2), halving gain "
           f"{r1 / r2:.2f}x (>= 1.7), {elapsed:.1f}s (< 60)")


def test_criterion_02_navier_convergence():
    t0 = time.perf_counter()
    params, bc = navier_setup()
    traj = fl.run(sine_initial(), bc, params,
                  {"dt": 1e-5, "t_end": 0.2, "grad_tol": 1e-6,
                   "snapshot_every": 100})
    grad = np.sqrt(max(traj.states[-1].report.gradient_norm_sq, 0.0))
    x = np.linspace(0.0, 1.0, 257)
    segment = DiscreteCurve(np.column_stack([x, np.zeros_like(x)]))
    hd = hausdorff_distance(traj.states[-1].curve, segment)
    egap = abs(traj.states[-1].report.total - 4.0)
    elapsed = time.perf_counter() - t0
    ok = (traj.termination == "converged" and grad < 1e-6 and hd < 1e-4
          and egap < 1e-6 and elapsed < 120.0)
    report(2, ok, f"grad {grad:.2e} (< 1e-6), hausdorff {hd:.2e} "
           f"(< 1e-4), energy gap {egap:.2e} (< 1e-6), "
           f"{elapsed:.1f}s (< 120)")


def test_criterion_03_clamped_convergence():
    t0 = time.perf_counter()
    params = EnergyParams(lam=1.0, mode="clamped")
    bc = fl.BoundarySpec(kind="clamped", R=0.5, tau0=(0.0, 1.0),
                         tau1=(0.0, 1.0))
    initial = cli.make_initial_curve({"kind": "hermite"}, 256, bc)
    traj = fl.run(initial, bc, params,
                  {"dt": 1e-5, "t_end": 0.2, "grad_tol": 1e-6,
                   "snapshot_every": 100})
    grad = np.sqrt(max(traj.states[-1].report.gradient_norm_sq, 0.0))
    records = cat.find_clamped_equilibria(1.0, (0.0, 1.0), (0.0, 1.0),
                                          0.5, 100.0)
    hd = min(hausdorff_distance(r.curve, traj.states[-1].curve)
             for r in records) if records else np.inf
    elapsed = time.perf_counter() - t0
    ok = (traj.termination == "converged" and grad < 1e-6 and hd < 1e-3
          and elapsed < 300.0)
    report(3, ok, f"stationary residual {grad:.2e} (< 1e-6), "
           f"independent shooting match {hd:.2e} (< 1e-3), "
           f"{elapsed:.1f}s (< 300)")


def _pendulum_oracle(E, lam):
    """Period via direct RK4 shooting on the curvature pendulum.

    Integrates (kappa, kappa_s) from the upper turning point and
    bisects the return crossing; independent of the quadrature route.
    """
    k_m, k_M = cat.kappa_extremes(E, lam)

    def rhs(y):
        return np.array([y[1], 0.5 * (lam * lam * y[0] - y[0] ** 3)])

    def rk4(y, h):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    # leave the turning point on its quadratic expansion
    scale = 1.0 / np.sqrt(abs(E) + 1.0)
    s0 = 1e-7 * max(1.0, scale)
    kpp = 0.5 * (lam * lam * k_M - k_M**3)
    y = np.array([k_M + 0.5 * kpp * s0 * s0, kpp * s0])
    h = 1e-4 * cat.period_L(E, lam)
    s = s0
    while True:
        ynew = rk4(y, h)
        if y[1] < 0.0 <= ynew[1] and s > 0.1 * scale:
            break
        y, s = ynew, s + h
    lo, hi = 0.0, h
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if rk4(y, mid)[1] < 0.0:
            lo = mid
        else:
            hi = mid
    return 2.0 * (s + 0.5 * (lo + hi))


def test_criterion_04_first_integral_machinery():
    lam = 1.0
    split = max(abs(cat.period_L(E, lam) - sum(cat.partial_periods(E, lam,
                                                                   0.0)))
                for E in np.geomspace(1e-6, 1e6, 50))

    period_err = 0.0
    for E in np.geomspace(1e-4, 1e4, 10):
        L = cat.period_L(E, lam)
        period_err = max(period_err, abs(L - _pendulum_oracle(E, lam)) / L)

    drift = 0.0
    for E in (-0.2, 1e-2, 1.0, 50.0):
        k_m, k_M = cat.kappa_extremes(E, lam)
        states = cat._orbit_states(cat.OrbitParams(lam, E, k_M, 1),
                                   cat.period_L(E, lam), 2048)
        drift = max(drift, float(np.max(np.abs(
            states[:, 1] ** 2 + potential_F(states[:, 0], lam) - E))))

    ok = split < 1e-9 and period_err < 1e-8 and drift < 1e-8
    report(4, ok, f"split error {split:.2e} (< 1e-9), period vs pendulum "
           f"oracle {period_err:.2e} (< 1e-8), first-integral drift "
           f"{drift:.2e} (< 1e-8)")


def test_criterion_05_appendix_asymptotics():
    lam = 1.0
    pos = [cat.period_L(E, lam) for E in np.geomspace(1e-6, 1e-1, 12)]
    neg = [cat.period_L(E, lam) for E in -np.geomspace(1e-6, 0.2, 12)]
    mono = all(np.diff(pos) < 0) and all(np.diff(neg) < 0)
    l2s = [cat.partial_periods(E, lam, 0.5)[1] for E in (1.0, 1e2, 1e4)]
    l2_dec = all(np.diff(l2s) < 0)
    rep = cat.energy_blowup_check(lam, [1e2, 1e4, 1e6])
    ok = mono and l2_dec and rep["bound_holds"]
    report(5, ok, f"period grows toward separatrix: {mono}, "
           f"L2 decreasing: {l2_dec}, bending > kappa_M^3/(8 sqrt E): "
           f"{rep['bound_holds']}")


def test_criterion_06_catalog_finiteness(reference_catalog):
    t0 = time.perf_counter()
    refined = cat.find_navier_equilibria(1.0, 0.0, 1.0, 30.0,
                                         search={"E_grid": 240})
    stable = len(reference_catalog) == len(refined)

    params, bc = navier_setup(lam=1.0)
    drift = 0.0
    for rec in reference_catalog:
        c = resample_arclength(rec.curve, 1024)
        st = fl.FlowState(c, 0.0, fl._report(c, bc, params))
        ref = c.points.copy()
        for _ in range(100):
            st = fl.step(st, 1e-7, bc, params)
        drift = max(drift, hausdorff_distance(st.curve.points, ref))
    elapsed = time.perf_counter() - t0
    ok = stable and drift < 1e-6
    report(6, ok, f"count {len(reference_catalog)} invariant under 2x "
           f"grid refinement: {stable}, max fixed-point drift "
           f"{drift:.2e} (< 1e-6), {elapsed:.1f}s")


def test_criterion_07_coercivity():
    from scipy.interpolate import CubicSpline

    rng = np.random.default_rng(20240817)
    params = EnergyParams(lam=1.0, alpha=0.5, mode="navier")
    violations = 0
    for _ in range(200):
        m = rng.integers(5, 10)
        xs = np.linspace(0.0, 1.0, m)
        ys = rng.uniform(0.05, 0.4) * rng.standard_normal(m)
        t = np.linspace(0.0, 1.0, 257)
        c = DiscreteCurve(np.column_stack([t, CubicSpline(xs, ys)(t)]))
        holds, _ = coercivity_check(c, params)
        violations += not holds
    ok = violations == 0
    report(7, ok, f"{violations} violations in 200 random spline curves "
           "(require 0)")


def test_criterion_08_first_variation():
    rng = np.random.default_rng(7)
    params = EnergyParams(lam=1.0)
    worst = 0.0
    for _ in range(20):
        t = np.linspace(0.0, 1.0, 513)
        y = np.zeros_like(t)
        for k in range(1, 6):
            y += 0.08 * rng.standard_normal() / k**2 * np.sin(
                k * np.pi * t)
        c = resample_arclength(DiscreteCurve(np.column_stack([t, y])), 512)
        s = c.arclength
        bump = np.sin(np.pi * s / s[-1]) ** 2 * rng.uniform(0.5, 1.5)
        bump[0] = bump[-1] = 0.0
        worst = max(worst, first_variation_check(c, params, bump))
    ok = worst < 1e-3
    report(8, ok, f"max relative error {worst:.2e} over 20 random "
           "curve/bump pairs (< 1e-3)")


def test_criterion_09_evolution_identities():
    params, bc = navier_setup()

    def ladder_level(n, dt):
        # settle first so the measurement window sees smooth motion,
        # then hold the fixed-fraction gauge (resample every step)
        settle = fl.run(sine_initial(n=n), bc, params,
                        {"dt": dt, "t_end": 2e-3, "grad_tol": 0.0,
                         "snapshot_every": 10000, "resample_tol": 0.0})
        window = fl.run(settle.states[-1].curve, bc, params,
                        {"dt": dt, "t_end": 3e-4, "grad_tol": 0.0,
                         "snapshot_every": 5, "resample_tol": 0.0})
        return fl.evolution_identity_residuals(window, bc, params)

    coarse = ladder_level(128, 2e-5)
    fine = ladder_level(256, 1e-5)
    rk = coarse["kappa_residual"] / fine["kappa_residual"]
    rl = coarse["line_element_residual"] / fine["line_element_residual"]
    bdry = fine["boundary_kappa_delta"]
    ok = rk >= 1.5 and rl >= 1.5 and bdry < 1e-8
    report(9, ok, f"refinement ratios kappa {rk:.2f}, line element "
           f"{rl:.2f} (>= 1.5), endpoint curvature rate {bdry:.2e} "
           "(< 1e-8)")


def test_criterion_10_verify_command(tmp_path):
    t0 = time.perf_counter()
    code = cli.main(["verify", "--out", str(tmp_path)])
    elapsed = time.perf_counter() - t0
    ok = code == 0 and elapsed < 600.0
    report(10, ok, f"exit code {code} (= 0), {elapsed:.1f}s (< 600)")
