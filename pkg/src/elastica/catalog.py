"""Stationary curves from the first integral of the curvature ODE.

A stationary curve satisfies 2 kappa_ss + kappa^3 - lam^2 kappa = 0,
whose first integral is (kappa_s)^2 + F(kappa) = E with the quartic
potential F. This module evaluates the period functions of the kappa
oscillation by singular quadrature, reconstructs curves by integrating
the ODE, and enumerates boundary-condition-compatible equilibria below
an energy budget by chord matching (navier) and shooting (clamped).
"""

import json
import os
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from ._kernels import integrate_orbit
from .curve import DiscreteCurve, _fornberg_weights, hausdorff_distance
from .energy import potential_F
from .errors import InvalidInputError, NumericError, OutOfDomainError

_SEGMENTS = ("L0", "L1", "L2")


def kappa_extremes(E, lam):
    """Extremes (kappa_m, kappa_M) of the curvature oscillation at level E.

    kappa_M = sqrt(lam^2 + sqrt(lam^4 + 4E)); kappa_m is -kappa_M for
    E > 0 and the inner positive root sqrt(lam^2 - sqrt(lam^4 + 4E))
    for E in (-lam^4/4, 0].
    """
    lam4 = lam**4
    if E <= -0.25 * lam4:
        raise OutOfDomainError("E must exceed -lam^4/4")
    root = np.sqrt(lam4 + 4.0 * E)
    k_max = np.sqrt(lam * lam + root)
    if E > 0.0:
        k_min = -k_max
    else:
        k_min = np.sqrt(lam * lam - root)
    return float(k_min), float(k_max)


def _arc_integral(a, b, E, lam, singular_low, singular_high):
    """Integral of d kappa / sqrt(E - F(kappa)) over [a, b].

    Inverse-square-root endpoint singularities (at kappa_m or kappa_M)
    are removed by the substitutions kappa = a + u^2 / kappa = b - u^2
    before adaptive quadrature.
    """
    if b <= a:
        return 0.0

    def body(k):
        return E - potential_F(k, lam)

    mid = 0.5 * (a + b)
    total = 0.0
    pieces = []
    if singular_low:
        # kappa = a + u^2 turns the lower-end singularity analytic
        pieces.append((0.0, np.sqrt(mid - a),
                       lambda u: 2.0 / np.sqrt(body(a + u * u) / max(u * u, 1e-300))
                       if u > 0.0 else 2.0 / np.sqrt(_dbody(a, E, lam))))
        lo = mid
    else:
        lo = a
    if singular_high:
        pieces.append((0.0, np.sqrt(b - mid),
                       lambda u: 2.0 / np.sqrt(body(b - u * u) / max(u * u, 1e-300))
                       if u > 0.0 else 2.0 / np.sqrt(-_dbody(b, E, lam))))
        hi = mid
    else:
        hi = b
    if hi > lo:
        pieces.append((lo, hi, lambda k: 1.0 / np.sqrt(body(k))))
    for u0, u1, f in pieces:
        val, err = quad(f, u0, u1, epsabs=1e-13, epsrel=1e-11, limit=200)
        if not np.isfinite(val):
            raise NumericError("arc quadrature failed to converge")
        total += val
    return total


def _dbody(k, E, lam):
    """d/dkappa of E - F at kappa (slope at a simple turning point)."""
    d = -(k**3 - lam * lam * k)
    return abs(d)


def period_L(E, lam):
    """Arclength of one full kappa oscillation at level E.

    Defined on (-lam^4/4, 0) and (0, inf); diverges at the separatrix
    E = 0. Relative accuracy about 1e-10.
    """
    if E == 0.0:
        raise OutOfDomainError("period diverges at the separatrix E = 0")
    k_m, k_M = kappa_extremes(E, lam)
    return 2.0 * _arc_integral(k_m, k_M, E, lam, True, True)


def partial_periods(E, lam, alpha):
    """Arclengths (L1, L2) of the kappa run split at the value alpha.

    L1 covers kappa from kappa_m up to alpha, L2 from alpha up to
    kappa_M; L1 + L2 equals the full period.
    """
    if E == 0.0:
        raise OutOfDomainError("partial periods undefined at E = 0")
    k_m, k_M = kappa_extremes(E, lam)
    if potential_F(alpha, lam) >= E or not (k_m <= alpha <= k_M):
        raise OutOfDomainError("alpha must lie strictly inside the orbit")
    l1 = 2.0 * _arc_integral(k_m, alpha, E, lam, True, False)
    l2 = 2.0 * _arc_integral(alpha, k_M, E, lam, False, True)
    return l1, l2


@dataclass(frozen=True)
class OrbitParams:
    """Initial data of a stationary-curvature orbit.

    ``E`` is the first-integral level, ``kappa0`` the starting
    curvature (inside the oscillation range) and ``sign0`` the sign of
    the initial arclength derivative of kappa.
    """

    lam: float
    E: float
    kappa0: float
    sign0: int = 1

    def __post_init__(self):
        if self.lam == 0.0:
            raise InvalidInputError("lam must be nonzero")
        k_m, k_M = kappa_extremes(self.E, self.lam)  # domain check on E
        if not (k_m - 1e-12 <= self.kappa0 <= k_M + 1e-12):
            raise InvalidInputError("kappa0 outside the oscillation range")
        if self.sign0 not in (-1, 1):
            raise InvalidInputError("sign0 must be +1 or -1")

    @property
    def kappa_s0(self):
        gap = self.E - potential_F(self.kappa0, self.lam)
        return self.sign0 * np.sqrt(max(gap, 0.0))


def _orbit_states(orbit, total_length, n, theta0=0.0, substeps=8):
    """Node states (kappa, kappa_s, theta, x, y) along a stationary orbit.

    Integrates with classic RK4 at ``substeps`` sub-intervals per node;
    retries at doubled substeps until the first-integral drift is
    below 1e-8 relative to max(1, |E|).
    """
    if total_length <= 0.0:
        raise InvalidInputError("total_length must be positive")
    if n < 8:
        raise InvalidInputError("need n >= 8")
    h = total_length / n
    sub = substeps
    tol = 1e-8 * max(1.0, abs(orbit.E))
    for _ in range(4):
        states = integrate_orbit(orbit.kappa0, orbit.kappa_s0, theta0,
                                 orbit.lam, h, n, sub)
        drift = np.max(np.abs(
            states[:, 1] ** 2 + potential_F(states[:, 0], orbit.lam)
            - orbit.E))
        if drift <= tol:
            return states
        sub *= 2
    raise NumericError(
        f"first-integral drift {drift:.3e} > {tol:.1e} despite refinement")


def reconstruct(orbit, total_length, n, theta0=0.0):
    """Discrete stationary curve of the given orbit and length."""
    states = _orbit_states(orbit, total_length, n, theta0)
    return DiscreteCurve(states[:, 3:5])


def chord_vectors(E, lam, alpha, segment):
    """Endpoint displacement over one full period and one partial segment.

    The orbit starts at kappa(0) = alpha with the segment's canonical
    sign of kappa_s: decreasing first for L1, increasing first for L2.
    For segment "L0" the partial displacement is zero.
    """
    if segment not in _SEGMENTS:
        raise InvalidInputError(f"segment must be one of {_SEGMENTS}")
    L = period_L(E, lam)
    sign = -1 if segment == "L1" else 1
    orbit = OrbitParams(lam, E, alpha, sign)
    n = max(256, int(64 * np.ceil(L)))
    states = _orbit_states(orbit, L, n)
    d_full = states[-1, 3:5] - states[0, 3:5]
    if segment == "L0":
        d_partial = np.zeros(2)
    else:
        l1, l2 = partial_periods(E, lam, alpha)
        frac = l1 if segment == "L1" else l2
        m = max(64, int(np.ceil(n * frac / L)))
        states_p = _orbit_states(orbit, frac, m)
        d_partial = states_p[-1, 3:5] - states_p[0, 3:5]
    return d_full, d_partial


@dataclass(frozen=True)
class EquilibriumRecord:
    """One admitted stationary curve with its provenance and residuals."""

    curve: DiscreteCurve
    E: float
    N: int
    segment: str
    energy: float
    stationary_residual: float
    bc_residual: float

    def as_dict(self, curve_file=None):
        doc = {
            "E": self.E, "N": self.N, "segment": self.segment,
            "energy": self.energy,
            "stationary_residual": self.stationary_residual,
            "bc_residual": self.bc_residual,
        }
        if curve_file is not None:
            doc["curve_file"] = curve_file
        return doc


def _stationary_residual_of_field(kappa, h, lam):
    """Max residual of 2 kappa_ss + kappa^3 - lam^2 kappa on an ODE field.

    kappa_ss by fourth-order centered stencils (one-sided at the four
    outermost nodes), so the measurement reflects integration error
    rather than stencil truncation.
    """
    n = len(kappa)
    k_ss = np.empty(n)
    k_ss[2:-2] = (-kappa[:-4] + 16 * kappa[1:-3] - 30 * kappa[2:-2]
                  + 16 * kappa[3:-1] - kappa[4:]) / (12.0 * h * h)
    ts = np.arange(7) * h
    for i in (0, 1):
        w = _fornberg_weights(ts, i * h, 2)
        k_ss[i] = w[2] @ kappa[:7]
        w = _fornberg_weights(ts, (6 - i) * h, 2)
        k_ss[n - 1 - i] = w[2] @ kappa[-7:]
    return float(np.max(np.abs(2.0 * k_ss + kappa**3 - lam * lam * kappa)))


def _canonical_curve(states, R):
    """Rotate/translate node positions so endpoints sit on (0,0), (R,0)."""
    pts = states[:, 3:5] - states[0, 3:5]
    d = pts[-1]
    norm = np.linalg.norm(d)
    c, s = d / norm
    rot = np.array([[c, s], [-s, c]])
    pts = pts @ rot.T
    pts[-1] = [norm, 0.0]
    return pts


def _energy_of_states(states, h, lam, alpha):
    k = states[:, 0]
    bending = float(np.trapezoid(k**2, dx=h))
    length = h * (len(k) - 1)
    lin = -2.0 * alpha * float(np.trapezoid(k, dx=h))
    return bending + lam * lam * length + lin


def _dedup(records, tol=1e-6):
    """Drop duplicates modulo reflection across the chord axis."""
    kept = []
    for rec in sorted(records, key=lambda r: (r.energy, r.N, r.segment)):
        pts = rec.curve.points
        refl = pts * np.array([1.0, -1.0])
        dup = False
        for other in kept:
            if (hausdorff_distance(pts, other.curve.points) < tol
                    or hausdorff_distance(refl, other.curve.points) < tol):
                dup = True
                break
        if not dup:
            kept.append(rec)
    return kept


def _straight_segment_record(lam, R, n=256):
    x = np.linspace(0.0, R, n + 1)
    curve = DiscreteCurve(np.column_stack([x, np.zeros(n + 1)]))
    return EquilibriumRecord(curve, 0.0, 0, "L0", lam * lam * R, 0.0, 0.0)


def _navier_record(lam, alpha, R, E, N, segment, n_nodes=1024):
    """Build one admitted record at a root energy level E."""
    sign = -1 if segment == "L1" else 1
    L = period_L(E, lam)
    if segment == "L0":
        ell = N * L
    else:
        l1, l2 = partial_periods(E, lam, alpha)
        ell = (l1 if segment == "L1" else l2) + N * L
    orbit = OrbitParams(lam, E, alpha, sign)
    n = max(n_nodes, 8)
    states = _orbit_states(orbit, ell, n)
    pts = _canonical_curve(states, R)
    curve = DiscreteCurve(pts)
    h = ell / n
    energy = _energy_of_states(states, h, lam, alpha)
    stat = _stationary_residual_of_field(states[:, 0], h, lam)
    bcr = (abs(states[0, 0] - alpha) + abs(states[-1, 0] - alpha)
           + abs(np.linalg.norm(pts[-1] - [R, 0.0])))
    return EquilibriumRecord(curve, float(E), int(N), segment,
                             float(energy), stat, bcr)


def find_navier_equilibria(lam, alpha, R, A, search=None):
    """Enumerate navier-compatible stationary curves with energy <= A.

    For each period count N, partial-segment type and initial kappa_s
    sign, scans a log grid of first-integral levels E for roots of
    g(E) = |gamma(ell(E)) - gamma(0)| - R where ell is the candidate
    total length, refines the roots by bisection, and admits curves
    passing the residual gates. The chord is measured on a single
    reconstructed trajectory rather than by summing per-period
    displacement vectors, which would ignore the rotation per period.
    """
    if lam == 0.0 or R <= 0.0:
        raise InvalidInputError("need lam != 0 and R > 0")
    search = dict(search or {})
    n_grid = int(search.get("E_grid", 120))
    guard = 1e-8 * lam**4
    e_lo = float(search.get("E_min", max(guard, 1e-6 * lam**4)))
    e_hi = float(search.get("E_max", 1e4 * lam**4))
    n_scan = int(search.get("scan_nodes", 64))

    records = []
    if abs(alpha) < 1e-14 and lam * lam * R <= A + 1e-12:
        records.append(_straight_segment_record(lam, R))

    # per-level cost of one period: admissible N is bounded by A
    grid = np.geomspace(e_lo, e_hi, n_grid)
    if abs(alpha) >= 1e-14:
        grid = grid[potential_F(grid * 0 + alpha, lam) < grid]
    per_L = np.array([period_L(E, lam) for E in grid])
    per_W = np.empty_like(grid)
    for i, E in enumerate(grid):
        orbit = OrbitParams(lam, E, alpha if potential_F(alpha, lam) < E
                            else kappa_extremes(E, lam)[1], 1)
        states = _orbit_states(orbit, per_L[i], max(128, n_scan))
        per_W[i] = (np.trapezoid(states[:, 0] ** 2, dx=per_L[i] / max(128, n_scan))
                    + lam * lam * per_L[i])
    w_min = per_W.min()
    n_max = int(search.get("N_max", max(1, int(A / w_min))))

    def g_of(E, N, segment, n_probe):
        sign = -1 if segment == "L1" else 1
        L = period_L(E, lam)
        if segment == "L0":
            ell = N * L
        else:
            l1, l2 = partial_periods(E, lam, alpha)
            ell = (l1 if segment == "L1" else l2) + N * L
        orbit = OrbitParams(lam, E, alpha, sign)
        states = _orbit_states(orbit, ell,
                               max(n_probe, int(n_probe * ell / max(L, 1e-9))))
        return float(np.linalg.norm(states[-1, 3:5] - states[0, 3:5])) - R

    combos = []
    for N in range(0, n_max + 1):
        for segment in _SEGMENTS:
            if segment == "L0" and N == 0:
                continue
            if segment == "L0" and abs(alpha) >= 1e-14:
                # a closed multi-period curve cannot end at alpha twice
                # unless it starts there; L0 keeps kappa(0)=alpha anyway
                pass
            combos.append((N, segment))

    for N, segment in combos:
        mask = (N * per_W + (0.0 if segment == "L0" else lam * lam * 0.0)) <= A * 1.25
        sub = grid[mask]
        if len(sub) < 2:
            continue
        gv = np.array([g_of(E, N, segment, n_scan) for E in sub])
        for i in range(len(sub) - 1):
            if gv[i] == 0.0 or gv[i] * gv[i + 1] >= 0.0:
                continue
            try:
                root = brentq(lambda E: g_of(E, N, segment, 4 * n_scan),
                              sub[i], sub[i + 1], xtol=1e-14, rtol=1e-14)
            except (ValueError, NumericError):
                continue
            if abs(g_of(root, N, segment, 8 * n_scan)) > 1e-7:
                continue
            rec = _navier_record(lam, alpha, R, root, N, segment)
            if rec.energy <= A + 1e-9 and rec.stationary_residual < 1e-6 \
                    and rec.bc_residual < 1e-8:
                records.append(rec)
    return _dedup(records)


def find_clamped_equilibria(lam, tau0, tau1, R, A, search=None):
    """Enumerate clamped stationary curves by three-unknown shooting.

    Unknowns are (kappa0, kappa_s0, length); the residual matches the
    far endpoint position and tangent angle. Damped Newton iterations
    with finite-difference Jacobians run from a seed grid; converged
    solutions below the energy budget are deduplicated by Hausdorff
    distance modulo reflection across the chord.
    """
    tau0 = np.asarray(tau0, dtype=float)
    tau1 = np.asarray(tau1, dtype=float)
    if lam == 0.0 or R <= 0.0:
        raise InvalidInputError("need lam != 0 and R > 0")
    for v in (tau0, tau1):
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise InvalidInputError("tangents must be unit vectors")
    search = dict(search or {})
    k_seeds = search.get("kappa_seeds", np.linspace(-3.0, 3.0, 7) * abs(lam))
    p_seeds = search.get("p_seeds", np.linspace(-2.0, 2.0, 5) * lam * lam)
    l_seeds = search.get("length_seeds", R * np.array([1.1, 1.6, 2.5, 4.0]))
    n_shoot = int(search.get("shoot_nodes", 128))
    theta0 = float(np.arctan2(tau0[1], tau0[0]))
    theta1 = float(np.arctan2(tau1[1], tau1[0]))

    def residual(x):
        k0, p0, ell = x
        if ell <= 0.05 * R or ell > 40.0 * R:
            return None
        states = integrate_orbit(k0, p0, theta0, lam, ell / n_shoot,
                                 n_shoot, 4)
        end = states[-1]
        dth = (end[2] - theta1 + np.pi) % (2.0 * np.pi) - np.pi
        return np.array([end[3] - R, end[4], dth])

    sols = []
    for k0 in np.atleast_1d(k_seeds):
        for p0 in np.atleast_1d(p_seeds):
            for ell in np.atleast_1d(l_seeds):
                x = np.array([k0, p0, ell], dtype=float)
                ok = False
                for _ in range(60):
                    r = residual(x)
                    if r is None or not np.all(np.isfinite(r)):
                        break
                    if np.linalg.norm(r) < 1e-11:
                        ok = True
                        break
                    jac = np.empty((3, 3))
                    bad = False
                    for j in range(3):
                        dx = 1e-7 * max(1.0, abs(x[j]))
                        xp = x.copy(); xp[j] += dx
                        rp = residual(xp)
                        if rp is None:
                            bad = True
                            break
                        jac[:, j] = (rp - r) / dx
                    if bad:
                        break
                    try:
                        full = np.linalg.solve(jac, -r)
                    except np.linalg.LinAlgError:
                        break
                    t = 1.0
                    base = np.linalg.norm(r)
                    for _ in range(25):
                        rt = residual(x + t * full)
                        if rt is not None and np.all(np.isfinite(rt)) \
                                and np.linalg.norm(rt) < base:
                            break
                        t *= 0.5
                    else:
                        break
                    x = x + t * full
                if ok:
                    sols.append(x.copy())

    records = []
    for k0, p0, ell in sols:
        E = float(p0 * p0 + potential_F(k0, lam))
        n = 1024
        states = integrate_orbit(k0, p0, theta0, lam, ell / n, n, 8)
        drift = np.max(np.abs(
            states[:, 1] ** 2 + potential_F(states[:, 0], lam) - E))
        if drift > 1e-8:
            continue
        pts = states[:, 3:5].copy()
        pts[-1] = [R, 0.0]
        curve = DiscreteCurve(pts)
        h = ell / n
        energy = _energy_of_states(states, h, lam, 0.0)
        if energy > A + 1e-6:
            continue
        stat = _stationary_residual_of_field(states[:, 0], h, lam)
        end_tau = np.array([np.cos(states[-1, 2]), np.sin(states[-1, 2])])
        bcr = (np.linalg.norm(states[-1, 3:5] - [R, 0.0])
               + np.linalg.norm(end_tau - tau1))
        if stat < 1e-6 and bcr < 1e-8:
            if E > 0:
                try:
                    N = int(ell / period_L(E, lam))
                except OutOfDomainError:
                    N = 0
            else:
                N = 0
            records.append(EquilibriumRecord(
                curve, E, N, "L0", float(energy), stat, float(bcr)))
    return _dedup(records)


def energy_blowup_check(lam, E_list):
    """Per-period bending energy versus the kappa_M^3/(8 sqrt(E)) bound.

    Returns a report with the computed integrals, the lower bounds, and
    flags for bound satisfaction and strict growth along E_list.
    """
    E_list = np.asarray(E_list, dtype=float)
    if np.any(E_list <= 0.0) or np.any(np.diff(E_list) <= 0.0):
        raise InvalidInputError("E_list must be positive and increasing")
    values = []
    bounds = []
    for E in E_list:
        L = period_L(E, lam)
        k_m, k_M = kappa_extremes(E, lam)
        orbit = OrbitParams(lam, E, k_M, 1)
        n = 2048
        states = _orbit_states(orbit, L, n)
        values.append(float(np.trapezoid(states[:, 0] ** 2, dx=L / n)))
        bounds.append(float(k_M**3 / (8.0 * np.sqrt(E))))
    values = np.array(values)
    bounds = np.array(bounds)
    return {
        "E": E_list.tolist(),
        "bending_per_period": values.tolist(),
        "lower_bound": bounds.tolist(),
        "bound_holds": bool(np.all(values > bounds)),
        "strictly_increasing": bool(np.all(np.diff(values) > 0.0)),
    }


def write_catalog(records, outdir):
    """Write catalog.json plus one curve CSV per record."""
    os.makedirs(outdir, exist_ok=True)
    docs = []
    for i, rec in enumerate(records):
        fname = f"equilibrium_{i:03d}.csv"
        rec.curve.to_csv(os.path.join(outdir, fname))
        docs.append(rec.as_dict(curve_file=fname))
    with open(os.path.join(outdir, "catalog.json"), "w") as fh:
        json.dump(docs, fh, indent=2)
    return docs
