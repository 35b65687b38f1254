"""Command-line front end: flow runs, catalogs, sweeps, verification.

Configuration is a single JSON file; ``--override key=value`` flags
replace top-level (dotted) fields. Exit codes: 0 success, 1 numeric
failure, 2 configuration error.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import catalog as cat
from . import flow as fl
from . import monitor as mon
from .curve import DiscreteCurve, hausdorff_distance, resample_arclength
from .energy import EnergyParams, coercivity_check, first_variation_check
from .errors import ElasticaError, InvalidInputError

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_CONFIG = 2


def _set_dotted(doc, key, value):
    parts = key.split(".")
    node = doc
    for p in parts[:-1]:
        node = node.setdefault(p, {})
    try:
        node[parts[-1]] = json.loads(value)
    except json.JSONDecodeError:
        node[parts[-1]] = value


def load_config(path, overrides=()):
    """Read a JSON config file and apply dotted-key overrides."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read config {path}: {exc}")
    if not isinstance(doc, dict):
        raise InvalidInputError("config root must be a JSON object")
    for ov in overrides:
        if "=" not in ov:
            raise InvalidInputError(f"override must be key=value: {ov!r}")
        key, value = ov.split("=", 1)
        _set_dotted(doc, key, value)
    return doc


def make_initial_curve(spec, n, bc=None):
    """Build the initial curve from a file path or a generator spec.

    Generators: ``segment`` (straight chord), ``sine`` (chord plus a
    sine perturbation with ``amplitude``/``wavenumber``), ``arc``
    (circular arc of ``height``), ``hermite`` (cubic matching clamped
    tangents with ``tension``).
    """
    R = float(spec.get("R", 1.0 if bc is None else bc.R))
    kind = spec.get("kind", "segment")
    if "file" in spec:
        return resample_arclength(DiscreteCurve.from_csv(spec["file"]), n)
    t = np.linspace(0.0, 1.0, n + 1)
    if kind == "segment":
        pts = np.column_stack([R * t, np.zeros(n + 1)])
    elif kind == "sine":
        a = float(spec.get("amplitude", 0.1))
        w = int(spec.get("wavenumber", 1))
        pts = np.column_stack([R * t, a * np.sin(np.pi * w * t)])
    elif kind == "arc":
        hgt = float(spec.get("height", 0.2))
        # circle through (0,0), (R,0) with apex height hgt
        rad = (hgt * hgt + 0.25 * R * R) / (2.0 * hgt)
        ang = np.arcsin(0.5 * R / rad)
        th = np.linspace(-ang, ang, n + 1)
        pts = np.column_stack([rad * np.sin(th) + 0.5 * R,
                               rad * np.cos(th) - (rad - hgt)])
    elif kind == "hermite":
        if bc is None or bc.tau0 is None or bc.tau1 is None:
            raise InvalidInputError("hermite generator needs clamped data")
        m = float(spec.get("tension", 1.0)) * R
        p0 = np.zeros(2)
        p1 = np.array([R, 0.0])
        v0 = m * np.asarray(bc.tau0, float)
        v1 = m * np.asarray(bc.tau1, float)
        h00 = 2 * t**3 - 3 * t**2 + 1
        h10 = t**3 - 2 * t**2 + t
        h01 = -2 * t**3 + 3 * t**2
        h11 = t**3 - t**2
        pts = (h00[:, None] * p0 + h10[:, None] * v0
               + h01[:, None] * p1 + h11[:, None] * v1)
    else:
        raise InvalidInputError(f"unknown initial-curve kind {kind!r}")
    return resample_arclength(DiscreteCurve(pts), n)


def _params_from(doc):
    p = doc.get("params", {})
    return EnergyParams(lam=float(p.get("lam", 1.0)),
                        alpha=float(p.get("alpha", 0.0)),
                        mode=p.get("mode", "clamped"))


def _bc_from(doc, params):
    b = doc.get("bc", {})
    kind = b.get("kind", params.mode)
    R = float(b.get("R", 1.0))
    if kind == "clamped":
        return fl.BoundarySpec(kind="clamped", R=R,
                               tau0=tuple(b.get("tau0", (1.0, 0.0))),
                               tau1=tuple(b.get("tau1", (1.0, 0.0))))
    return fl.BoundarySpec(kind="navier", R=R,
                           alpha=float(b.get("alpha", params.alpha)))


def _echo_manifest(doc, outdir, extra=None):
    os.makedirs(outdir, exist_ok=True)
    payload = {"config": doc}
    payload.update(extra or {})
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(payload, fh, indent=2)


def cmd_flow(doc, outdir):
    """Run one flow and write trajectory artifacts; returns exit code."""
    params = _params_from(doc)
    bc = _bc_from(doc, params)
    sched = dict(doc.get("schedule", {}))
    n = int(sched.pop("n", 256))
    initial = make_initial_curve(doc.get("initial", {}), n, bc)
    traj = fl.run(initial, bc, params, sched)
    fl.write_run(traj, outdir)
    _echo_manifest(doc, outdir, {
        "termination": traj.termination,
        "final_time": float(traj.states[-1].time),
        "final_energy": float(traj.states[-1].report.total),
    })
    cat_path = doc.get("catalog_path")
    if cat_path:
        records = read_catalog(cat_path)
        v = mon.verdict(traj, records, doc.get("tol", {}))
        with open(os.path.join(outdir, "verdict.json"), "w") as fh:
            fh.write(v.to_json())
        print(f"verdict: converged={v.converged} "
              f"grad={v.final_grad_norm:.3e} dist={v.final_distance:.3e}")
    print(f"flow: {traj.termination} at t={traj.states[-1].time:.6g}, "
          f"energy={traj.states[-1].report.total:.9g} -> {outdir}")
    if traj.termination not in ("converged", "t_end"):
        return EXIT_NUMERIC
    return EXIT_OK


def read_catalog(path):
    """Load EquilibriumRecords from a catalog.json and its curve CSVs."""
    base = os.path.dirname(path)
    with open(path) as fh:
        docs = json.load(fh)
    records = []
    for d in docs:
        curve = DiscreteCurve.from_csv(os.path.join(base, d["curve_file"]))
        records.append(cat.EquilibriumRecord(
            curve=curve, E=d["E"], N=d["N"], segment=d["segment"],
            energy=d["energy"],
            stationary_residual=d["stationary_residual"],
            bc_residual=d["bc_residual"]))
    return records


def cmd_catalog(doc, outdir):
    """Build and write an equilibrium catalog; returns exit code."""
    params = _params_from(doc)
    b = doc.get("bc", {})
    R = float(b.get("R", 1.0))
    A = float(doc.get("energy_bound", 10.0))
    search = doc.get("search", {})
    if params.mode == "navier" or b.get("kind") == "navier":
        records = cat.find_navier_equilibria(
            params.lam, float(b.get("alpha", params.alpha)), R, A, search)
    else:
        records = cat.find_clamped_equilibria(
            params.lam, tuple(b.get("tau0", (1.0, 0.0))),
            tuple(b.get("tau1", (1.0, 0.0))), R, A, search)
    cat.write_catalog(records, outdir)
    _echo_manifest(doc, outdir, {"count": len(records)})
    print(f"catalog: {len(records)} equilibria -> {outdir}")
    for rec in records:
        print(f"  E={rec.E:12.6g} N={rec.N} segment={rec.segment} "
              f"energy={rec.energy:.6f}")
    return EXIT_OK


def cmd_sweep(doc, outdir):
    """Sweep period/partial-period/bending data over an E grid."""
    params = _params_from(doc)
    lam = params.lam
    alpha = float(doc.get("bc", {}).get("alpha", params.alpha))
    g = doc.get("grid", {})
    lam4 = lam**4
    lo = float(g.get("E_min", 1e-6 * lam4))
    hi = float(g.get("E_max", 1e6 * lam4))
    num = int(g.get("points", 60))
    guard = 1e-8 * lam4
    grid = np.geomspace(max(lo, guard), hi, num)
    rows = []
    for E in grid:
        L = cat.period_L(E, lam)
        k_m, k_M = cat.kappa_extremes(E, lam)
        try:
            l1, l2 = cat.partial_periods(E, lam, alpha)
        except ElasticaError:
            l1 = l2 = np.nan
        orbit = cat.OrbitParams(lam, E, k_M, 1)
        states = cat._orbit_states(orbit, L, 1024)
        bend = float(np.trapezoid(states[:, 0] ** 2, dx=L / 1024))
        rows.append((E, L, l1, l2, bend, k_M**3 / (8.0 * np.sqrt(E))))
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, "sweep.csv")
    with open(path, "w") as fh:
        fh.write("E,L,L1,L2,int_kappa_sq,lower_bound\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    _echo_manifest(doc, outdir, {"rows": len(rows)})
    print(f"sweep: {len(rows)} rows -> {path}")
    return EXIT_OK


def _check(name, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  {detail}" if detail else ""))
    return bool(ok)


def cmd_verify(doc, outdir):
    """Run the full property suite; returns 0 only if all checks pass."""
    rng = np.random.default_rng(int(doc.get("seed", 20240817)))
    os.makedirs(outdir, exist_ok=True)
    ok = True

    # --- first-integral machinery
    lam = 1.0
    grid = np.geomspace(1e-6, 1e6, 50)
    worst = 0.0
    for E in grid:
        L = cat.period_L(E, lam)
        l1, l2 = cat.partial_periods(E, lam, 0.0)
        worst = max(worst, abs(L - (l1 + l2)))
    ok &= _check("period split L = L1 + L2", worst < 1e-9, f"max err {worst:.2e}")

    worst = 0.0
    for E in [-0.2, -1e-3, 1e-2, 1.0, 50.0]:
        k_m, k_M = cat.kappa_extremes(E, lam)
        orbit = cat.OrbitParams(lam, E, k_M, 1)
        L = cat.period_L(E, lam)
        states = cat._orbit_states(orbit, L, 1024)
        drift = np.max(np.abs(states[:, 1] ** 2
                              + (0.25 * states[:, 0] ** 4
                                 - 0.5 * lam * lam * states[:, 0] ** 2) - E))
        worst = max(worst, drift)
    ok &= _check("first-integral conservation", worst < 1e-8,
                 f"max drift {worst:.2e}")

    # --- monotonicity and blowup bound
    Ls = [cat.period_L(E, lam) for E in np.geomspace(1e-6, 1e-1, 12)]
    Ln = [cat.period_L(E, lam) for E in -np.geomspace(1e-6, 0.2, 12)]
    ok &= _check("period diverges toward the separatrix",
                 all(np.diff(Ls) < 0) and all(np.diff(Ln) < 0))
    rep = cat.energy_blowup_check(lam, [1e2, 1e4, 1e6])
    ok &= _check("per-period bending exceeds lower bound",
                 rep["bound_holds"] and rep["strictly_increasing"])

    # --- energy decay on the standard navier run
    params = EnergyParams(lam=2.0, alpha=0.0, mode="navier")
    bc = fl.BoundarySpec(kind="navier", R=1.0, alpha=0.0)
    c0 = make_initial_curve({"kind": "sine", "amplitude": 0.1, "R": 1.0},
                            256, bc)
    traj = fl.run(c0, bc, params,
                  {"dt": 1e-5, "t_end": 5e-4, "snapshot_every": 1,
                   "grad_tol": 0.0, "resample_tol": 0.0})
    res = np.asarray(fl.energy_decay_residual(traj))
    times = traj.times[:-1]
    r = float(np.max(res[times >= 2e-4]))
    ok &= _check("energy decay identity", r < 5e-2, f"residual {r:.2e}")

    # --- convergence of the same run
    traj = fl.run(c0, bc, params, {"dt": 1e-5, "t_end": 0.2,
                                   "grad_tol": 1e-6, "snapshot_every": 100})
    seg = make_initial_curve({"kind": "segment", "R": 1.0}, 256)
    hd = hausdorff_distance(traj.states[-1].curve, seg)
    egap = abs(traj.states[-1].report.total - 4.0)
    ok &= _check("navier run converges to the segment",
                 traj.termination == "converged" and hd < 1e-4
                 and egap < 1e-6, f"hd {hd:.2e} egap {egap:.2e}")

    # --- coercivity on random curves
    p2 = EnergyParams(lam=1.0, alpha=0.5, mode="navier")
    viol = 0
    for _ in range(50):
        m = 8
        xs = np.linspace(0.0, 1.0, m)
        ys = 0.3 * rng.standard_normal(m)
        ys[0] = ys[-1] = 0.0
        from scipy.interpolate import CubicSpline
        t = np.linspace(0, 1, 257)
        c = DiscreteCurve(np.column_stack([t, CubicSpline(xs, ys)(t)]))
        holds, _ = coercivity_check(c, p2)
        viol += not holds
    ok &= _check("coercivity bound on random curves", viol == 0,
                 f"{viol} violations")

    # --- first variation (smooth random curves; spline knots would put
    # third-derivative jumps under the curvature stencils)
    worst = 0.0
    for _ in range(5):
        t = np.linspace(0, 1, 513)
        y = np.zeros_like(t)
        for k in range(1, 6):
            y += 0.08 * rng.standard_normal() / k**2 * np.sin(
                k * np.pi * t)
        c = resample_arclength(
            DiscreteCurve(np.column_stack([t, y])), 512)
        s = c.arclength
        bump = np.sin(np.pi * s / s[-1]) ** 2 * rng.uniform(0.5, 1.5)
        bump[0] = bump[-1] = 0.0
        worst = max(worst, first_variation_check(c, EnergyParams(lam=1.0),
                                                 bump))
    ok &= _check("first variation matches finite differences",
                 worst < 1e-3, f"max rel err {worst:.2e}")

    # --- catalog fixed points
    records = cat.find_navier_equilibria(1.0, 0.0, 1.0, 30.0)
    p3 = EnergyParams(lam=1.0, alpha=0.0, mode="navier")
    b3 = fl.BoundarySpec(kind="navier", R=1.0, alpha=0.0)
    worst = 0.0
    for recd in records:
        c = resample_arclength(recd.curve, 1024)
        st = fl.FlowState(c, 0.0, fl._report(c, b3, p3))
        ref = c.points.copy()
        for _ in range(100):
            st = fl.step(st, 1e-7, b3, p3)
        worst = max(worst, hausdorff_distance(st.curve.points, ref))
    ok &= _check("catalog members are flow fixed points",
                 len(records) >= 2 and worst < 1e-6,
                 f"{len(records)} members, max drift {worst:.2e}")

    _echo_manifest(doc, outdir, {"all_pass": bool(ok)})
    print("verify:", "ALL PASS" if ok else "FAILURES PRESENT")
    return EXIT_OK if ok else EXIT_NUMERIC


_COMMANDS = {
    "flow": cmd_flow,
    "catalog": cmd_catalog,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="elastica",
        description="Gradient flow of curvature energies on planar curves")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=False, default=None,
                        help="JSON config file (verify runs without one)")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--override", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="override a (dotted) top-level config field")
    args = parser.parse_args(argv)

    try:
        if args.config is not None:
            doc = load_config(args.config, args.override)
        elif args.command == "verify":
            doc = {}
            for ov in args.override:
                key, value = ov.split("=", 1)
                _set_dotted(doc, key, value)
        else:
            parser.error(f"--config is required for {args.command!r}")
        outdir = args.out or doc.get("out", f"runs/{args.command}")
        return _COMMANDS[args.command](doc, outdir)
    except InvalidInputError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ElasticaError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
