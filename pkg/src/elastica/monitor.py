"""Convergence diagnostics for flow trajectories.

Measures the distance from a curve to a set of stationary curves, the
Lipschitz behavior of that distance along a trajectory, and issues a
final convergence verdict combining gradient decay, distance decay, and
stability of the nearest equilibrium.
"""

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .catalog import EquilibriumRecord
from .curve import hausdorff_distance, resample_arclength
from .energy import EnergyParams, velocity_field
from .errors import InvalidInputError


@dataclass(frozen=True)
class ConvergenceVerdict:
    """Outcome of the convergence analysis of one trajectory.

    ``converged`` implies ``final_distance`` and ``final_grad_norm`` are
    below their tolerances and the nearest catalog member was stable
    over the trailing snapshots.
    """

    converged: bool
    limit: Optional[EquilibriumRecord]
    final_grad_norm: float
    final_distance: float
    dt_lipschitz_estimate: float

    def as_dict(self):
        return {
            "converged": self.converged,
            "limit_E": None if self.limit is None else self.limit.E,
            "limit_segment": None if self.limit is None
            else self.limit.segment,
            "final_grad_norm": self.final_grad_norm,
            "final_distance": self.final_distance,
            "dt_lipschitz_estimate": self.dt_lipschitz_estimate,
        }

    def to_json(self):
        return json.dumps(self.as_dict())


def distance_to_set(curve, catalog):
    """Minimum Hausdorff distance from a curve to a catalog.

    Each catalog member is compared both directly and reflected across
    the chord axis. Returns ``(distance, argmin_index)``.
    """
    if not catalog:
        raise InvalidInputError("catalog must be nonempty")
    pts = curve.points
    best = np.inf
    best_i = -1
    flip = np.array([1.0, -1.0])
    for i, rec in enumerate(catalog):
        d = hausdorff_distance(pts, rec.curve.points)
        d = min(d, hausdorff_distance(pts, rec.curve.points * flip))
        if d < best:
            best, best_i = d, i
    return float(best), best_i


def lipschitz_estimate(traj, catalog):
    """Observed time-Lipschitz constant of the distance to the catalog.

    Returns ``(estimate, speed_bound)`` where the estimate is the max of
    |d(t2) - d(t1)| / (t2 - t1) over consecutive snapshots and the
    speed bound is the observed sup-norm of the normal velocity field
    along the trajectory.
    """
    if len(traj.states) < 2:
        raise InvalidInputError("need at least two snapshots")
    p = traj.config.get("params", {})
    params = EnergyParams(lam=p.get("lam", 1.0), alpha=p.get("alpha", 0.0),
                          mode=p.get("mode", "clamped"))
    dists = np.array([distance_to_set(s.curve, catalog)[0]
                      for s in traj.states])
    times = traj.times
    dt = np.diff(times)
    good = dt > 0
    est = float(np.max(np.abs(np.diff(dists))[good] / dt[good])) \
        if np.any(good) else 0.0
    speed = max(float(np.max(np.abs(velocity_field(s.curve, params))))
                for s in traj.states)
    return est, speed


def verdict(traj, catalog, tol=None):
    """Final convergence verdict for a terminated trajectory.

    Converged iff the final gradient norm is below ``tol["grad"]``, the
    final distance to the catalog is below ``tol["dist"]`` at both the
    position level (Hausdorff) and the curvature level (sup-norm after
    common resampling), the distance sequence over the last 10
    snapshots is non-increasing up to 1e-10, and the nearest catalog
    member is the same over those snapshots.
    """
    tol = dict(tol or {})
    grad_tol = float(tol.get("grad", 1e-6))
    dist_tol = float(tol.get("dist", 1e-3))
    if not traj.states:
        raise InvalidInputError("trajectory has no snapshots")

    tail = traj.states[-10:]
    pairs = [distance_to_set(s.curve, catalog) for s in tail]
    dists = np.array([p[0] for p in pairs])
    idxs = [p[1] for p in pairs]
    final_d, final_i = pairs[-1]
    final_grad = float(np.sqrt(
        max(traj.states[-1].report.gradient_norm_sq, 0.0)))

    non_increasing = bool(np.all(np.diff(dists) <= 1e-10))
    stable_index = len(set(idxs)) == 1

    # curvature-level proxy: sup-norm gap of curvature fields after
    # resampling both curves to a common node count
    from .curve import curvature

    rec = catalog[final_i]
    m = max(rec.curve.n_segments, traj.states[-1].curve.n_segments)
    ka = curvature(resample_arclength(traj.states[-1].curve, m))
    kb = curvature(resample_arclength(rec.curve, m))
    kink = float(np.min([np.max(np.abs(ka - kb)),
                         np.max(np.abs(ka + kb[::-1]))]))

    est, _ = lipschitz_estimate(traj, catalog) \
        if len(traj.states) >= 2 else (0.0, 0.0)
    converged = (final_grad < grad_tol and final_d < dist_tol
                 and kink < dist_tol and non_increasing
                 and stable_index)
    return ConvergenceVerdict(
        converged=bool(converged),
        limit=rec if converged else None,
        final_grad_norm=final_grad,
        final_distance=float(final_d),
        dt_lipschitz_estimate=float(est),
    )
