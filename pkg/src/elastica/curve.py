"""Discrete open planar curves and purely geometric operators.

A curve is a polyline sample of an open arc in the plane. Arclength
resampling goes through a cubic-spline interpolant so that positions are
fourth-order accurate; all derivative stencils are second order, centered
in the interior and one-sided at the endpoints.
"""

import csv
import io
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from ._kernels import directed_hausdorff
from .errors import InvalidInputError

MIN_NODES = 9  # n >= 8 segments, needed by the fourth-order stencils

_ROT90 = np.array([[0.0, -1.0], [1.0, 0.0]])

# 5-point Gauss-Legendre rule on [0, 1]
_GL_X = 0.5 * (1.0 + np.array(
    [-0.9061798459386640, -0.5384693101056831, 0.0,
     0.5384693101056831, 0.9061798459386640]))
_GL_W = 0.5 * np.array(
    [0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
     0.4786286704993665, 0.2369268850561891])


@dataclass(frozen=True)
class DiscreteCurve:
    """Polyline sample of an open planar curve.

    ``points`` has shape (n+1, 2). ``param`` is either the string
    ``"uniform"`` or an explicit increasing parameter in [0, 1].
    """

    points: np.ndarray
    param: object = "uniform"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidInputError("points must have shape (n+1, 2)")
        if pts.shape[0] < MIN_NODES:
            raise InvalidInputError(
                f"need at least {MIN_NODES} nodes, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("points contain NaN or inf")
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if np.any(seg <= 0.0):
            raise InvalidInputError("consecutive points must be distinct")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n_segments(self):
        return self.points.shape[0] - 1

    @cached_property
    def segment_lengths(self):
        return np.linalg.norm(np.diff(self.points, axis=0), axis=1)

    @cached_property
    def arclength(self):
        """Cumulative polyline arclength at each node."""
        return np.concatenate(([0.0], np.cumsum(self.segment_lengths)))

    @property
    def length(self):
        return float(self.arclength[-1])

    @property
    def spacing(self):
        """Mean node spacing; equals every spacing on a uniform curve."""
        return self.length / self.n_segments

    def is_arclength_uniform(self, rtol=1e-8):
        seg = self.segment_lengths
        return bool(np.max(np.abs(seg - self.spacing)) <= rtol * self.spacing)

    # -- serialization ---------------------------------------------------

    def to_csv(self, path_or_buf):
        text = "x,y\n" + "\n".join(
            f"{p[0]:.17g},{p[1]:.17g}" for p in self.points) + "\n"
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as fh:
                fh.write(text)

    @classmethod
    def from_csv(cls, path_or_buf):
        if hasattr(path_or_buf, "read"):
            fh = path_or_buf
            rows = list(csv.reader(fh))
        else:
            with open(path_or_buf) as fh:
                rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0]] != ["x", "y"]:
            raise InvalidInputError("curve CSV must start with header 'x,y'")
        pts = np.array([[float(r[0]), float(r[1])] for r in rows[1:] if r])
        return cls(pts)

    def to_json(self, path_or_buf=None):
        doc = {"points": [[float(f"{p[0]:.17g}"), float(f"{p[1]:.17g}")]
                          for p in self.points]}
        if path_or_buf is None:
            return json.dumps(doc)
        if hasattr(path_or_buf, "write"):
            json.dump(doc, path_or_buf)
        else:
            with open(path_or_buf, "w") as fh:
                json.dump(doc, fh)

    @classmethod
    def from_json(cls, source):
        if hasattr(source, "read"):
            doc = json.load(source)
        elif isinstance(source, str) and source.lstrip().startswith("{"):
            doc = json.loads(source)
        else:
            with open(source) as fh:
                doc = json.load(fh)
        return cls(np.asarray(doc["points"], dtype=float))


# -- derivative stencils ------------------------------------------------

def _derivatives(points, t):
    """First and second derivatives of a sampled path w.r.t. parameter t.

    Three-point Lagrange stencils, second order on smoothly graded grids;
    one-sided at the two endpoints.
    """
    pts = np.asarray(points, dtype=float)
    t = np.asarray(t, dtype=float)
    n = pts.shape[0]
    d1 = np.empty_like(pts)
    d2 = np.empty_like(pts)

    h = (t[-1] - t[0]) / (n - 1)
    if np.max(np.abs(np.diff(t) - h)) <= 1e-9 * h:
        d1[1:-1] = (pts[2:] - pts[:-2]) / (2.0 * h)
        d2[1:-1] = (pts[2:] - 2.0 * pts[1:-1] + pts[:-2]) / (h * h)
        w1 = np.array([-11.0 / 6.0, 3.0, -1.5, 1.0 / 3.0]) / h
        w2 = np.array([2.0, -5.0, 4.0, -1.0]) / (h * h)
        d1[0] = w1 @ pts[:4]
        d2[0] = w2 @ pts[:4]
        d1[-1] = -w1[::-1] @ pts[-4:]
        d2[-1] = w2[::-1] @ pts[-4:]
        return d1, d2

    tm, t0, tp = t[:-2], t[1:-1], t[2:]
    a, b = t0 - tm, tp - t0
    pm, p0, pp = pts[:-2], pts[1:-1], pts[2:]
    d1[1:-1] = (
        -(b / (a * (a + b)))[:, None] * pm
        + ((b - a) / (a * b))[:, None] * p0
        + (a / (b * (a + b)))[:, None] * pp
    )
    d2[1:-1] = 2.0 * (
        (1.0 / (a * (a + b)))[:, None] * pm
        - (1.0 / (a * b))[:, None] * p0
        + (1.0 / (b * (a + b)))[:, None] * pp
    )

    # one-sided 4-point stencils keep the second derivative second order
    for idx, sl in ((0, slice(0, 4)), (n - 1, slice(n - 4, n))):
        w = _fornberg_weights(t[sl], t[idx], 2)
        d1[idx] = w[1] @ pts[sl]
        d2[idx] = w[2] @ pts[sl]
    return d1, d2


def _fornberg_weights(ts, x0, max_order):
    """Finite-difference weights at x0 for derivatives 0..max_order.

    Fornberg's recursion for arbitrarily spaced nodes.
    """
    ts = np.asarray(ts, dtype=float)
    n = len(ts)
    c = np.zeros((n, max_order + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = ts[0] - x0
    for i in range(1, n):
        mn = min(i, max_order)
        c2 = 1.0
        c5 = c4
        c4 = ts[i] - x0
        for j in range(i):
            c3 = ts[i] - ts[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1]
                                    - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c.T


def _extrapolate_ends(f, s):
    """Replace endpoint samples of f by cubic extrapolation from inside.

    Used on derived fields (e.g. curvature) whose one-sided endpoint
    stencils carry a different error constant than the interior; the
    jump would pollute any further differencing of the field.
    """
    f = np.array(f, dtype=float)
    h = (s[-1] - s[0]) / (len(s) - 1)
    if np.max(np.abs(np.diff(s) - h)) <= 1e-9 * h:
        f[0] = 4.0 * f[1] - 6.0 * f[2] + 4.0 * f[3] - f[4]
        f[-1] = 4.0 * f[-2] - 6.0 * f[-3] + 4.0 * f[-4] - f[-5]
    else:
        f[0] = _fornberg_weights(s[1:5], s[0], 0)[0] @ f[1:5]
        f[-1] = _fornberg_weights(s[-5:-1], s[-1], 0)[0] @ f[-5:-1]
    return f


def tangent_normal(curve):
    """Unit tangent and unit normal (tangent rotated by +pi/2) per node."""
    t = curve.arclength
    d1, _ = _derivatives(curve.points, t)
    speed = np.linalg.norm(d1, axis=1)
    tau = d1 / speed[:, None]
    nu = tau @ _ROT90.T
    return tau, nu


def curvature(curve):
    """Signed curvature kappa = gamma_xx . R gamma_x / |gamma_x|^3."""
    t = curve.arclength
    d1, d2 = _derivatives(curve.points, t)
    speed = np.linalg.norm(d1, axis=1)
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    return cross / speed**3


# -- arclength resampling ----------------------------------------------

def _spline_arclength_table(spline, t_knots, refine=8):
    """Dense cumulative arclength of a parametric spline.

    Each knot interval is subdivided ``refine`` times and integrated with
    5-point Gauss-Legendre, which is machine accurate for the smooth
    speed of a cubic spline at this subdivision level.
    """
    frac = np.arange(refine) / refine
    grid = t_knots[:-1, None] + np.diff(t_knots)[:, None] * frac[None, :]
    t_dense = np.append(grid.ravel(), t_knots[-1])
    a, b = t_dense[:-1], t_dense[1:]
    nodes = a[:, None] + (b - a)[:, None] * _GL_X[None, :]
    speed = np.linalg.norm(spline(nodes.ravel(), 1).reshape(-1, 2), axis=1)
    seg = (speed.reshape(-1, 5) * _GL_W[None, :]).sum(axis=1) * (b - a)
    s_dense = np.concatenate(([0.0], np.cumsum(seg)))
    return t_dense, s_dense


def _gl_arc(spline, t0, t1):
    """Arclength of the spline between parameters t0 and t1 (vectorized)."""
    t0 = np.asarray(t0, dtype=float)
    t1 = np.asarray(t1, dtype=float)
    nodes = t0[..., None] + (t1 - t0)[..., None] * _GL_X
    speed = np.linalg.norm(
        spline(nodes.ravel(), 1).reshape(-1, 2), axis=1).reshape(nodes.shape)
    return (speed * _GL_W).sum(axis=-1) * (t1 - t0)


def resample_arclength(curve, n):
    """Resample to n+1 nodes at equal arclength along a cubic spline.

    Endpoints are preserved exactly. Raises on degenerate input.
    """
    if n < MIN_NODES - 1:
        raise InvalidInputError(f"need n >= {MIN_NODES - 1}")
    pts = curve.points
    t = curve.arclength  # chord parameter
    if t[-1] < 1e-12:
        raise InvalidInputError("degenerate curve: total length < 1e-12")
    spline = CubicSpline(t, pts, axis=0)

    t_dense, s_dense = _spline_arclength_table(spline, t)
    total = s_dense[-1]
    targets = np.linspace(0.0, total, n + 1)[1:-1]

    # bracket + Newton on s(t) - target, with s evaluated by local GL
    idx = np.clip(np.searchsorted(s_dense, targets) - 1, 0, len(s_dense) - 2)
    t_lo, s_lo = t_dense[idx], s_dense[idx]
    frac = (targets - s_lo) / np.diff(s_dense)[idx]
    tj = t_lo + frac * np.diff(t_dense)[idx]
    for _ in range(3):
        resid = s_lo + _gl_arc(spline, t_lo, tj) - targets
        speed = np.linalg.norm(spline(tj, 1), axis=1)
        tj = tj - resid / speed
    tj = np.clip(tj, t[0], t[-1])

    new_pts = np.empty((n + 1, 2))
    new_pts[0] = pts[0]
    new_pts[-1] = pts[-1]
    new_pts[1:-1] = spline(tj)
    return DiscreteCurve(new_pts)


def hausdorff_distance(a, b):
    """Hausdorff distance between two polylines (point-to-segment)."""
    pa = a.points if isinstance(a, DiscreteCurve) else np.asarray(a, float)
    pb = b.points if isinstance(b, DiscreteCurve) else np.asarray(b, float)
    return max(directed_hausdorff(pa, pb), directed_hausdorff(pb, pa))


def sobolev_norm(curve, k, p):
    """Scale-invariant Sobolev norm of the curvature.

    sum_{i<=k} L^{i+1-1/p} (integral |d^i_s kappa|^p ds)^{1/p}, with
    derivatives by repeated centered differencing and trapezoid
    integration on the arclength grid.
    """
    if p < 2:
        raise InvalidInputError("exponent p must be >= 2")
    if 2 * k + 2 > curve.n_segments:
        raise InvalidInputError("curve too coarse for requested order k")
    s = curve.arclength
    length = curve.length
    f = curvature(curve)
    total = 0.0
    for i in range(k + 1):
        integral = np.trapezoid(np.abs(f) ** p, s)
        total += length ** (i + 1.0 - 1.0 / p) * integral ** (1.0 / p)
        f = np.gradient(f, s, edge_order=2)
    return float(total)
