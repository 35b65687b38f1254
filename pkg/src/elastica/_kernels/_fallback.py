"""Pure-NumPy implementations of the hot kernels.

Used when the compiled extension is unavailable. Signatures and results
match ``_core`` to rounding error; the compiled module exists purely for
speed.
"""

import numpy as np
from scipy.linalg import solve_banded

BACKEND = "fallback"


def solve_pentadiagonal(l2, l1, d, u1, u2, rhs):
    """Solve a pentadiagonal system given its five diagonals.

    Parameters
    ----------
    l2, l1 : (n-2,), (n-1,) arrays
        Sub-diagonals at offsets -2 and -1.
    d : (n,) array
        Main diagonal.
    u1, u2 : (n-1,), (n-2,) arrays
        Super-diagonals at offsets +1 and +2.
    rhs : (n,) or (n, m) array
        Right-hand side(s).

    Returns
    -------
    (n,) or (n, m) ndarray
    """
    n = d.shape[0]
    ab = np.zeros((5, n))
    ab[0, 2:] = u2
    ab[1, 1:] = u1
    ab[2, :] = d
    ab[3, :-1] = l1
    ab[4, :-2] = l2
    return solve_banded((2, 2), ab, rhs)


def integrate_orbit(kappa0, p0, theta0, lam, h, n_nodes, substeps):
    """Integrate the stationary-curvature system along arclength.

    The state is (kappa, kappa_s, theta, x, y) with
    kappa'' = (lam^2 kappa - kappa^3) / 2, theta' = kappa and
    (x', y') = (cos theta, sin theta). Classic RK4 with ``substeps``
    sub-intervals per stored node of spacing ``h``.

    Returns
    -------
    (n_nodes + 1, 5) ndarray of node states.
    """
    lam2 = lam * lam
    dt = h / substeps
    out = np.empty((n_nodes + 1, 5))
    y = np.array([kappa0, p0, theta0, 0.0, 0.0], dtype=float)
    out[0] = y

    def f(y):
        k, p, th = y[0], y[1], y[2]
        return np.array(
            [p, 0.5 * (lam2 * k - k * k * k), k, np.cos(th), np.sin(th)]
        )

    for i in range(1, n_nodes + 1):
        for _ in range(substeps):
            k1 = f(y)
            k2 = f(y + 0.5 * dt * k1)
            k3 = f(y + 0.5 * dt * k2)
            k4 = f(y + dt * k3)
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i] = y
    return out


def directed_hausdorff(pts, poly):
    """sup over ``pts`` of the distance to the polyline ``poly``.

    Distances are point-to-segment, not point-to-vertex.
    """
    pts = np.asarray(pts, dtype=float)
    a = np.asarray(poly, dtype=float)[:-1]
    b = np.asarray(poly, dtype=float)[1:]
    ab = b - a
    ab2 = np.einsum("ij,ij->i", ab, ab)
    ab2 = np.where(ab2 > 0.0, ab2, 1.0)
    # project every point onto every segment, clamp to [0, 1]
    ap = pts[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("pij,ij->pi", ap, ab) / ab2, 0.0, 1.0)
    closest = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    d2 = np.sum((pts[:, None, :] - closest) ** 2, axis=2)
    return float(np.sqrt(np.max(np.min(d2, axis=1))))
