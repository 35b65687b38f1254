"""Energy functionals on discrete curves and their first variation.

The functional is ``bending + length_term + linear_term`` with
bending = integral of kappa^2 ds, length_term = lambda^2 * L and, in
navier mode, linear_term = -2 alpha * integral of kappa ds. Its L^2
gradient has normal component V = 2 kappa_ss + kappa^3 - lambda^2 kappa.
"""

import json
from dataclasses import dataclass

import numpy as np

from .curve import _extrapolate_ends, curvature, tangent_normal
from .errors import InvalidInputError, PreconditionError

_MODES = ("clamped", "navier")


@dataclass(frozen=True)
class EnergyParams:
    """Parameters of the energy functional.

    Parameters
    ----------
    lam : float
        Nonzero length-penalty parameter (units 1/length).
    alpha : float
        Boundary curvature value used by the navier-mode linear term.
    mode : str
        Either ``"clamped"`` or ``"navier"``.
    """

    lam: float
    alpha: float = 0.0
    mode: str = "clamped"

    def __post_init__(self):
        if self.lam == 0.0 or not np.isfinite(self.lam):
            raise InvalidInputError("lam must be finite and nonzero")
        if not np.isfinite(self.alpha):
            raise InvalidInputError("alpha must be finite")
        if self.mode not in _MODES:
            raise InvalidInputError(f"mode must be one of {_MODES}")

    @property
    def has_coercivity(self):
        """Whether the lower bound on the energy is guaranteed."""
        return self.mode == "clamped" or abs(self.alpha) < abs(self.lam)


@dataclass(frozen=True)
class EnergyReport:
    """Decomposed energy of a single curve.

    ``total == bending + length_term + linear_term`` holds to 1e-12.
    """

    total: float
    bending: float
    length_term: float
    linear_term: float
    gradient_norm_sq: float

    def as_dict(self):
        return {
            "total": self.total,
            "bending": self.bending,
            "length_term": self.length_term,
            "linear_term": self.linear_term,
            "gradient_norm_sq": self.gradient_norm_sq,
        }

    def to_json(self):
        return json.dumps(self.as_dict())

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


def potential_F(kappa, lam):
    """Quartic curvature potential kappa^4/4 - lam^2 kappa^2/2."""
    kappa = np.asarray(kappa, dtype=float)
    out = 0.25 * kappa**4 - 0.5 * lam * lam * kappa**2
    return float(out) if out.ndim == 0 else out


def velocity_field(curve, params):
    """Nodal field V = 2 kappa_ss + kappa^3 - lam^2 kappa.

    The flow moves the curve with normal speed -V. ``kappa_ss`` is
    obtained by centered differencing of the curvature field on the
    arclength grid.
    """
    s = curve.arclength
    k = _extrapolate_ends(curvature(curve), s)
    k_ss = np.gradient(np.gradient(k, s, edge_order=2), s, edge_order=2)
    return 2.0 * k_ss + k**3 - params.lam**2 * k


def energy(curve, params):
    """Evaluate the energy of a curve; returns an EnergyReport.

    Integrals use the trapezoid rule on the arclength grid, matching
    the second-order accuracy of the curvature stencils.
    """
    s = curve.arclength
    k = curvature(curve)
    bending = float(np.trapezoid(k**2, s))
    length_term = params.lam**2 * curve.length
    if params.mode == "navier":
        linear_term = -2.0 * params.alpha * float(np.trapezoid(k, s))
    else:
        linear_term = 0.0
    v = velocity_field(curve, params)
    grad_sq = float(np.trapezoid(v**2, s))
    return EnergyReport(
        total=bending + length_term + linear_term,
        bending=bending,
        length_term=length_term,
        linear_term=linear_term,
        gradient_norm_sq=grad_sq,
    )


def _golden_max(f, lo, hi, iters=100):
    """Golden-section maximization of a unimodal f on [lo, hi]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return max(fc, fd)


def coercivity_constant(params):
    """Best constant C with total >= C * max{bending, length}.

    Maximizes min{1 - eps, lam^2 - alpha^2/eps} over the admissible
    interval eps in (alpha^2/lam^2, 1) by golden-section search.
    """
    if params.mode != "navier":
        raise PreconditionError("coercivity bound applies in navier mode")
    if not params.has_coercivity:
        raise PreconditionError("coercivity requires |alpha| < |lam|")
    lam2 = params.lam**2
    a2 = params.alpha**2
    lo = a2 / lam2
    pad = 1e-12 * (1.0 - lo)

    def f(eps):
        return min(1.0 - eps, lam2 - a2 / eps) if eps > 0 else 1.0 - eps

    if params.alpha == 0.0:
        # the inner function is monotone; the supremum sits at eps -> 0
        return min(1.0, lam2)
    return _golden_max(f, lo + pad, 1.0 - pad)


def coercivity_check(curve, params):
    """Test the energy lower bound on one curve.

    Returns ``(bound_holds, constant)`` where the bound is
    total >= constant * max{integral kappa^2 ds, length}.
    """
    const = coercivity_constant(params)
    rep = energy(curve, params)
    lhs = rep.total
    rhs = const * max(rep.bending, curve.length)
    slack = 1e-10 * max(1.0, abs(lhs))
    return bool(lhs >= rhs - slack), const


def first_variation_check(curve, params, bump, h=1e-5):
    """Compare the analytic directional derivative to a finite difference.

    The analytic side is the integral of V * bump ds; the other side is
    the centered quotient [E(gamma + h*bump*nu) - E(gamma - h*bump*nu)]
    / (2h) of the same discrete energy. Returns the relative
    discrepancy, normalized by max(1, |fd|).
    """
    bump = np.asarray(bump, dtype=float)
    if bump.shape != (curve.points.shape[0],):
        raise InvalidInputError("bump must be a nodal scalar field")
    if abs(bump[0]) > 1e-14 or abs(bump[-1]) > 1e-14:
        raise PreconditionError("bump must vanish at both endpoints")
    s = curve.arclength
    v = velocity_field(curve, params)
    analytic = float(np.trapezoid(v * bump, s))

    from .curve import DiscreteCurve

    _, nu = tangent_normal(curve)
    offset = h * bump[:, None] * nu
    e_plus = energy(DiscreteCurve(curve.points + offset), params).total
    e_minus = energy(DiscreteCurve(curve.points - offset), params).total
    fd = (e_plus - e_minus) / (2.0 * h)
    return abs(analytic - fd) / max(1.0, abs(fd))
