"""Retarded-time quadrature, power-law tails and decay fits.

Integrals over ``u in (-inf, inf)`` are split into the sampled interior and
two analytic tails.  A tail assumes ``|f| ~ C (1 + |u|)^(-p)`` beyond the
last sample, with ``p`` fitted on the outer half of that side of the grid,
so that ``int_{u_end}^{inf} f du = f(u_end) (1 + |u_end|) / (p - 1)``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, RangeError

NEGLIGIBLE = 1e-15


def check_u_grid(u):
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size < 3:
        raise RangeError("u grid needs at least 3 samples", field="u_grid")
    if np.any(np.diff(u) <= 0):
        raise RangeError("u grid must be strictly increasing", field="u_grid")
    return u


@dataclass
class PowerLawFit:
    exponent: float        # fitted slope of log|f| against log(1 + |u|)
    constant: float        # C in |f| ~ C (1 + |u|)^exponent
    residual: float        # RMS of the log-log fit residuals
    n_points: int
    degenerate: bool = False


def fit_power_law(u, envelope):
    """Least-squares fit of ``log envelope`` against ``log(1 + |u|)``.

    Non-positive samples are skipped; fewer than three usable samples gives a
    degenerate fit (exponent ``-inf``).
    """
    u = np.asarray(u, dtype=float)
    env = np.asarray(envelope, dtype=float)
    ok = env > 0
    if ok.sum() < 3:
        return PowerLawFit(-np.inf, 0.0, 0.0, int(ok.sum()), degenerate=True)
    x = np.log1p(np.abs(u[ok]))
    y = np.log(env[ok])
    A = np.stack([x, np.ones_like(x)], axis=1)
    (slope, icept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ np.array([slope, icept])
    with np.errstate(over="ignore"):
        const = np.exp(icept)
    return PowerLawFit(float(slope), float(const),
                       float(np.sqrt(np.mean(resid**2))), int(ok.sum()))


def sup_envelope(values):
    """``max |values|`` over all non-time axes (time is axis 0)."""
    v = np.abs(np.asarray(values))
    return v.reshape(v.shape[0], -1).max(axis=1)


def outer_half(u, side):
    """Mask of samples on one side of the grid with ``|u| >= max|u| / 2``."""
    if side > 0:
        edge = u[-1]
        return (u > 0) & (u >= edge / 2) if edge > 0 else np.zeros(u.shape, bool)
    edge = u[0]
    return (u < 0) & (u <= edge / 2) if edge < 0 else np.zeros(u.shape, bool)


@dataclass
class Tails:
    minus: np.ndarray        # int_{-inf}^{u_0} f du
    plus: np.ndarray         # int_{u_end}^{inf} f du
    exponent_minus: float
    exponent_plus: float


def tail_integrals(u, values):
    """Power-law tail integrals beyond both ends of the grid (pointwise)."""
    u = np.asarray(u, dtype=float)
    values = np.asarray(values, dtype=float)
    scale = np.max(np.abs(values)) if values.size else 0.0
    out = []
    for side, idx in ((-1, 0), (1, -1)):
        end = values[idx]
        if scale == 0 or np.max(np.abs(end)) <= NEGLIGIBLE * scale:
            out.append((np.zeros_like(end), np.nan))
            continue
        mask = outer_half(u, side)
        fit = fit_power_law(u[mask], sup_envelope(values[mask]))
        p = -fit.exponent
        if fit.degenerate or p <= 1.0:
            raise DomainError(
                f"tail on the {'negative' if side < 0 else 'positive'} side decays like "
                f"(1+|u|)^{fit.exponent:.3g}, which is not integrable", field="u_grid")
        out.append((end * (1.0 + abs(u[idx])) / (p - 1.0), -p))
    (tm, pm), (tp, pp) = out
    return Tails(tm, tp, pm, pp)


def trapezoid_weights(u):
    u = np.asarray(u, dtype=float)
    w = np.zeros_like(u)
    h = np.diff(u)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


def cumulative_trapezoid(u, values):
    """``int_{u_0}^{u_i} f du`` for every node (axis 0), starting at 0."""
    values = np.asarray(values, dtype=float)
    h = np.diff(u).reshape((-1,) + (1,) * (values.ndim - 1))
    inc = 0.5 * h * (values[1:] + values[:-1])
    return np.concatenate([np.zeros_like(values[:1]), np.cumsum(inc, axis=0)])


def integrate_u(u, values, tail=True):
    """``int f du`` over the real line: trapezoid interior plus tails.

    Returns ``(total, interior, tails)``; ``tails`` is None when disabled.
    """
    interior = np.tensordot(trapezoid_weights(u), np.asarray(values, dtype=float), axes=(0, 0))
    if not tail:
        return interior, interior, None
    t = tail_integrals(u, values)
    return interior + t.minus + t.plus, interior, t


def spline(u, values):
    """Not-a-knot cubic spline along axis 0."""
    return CubicSpline(u, values, axis=0)


def cumulative_spline(u, values):
    """``int_{u_0}^{u_i} f du`` of the cubic interpolant, at every node."""
    anti = spline(u, values).antiderivative()
    return anti(u) - anti(u[0])


def derivative(u, values):
    """``df/du`` at the nodes from the cubic interpolant."""
    return spline(u, values)(u, 1)
