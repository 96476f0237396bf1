"""Radiative data at null infinity: energy flux, Bondi mass, shear calculus.

Geometric units (G = c = 1) throughout.  Time series of fields carry the
retarded-time axis first.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import timeseries as ts
from .errors import (AbsentFieldError, ConsistencyError, DomainError, IntegratorError,
                     RangeError)
from .sphere.fields import OneFormField, ScalarField, STTField
from .sphere.grid import SphereGrid

FIELD_KINDS = {
    "Xi": "stt", "A_F": "oneform", "A_W": "stt", "B_W": "oneform",
    "P_W": "scalar", "Q_W": "scalar", "P_F": "scalar", "Q_F": "scalar",
}

# exponents p in |X| <= C (1 + |u|)^(-p); P_W, Q_W with their sphere means removed
DECAY_BOUNDS = {
    "Xi": 1.5, "A_F": 1.5, "A_W": 2.5, "B_W": 1.5,
    "P_W": 0.5, "Q_W": 0.5, "P_F": 0.5, "Q_F": 0.5,
}
DECAY_SLACK = 0.1


@dataclass(frozen=True, eq=False)
class RadiativePayload:
    """Limits at null infinity sampled on a retarded-time grid.

    ``Xi`` (STT) is required; ``A_F`` may be None for vacuum data.  All
    optional series share ``grid`` and ``u``.
    """

    u: np.ndarray
    Xi: STTField
    A_F: Optional[OneFormField] = None
    A_W: Optional[STTField] = None
    B_W: Optional[OneFormField] = None
    P_W: Optional[ScalarField] = None
    Q_W: Optional[ScalarField] = None
    P_F: Optional[ScalarField] = None
    Q_F: Optional[ScalarField] = None
    Sigma_minus: Optional[STTField] = None
    M_minus: float = 0.0

    def __post_init__(self):
        u = ts.check_u_grid(self.u)
        object.__setattr__(self, "u", u)
        grid = self.Xi.grid
        if self.Sigma_minus is None:
            object.__setattr__(self, "Sigma_minus", STTField.zeros(grid))
        for name in FIELD_KINDS:
            f = getattr(self, name)
            if f is None:
                continue
            if f.grid != grid:
                raise RangeError(f"{name} lives on {f.grid}, expected {grid}", field=name)
            lead = _leading_shape(f)
            if lead != (u.size,):
                raise RangeError(f"{name} has time shape {lead}, expected ({u.size},)", field=name)
        if self.Sigma_minus.grid != grid or _leading_shape(self.Sigma_minus) != ():
            raise RangeError("Sigma_minus must be a single STT field on the payload grid",
                             field="Sigma_minus")

    @property
    def grid(self) -> SphereGrid:
        return self.Xi.grid

    def present(self):
        return [n for n in FIELD_KINDS if getattr(self, n) is not None]

    def index_of(self, u):
        hit = np.flatnonzero(np.isclose(self.u, u, rtol=0, atol=1e-12 * max(1.0, abs(u))))
        if hit.size == 0:
            raise RangeError(f"u={u!r} is not a node of the payload's u grid", field="u")
        return int(hit[0])


def _leading_shape(f):
    a = f.values if isinstance(f, ScalarField) else (f.theta if isinstance(f, OneFormField) else f.tt)
    return a.shape[:-2]


def flux_density(p):
    """Pointwise ``|Xi|^2 + |A_F|^2 / 2`` as an array ``(n_u, n_theta, n_phi)``."""
    dens = p.Xi.norm_sq()
    if p.A_F is not None:
        dens = dens + 0.5 * p.A_F.norm_sq()
    return dens


# -- mass loss ----------------------------------------------------------------

def mass_loss_rates(p):
    """``dM/du`` at every u node."""
    return p.grid.integrate(flux_density(p)) / (8 * np.pi)


def mass_loss_rate(p, u):
    """``dM/du = (1/8 pi) int (|Xi|^2 + |A_F|^2 / 2) dmu`` at a grid node."""
    i = p.index_of(u)
    return float(mass_loss_rates(p)[i])


@dataclass
class MassCurve:
    u: np.ndarray
    M: np.ndarray
    M_minus: float
    M_plus: float
    rate: np.ndarray
    tail_minus: float = 0.0
    tail_plus: float = 0.0

    @property
    def radiated(self):
        return self.M_plus - self.M_minus


def mass_curve(p, tail=True):
    """Bondi mass ``M(u) = M_minus + int_{-inf}^u dM/du``.

    Trapezoid rule on the grid; with ``tail`` the power-law extrapolation
    beyond both ends is added and reported separately.
    """
    rate = mass_loss_rates(p)
    cum = ts.cumulative_trapezoid(p.u, rate)
    tm = tp = 0.0
    if tail:
        t = ts.tail_integrals(p.u, rate)
        tm, tp = float(t.minus), float(t.plus)
    M = p.M_minus + tm + cum
    if np.any(np.diff(M) < 0):
        raise ConsistencyError("mass curve is not monotone", field="M")
    return MassCurve(p.u, M, float(p.M_minus), float(M[-1] + tp), rate, tm, tp)


# -- angular flux -------------------------------------------------------------

def memory_source(p, tail=True):
    """``F(w) = int (|Xi|^2 + |A_F|^2 / 2) du`` (no prefactor)."""
    total, _, _ = ts.integrate_u(p.u, flux_density(p), tail=tail)
    return ScalarField(p.grid, total)


def flux_per_solid_angle(p, tail=True):
    """Radiated energy per unit solid angle, ``(1/4 pi) (1/8) int (...) du``."""
    return memory_source(p, tail) * (1.0 / (32.0 * np.pi))


# -- shear calculus -----------------------------------------------------------

@dataclass
class SigmaSeries:
    Sigma: STTField          # Sigma(u) at every node
    Sigma_plus: STTField
    jump: STTField           # Sigma_plus - Sigma_minus = -int Xi du


def sigma_from_xi(p, tail=True):
    """``Sigma(u) = Sigma_minus - int_{-inf}^u Xi du'``.

    The interior integral uses the cubic-spline antiderivative of the
    samples; the tails are power-law extrapolations.
    """
    tt, tp = p.Xi.tt, p.Xi.tp
    parts = []
    for comp in (tt, tp):
        cum = ts.cumulative_spline(p.u, comp)
        if tail:
            t = ts.tail_integrals(p.u, comp)
            parts.append((cum + t.minus, cum[-1] + t.minus + t.plus))
        else:
            parts.append((cum, cum[-1]))
    (ctt, jtt), (ctp, jtp) = parts
    sm = p.Sigma_minus
    Sigma = STTField(p.grid, sm.tt - ctt, sm.tp - ctp)
    jump = STTField(p.grid, -jtt, -jtp)
    return SigmaSeries(Sigma, sm + jump, jump)


def xi_from_aw(p, tail=True):
    """``Xi(u) = -(1/4) int_{-inf}^u A_W du'`` with ``Xi -> 0`` as ``u -> -inf``."""
    if p.A_W is None:
        raise AbsentFieldError("payload carries no A_W", field="A_W")
    comps = []
    for comp in (p.A_W.tt, p.A_W.tp):
        cum = ts.cumulative_spline(p.u, comp)
        if tail:
            cum = cum + ts.tail_integrals(p.u, comp).minus
        comps.append(-0.25 * cum)
    return STTField(p.grid, *comps)


def aw_consistency(p):
    """Max of ``|dXi/du + A_W / 4|`` over interior nodes, relative to ``max |A_W| / 4``."""
    if p.A_W is None:
        raise AbsentFieldError("payload carries no A_W", field="A_W")
    r = []
    for xi, aw in ((p.Xi.tt, p.A_W.tt), (p.Xi.tp, p.A_W.tp)):
        r.append(ts.derivative(p.u, xi)[1:-1] + 0.25 * aw[1:-1])
    scale = 0.25 * max(np.max(np.abs(p.A_W.tt)), np.max(np.abs(p.A_W.tp)))
    num = max(np.max(np.abs(x)) for x in r)
    return float(num / scale) if scale > 0 else float(num)


# -- decay --------------------------------------------------------------------

@dataclass
class DecayFit:
    name: str
    bound: float             # required decay exponent p in (1+|u|)^-p
    exponent: float
    constant: float
    residual: float
    n_points: int
    degenerate: bool
    passed: bool


@dataclass
class DecayReport:
    fits: dict = field(default_factory=dict)
    slack: float = DECAY_SLACK

    @property
    def passed(self):
        return all(f.passed for f in self.fits.values())

    def __getitem__(self, name):
        return self.fits[name]


def pointwise_norm(p, name):
    f = getattr(p, name)
    if isinstance(f, STTField):
        return np.sqrt(f.norm_sq())
    if isinstance(f, OneFormField):
        return np.sqrt(f.norm_sq())
    v = f.values
    if name in ("P_W", "Q_W"):
        v = v - p.grid.mean(v)[:, None, None]
    return np.abs(v)


def decay_report(p, slack=DECAY_SLACK):
    """Fit sup-norm envelopes over the outer half of the grid (both sides).

    A quantity passes iff its fitted exponent is at most ``-bound + slack``.
    """
    span = np.max(np.abs(p.u))
    if span < 10:
        raise RangeError(f"u grid spans only |u| <= {span:g}; need >= 10", field="u_grid")
    mask = ts.outer_half(p.u, -1) | ts.outer_half(p.u, 1)
    rep = DecayReport(slack=slack)
    for name in p.present():
        env = ts.sup_envelope(pointwise_norm(p, name))
        fit = ts.fit_power_law(p.u[mask], env[mask])
        bound = DECAY_BOUNDS[name]
        passed = fit.degenerate or fit.exponent <= -bound + slack
        rep.fits[name] = DecayFit(name, bound, fit.exponent, fit.constant, fit.residual,
                                  fit.n_points, fit.degenerate, bool(passed))
    return rep


# -- area radius ----------------------------------------------------------------

@dataclass
class RadiusTrajectory:
    t: np.ndarray
    r: np.ndarray
    coefficient: float       # fitted b in r - t = a + b log t over the last decade
    intercept: float
    steps_per_decade: int


def _radius_run(M, r0, t0, t1, steps_per_decade):
    n = max(int(np.ceil(steps_per_decade * np.log10(t1 / t0))), 1)
    t = t0 * (t1 / t0) ** (np.arange(n + 1) / n)
    t[0], t[-1] = t0, t1
    r = np.empty_like(t)
    r[0] = r0

    def rhs(x):
        return 1.0 - 2.0 * M / x

    for i in range(n):
        h = t[i + 1] - t[i]
        x = r[i]
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        r[i + 1] = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if r[i + 1] <= 2 * M:
            raise DomainError(f"r reached 2M at t={t[i + 1]:.6g}", field="r0")
    return t, r


def _log_fit(t, r):
    sel = t >= t[-1] / 10
    A = np.stack([np.log(t[sel]), np.ones(sel.sum())], axis=1)
    (b, a), *_ = np.linalg.lstsq(A, r[sel] - t[sel], rcond=None)
    return float(b), float(a)


def area_radius(M_inf, r0, t0, t1, steps_per_decade=64, rtol=1e-3, max_halvings=12):
    """Integrate ``dr/dt = 1 - 2 M_inf / r`` from ``r(t0) = r0`` to ``t1``.

    Classical RK4 on a geometric step schedule (fixed, not adaptive),
    halving the steps until the fitted log coefficient changes by less
    than ``rtol``.
    """
    if not r0 > 4 * M_inf:
        raise DomainError(f"r0={r0} must exceed 4 M_inf={4 * M_inf}", field="r0")
    if not (0 < t0 < t1):
        raise DomainError("need 0 < t0 < t1", field="t_span")
    prev = None
    for _ in range(max_halvings):
        t, r = _radius_run(M_inf, r0, t0, t1, steps_per_decade)
        b, a = _log_fit(t, r)
        if prev is not None and abs(b - prev) <= rtol * max(abs(b), 1e-300):
            break
        if M_inf == 0:
            break
        prev = b
        steps_per_decade *= 2
    else:
        raise IntegratorError(f"log coefficient did not settle to rtol={rtol} after "
                              f"{max_halvings} halvings", field="steps")
    return RadiusTrajectory(t, r, b, a, steps_per_decade)
