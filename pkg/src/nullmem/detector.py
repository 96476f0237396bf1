"""Free test masses driven by the radiative field (Jacobi equation).

Index convention: ``x[..., A, B] = x^A_(B)``, the A-th horizontal coordinate
(``A = 1, 2`` along ``e_theta, e_phi`` at the detector direction) of test
mass ``B``, measured from the reference mass.  The vertical coordinate
(along the propagation direction) is carried separately.  Detector time is
identified with retarded time.
"""

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import radiation
from . import timeseries as ts
from .errors import DomainError, IntegratorError

EYE = np.eye(2)


@dataclass
class DetectorConfig:
    d0: float
    r: float
    direction: tuple = (np.pi / 2, 0.0)      # (theta, phi) of the source direction
    include_em_correction: bool = False
    linearize: bool = True                   # substitute initial positions on the right side

    def __post_init__(self):
        if not self.d0 > 0:
            raise DomainError(f"d0 must be positive, got {self.d0}", field="d0")
        if not self.r > 0:
            raise DomainError(f"r must be positive, got {self.r}", field="r")
        if self.d0 / self.r > 1e-2:
            warnings.warn(f"d0/r = {self.d0 / self.r:.3g} is not small", RuntimeWarning,
                          stacklevel=2)


def stt_at(field, direction):
    """``(..., 2, 2)`` component matrix of an STT series at one direction."""
    theta, phi = direction
    tt = field.grid.interpolate(field.tt, theta, phi)
    tp = field.grid.interpolate(field.tp, theta, phi)
    return np.stack([np.stack([tt, tp], -1), np.stack([tp, -tt], -1)], -2)


def oneform_at(field, direction):
    theta, phi = direction
    return np.stack([field.grid.interpolate(field.theta, theta, phi),
                     field.grid.interpolate(field.phi, theta, phi)], -1)


@dataclass
class DriveSeries:
    t: np.ndarray
    samples: np.ndarray                       # (n_t, 2, 2)
    at: Callable                              # t -> (..., 2, 2)
    source: str


def drive_tensor(p, direction, use_aw=None):
    """Curvature drive ``A_AB(u) = -4 dXi_AB/du`` at one direction.

    Uses the stored ``A_W`` when present (or when ``use_aw`` is True);
    otherwise differentiates the cubic interpolant of ``Xi``.
    """
    if use_aw is None:
        use_aw = p.A_W is not None
    if use_aw:
        samples = stt_at(p.A_W, direction)
        sp = ts.spline(p.u, samples)
        return DriveSeries(p.u, samples, sp, "A_W")
    xi = ts.spline(p.u, stt_at(p.Xi, direction))
    dxi = xi.derivative()

    def at(t):
        return -4.0 * dxi(t)

    return DriveSeries(p.u, at(p.u), at, "Xi")


@dataclass
class DetectorTrace:
    t: np.ndarray
    positions: np.ndarray          # (n_t, 2, 2): x^A_(B)
    velocities: np.ndarray
    vertical: np.ndarray           # (n_t, 2): x^3_(B)
    displacement: np.ndarray       # (2, 2): x(t_end) - x(t_start)
    substeps: int = 0


def _em_series(p, direction):
    if p.A_F is None:
        return None
    af = ts.spline(p.u, oneform_at(p.A_F, direction))
    return lambda t: np.sum(af(t) ** 2, axis=-1)


def _run(cfg, drive, em, n_sub):
    t = drive.t
    h = np.diff(t)[:, None] / n_sub
    starts = t[:-1, None] + h * np.arange(n_sub)[None, :]
    starts, h = starts.ravel(), np.broadcast_to(h, (h.shape[0], n_sub)).ravel()
    A0, Am, A1 = drive.at(starts), drive.at(starts + h / 2), drive.at(starts + h)
    c1 = -1.0 / (4.0 * cfg.r)
    if em is not None:
        c2 = -1.0 / (8.0 * cfg.r**2)
        E0, Em, E1 = em(starts), em(starts + h / 2), em(starts + h)
        A0 = A0 * c1 + c2 * E0[:, None, None] * EYE
        Am = Am * c1 + c2 * Em[:, None, None] * EYE
        A1 = A1 * c1 + c2 * E1[:, None, None] * EYE
    else:
        A0, Am, A1 = A0 * c1, Am * c1, A1 * c1

    x = cfg.d0 * EYE.copy()
    v = np.zeros((2, 2))
    xs = np.empty((t.size, 2, 2))
    vs = np.empty((t.size, 2, 2))
    xs[0], vs[0] = x, v
    x_init = cfg.d0 * EYE
    for i in range(starts.size):
        hi = h[i]
        if cfg.linearize:
            a0 = A0[i] @ x_init
            am = Am[i] @ x_init
            a1 = A1[i] @ x_init
            k1x, k1v = v, a0
            k2x, k2v = v + 0.5 * hi * k1v, am
            k3x, k3v = v + 0.5 * hi * k2v, am
            k4x, k4v = v + hi * k3v, a1
        else:
            k1x, k1v = v, A0[i] @ x
            k2x = v + 0.5 * hi * k1v
            k2v = Am[i] @ (x + 0.5 * hi * k1x)
            k3x = v + 0.5 * hi * k2v
            k3v = Am[i] @ (x + 0.5 * hi * k2x)
            k4x = v + hi * k3v
            k4v = A1[i] @ (x + hi * k3x)
        x = x + hi / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + hi / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if (i + 1) % n_sub == 0:
            j = (i + 1) // n_sub
            xs[j], vs[j] = x, v
    return xs, vs


def integrate_jacobi(cfg, drive, p=None, rtol=1e-3, max_levels=8):
    """RK4 integration of the test-mass Jacobi equation from rest.

    ``d^2 x^A_(B)/dt^2 = -(1/4r) A_AC x^C_(B) [- (1/8r^2) |A_F|^2 x^A_(B)]``

    The EM term is included when ``cfg.include_em_correction`` is set, using
    ``p.A_F`` at ``cfg.direction``.  Substeps per grid interval are doubled
    until the final displacement changes by less than ``rtol``.
    """
    em = None
    if cfg.include_em_correction and p is not None:
        em = _em_series(p, cfg.direction)
    prev = None
    n_sub = 1
    for _ in range(max_levels):
        xs, vs = _run(cfg, drive, em, n_sub)
        disp = xs[-1] - xs[0]
        if prev is not None:
            scale = max(np.max(np.abs(disp)), np.max(np.abs(prev)))
            if np.max(np.abs(disp - prev)) <= rtol * scale:
                break
        prev = disp
        n_sub *= 2
    else:
        raise IntegratorError(f"displacement did not settle to rtol={rtol} after "
                              f"{max_levels} step halvings", field="steps")
    return DetectorTrace(drive.t, xs, vs, np.zeros((drive.t.size, 2)), disp, n_sub)


def closed_form_trace(cfg, p, direction=None, tail=True):
    """Leading-order solution ``xdot = (d0/r) Xi``, ``x = d0 - (d0/r)(Sigma - Sigma_minus)``."""
    direction = cfg.direction if direction is None else direction
    k = cfg.d0 / cfg.r
    sig = radiation.sigma_from_xi(p, tail)
    S = stt_at(sig.Sigma, direction)
    Sm = stt_at(p.Sigma_minus, direction)
    jump = stt_at(sig.jump, direction)
    xi = stt_at(p.Xi, direction)
    pos = cfg.d0 * EYE - k * (S - Sm)
    return DetectorTrace(p.u, pos, k * xi, np.zeros((p.u.size, 2)), -k * jump)
