"""Synthetic radiative payloads with controlled angular content and decay.

Every field is a separable product ``amplitude * f(u) * T(w)``: ``T`` is
built from electric/magnetic potentials given as ``(l, m, weight)`` lists,
``f`` is one of the profile families below.

* ``gaussian``: ``f = exp(-(u / width)^2)``
* ``power-law-tail``: ``f = (1 + (u / width)^2)^(-p / 2)``, decaying like ``|u|^-p``
* ``custom``: cubic interpolation of a user table ``(u_i, f_i)``

``A_W = -4 dXi/du`` is filled in analytically (or from the spline for
custom tables) so the payload is internally consistent.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import SynthSpecError
from .radiation import RadiativePayload
from .sphere.fields import OneFormField, SHCoefficients, STTField
from .sphere.grid import SphereGrid
from .sphere.operators import oneform_from_potentials, recompose_stt

PROFILES = ("gaussian", "power-law-tail", "custom")


@dataclass
class SynthSpec:
    profile: str = "gaussian"
    amplitude: float = 1.0
    width: float = 1.0
    xi_electric: list = field(default_factory=lambda: [(2, 0, 1.0)])
    xi_magnetic: list = field(default_factory=list)
    af_electric: list = field(default_factory=list)
    af_magnetic: list = field(default_factory=list)
    xi_exponent: float = 1.5
    af_exponent: float = 1.5
    table_u: Optional[list] = None
    table_f: Optional[list] = None
    seed: int = 0
    random_modes: int = 0          # extra random electric Xi modes drawn from ``seed``
    band_limit: int = 16
    n_u: int = 401
    u_min: float = -20.0
    u_max: float = 20.0
    include_aw: bool = True
    normalize: bool = False        # scale each angular pattern to unit sphere-mean |T|^2
    M_minus: float = 0.0

    def validate(self):
        if self.profile not in PROFILES:
            raise SynthSpecError(f"unknown profile {self.profile!r}", field="profile")
        if not self.width > 0:
            raise SynthSpecError("width must be positive", field="width")
        if self.n_u < 3 or not self.u_max > self.u_min:
            raise SynthSpecError("u grid needs n_u >= 3 and u_max > u_min", field="n_u")
        if self.profile == "custom" and (self.table_u is None or self.table_f is None):
            raise SynthSpecError("custom profile needs table_u and table_f", field="table")
        for name, lmin in (("xi_electric", 2), ("xi_magnetic", 2),
                           ("af_electric", 1), ("af_magnetic", 1)):
            for entry in getattr(self, name):
                l, m, _ = entry
                if not (lmin <= l <= self.band_limit and -l <= m <= l):
                    raise SynthSpecError(
                        f"mode (l={l}, m={m}) invalid for {name} (need {lmin} <= l <= "
                        f"{self.band_limit}, |m| <= l)", field=name)

    @property
    def u(self):
        return np.linspace(self.u_min, self.u_max, self.n_u)


def _profile(spec, u, exponent):
    """``(f, df/du)`` on ``u``."""
    s = u / spec.width
    if spec.profile == "gaussian":
        f = np.exp(-s**2)
        return f, -2.0 * s / spec.width * f
    if spec.profile == "power-law-tail":
        base = 1.0 + s**2
        f = base ** (-exponent / 2)
        return f, -exponent * s / spec.width * base ** (-exponent / 2 - 1)
    sp = CubicSpline(np.asarray(spec.table_u, float), np.asarray(spec.table_f, float),
                     extrapolate=False)
    f = np.nan_to_num(sp(u))
    return f, np.nan_to_num(sp(u, 1))


def _coeffs(L, modes):
    return SHCoefficients.from_dict(L, {(l, m): w for l, m, w in modes}) if modes else None


def _random_modes(spec):
    rng = np.random.default_rng(spec.seed)
    out = []
    for _ in range(spec.random_modes):
        l = int(rng.integers(2, spec.band_limit + 1))
        m = int(rng.integers(-l, l + 1))
        out.append((l, m, float(rng.normal())))
    return out


def _unit_mean(pattern, grid):
    ms = float(grid.mean(pattern.norm_sq()))
    return pattern * (1.0 / np.sqrt(ms)) if ms > 0 else pattern


def synth(spec: SynthSpec) -> RadiativePayload:
    """Deterministic payload for ``spec``."""
    spec.validate()
    L = spec.band_limit
    grid = SphereGrid(L)
    u = spec.u

    xi_modes = list(spec.xi_electric) + _random_modes(spec)
    T = recompose_stt(_coeffs(L, xi_modes), _coeffs(L, spec.xi_magnetic), grid)
    if spec.normalize:
        T = _unit_mean(T, grid)
    f, df = _profile(spec, u, spec.xi_exponent)
    a = spec.amplitude
    Xi = STTField(grid, a * f[:, None, None] * T.tt, a * f[:, None, None] * T.tp)
    A_W = None
    if spec.include_aw:
        A_W = STTField(grid, -4 * a * df[:, None, None] * T.tt, -4 * a * df[:, None, None] * T.tp)

    A_F = None
    if spec.af_electric or spec.af_magnetic:
        V = oneform_from_potentials(_coeffs(L, spec.af_electric),
                                    _coeffs(L, spec.af_magnetic), grid)
        if spec.normalize:
            ms = float(grid.mean(V.norm_sq()))
            V = V * (1.0 / np.sqrt(ms)) if ms > 0 else V
        g, _ = _profile(spec, u, spec.af_exponent)
        A_F = OneFormField(grid, a * g[:, None, None] * V.theta, a * g[:, None, None] * V.phi)

    return RadiativePayload(u=u, Xi=Xi, A_F=A_F, A_W=A_W, M_minus=spec.M_minus)
