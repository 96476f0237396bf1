"""Bondi-coordinate waveforms ``(c, d, X, Y)`` and their radiative counterpart.

Component convention (a choice; only the norms are fixed by theory)::

    u            = orientation * w
    Xi_tt, Xi_tp = -(dc/du, dd/du) / sqrt(2)      so |Xi|^2 = (c_w)^2 + (d_w)^2
    A_F          = (X, Y)                         so |A_F|^2 = X^2 + Y^2
"""

from dataclasses import dataclass

import numpy as np

from . import timeseries as ts
from .errors import RangeError
from .radiation import RadiativePayload, flux_density
from .sphere.fields import OneFormField, ScalarField, STTField

# dM/du = CK_PREFACTOR * int I dmu  versus  dM/dw = BONDI_PREFACTOR * int I dmu
CK_PREFACTOR = 1.0 / (8.0 * np.pi)
BONDI_PREFACTOR = -1.0


@dataclass(frozen=True, eq=False)
class BondiWaveform:
    w: np.ndarray
    c: ScalarField
    d: ScalarField
    X: ScalarField
    Y: ScalarField

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1 or w.size < 3:
            raise RangeError("Bondi waveform needs at least 3 w samples", field="w_grid")
        object.__setattr__(self, "w", w)
        grid = self.c.grid
        for name in ("c", "d", "X", "Y"):
            f = getattr(self, name)
            if f.grid != grid:
                raise RangeError(f"{name} is on a different grid", field=name)
            if f.values.shape != (w.size,) + grid.shape:
                raise RangeError(f"{name} has shape {f.values.shape}, expected "
                                 f"{(w.size,) + grid.shape}", field=name)

    @property
    def grid(self):
        return self.c.grid

    def bondi_integrand(self):
        """``(c_w)^2 + (d_w)^2 + (X^2 + Y^2) / 2`` at every node."""
        cw = ts.derivative(self.w, self.c.values)
        dw = ts.derivative(self.w, self.d.values)
        return cw**2 + dw**2 + 0.5 * (self.X.values**2 + self.Y.values**2)


def to_radiative(b: BondiWaveform, orientation=1) -> RadiativePayload:
    """Radiative payload with ``u = orientation * w`` (samples reordered if needed)."""
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    order = slice(None) if orientation == 1 else slice(None, None, -1)
    u = orientation * b.w[order]
    grid = b.grid
    # d/du = orientation * d/dw
    cu = orientation * ts.derivative(b.w, b.c.values)[order]
    du = orientation * ts.derivative(b.w, b.d.values)[order]
    Xi = STTField(grid, -cu / np.sqrt(2), -du / np.sqrt(2))
    A_F = OneFormField(grid, b.X.values[order], b.Y.values[order])
    return RadiativePayload(u=u, Xi=Xi, A_F=A_F)


@dataclass
class BondiReport:
    pointwise_residual: float      # max |I_bondi - I_ck| / max |I_bondi|
    integral_ratio: float          # int int I_ck / int int I_bondi over (w, S^2)
    rate_ck: np.ndarray            # dM/du on the w grid order
    rate_bondi: np.ndarray         # dM/dw
    magnitude_mismatch: float      # max | |rate_bondi| - 8 pi |rate_ck| | / max |rate_bondi|
    orientation: int
    ck_prefactor: float = CK_PREFACTOR
    bondi_prefactor: float = BONDI_PREFACTOR

    @property
    def sign_consistent(self):
        """Whether ``dM/dw = s dM/du`` has the sign of the Bondi formula."""
        implied = self.orientation * self.rate_ck
        nz = (np.abs(implied) > 0) & (np.abs(self.rate_bondi) > 0)
        return bool(np.all(np.sign(implied[nz]) == np.sign(self.rate_bondi[nz])))

    def lines(self):
        return [
            f"orientation (u = s w), s        {self.orientation:+d}",
            f"declared CK prefactor            {self.ck_prefactor:.17g}",
            f"declared Bondi prefactor         {self.bondi_prefactor:.17g}",
            f"pointwise integrand residual     {self.pointwise_residual:.6e}",
            f"angular-integral ratio           {self.integral_ratio:.17g}",
            f"rate magnitude mismatch          {self.magnitude_mismatch:.6e}",
            f"dM/dw sign consistent            {self.sign_consistent}",
        ]


def _rel(num, den):
    return float(num / den) if den > 0 else float(num)


def check_mass_loss_equivalence(b: BondiWaveform, orientation=1) -> BondiReport:
    """Compare the Bondi integrand with ``|Xi|^2 + |A_F|^2 / 2`` of :func:`to_radiative`."""
    p = to_radiative(b, orientation)
    order = slice(None) if orientation == 1 else slice(None, None, -1)
    i_ck = flux_density(p)[order]
    i_b = b.bondi_integrand()
    scale = np.max(np.abs(i_b))
    grid = b.grid
    ang_ck = grid.integrate(i_ck)
    ang_b = grid.integrate(i_b)
    tot_ck = float(np.sum(ts.trapezoid_weights(b.w) * ang_ck))
    tot_b = float(np.sum(ts.trapezoid_weights(b.w) * ang_b))
    rate_ck = CK_PREFACTOR * ang_ck
    rate_b = BONDI_PREFACTOR * ang_b
    mism = np.max(np.abs(np.abs(rate_b) - np.abs(rate_ck) / CK_PREFACTOR))
    return BondiReport(
        pointwise_residual=_rel(np.max(np.abs(i_b - i_ck)), scale),
        integral_ratio=tot_ck / tot_b if tot_b != 0 else 1.0,
        rate_ck=rate_ck, rate_bondi=rate_b,
        magnitude_mismatch=_rel(mism, np.max(np.abs(rate_b))),
        orientation=orientation,
    )
