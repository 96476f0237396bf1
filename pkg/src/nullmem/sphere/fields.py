"""Sampled fields on a :class:`SphereGrid`.

All field types accept leading batch axes (e.g. a retarded-time axis) in
front of the trailing ``(n_theta, n_phi)`` grid axes.  Fields are treated
as immutable values.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ResolutionError
from .grid import SphereGrid


def _check(grid, *arrays):
    for a in arrays:
        if a.shape[-2:] != grid.shape:
            raise ResolutionError(
                f"sample array shape {a.shape} does not end in grid shape {grid.shape}")


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        _check(self.grid, self.values)

    def __add__(self, other):
        return ScalarField(self.grid, self.values + _vals(other))

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - _vals(other))

    def __mul__(self, c):
        return ScalarField(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, -self.values)

    def __getitem__(self, idx):
        return ScalarField(self.grid, self.values[idx])

    def mean(self):
        return self.grid.mean(self.values)

    def norm(self):
        """L2 norm over the sphere."""
        return np.sqrt(self.grid.integrate(self.values**2))

    @classmethod
    def zeros(cls, grid, batch=()):
        return cls(grid, np.zeros(tuple(batch) + grid.shape))


@dataclass(frozen=True, eq=False)
class OneFormField:
    """1-form with components ``(V_theta, V_phi)`` in the orthonormal dyad."""

    grid: SphereGrid
    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))
        object.__setattr__(self, "phi", np.asarray(self.phi, dtype=float))
        _check(self.grid, self.theta, self.phi)

    def __add__(self, other):
        return OneFormField(self.grid, self.theta + other.theta, self.phi + other.phi)

    def __sub__(self, other):
        return OneFormField(self.grid, self.theta - other.theta, self.phi - other.phi)

    def __mul__(self, c):
        return OneFormField(self.grid, self.theta * c, self.phi * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __getitem__(self, idx):
        return OneFormField(self.grid, self.theta[idx], self.phi[idx])

    def dual(self):
        """Hodge rotation ``(*V)_A = eps_A^B V_B``: ``(V_phi, -V_theta)``."""
        return OneFormField(self.grid, self.phi, -self.theta)

    def norm_sq(self):
        """Pointwise ``|V|^2``."""
        return self.theta**2 + self.phi**2

    def norm(self):
        return np.sqrt(self.grid.integrate(self.norm_sq()))

    @classmethod
    def zeros(cls, grid, batch=()):
        z = np.zeros(tuple(batch) + grid.shape)
        return cls(grid, z, z.copy())


@dataclass(frozen=True, eq=False)
class STTField:
    """Symmetric traceless 2-tensor; stores ``T_tt`` and ``T_tp``.

    ``T_pp = -T_tt`` and ``T_pt = T_tp`` hold by construction.
    """

    grid: SphereGrid
    tt: np.ndarray
    tp: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tt", np.asarray(self.tt, dtype=float))
        object.__setattr__(self, "tp", np.asarray(self.tp, dtype=float))
        _check(self.grid, self.tt, self.tp)

    def __add__(self, other):
        return STTField(self.grid, self.tt + other.tt, self.tp + other.tp)

    def __sub__(self, other):
        return STTField(self.grid, self.tt - other.tt, self.tp - other.tp)

    def __mul__(self, c):
        return STTField(self.grid, self.tt * c, self.tp * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __getitem__(self, idx):
        return STTField(self.grid, self.tt[idx], self.tp[idx])

    @property
    def pp(self):
        return -self.tt

    def dual(self):
        """``(*T)_AB = eps_A^C T_CB``: ``(T_tp, -T_tt)``."""
        return STTField(self.grid, self.tp, -self.tt)

    def norm_sq(self):
        """Pointwise ``|T|^2 = T_AB T_AB = 2 (T_tt^2 + T_tp^2)``."""
        return 2.0 * (self.tt**2 + self.tp**2)

    def norm(self):
        return np.sqrt(self.grid.integrate(self.norm_sq()))

    @classmethod
    def zeros(cls, grid, batch=()):
        z = np.zeros(tuple(batch) + grid.shape)
        return cls(grid, z, z.copy())


def _vals(other):
    return other.values if isinstance(other, ScalarField) else other


@dataclass(frozen=True, eq=False)
class SHCoefficients:
    """Real orthonormal harmonic coefficients.

    ``data[..., l, m + L]`` holds ``a_lm``; slots with ``|m| > l`` are zero.
    """

    L: int
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.shape[-2:] != (self.L + 1, 2 * self.L + 1):
            raise ResolutionError(f"coefficient array shape {data.shape} inconsistent with L={self.L}")
        object.__setattr__(self, "data", data * degree_mask(self.L))

    @classmethod
    def zeros(cls, L, batch=()):
        return cls(L, np.zeros(tuple(batch) + (L + 1, 2 * L + 1)))

    @classmethod
    def from_dict(cls, L, coeffs):
        """Build from ``{(l, m): value}``."""
        c = np.zeros((L + 1, 2 * L + 1))
        for (l, m), v in coeffs.items():
            if not (0 <= l <= L and -l <= m <= l):
                raise ResolutionError(f"(l, m) = ({l}, {m}) outside band limit {L}")
            c[l, m + L] += v
        return cls(L, c)

    def __getitem__(self, lm):
        l, m = lm
        return self.data[..., l, m + self.L]

    def __add__(self, other):
        return SHCoefficients(self.L, self.data + other.data)

    def __sub__(self, other):
        return SHCoefficients(self.L, self.data - other.data)

    def __mul__(self, c):
        return SHCoefficients(self.L, self.data * c)

    __rmul__ = __mul__

    def scale_degree(self, factors):
        """Multiply degree ``l`` by ``factors[l]``."""
        f = np.asarray(factors, dtype=float)[:, None]
        return SHCoefficients(self.L, self.data * f)

    def norm(self):
        """Coefficient l2 norm (equals the L2 norm of the field on S^2)."""
        return np.sqrt(np.sum(self.data**2, axis=(-2, -1)))

    def degree_power(self):
        """Per-degree power ``sum_m a_lm^2``, shape ``(..., L+1)``."""
        return np.sum(self.data**2, axis=-1)

    def truncate(self, L):
        if L > self.L:
            out = np.zeros(self.data.shape[:-2] + (L + 1, 2 * L + 1))
            out[..., : self.L + 1, L - self.L: L + self.L + 1] = self.data
            return SHCoefficients(L, out)
        return SHCoefficients(L, self.data[..., : L + 1, self.L - L: self.L + L + 1])

    def nonzero(self, tol=0.0):
        """``{(l, m): value}`` for entries with magnitude above ``tol``."""
        out = {}
        for l in range(self.L + 1):
            for m in range(-l, l + 1):
                v = float(self.data[..., l, m + self.L])
                if abs(v) > tol:
                    out[(l, m)] = v
        return out


def degree_mask(L):
    l = np.arange(L + 1)[:, None]
    m = np.arange(-L, L + 1)[None, :]
    return (np.abs(m) <= l).astype(float)
