"""Gauss-Legendre x equispaced-longitude grids on the unit sphere.

Real spherical harmonic convention (used everywhere in the package)::

    Y_l0  = P_l0(cos t)
    Y_lm  = sqrt(2) P_l|m|(cos t) cos(m p)      m > 0
    Y_lm  = sqrt(2) P_l|m|(cos t) sin(|m| p)    m < 0

where ``P_lm`` is the associated Legendre function normalized so that
``2 pi int P_lm^2 d(cos t) = 1`` (for m = 0) and WITHOUT the Condon-Shortley
phase, i.e. ``P_11 > 0`` for ``0 < t < pi``.  The resulting ``Y_lm`` are
orthonormal on the unit sphere.

Vector and tensor components are taken in the orthonormal dyad
``(e_theta, e_phi)``.
"""

from functools import cached_property

import numpy as np

from ..errors import RangeError, ResolutionError

FOUR_PI = 4.0 * np.pi


def normalized_legendre(L, x):
    """Return ``P[l, m, j]`` and ``dP[l, m, j] = d/dtheta P_lm(x_j)``.

    ``x = cos(theta)`` must avoid the poles.  Arrays have shape
    ``(L+1, L+1, len(x))``; entries with ``m > l`` are zero.
    """
    x = np.asarray(x, dtype=float)
    s = np.sqrt(1.0 - x * x)
    P = np.zeros((L + 1, L + 1, x.size))
    P[0, 0] = 1.0 / np.sqrt(FOUR_PI)
    for m in range(1, L + 1):
        P[m, m] = np.sqrt((2 * m + 1) / (2.0 * m)) * s * P[m - 1, m - 1]
    for m in range(0, L):
        P[m + 1, m] = np.sqrt(2 * m + 3.0) * x * P[m, m]
    for m in range(0, L + 1):
        for l in range(m + 2, L + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            P[l, m] = a * (x * P[l - 1, m] - b * P[l - 2, m])

    dP = np.zeros_like(P)
    for l in range(1, L + 1):
        dP[l, 0] = -np.sqrt(l * (l + 1.0)) * P[l, 1]
        for m in range(1, l + 1):
            up = np.sqrt((l - m) * (l + m + 1.0)) * P[l, m + 1] if m < l else 0.0
            dP[l, m] = 0.5 * (np.sqrt((l + m) * (l - m + 1.0)) * P[l, m - 1] - up)
    return P, dP


class SphereGrid:
    """Product grid: Gauss nodes in ``cos(theta)`` times equispaced ``phi``.

    Parameters
    ----------
    L : int
        Band limit (maximum harmonic degree represented).
    n_theta, n_phi : int, optional
        Grid sizes; default to the minimum for exact quadrature of
        band-limited quadratic products, ``L+1`` and ``2L+2``.
    phi_offset : float
        Rigid rotation of all longitude nodes about the polar axis.
    """

    def __init__(self, L, n_theta=None, n_phi=None, phi_offset=0.0):
        L = int(L)
        if L < 2:
            raise ResolutionError(f"band limit must be >= 2, got {L}", field="band_limit")
        n_theta = L + 1 if n_theta is None else int(n_theta)
        n_phi = 2 * L + 2 if n_phi is None else int(n_phi)
        if n_theta < L + 1:
            raise ResolutionError(f"n_theta={n_theta} < L+1={L + 1}", field="n_theta")
        if n_phi < 2 * L + 1:
            raise ResolutionError(f"n_phi={n_phi} < 2L+1={2 * L + 1}", field="n_phi")
        self.L = L
        self.n_theta = n_theta
        self.n_phi = n_phi
        self.phi_offset = float(phi_offset)

        x, w = np.polynomial.legendre.leggauss(n_theta)
        # north to south: theta ascending
        self.cos_theta = x[::-1].copy()
        self.weights = w[::-1].copy()
        self.theta = np.arccos(self.cos_theta)
        self.sin_theta = np.sqrt(1.0 - self.cos_theta**2)
        self.dphi = 2.0 * np.pi / n_phi
        self.phi = self.phi_offset + self.dphi * np.arange(n_phi)

    def __repr__(self):
        return (f"SphereGrid(L={self.L}, n_theta={self.n_theta}, n_phi={self.n_phi}, "
                f"phi_offset={self.phi_offset!r})")

    def __eq__(self, other):
        return (isinstance(other, SphereGrid) and self.L == other.L
                and self.n_theta == other.n_theta and self.n_phi == other.n_phi
                and self.phi_offset == other.phi_offset)

    def __hash__(self):
        return hash((self.L, self.n_theta, self.n_phi, self.phi_offset))

    @property
    def shape(self):
        return (self.n_theta, self.n_phi)

    @cached_property
    def area_weights(self):
        """Quadrature weights per node, shape ``(n_theta, n_phi)``; sums to 4 pi."""
        return np.outer(self.weights, np.full(self.n_phi, self.dphi))

    def integrate(self, values):
        """Integrate samples over the sphere (trailing two axes)."""
        return np.einsum("...jk,jk->...", values, self.area_weights)

    def mean(self, values):
        return self.integrate(values) / FOUR_PI

    @cached_property
    def unit_vectors(self):
        """Cartesian unit normals, shape ``(3, n_theta, n_phi)``."""
        st = self.sin_theta[:, None]
        return np.stack([
            st * np.cos(self.phi)[None, :],
            st * np.sin(self.phi)[None, :],
            np.broadcast_to(self.cos_theta[:, None], self.shape),
        ])

    # -- harmonic tables -------------------------------------------------

    @cached_property
    def _legendre(self):
        return normalized_legendre(self.L, self.cos_theta)

    @cached_property
    def m_values(self):
        return np.arange(-self.L, self.L + 1)

    @cached_property
    def theta_table(self):
        """``Theta[l, mi, j]`` with the sqrt(2) of the real basis folded in."""
        P, _ = self._legendre
        return self._expand_m(P)

    @cached_property
    def dtheta_table(self):
        _, dP = self._legendre
        return self._expand_m(dP)

    def _expand_m(self, table):
        L = self.L
        out = np.zeros((L + 1, 2 * L + 1, self.n_theta))
        for mi, m in enumerate(self.m_values):
            fac = 1.0 if m == 0 else np.sqrt(2.0)
            out[:, mi] = fac * table[:, abs(m)]
        return out

    @cached_property
    def phi_table(self):
        """``Phi[mi, k]``: cos(m phi) for m >= 0, sin(|m| phi) for m < 0."""
        m = self.m_values[:, None]
        p = self.phi[None, :]
        return np.where(m >= 0, np.cos(m * p), np.sin(-m * p))

    @cached_property
    def dphi_table(self):
        m = self.m_values[:, None]
        p = self.phi[None, :]
        return np.where(m >= 0, -m * np.sin(m * p), -m * np.cos(-m * p))

    @cached_property
    def tensor_tables(self):
        """Theta-profiles of the electric tensor harmonic ``D_e Y_lm``.

        Returns ``(W, X)`` with ``(D_e Y)_tt = W Phi`` and
        ``(D_e Y)_tp = X dPhi``.
        """
        l = np.arange(self.L + 1)[:, None, None]
        m = self.m_values[None, :, None]
        ct = (self.cos_theta / self.sin_theta)[None, None, :]
        s = self.sin_theta[None, None, :]
        T, dT = self.theta_table, self.dtheta_table
        W = 0.5 * (-2.0 * ct * dT - l * (l + 1.0) * T + 2.0 * m * m * T / s**2)
        X = (dT - ct * T) / s
        mask = np.abs(m) <= l
        return W * mask, X * mask

    # -- point evaluation --------------------------------------------------

    def locate(self, theta, phi):
        """Bilinear interpolation stencil in ``(cos theta, phi)``.

        Returns ``((j0, j1), (k0, k1), (wx, wp))`` such that a field is
        ``(1-wx)(1-wp) f[j0,k0] + ...``.
        """
        x = np.cos(theta)
        xs = self.cos_theta  # descending
        if not (xs[-1] <= x <= xs[0]):
            raise RangeError(
                f"direction theta={theta!r} lies outside the grid's colatitude support "
                f"[{self.theta[0]:.4g}, {self.theta[-1]:.4g}]", field="direction")
        j1 = int(np.searchsorted(-xs, -x, side="left"))
        j1 = min(max(j1, 1), self.n_theta - 1)
        j0 = j1 - 1
        wx = (xs[j0] - x) / (xs[j0] - xs[j1])
        t = ((phi - self.phi_offset) / self.dphi) % self.n_phi
        k0 = int(np.floor(t)) % self.n_phi
        k1 = (k0 + 1) % self.n_phi
        wp = t - np.floor(t)
        return (j0, j1), (k0, k1), (wx, wp)

    def interpolate(self, values, theta, phi):
        """Bilinear value of samples (trailing two axes) at one direction."""
        (j0, j1), (k0, k1), (wx, wp) = self.locate(theta, phi)
        v = np.asarray(values)
        return ((1 - wx) * (1 - wp) * v[..., j0, k0] + (1 - wx) * wp * v[..., j0, k1]
                + wx * (1 - wp) * v[..., j1, k0] + wx * wp * v[..., j1, k1])
