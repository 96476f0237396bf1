"""Quadrature of the zonal singular kernel ``(1 - w.w')^(-1/2)``."""

import numpy as np

from ..errors import GridCollisionError
from .grid import SphereGrid
from .fields import ScalarField
from .operators import analyze, oneform_from_potentials, synthesize

# int_{S^2} (1 - w.w')^(-1/2) dw' = 2 pi int_{-1}^{1} (1-x)^(-1/2) dx
KERNEL_TOTAL = 4.0 * np.sqrt(2.0) * np.pi


def source_grid(grid, oversample=4):
    """Quadrature grid for the source points: ``oversample`` times finer and
    rotated about the axis by half its own longitude spacing."""
    n_phi = oversample * grid.n_phi
    return SphereGrid(grid.L, n_theta=oversample * grid.n_theta, n_phi=n_phi,
                      phi_offset=grid.phi_offset + np.pi / n_phi)


def kernel_integral(f, oversample=4, src=None, min_separation=1e-9):
    """``K[f](w) = int f(w') (1 - w.w')^(-1/2) dw'`` at every node of ``f.grid``.

    The band-limited ``f`` is resampled on a collision-free source grid and
    the singularity is subtracted to first order::

        K[f](w) = int (f(w') - f(w) - t(w).w') k(w, w') dw' + f(w) * 4 sqrt(2) pi

    with ``t`` the tangential gradient of ``f`` at ``w`` (its kernel moment
    vanishes by symmetry), leaving an integrand that is continuous at
    ``w' = w``.  Accuracy still degrades with ``L``; see the tests for the
    measured error at ``L = 16``.
    """
    grid = f.grid
    src = source_grid(grid, oversample) if src is None else src
    coeffs = analyze(f)
    f_src = synthesize(coeffs.truncate(src.L) if coeffs.L > src.L else coeffs, src).values

    w_t = grid.unit_vectors.reshape(3, -1)
    w_s = src.unit_vectors.reshape(3, -1)
    one_minus = 1.0 - w_t.T @ w_s
    if one_minus.min() < min_separation**2:
        raise GridCollisionError("a source node coincides with a target node",
                                 field="grid")
    kern = one_minus ** -0.5 * src.area_weights.reshape(-1)[None, :]

    batch = f.values.shape[:-2]
    ft = f.values.reshape(batch + (-1,))
    fs = f_src.reshape(batch + (-1,))
    # tangential gradient in Cartesian components
    grad = oneform_from_potentials(coeffs, None, grid)
    e_th = np.stack([np.outer(grid.cos_theta, np.cos(grid.phi)),
                     np.outer(grid.cos_theta, np.sin(grid.phi)),
                     np.outer(-grid.sin_theta, np.ones(grid.n_phi))])
    e_ph = np.stack([-np.sin(grid.phi)[None, :] + 0 * grid.theta[:, None],
                     np.cos(grid.phi)[None, :] + 0 * grid.theta[:, None],
                     np.zeros(grid.shape)])
    tang = (grad.theta[..., None, :, :] * e_th + grad.phi[..., None, :, :] * e_ph)
    tang = tang.reshape(batch + (3, -1))
    moment = kern @ w_s.T  # (targets, 3)
    out = (fs @ kern.T - ft * kern.sum(axis=1) + ft * KERNEL_TOTAL
           - np.einsum("...ct,tc->...t", tang, moment))
    return ScalarField(grid, out.reshape(batch + grid.shape))
