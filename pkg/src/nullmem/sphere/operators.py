"""Spectral calculus on the unit sphere.

Conventions (dyad components, ``eps_{theta phi} = +1``):

* ``*V = (V_phi, -V_theta)``; hence ``*grad g = (g_phi / sin, -g_theta)``.
* ``curl V = -div(*V)`` so that ``curl(*grad g) = lap g``.
* Electric tensor harmonic: ``D_e f = grad grad f - (1/2) gamma lap f``.
* Magnetic tensor harmonic: ``D_b f = *(D_e f)`` with
  ``(*T)_AB = eps_A^C T_CB``, i.e. ``(T_tt, T_tp) -> (T_tp, -T_tt)``.

Every STT field band-limited at ``L`` is ``D_e e + D_b b`` for unique
potentials ``e, b`` supported on ``2 <= l <= L``.  The divergence is
diagonal in these potentials with per-degree constants read from the
generated table (:mod:`.constants`).
"""

import logging
import warnings

import numpy as np

from ..errors import (KernelObstructionError, NonElectricSourceError,
                      NonMeanFreeSourceError, ResolutionError)
from . import constants
from .fields import OneFormField, ScalarField, SHCoefficients, STTField

log = logging.getLogger(__name__)

TOL_MEAN = 1e-8


def _degrees(L):
    return np.arange(L + 1, dtype=float)


def _project(grid, values, theta_tab, phi_tab):
    """``sum_jk area_jk values_jk theta_tab[l,m,j] phi_tab[m,k]``."""
    G = np.einsum("...jk,mk->...jm", values * grid.area_weights, phi_tab)
    return np.einsum("...jm,lmj->...lm", G, theta_tab)


def _synth(coeffs, theta_tab, phi_tab):
    G = np.einsum("...lm,lmj->...mj", coeffs, theta_tab)
    return np.einsum("...mj,mk->...jk", G, phi_tab)


def _coeff_data(c, grid):
    if c.L > grid.L:
        raise ResolutionError(f"coefficients with L={c.L} exceed grid band limit {grid.L}",
                              field="band_limit")
    return c.truncate(grid.L).data if c.L < grid.L else c.data


# -- scalars -----------------------------------------------------------------

def analyze(f):
    """Quadrature projection of a scalar field onto the real harmonic basis."""
    g = f.grid
    return SHCoefficients(g.L, _project(g, f.values, g.theta_table, g.phi_table))


def synthesize(c, grid):
    a = _coeff_data(c, grid)
    return ScalarField(grid, _synth(a, grid.theta_table, grid.phi_table))


def laplacian(f):
    c = analyze(f)
    l = _degrees(c.L)
    return synthesize(c.scale_degree(-l * (l + 1)), f.grid)


def _rms(values, grid):
    return np.sqrt(grid.mean(values**2))


def solve_poisson(f, tol_mean=TOL_MEAN):
    """Mean-free solution of ``lap phi = f - mean(f)``.

    Raises :class:`NonMeanFreeSourceError` when ``|mean(f)|`` exceeds
    ``tol_mean`` times the RMS of ``f``; a smaller residual mean is removed
    and logged.
    """
    g = f.grid
    mean = g.mean(f.values)
    scale = _rms(f.values, g)
    if np.any(np.abs(mean) > tol_mean * scale):
        raise NonMeanFreeSourceError(
            f"source mean {np.max(np.abs(mean)):.3e} exceeds {tol_mean:g} x RMS {np.max(scale):.3e}; "
            "pass F - mean(F)", field="source")
    if np.any(mean != 0):
        log.debug("solve_poisson: removed residual mean %.3e", np.max(np.abs(mean)))
    c = analyze(f)
    l = _degrees(c.L)
    inv = np.zeros_like(l)
    inv[1:] = -1.0 / (l[1:] * (l[1:] + 1))
    return synthesize(c.scale_degree(inv), g)


# -- 1-forms -----------------------------------------------------------------

def oneform_from_potentials(f, g, grid):
    """``grad f + *grad g`` from coefficient potentials (either may be None)."""
    th = np.zeros(grid.shape)
    ph = np.zeros(grid.shape)
    s = grid.sin_theta[None, None, :]
    T, dT = grid.theta_table, grid.dtheta_table
    P, dP = grid.phi_table, grid.dphi_table
    if f is not None:
        a = _coeff_data(f, grid)
        th = th + _synth(a, dT, P)
        ph = ph + _synth(a, T / s, dP)
    if g is not None:
        b = _coeff_data(g, grid)
        th = th + _synth(b, T / s, dP)
        ph = ph - _synth(b, dT, P)
    return OneFormField(grid, th, ph)


def decompose_oneform(V):
    """Hodge potentials ``(f, g)`` with ``V = grad f + *grad g``, mean-free."""
    grid = V.grid
    s = grid.sin_theta[None, None, :]
    T, dT = grid.theta_table, grid.dtheta_table
    P, dP = grid.phi_table, grid.dphi_table
    v_grad = _project(grid, V.theta, dT, P) + _project(grid, V.phi, T / s, dP)
    v_curl = _project(grid, V.theta, T / s, dP) - _project(grid, V.phi, dT, P)
    l = _degrees(grid.L)
    inv = np.zeros_like(l)
    inv[1:] = 1.0 / (l[1:] * (l[1:] + 1))
    f = SHCoefficients(grid.L, v_grad).scale_degree(inv)
    g = SHCoefficients(grid.L, v_curl).scale_degree(inv)
    return f, g


def gradient(f):
    return oneform_from_potentials(analyze(f), None, f.grid)


def divergence_oneform(V):
    f, _ = decompose_oneform(V)
    l = _degrees(f.L)
    return synthesize(f.scale_degree(-l * (l + 1)), V.grid)


def curl_oneform(V):
    _, g = decompose_oneform(V)
    l = _degrees(g.L)
    return synthesize(g.scale_degree(-l * (l + 1)), V.grid)


def oneform_energy(c):
    """``int |grad c|^2`` for coefficient potentials (per batch element)."""
    l = _degrees(c.L)
    return np.sum(c.degree_power() * l * (l + 1), axis=-1)


# -- symmetric traceless 2-tensors --------------------------------------------

def stt_norm_factor(L):
    """``N_l = int |D_e Y_lm|^2 = (l-1) l (l+1) (l+2) / 2``."""
    l = _degrees(L)
    return 0.5 * (l - 1) * l * (l + 1) * (l + 2)


def recompose_stt(e, b, grid):
    """``D_e e + D_b b`` (either potential may be None)."""
    W, X = grid.tensor_tables
    P, dP = grid.phi_table, grid.dphi_table
    tt = np.zeros(grid.shape)
    tp = np.zeros(grid.shape)
    if e is not None:
        a = _coeff_data(e, grid)
        tt = tt + _synth(a, W, P)
        tp = tp + _synth(a, X, dP)
    if b is not None:
        c = _coeff_data(b, grid)
        tt = tt + _synth(c, X, dP)
        tp = tp - _synth(c, W, P)
    return STTField(grid, tt, tp)


def decompose_stt(T, return_residual=False):
    """Electric/magnetic potentials ``(e, b)`` of an STT field.

    Potentials live on ``l >= 2``.  With ``return_residual`` also returns
    the relative L2 norm of ``T - recompose(e, b)``, i.e. the content the
    band-limited basis cannot represent (reported, never dropped silently).
    """
    grid = T.grid
    W, X = grid.tensor_tables
    P, dP = grid.phi_table, grid.dphi_table
    pe = 2.0 * (_project(grid, T.tt, W, P) + _project(grid, T.tp, X, dP))
    pb = 2.0 * (_project(grid, T.tt, X, dP) - _project(grid, T.tp, W, P))
    N = stt_norm_factor(grid.L)
    inv = np.zeros_like(N)
    inv[2:] = 1.0 / N[2:]
    e = SHCoefficients(grid.L, pe).scale_degree(inv)
    b = SHCoefficients(grid.L, pb).scale_degree(inv)
    if not return_residual:
        return e, b
    rest = T - recompose_stt(e, b, grid)
    total = T.norm()
    res = np.where(total > 0, rest.norm() / np.where(total > 0, total, 1.0), 0.0)
    if np.any(res > 1e-10):
        log.info("decompose_stt: unrepresented content, relative norm %.3e", np.max(res))
    return e, b, res


def divergence_stt(T):
    e, b = decompose_stt(T)
    L = T.grid.L
    return oneform_from_potentials(e.scale_degree(constants.lambda_e(L)),
                                   b.scale_degree(constants.lambda_b(L)), T.grid)


def invert_div_stt(V, tol=1e-8, l1="raise"):
    """Electric ``l >= 2`` STT field ``T`` with ``div T = V``.

    Parameters
    ----------
    V : OneFormField
        Must be a pure gradient with no ``l = 1`` content (within ``tol``
        relative to the energy norm of ``V``).
    l1 : {"raise", "project"}
        What to do with ``l = 1`` gradient content, which has no STT
        preimage: raise :class:`KernelObstructionError`, or project it out
        with a warning.

    Returns
    -------
    STTField
        The preimage.  Its potentials are available via :func:`decompose_stt`.
    """
    f, g = decompose_oneform(V)
    energy = np.sqrt(oneform_energy(f) + oneform_energy(g))
    mag = np.sqrt(oneform_energy(g))
    if np.any(mag > tol * energy):
        raise NonElectricSourceError(
            f"magnetic (curl) content {np.max(mag):.3e} exceeds tolerance", field="source")
    l1_part = np.sqrt(2.0 * np.sum(f.data[..., 1, :] ** 2, axis=-1))
    if np.any(l1_part > tol * energy):
        msg = f"l=1 gradient content {np.max(l1_part):.3e} has no STT preimage"
        if l1 != "project":
            raise KernelObstructionError(msg, field="source")
        warnings.warn(msg + "; projected out", RuntimeWarning, stacklevel=2)
    lam = constants.lambda_e(f.L)
    inv = np.zeros_like(lam)
    inv[2:] = 1.0 / lam[2:]
    return recompose_stt(f.scale_degree(inv), None, V.grid)

