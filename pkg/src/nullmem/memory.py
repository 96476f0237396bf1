"""Nonlinear memory: from radiative data to the permanent shear jump.

The pipeline::

    F      = int (|Xi|^2 + |A_F|^2 / 2) du
    lap Phi = F - mean(F),      mean(Phi) = 0
    div(Sigma_plus - Sigma_minus) = grad Phi

The divergence equation fixes only the electric, ``l >= 2`` part of the
jump; the magnetic part of the constraint solution is set to zero and the
comparison with the directly integrated jump ``-int Xi du`` is made on
electric potentials.
"""

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from . import radiation
from . import timeseries as ts
from .errors import DomainError
from .sphere.fields import ScalarField, STTField, SHCoefficients
from .sphere.kernel import kernel_integral
from .sphere.operators import (analyze, curl_oneform, decompose_stt, divergence_stt,
                               gradient, invert_div_stt, laplacian, solve_poisson,
                               synthesize)

log = logging.getLogger(__name__)

MIN_KERNEL_L = 8


@dataclass
class MemoryResult:
    F: ScalarField
    F_mean: float
    Phi: ScalarField
    Sigma_jump_constraint: STTField
    Sigma_jump_direct: STTField
    residual: float                  # L2 norm of the electric-potential difference
    e_constraint: SHCoefficients
    e_direct: SHCoefficients
    b_direct: SHCoefficients
    l1_content: float                # norm of the projected l = 1 part of grad Phi
    poisson_residual: float          # ||lap Phi - (F - mean F)|| / ||F||
    hodge_residual: float            # ||div Sigma_c - grad Phi|| / ||grad Phi||, l >= 2 part
    curl_residual: float             # ||curl grad Phi|| / ||grad Phi||


def _ratio(num, den):
    return float(num / den) if den > 0 else float(num)


def solve_memory(p, tail=True):
    """Constraint and direct memory tensors for a payload, with diagnostics."""
    grid = p.grid
    F = radiation.memory_source(p, tail)
    F_mean = float(F.mean())
    src = F - F_mean
    Phi = solve_poisson(src)
    grad_phi = gradient(Phi)

    coeffs = analyze(Phi)
    l1 = float(np.sqrt(np.sum(coeffs.data[1] ** 2) * 2.0))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        Sc = invert_div_stt(grad_phi, l1="project")
    for w in caught:
        log.warning("solve_memory: %s", w.message)
        warnings.warn(str(w.message), RuntimeWarning, stacklevel=2)

    direct = radiation.sigma_from_xi(p, tail).jump
    e_c, _ = decompose_stt(Sc)
    e_d, b_d = decompose_stt(direct)
    residual = float((e_c - e_d).norm())

    gnorm = grad_phi.norm()
    # l = 1 modes of Phi are unreachable by div of an STT field
    reachable = grad_phi - gradient(ScalarField(grid, _l1_part(Phi)))
    hodge = _ratio((divergence_stt(Sc) - reachable).norm(), reachable.norm())
    return MemoryResult(
        F=F, F_mean=F_mean, Phi=Phi,
        Sigma_jump_constraint=Sc, Sigma_jump_direct=direct, residual=residual,
        e_constraint=e_c, e_direct=e_d, b_direct=b_d, l1_content=l1,
        poisson_residual=_ratio((laplacian(Phi) - src).norm(), F.norm()),
        hodge_residual=hodge,
        curl_residual=_ratio(curl_oneform(grad_phi).norm(), gnorm),
    )


def _l1_part(f):
    c = analyze(f)
    keep = np.zeros(c.L + 1)
    keep[1] = 1.0
    return synthesize(c.scale_degree(keep), f.grid).values


@dataclass
class OmegaDiagnostics:
    u: np.ndarray
    Omega_prime: ScalarField         # series over u
    kernel_term: ScalarField         # u-independent part
    jump: ScalarField                # Omega'(u_max) - Omega'(u_min)
    direct: ScalarField              # int (mean-free integrand) du
    accuracy_warning: str = ""


def omega_prime_series(p, tail=True, oversample=4):
    """Kernel representation of ``Omega'(u)`` and its jump across the grid.

    ``g(u, w) = |Xi|^2 - mean + (|A_F|^2 - mean) / 2`` and::

        Omega'(u) = -(1 / (2^(3/2) 4 pi)) K[int g du'] + (1/2) int sgn(u - u') g(u') du'

    where ``K`` is :func:`kernel_integral`.  The kernel term does not depend
    on ``u``, so the jump equals ``int g du``.
    """
    grid = p.grid
    dens = radiation.flux_density(p)
    g = dens - grid.mean(dens)[:, None, None]
    total, interior, tails = ts.integrate_u(p.u, g, tail=tail)
    warn = ""
    if grid.L < MIN_KERNEL_L:
        warn = f"band limit {grid.L} < {MIN_KERNEL_L}: kernel quadrature is inaccurate"
    K = kernel_integral(ScalarField(grid, total), oversample=oversample)
    kern = K * (-1.0 / (2 ** 1.5 * 4 * np.pi))
    # int sgn(u - u') g du' = (int_{-inf}^u - int_u^{inf}) g du'
    below = ts.cumulative_trapezoid(p.u, g)
    if tails is not None:
        below = below + tails.minus
    sgn = 2.0 * below - total
    om = kern.values + 0.5 * sgn
    series = ScalarField(grid, om)
    return OmegaDiagnostics(p.u, series, kern, ScalarField(grid, om[-1] - om[0]),
                            ScalarField(grid, total), warn)


def memory_displacement_field(mr, d0, r, source="constraint"):
    """Permanent test-mass displacement ``-(d0 / r) (Sigma_plus - Sigma_minus)``."""
    if not (d0 > 0 and r > 0):
        raise DomainError(f"d0 and r must be positive (got d0={d0}, r={r})", field="d0/r")
    if source == "constraint":
        jump = mr.Sigma_jump_constraint
    elif source == "direct":
        jump = mr.Sigma_jump_direct
    else:
        raise ValueError(f"source must be 'constraint' or 'direct', not {source!r}")
    return jump * (-d0 / r)
