"""Spectral calculus on the unit sphere: grids, fields, transforms, operators."""

from .grid import SphereGrid
from .fields import ScalarField, OneFormField, STTField, SHCoefficients
from .operators import (analyze, synthesize, laplacian, solve_poisson, gradient,
                        divergence_oneform, curl_oneform, decompose_oneform,
                        oneform_from_potentials, recompose_stt, decompose_stt,
                        divergence_stt, invert_div_stt)

__all__ = ["SphereGrid", "ScalarField", "OneFormField", "STTField", "SHCoefficients",
           "analyze", "synthesize", "laplacian", "solve_poisson", "gradient",
           "divergence_oneform", "curl_oneform", "decompose_oneform",
           "oneform_from_potentials", "recompose_stt", "decompose_stt",
           "divergence_stt", "invert_div_stt"]
