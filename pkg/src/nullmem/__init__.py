"""Gravitational and electromagnetic memory from radiative data at null infinity."""

__version__ = "0.1.0"

from .errors import NullmemError  # noqa: E402
from .radiation import RadiativePayload, mass_curve, sigma_from_xi, decay_report  # noqa: E402
from .memory import solve_memory, omega_prime_series  # noqa: E402
from .synth import SynthSpec  # noqa: E402

__all__ = ["NullmemError", "RadiativePayload", "mass_curve", "sigma_from_xi", "decay_report",
           "solve_memory", "omega_prime_series", "SynthSpec", "__version__"]
