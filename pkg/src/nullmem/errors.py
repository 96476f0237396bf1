"""Exception hierarchy.

Every error carries a short machine-readable ``category`` which the CLI
reports on failure, plus an optional ``field`` naming the offending input.
"""


class NullmemError(Exception):
    category = "error"

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ResolutionError(NullmemError):
    category = "resolution"


class NonMeanFreeSourceError(NullmemError):
    category = "non-mean-free-source"


class NonElectricSourceError(NullmemError):
    category = "non-electric-source"


class KernelObstructionError(NullmemError):
    category = "kernel-obstruction"


class GridCollisionError(NullmemError):
    category = "grid-collision"


class RangeError(NullmemError):
    category = "range"


class AbsentFieldError(NullmemError):
    category = "absent-field"


class DomainError(NullmemError):
    category = "domain"


class IntegratorError(NullmemError):
    category = "integrator"


class ConsistencyError(NullmemError):
    category = "internal-consistency"


class ArchiveError(NullmemError):
    category = "archive"


class SynthSpecError(NullmemError):
    category = "spec"
