"""Exception types raised across the package."""


class MismatchError(Exception):
    """Base class for all package errors."""


class DomainError(MismatchError, ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeError(MismatchError, ValueError):
    """Blocks or arrays have incompatible shapes."""


class SizeError(MismatchError, ValueError):
    """An enumeration guard was exceeded."""


class RangeError(MismatchError, ValueError):
    """The distortion level is outside the open interval (D_min, D_av)."""


class ModelError(MismatchError, ValueError):
    """The (source, codebook, distortion) triple violates a model assumption."""


class DegenerateDistortionError(ModelError):
    """D_min equals D_av, so matching is trivial or impossible."""


class FeasibilityError(MismatchError, ValueError):
    """No coupling meets the distortion constraint."""


class NumericError(MismatchError, ArithmeticError):
    """A numerical routine failed to converge."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class ResourceError(MismatchError, RuntimeError):
    """The comparison budget ran out before the truncation cap was reached."""


class FormatError(MismatchError, ValueError):
    """A bit string is not a valid codeword."""


class DegenerateSampleError(MismatchError, RuntimeError):
    """A Monte Carlo batch produced no usable samples."""


class ConfigError(MismatchError, ValueError):
    """An experiment configuration is invalid; ``problems`` lists every violation."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
