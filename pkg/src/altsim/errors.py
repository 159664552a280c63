"""Exception types shared across the package."""


class AltsimError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(AltsimError):
    """Malformed or incomplete configuration (strict-schema violations)."""


class DegenerateEquilibrium(AltsimError):
    """Ecological rates for which the parasite equilibrium hits zero on [0, 1]."""


class InvalidSize(AltsimError):
    """Deme graph requested with a non-positive size."""


class NonFiniteState(AltsimError):
    """Integration produced NaN or Inf."""

    def __init__(self, step: int, replica: int | None = None):
        self.step = step
        self.replica = replica
        where = f"step {step}" if replica is None else f"step {step}, replica {replica}"
        super().__init__(f"non-finite state at {where}")


class ThetaOutOfRange(AltsimError):
    """theta outside the open interval (1/a, 1/(a-1))."""


class QuadratureFailure(AltsimError):
    """Adaptive quadrature did not reach the requested tolerance."""


class DomainError(AltsimError):
    """Input outside the mathematical domain of an operation."""


class ShapeMismatch(AltsimError):
    """Array shapes inconsistent with the declared deme graph or path layout."""


class EmptySample(AltsimError):
    """A sample-based statistic was asked for with no samples."""


class InsufficientReplicas(AltsimError):
    """Monte Carlo noise band too wide to resolve a predicted trend."""
