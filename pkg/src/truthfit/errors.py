"""Exception types shared across the library.

``ContractViolation`` subclasses signal caller mistakes (bad inputs or
preconditions); ``InternalInconsistency`` signals that a property the
theory guarantees failed numerically, which is a bug or a genuinely
degenerate instance.
"""


class ContractViolation(ValueError):
    """A documented precondition was violated by the caller."""


class AdmissibilityError(ContractViolation):
    """Duplicate x-coordinates where pairwise-distinct ones are required."""


class NotPubliclySeparable(ContractViolation):
    """The agent partition is not publicly separable over the given x's."""


class UnsupportedMechanism(ContractViolation):
    """The operation requires a capability the mechanism does not declare."""


class ConfigurationError(ContractViolation):
    """A mechanism configuration is malformed or yields an unbounded problem."""


class InternalInconsistency(RuntimeError):
    """An invariant that should hold by construction failed numerically."""


class UniquenessViolation(InternalInconsistency):
    """Several distinct hyperplanes satisfied conditions that pin down one."""
