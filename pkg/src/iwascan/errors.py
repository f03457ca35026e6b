"""Exception hierarchy shared by all iwascan modules.

The CLI maps these onto stable exit codes, so the class tree is part of
the public contract: schema/structural problems, domain preconditions,
precision exhaustion, and internal inconsistencies stay distinguishable.
"""


class IwascanError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(IwascanError):
    """Operands belong to incompatible rings, levels, or spaces."""


class SchemaError(StructuralError):
    """A file or JSON payload does not match its declared schema."""


class DomainError(IwascanError):
    """A mathematical precondition fails (non-unit, boundary point, ...)."""


class ParityError(DomainError):
    """Infinity type has odd a - b, so the half-integer split does not exist."""


class IndistinguishableFromZero(DomainError):
    """Every coefficient vanishes to the working precision.

    Raised instead of returning structure that the data cannot support:
    with all coefficients at valuation >= N there is no way to tell the
    zero series from one that is merely small.
    """


class WitnessRejected(DomainError):
    """A claimed nonvanishing witness evaluates to zero within precision."""


class PrecisionExhausted(IwascanError):
    """The requested operation would consume more digits than are carried."""


class InconsistencyError(IwascanError):
    """Two routes that must agree disagree; indicates a precision fault."""


class ValidationError(InconsistencyError):
    """Declared combinatorial data contradicts what was computed from it."""
