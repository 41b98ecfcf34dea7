"""Exception types shared across the package."""

from __future__ import annotations


class IqpError(Exception):
    """Base class for all package-specific errors."""


class CapExceededError(IqpError):
    """An exponential-cost operation was asked to exceed its size cap."""


class LengthMismatchError(IqpError, ValueError):
    """A bit vector does not match the expected length."""


class NotSparseError(IqpError):
    """The circuit's incidence matrix is neither IFRB nor IB."""


class NotTwoBodyError(IqpError):
    """An operation requiring two-qubit gates saw another gate arity."""


class ParityError(IqpError):
    """Outcome bits with odd parity were passed to a renormalization step."""


class EmbeddingError(IqpError, ValueError):
    """A rotation system is inconsistent or not genus zero."""


class MergeError(IqpError):
    """The measured set cannot produce a planar merged graph."""


class InternalConsistencyError(IqpError):
    """A computed quantity violated an invariant beyond numerical noise."""


class SamplingTimeoutError(IqpError):
    """A sampling run exceeded its cooperative deadline."""
