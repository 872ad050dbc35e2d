"""Define simulator-specific exceptions.

'why': keep error taxonomy explicit and lightweight
"""
from __future__ import annotations


class TsvSimError(Exception):
    """Base class for all simulator-specific exceptions."""


class DomainError(TsvSimError):
    """Raised for out-of-range indices, duplicate targets, or mismatched dimensions."""


class NumericalValidationError(TsvSimError):
    """Raised when a matrix, projector set, or basis fails its numerical contract."""


class NumericalError(TsvSimError):
    """Raised when every outcome probability falls below the probability floor."""


class CapacityError(TsvSimError):
    """Raised when a register would exceed the supported number of qubits."""


class ResourceError(TsvSimError):
    """Raised when an entanglement channel is reused or a channel pool runs dry."""


class ProtocolError(TsvSimError):
    """Raised when a protocol precondition on the timeline is violated."""


class PostSelectionExhausted(TsvSimError):
    """Raised when rejection sampling hits `max_attempts` without an accepted run."""

    def __init__(self, attempts: int) -> None:
        super().__init__(f"post-selection rejected {attempts} consecutive attempts")
        self.attempts: int = attempts


class TranscriptStateError(TsvSimError):
    """Raised when a transcript is used before finalization or mutated after it."""


class ExperimentConfigurationError(TsvSimError):
    """Raised when an experiment configuration is incomplete or malformed."""


class OutputLocationError(TsvSimError):
    """Raised when a report or transcript path is unwritable."""
