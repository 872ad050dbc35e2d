"""Validate numerical inputs for the state-vector engine.

'why': fail fast with clear, actionable messages before any amplitude is touched
"""
from __future__ import annotations

from collections.abc import Sequence
from typing import Final

import numpy as np
from numpy.typing import NDArray

from ._errors import CapacityError, DomainError, NumericalValidationError

TOLERANCE: Final[float] = 1e-9
"""Exact-math tolerance for norms, unitarity, projector algebra, and fidelities."""

PROBABILITY_FLOOR: Final[float] = 1e-12
"""Probabilities below this value are treated as zero."""

MAX_QUBITS: Final[int] = 16
"""Register cap; dense vectors stay under a few MB."""

ComplexMatrix = NDArray[np.complex128]


def validate_num_qubits(num_qubits: int) -> int:
    """Ensure a register size is a non-negative integer within the cap."""

    if num_qubits < 0:
        raise DomainError(f"num_qubits must be non-negative (got {num_qubits})")
    if num_qubits > MAX_QUBITS:
        raise CapacityError(f"register of {num_qubits} qubits exceeds the {MAX_QUBITS}-qubit cap")
    return num_qubits


def validate_targets(num_qubits: int, targets: Sequence[int]) -> tuple[int, ...]:
    """Ensure targets are distinct qubit indices inside the register."""

    resolved = tuple(int(target) for target in targets)
    for target in resolved:
        if not 0 <= target < num_qubits:
            raise DomainError(f"qubit {target} out of range for a {num_qubits}-qubit register")
    if len(set(resolved)) != len(resolved):
        raise DomainError(f"duplicate targets: {list(resolved)}")
    return resolved


def validate_pair(num_qubits: int, pair: Sequence[int]) -> tuple[int, int]:
    """Ensure `pair` names two distinct qubits."""

    if len(pair) != 2:
        raise DomainError(f"expected a qubit pair (got {len(pair)} qubits)")
    first, second = validate_targets(num_qubits, pair)
    return first, second


def validate_square(matrix: NDArray[np.generic], dimension: int, label: str) -> ComplexMatrix:
    """Return `matrix` as a complex array after checking its shape."""

    candidate = np.asarray(matrix, dtype=np.complex128)
    if candidate.shape != (dimension, dimension):
        raise DomainError(f"{label} must be {dimension}x{dimension} (got shape {candidate.shape})")
    return candidate


def validate_unitary(matrix: NDArray[np.generic], dimension: int) -> ComplexMatrix:
    """Ensure `matrix` is unitary within tolerance."""

    candidate = validate_square(matrix, dimension, "unitary")
    deviation = np.abs(candidate.conj().T @ candidate - np.eye(dimension)).max(initial=0.0)
    if deviation > TOLERANCE:
        raise NumericalValidationError(f"matrix is not unitary (max deviation {deviation:.3e})")
    return candidate


def validate_projector_set(projectors: Sequence[NDArray[np.generic]], dimension: int) -> tuple[ComplexMatrix, ...]:
    """Ensure `projectors` are Hermitian, idempotent, mutually orthogonal, and complete."""

    if not projectors:
        raise NumericalValidationError("projector set must not be empty")
    resolved = tuple(validate_square(projector, dimension, "projector") for projector in projectors)
    for index, projector in enumerate(resolved):
        _require_projector(projector, index)
    _require_mutually_orthogonal(resolved)
    _require_complete(resolved, dimension)
    return resolved


def validate_projector(projector: NDArray[np.generic], dimension: int) -> ComplexMatrix:
    """Ensure a single matrix is an orthogonal projector."""

    candidate = validate_square(projector, dimension, "projector")
    _require_projector(candidate, 0)
    return candidate


def validate_orthonormal(vectors: Sequence[NDArray[np.complex128]]) -> ComplexMatrix:
    """Return the column matrix of `vectors` after checking orthonormality."""

    columns = np.column_stack(vectors) if vectors else np.zeros((0, 0), dtype=np.complex128)
    gram = columns.conj().T @ columns
    deviation = np.abs(gram - np.eye(len(vectors))).max(initial=0.0)
    if deviation > TOLERANCE:
        raise NumericalValidationError(f"vectors are not orthonormal (max Gram deviation {deviation:.3e})")
    return columns


def _require_projector(projector: ComplexMatrix, index: int) -> None:
    if np.abs(projector - projector.conj().T).max(initial=0.0) > TOLERANCE:
        raise NumericalValidationError(f"projector {index} is not Hermitian")
    if np.abs(projector @ projector - projector).max(initial=0.0) > TOLERANCE:
        raise NumericalValidationError(f"projector {index} is not idempotent")


def _require_mutually_orthogonal(projectors: tuple[ComplexMatrix, ...]) -> None:
    for i, first in enumerate(projectors):
        for j in range(i + 1, len(projectors)):
            if np.abs(first @ projectors[j]).max(initial=0.0) > TOLERANCE:
                raise NumericalValidationError(f"projectors {i} and {j} are not orthogonal")


def _require_complete(projectors: tuple[ComplexMatrix, ...], dimension: int) -> None:
    total = np.sum(projectors, axis=0)
    if np.abs(total - np.eye(dimension)).max(initial=0.0) > TOLERANCE:
        raise NumericalValidationError("projector set does not sum to the identity")
