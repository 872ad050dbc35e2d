"""Dense state-vector engine for small qubit registers.

Qubit ordering is little-endian throughout: qubit 0 is the least significant
bit of the amplitude index, and in `tensor(a, b)` the qubits of `a` come first.
Multi-qubit matrices acting on `targets` use the same convention, with
`targets[0]` as the least significant bit of the matrix index.
"""
from __future__ import annotations

import functools
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Final, NamedTuple

import numpy as np
from numpy.typing import NDArray

from ._errors import DomainError, NumericalError, NumericalValidationError
from ._validators import (
    PROBABILITY_FLOOR,
    TOLERANCE,
    ComplexMatrix,
    validate_num_qubits,
    validate_pair,
    validate_projector_set,
    validate_targets,
    validate_unitary,
)

if TYPE_CHECKING:
    from ._rng import RandomSource

ComplexVector = NDArray[np.complex128]
QubitId = int

_SQRT_HALF: Final[float] = float(np.sqrt(0.5))

IDENTITY: Final[ComplexMatrix] = np.eye(2, dtype=np.complex128)
PAULI_X: Final[ComplexMatrix] = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Z: Final[ComplexMatrix] = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULI_XZ: Final[ComplexMatrix] = PAULI_X @ PAULI_Z
HADAMARD: Final[ComplexMatrix] = np.array([[1, 1], [1, -1]], dtype=np.complex128) * _SQRT_HALF
SWAP: Final[ComplexMatrix] = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
    dtype=np.complex128,
)
CNOT: Final[ComplexMatrix] = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]],
    dtype=np.complex128,
)
"""Controlled-NOT with the first target as control and the second as target."""

UP: Final[ComplexVector] = np.array([1, 0], dtype=np.complex128)
DOWN: Final[ComplexVector] = np.array([0, 1], dtype=np.complex128)

Z_BASIS: Final[tuple[ComplexVector, ComplexVector]] = (UP, DOWN)
X_BASIS: Final[tuple[ComplexVector, ComplexVector]] = (
    np.array([1, 1], dtype=np.complex128) * _SQRT_HALF,
    np.array([1, -1], dtype=np.complex128) * _SQRT_HALF,
)
Y_BASIS: Final[tuple[ComplexVector, ComplexVector]] = (
    np.array([1, 1j], dtype=np.complex128) * _SQRT_HALF,
    np.array([1, -1j], dtype=np.complex128) * _SQRT_HALF,
)


def projectors_for(basis: Sequence[ComplexVector]) -> tuple[ComplexMatrix, ...]:
    """Return the rank-1 projectors onto each vector of an orthonormal `basis`."""

    return tuple(np.outer(vector, vector.conj()) for vector in basis)


def computational_projectors(num_qubits: int) -> tuple[ComplexMatrix, ...]:
    """Return the 2**num_qubits computational-basis projectors, ordered by index."""

    dimension = 2**num_qubits
    projectors: list[ComplexMatrix] = []
    for index in range(dimension):
        projector = np.zeros((dimension, dimension), dtype=np.complex128)
        projector[index, index] = 1.0
        projectors.append(projector)
    return tuple(projectors)


def binary_projectors(vector: ComplexVector) -> tuple[ComplexMatrix, ComplexMatrix]:
    """Return {|u><u|, I - |u><u|} for the normalized `vector` u."""

    unit = vector / np.linalg.norm(vector)
    onto = np.outer(unit, unit.conj())
    return onto, np.eye(unit.shape[0], dtype=np.complex128) - onto


class Pauli(str, Enum):
    """Single-qubit teleportation byproduct; XZ means Z applied first, then X."""

    I = "I"  # noqa: E741
    X = "X"
    Z = "Z"
    XZ = "XZ"

    @property
    def x(self) -> bool:
        return self in (Pauli.X, Pauli.XZ)

    @property
    def z(self) -> bool:
        return self in (Pauli.Z, Pauli.XZ)

    @property
    def matrix(self) -> ComplexMatrix:
        return _PAULI_MATRICES[self]

    @classmethod
    def from_bits(cls, x: bool, z: bool) -> Pauli:
        if x and z:
            return cls.XZ
        if x:
            return cls.X
        return cls.Z if z else cls.I

    def compose(self, other: Pauli) -> Pauli:
        """Return the product with `other`, up to global phase."""

        return Pauli.from_bits(self.x ^ other.x, self.z ^ other.z)


_PAULI_MATRICES: Final[dict[Pauli, ComplexMatrix]] = {
    Pauli.I: IDENTITY,
    Pauli.X: PAULI_X,
    Pauli.Z: PAULI_Z,
    Pauli.XZ: PAULI_XZ,
}

PauliByproduct = tuple[Pauli, ...]
"""Per-qubit byproduct, one element per target qubit."""


def compose_byproducts(first: PauliByproduct, second: PauliByproduct) -> PauliByproduct:
    """Compose two byproducts qubit-wise, up to global phase."""

    if len(first) != len(second):
        raise DomainError(f"byproduct lengths differ: {len(first)} != {len(second)}")
    return tuple(a.compose(b) for a, b in zip(first, second, strict=True))


def byproduct_matrix(byproduct: PauliByproduct) -> ComplexMatrix:
    """Return the full matrix of a byproduct; element 0 acts on the least significant qubit."""

    if not byproduct:
        return np.eye(1, dtype=np.complex128)
    return functools.reduce(np.kron, [element.matrix for element in reversed(byproduct)])


class ChannelKind(str, Enum):
    """Entangled state shared by a quantum channel."""

    PHI_PLUS = "PhiPlus"
    SINGLET = "Singlet"


class BellOutcome(str, Enum):
    """Result of a Bell measurement, in projector order."""

    PHI_PLUS = "PhiPlus"
    PSI_PLUS = "PsiPlus"
    PHI_MINUS = "PhiMinus"
    PSI_MINUS = "PsiMinus"

    @property
    def vector(self) -> ComplexVector:
        return _BELL_VECTORS[self]

    @property
    def correction(self) -> Pauli:
        """Byproduct left on the far half of a PhiPlus channel."""

        return _CORRECTIONS[self]


BELL_OUTCOMES: Final[tuple[BellOutcome, ...]] = tuple(BellOutcome)

_BELL_VECTORS: Final[dict[BellOutcome, ComplexVector]] = {
    BellOutcome.PHI_PLUS: np.array([1, 0, 0, 1], dtype=np.complex128) * _SQRT_HALF,
    BellOutcome.PSI_PLUS: np.array([0, 1, 1, 0], dtype=np.complex128) * _SQRT_HALF,
    BellOutcome.PHI_MINUS: np.array([1, 0, 0, -1], dtype=np.complex128) * _SQRT_HALF,
    # |up down> - |down up> with the first qubit of the pair as least significant bit
    BellOutcome.PSI_MINUS: np.array([0, -1, 1, 0], dtype=np.complex128) * _SQRT_HALF,
}
_CORRECTIONS: Final[dict[BellOutcome, Pauli]] = {
    BellOutcome.PHI_PLUS: Pauli.I,
    BellOutcome.PSI_PLUS: Pauli.X,
    BellOutcome.PHI_MINUS: Pauli.Z,
    BellOutcome.PSI_MINUS: Pauli.XZ,
}
BELL_PROJECTORS: Final[tuple[ComplexMatrix, ...]] = projectors_for([_BELL_VECTORS[outcome] for outcome in BELL_OUTCOMES])
SINGLET: Final[ComplexVector] = _BELL_VECTORS[BellOutcome.PSI_MINUS]
PHI_PLUS: Final[ComplexVector] = _BELL_VECTORS[BellOutcome.PHI_PLUS]
_SINGLET_FROM_PHI_PLUS: Final[Pauli] = Pauli.XZ


def byproduct_for(outcome: BellOutcome, kind: ChannelKind = ChannelKind.PHI_PLUS) -> Pauli:
    """Return the byproduct a half-teleportation with `outcome` leaves on the far channel half."""

    if kind is ChannelKind.SINGLET:
        return outcome.correction.compose(_SINGLET_FROM_PHI_PLUS)
    return outcome.correction


def channel_vector(kind: ChannelKind) -> ComplexVector:
    return SINGLET if kind is ChannelKind.SINGLET else PHI_PLUS


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of `num_qubits` qubits."""

    num_qubits: int
    amplitudes: ComplexVector = field(repr=False)

    def __post_init__(self) -> None:
        _ = validate_num_qubits(self.num_qubits)
        amplitudes = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amplitudes.shape[0] != 2**self.num_qubits:
            raise DomainError(f"expected {2**self.num_qubits} amplitudes for {self.num_qubits} qubits (got {amplitudes.shape[0]})")
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > TOLERANCE:
            raise NumericalValidationError(f"state is not normalized (squared norm {norm:.12f})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex] | ComplexVector, *, normalize: bool = False) -> StateVector:
        """Build a state from raw amplitudes, optionally rescaling to unit norm."""

        values = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        size = values.shape[0]
        num_qubits = size.bit_length() - 1
        if size == 0 or 2**num_qubits != size:
            raise DomainError(f"amplitude count must be a power of two (got {size})")
        if normalize:
            norm = float(np.linalg.norm(values))
            if norm < PROBABILITY_FLOOR:
                raise NumericalError("cannot normalize a zero vector")
            values = values / norm
        return cls(num_qubits, values)

    @property
    def dimension(self) -> int:
        return 2**self.num_qubits

    @property
    def probabilities(self) -> NDArray[np.float64]:
        return np.abs(self.amplitudes) ** 2


class ProjectiveOutcome(NamedTuple):
    outcome: int
    collapsed: StateVector
    probability: float


class BellMeasurement(NamedTuple):
    outcome: BellOutcome
    collapsed: StateVector


def basis_state(num_qubits: int, index: int) -> StateVector:
    """Return the computational basis state `index` of `num_qubits` qubits."""

    _ = validate_num_qubits(num_qubits)
    if not 0 <= index < 2**num_qubits:
        raise DomainError(f"basis index {index} out of range for {num_qubits} qubits")
    amplitudes = np.zeros(2**num_qubits, dtype=np.complex128)
    amplitudes[index] = 1.0
    return StateVector(num_qubits, amplitudes)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Return the tensor product a (x) b; the qubits of `a` keep their indices, those of `b` follow."""

    _ = validate_num_qubits(a.num_qubits + b.num_qubits)
    return StateVector(a.num_qubits + b.num_qubits, np.kron(b.amplitudes, a.amplitudes))


def tensor_all(states: Sequence[StateVector]) -> StateVector:
    return functools.reduce(tensor, states, basis_state(0, 0))


def apply_unitary(state: StateVector, matrix: NDArray[np.generic], targets: Sequence[QubitId]) -> StateVector:
    """Apply `matrix` to the `targets` subspace of `state`."""

    resolved = validate_targets(state.num_qubits, targets)
    unitary = validate_unitary(matrix, 2 ** len(resolved))
    return _renormalized(state.num_qubits, apply_matrix(state.amplitudes, state.num_qubits, unitary, resolved))


def measure_projective(
    state: StateVector,
    projectors: Sequence[NDArray[np.generic]],
    targets: Sequence[QubitId],
    rng: RandomSource,
) -> ProjectiveOutcome:
    """Sample a projective measurement on `targets` and collapse the state."""

    resolved = validate_targets(state.num_qubits, targets)
    checked = validate_projector_set(projectors, 2 ** len(resolved))
    outcome, amplitudes, probability = measure_amplitudes(state.amplitudes, state.num_qubits, checked, resolved, rng)
    return ProjectiveOutcome(outcome, StateVector(state.num_qubits, amplitudes), probability)


def bell_measure(state: StateVector, pair: Sequence[QubitId], rng: RandomSource) -> BellMeasurement:
    """Measure `pair` in the Bell basis; the pair is left in the observed Bell state."""

    resolved = validate_pair(state.num_qubits, pair)
    outcome, amplitudes, _ = measure_amplitudes(state.amplitudes, state.num_qubits, BELL_PROJECTORS, resolved, rng)
    return BellMeasurement(BELL_OUTCOMES[outcome], StateVector(state.num_qubits, amplitudes))


def prepare_singlet(
    state: StateVector,
    pair: Sequence[QubitId],
    *,
    overwrite: bool = False,
    rng: RandomSource | None = None,
) -> StateVector:
    """Put `pair` into the singlet, leaving the remainder of the register untouched.

    A pair entangled with the remainder is only overwritten on request: the pair
    is Bell-measured and the second qubit corrected so the observed Bell state
    becomes the singlet.
    """

    resolved = validate_pair(state.num_qubits, pair)
    matrix, order = bipartition(state.amplitudes, state.num_qubits, resolved)
    _, singular, right = np.linalg.svd(matrix, full_matrices=False)
    if _schmidt_rank_exceeds_one(singular):
        return _overwrite_with_singlet(state, resolved, overwrite, rng)
    rest = singular[0] * right[0]
    replaced = merge(np.outer(SINGLET, rest), state.num_qubits, order)
    overlap = np.vdot(state.amplitudes, replaced)
    if abs(overlap) > TOLERANCE:
        replaced = replaced * (overlap.conjugate() / abs(overlap))
    return _renormalized(state.num_qubits, replaced)


def _overwrite_with_singlet(
    state: StateVector,
    pair: tuple[int, int],
    overwrite: bool,
    rng: RandomSource | None,
) -> StateVector:
    if not overwrite:
        raise NumericalValidationError(f"qubits {list(pair)} are entangled with the rest of the register; pass overwrite=True")
    if rng is None:
        raise DomainError("overwriting an entangled pair requires a random source")
    measured = bell_measure(state, pair, rng)
    correction = byproduct_for(measured.outcome, ChannelKind.SINGLET)
    return apply_byproduct(measured.collapsed, (correction,), (pair[1],))


def apply_byproduct(state: StateVector, byproduct: PauliByproduct, targets: Sequence[QubitId]) -> StateVector:
    """Apply one Pauli per target qubit."""

    if len(byproduct) != len(targets):
        raise DomainError(f"byproduct has {len(byproduct)} elements for {len(targets)} targets")
    resolved = validate_targets(state.num_qubits, targets)
    amplitudes = state.amplitudes
    for element, target in zip(byproduct, resolved, strict=True):
        if element is not Pauli.I:
            amplitudes = apply_matrix(amplitudes, state.num_qubits, element.matrix, (target,))
    return StateVector(state.num_qubits, amplitudes)


def fidelity_up_to_phase(a: StateVector, b: StateVector) -> float:
    """Return |<a|b>|^2, insensitive to global phase."""

    if a.num_qubits != b.num_qubits:
        raise DomainError(f"cannot compare {a.num_qubits}-qubit and {b.num_qubits}-qubit states")
    return min(1.0, float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


def split_product(state: StateVector, qubits: Sequence[QubitId]) -> tuple[StateVector, StateVector]:
    """Return (factor on `qubits`, remainder) for a state that is a product across that cut."""

    resolved = validate_targets(state.num_qubits, qubits)
    matrix, _ = bipartition(state.amplitudes, state.num_qubits, resolved)
    left, singular, right = np.linalg.svd(matrix, full_matrices=False)
    if _schmidt_rank_exceeds_one(singular):
        raise NumericalValidationError(f"qubits {list(resolved)} are entangled with the rest of the register")
    factor = StateVector.from_amplitudes(left[:, 0], normalize=True)
    rest = StateVector.from_amplitudes(singular[0] * right[0], normalize=True)
    return factor, rest


def extract_factor(state: StateVector, qubits: Sequence[QubitId]) -> StateVector:
    """Return the pure state of `qubits`, which must be unentangled with the rest."""

    factor, _ = split_product(state, qubits)
    return factor


def permute_qubits(state: StateVector, order: Sequence[QubitId]) -> StateVector:
    """Return the state whose qubit i is qubit `order[i]` of `state`."""

    resolved = validate_targets(state.num_qubits, order)
    if len(resolved) != state.num_qubits:
        raise DomainError("permutation must name every qubit exactly once")
    n = state.num_qubits
    if n == 0:
        return state
    axes = [n - 1 - resolved[n - 1 - axis] for axis in range(n)]
    permuted = state.amplitudes.reshape((2,) * n).transpose(axes).reshape(-1)
    return StateVector(n, permuted)


def embed_factors(factors: Sequence[StateVector], groups: Sequence[Sequence[QubitId]], num_qubits: int) -> StateVector:
    """Place `factors[i]` on the qubits `groups[i]` and return the product state."""

    _require_factor_layout(factors, groups, num_qubits)
    flat = [qubit for group in groups for qubit in group]
    order = [0] * num_qubits
    for position, qubit in enumerate(flat):
        order[qubit] = position
    return permute_qubits(tensor_all(factors), order)


def _require_factor_layout(factors: Sequence[StateVector], groups: Sequence[Sequence[QubitId]], num_qubits: int) -> None:
    if sorted(qubit for group in groups for qubit in group) != list(range(num_qubits)):
        raise DomainError("factor groups must partition the register")
    for factor, group in zip(factors, groups, strict=True):
        if factor.num_qubits != len(group):
            raise DomainError(f"factor of {factor.num_qubits} qubits cannot occupy {len(group)} qubits")


def apply_matrix(
    amplitudes: ComplexVector,
    num_qubits: int,
    matrix: ComplexMatrix,
    targets: Sequence[int],
) -> ComplexVector:
    """Contract `matrix` into the `targets` axes of the amplitude tensor (no validation)."""

    k = len(targets)
    if k == 0:
        return amplitudes * matrix[0, 0]
    psi = amplitudes.reshape((2,) * num_qubits)
    axes = [num_qubits - 1 - target for target in reversed(targets)]
    operator = matrix.reshape((2,) * (2 * k))
    contracted = np.tensordot(operator, psi, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(contracted, list(range(k)), axes).reshape(-1)


def measure_amplitudes(
    amplitudes: ComplexVector,
    num_qubits: int,
    projectors: Sequence[ComplexMatrix],
    targets: Sequence[int],
    rng: RandomSource,
) -> tuple[int, ComplexVector, float]:
    """Sample one projector by the Born rule and return (index, collapsed amplitudes, probability)."""

    branches = [apply_matrix(amplitudes, num_qubits, projector, targets) for projector in projectors]
    probabilities = np.array([float(np.vdot(branch, branch).real) for branch in branches])
    if probabilities.max(initial=0.0) < PROBABILITY_FLOOR:
        raise NumericalError("every measurement outcome has probability below the floor")
    outcome = rng.choice(np.where(probabilities < PROBABILITY_FLOOR, 0.0, probabilities))
    probability = float(probabilities[outcome])
    return outcome, branches[outcome] / np.sqrt(probability), probability


def bipartition(amplitudes: ComplexVector, num_qubits: int, qubits: Sequence[int]) -> tuple[ComplexMatrix, list[int]]:
    """Reshape amplitudes into a (qubits x rest) matrix; both sides little-endian."""

    chosen = set(qubits)
    rest = [qubit for qubit in range(num_qubits) if qubit not in chosen]
    psi = amplitudes.reshape((2,) * num_qubits)
    order = [num_qubits - 1 - qubit for qubit in reversed(qubits)] + [num_qubits - 1 - qubit for qubit in reversed(rest)]
    return psi.transpose(order).reshape(2 ** len(qubits), 2 ** len(rest)), order


def merge(matrix: ComplexMatrix, num_qubits: int, order: Sequence[int]) -> ComplexVector:
    """Invert `bipartition`."""

    return matrix.reshape((2,) * num_qubits).transpose(np.argsort(order)).reshape(-1)


def _schmidt_rank_exceeds_one(singular: NDArray[np.float64]) -> bool:
    return len(singular) > 1 and singular[1] > TOLERANCE * max(singular[0], 1.0)


def _renormalized(num_qubits: int, amplitudes: ComplexVector) -> StateVector:
    norm = float(np.linalg.norm(amplitudes))
    return StateVector(num_qubits, amplitudes / norm)
