"""Label-addressed qubit register.

'why': protocols allocate and discard channel qubits mid-run; stable labels keep
every caller independent of where a qubit currently sits in the amplitude index
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np
from numpy.typing import NDArray

from ._errors import CapacityError, DomainError
from ._qcore import (
    BellOutcome,
    ChannelKind,
    PauliByproduct,
    StateVector,
    apply_byproduct,
    apply_unitary,
    basis_state,
    bell_measure,
    channel_vector,
    computational_projectors,
    measure_projective,
    prepare_singlet,
    split_product,
    tensor,
)
from ._rng import RandomSource
from ._validators import MAX_QUBITS


class Register:
    """Own a StateVector whose qubits are addressed by stable integer labels.

    Labels are handed out in increasing order and never reused. Position `i`
    of the underlying state holds label `self.labels[i]`.
    """

    def __init__(self, state: StateVector | None = None) -> None:
        self._state: StateVector = state if state is not None else basis_state(0, 0)
        self._labels: list[int] = list(range(self._state.num_qubits))
        self._next_label: int = self._state.num_qubits

    @property
    def state(self) -> StateVector:
        return self._state

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(self._labels)

    @property
    def num_qubits(self) -> int:
        return self._state.num_qubits

    def positions(self, labels: Iterable[int]) -> list[int]:
        """Translate labels to current amplitude positions."""

        resolved: list[int] = []
        for label in labels:
            try:
                resolved.append(self._labels.index(label))
            except ValueError as exc:
                raise DomainError(f"qubit label {label} is not held by this register") from exc
        return resolved

    def allocate(self, factor: StateVector) -> tuple[int, ...]:
        """Append `factor` as fresh qubits and return their labels."""

        if self.num_qubits + factor.num_qubits > MAX_QUBITS:
            raise CapacityError(f"allocating {factor.num_qubits} qubits would exceed the {MAX_QUBITS}-qubit cap")
        self._state = tensor(self._state, factor)
        labels = tuple(range(self._next_label, self._next_label + factor.num_qubits))
        self._labels.extend(labels)
        self._next_label += factor.num_qubits
        return labels

    def allocate_pair(self, kind: ChannelKind) -> tuple[int, int]:
        first, second = self.allocate(StateVector(2, channel_vector(kind)))
        return first, second

    def discard(self, labels: Sequence[int]) -> StateVector:
        """Remove qubits that are unentangled with the rest and return their state."""

        positions = self.positions(labels)
        factor, rest = split_product(self._state, positions)
        dropped = set(labels)
        self._labels = [label for label in self._labels if label not in dropped]
        self._state = rest
        return factor

    def factor(self, labels: Sequence[int]) -> StateVector:
        """Return the state of `labels` without removing them."""

        factor, _ = split_product(self._state, self.positions(labels))
        return factor

    def replace_state(self, state: StateVector) -> None:
        """Swap in a new state over the same labels, e.g. after a projection."""

        if state.num_qubits != self.num_qubits:
            raise DomainError(f"replacement has {state.num_qubits} qubits, register holds {self.num_qubits}")
        self._state = state

    def apply(self, matrix: NDArray[np.generic], labels: Sequence[int]) -> None:
        self._state = apply_unitary(self._state, matrix, self.positions(labels))

    def apply_byproduct(self, byproduct: PauliByproduct, labels: Sequence[int]) -> None:
        self._state = apply_byproduct(self._state, byproduct, self.positions(labels))

    def measure(self, projectors: Sequence[NDArray[np.generic]], labels: Sequence[int], rng: RandomSource) -> tuple[int, float]:
        """Measure `labels`, collapse in place, and return (outcome, probability)."""

        result = measure_projective(self._state, projectors, self.positions(labels), rng)
        self._state = result.collapsed
        return result.outcome, result.probability

    def bell_measure(self, pair: Sequence[int], rng: RandomSource) -> BellOutcome:
        result = bell_measure(self._state, self.positions(pair), rng)
        self._state = result.collapsed
        return result.outcome

    def prepare_singlet(self, pair: Sequence[int], rng: RandomSource | None = None, *, overwrite: bool = False) -> None:
        self._state = prepare_singlet(self._state, self.positions(pair), overwrite=overwrite, rng=rng)

    def reset(self, labels: Sequence[int], factor: StateVector, rng: RandomSource) -> None:
        """Measure `labels` in the z basis and overwrite them with `factor`."""

        if factor.num_qubits != len(labels):
            raise DomainError(f"reset factor has {factor.num_qubits} qubits for {len(labels)} labels")
        _ = self.measure(computational_projectors(len(labels)), labels, rng)
        _ = self.discard(labels)
        fresh = self.allocate(factor)
        # reuse the old labels for the replacement qubits
        mapping = dict(zip(fresh, labels, strict=True))
        self._labels = [mapping.get(label, label) for label in self._labels]
