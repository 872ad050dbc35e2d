"""Seeded random source with derived substreams.

'why': Monte Carlo experiments must be bitwise reproducible and independent of
how trials are split across threads
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from ._errors import DomainError, NumericalError
from ._validators import PROBABILITY_FLOOR


class RandomSource:
    """Wrap a numpy Generator seeded from (seed, path).

    Substreams derive from the same root seed with an extended spawn path, so
    `RandomSource(7).substream(3)` draws the same numbers wherever it is built.
    """

    def __init__(self, seed: int, path: Sequence[int] = ()) -> None:
        if seed < 0:
            raise DomainError(f"seed must be non-negative (got {seed})")
        self._seed: int = int(seed)
        self._path: tuple[int, ...] = tuple(int(part) for part in path)
        sequence = np.random.SeedSequence(self._seed, spawn_key=self._path)
        self._generator: np.random.Generator = np.random.Generator(np.random.PCG64(sequence))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def path(self) -> tuple[int, ...]:
        return self._path

    def substream(self, index: int) -> RandomSource:
        """Return an independent source for trial or chunk `index`."""

        if index < 0:
            raise DomainError(f"substream index must be non-negative (got {index})")
        return RandomSource(self._seed, (*self._path, index))

    def choice(self, probabilities: Sequence[float] | NDArray[np.float64]) -> int:
        """Sample an index from unnormalized non-negative weights."""

        weights = np.asarray(probabilities, dtype=np.float64)
        weights = np.where(weights < PROBABILITY_FLOOR, 0.0, weights)
        total = float(weights.sum())
        if total < PROBABILITY_FLOOR:
            raise NumericalError("cannot sample from an all-zero distribution")
        cumulative = np.cumsum(weights / total)
        index = int(np.searchsorted(cumulative, self._generator.random(), side="right"))
        # guard the last bin against cumulative rounding below 1.0
        return min(index, int(np.flatnonzero(weights)[-1]))

    def bernoulli(self, p: float) -> bool:
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"bernoulli probability must lie in [0, 1] (got {p})")
        return bool(self._generator.random() < p)

    def integers(self, high: int) -> int:
        """Return a uniform integer in [0, high)."""

        return int(self._generator.integers(high))

    def haar_state(self, num_qubits: int) -> NDArray[np.complex128]:
        """Return Haar-random normalized amplitudes for `num_qubits` qubits."""

        dimension = 2**num_qubits
        raw = self._generator.normal(size=dimension) + 1j * self._generator.normal(size=dimension)
        return (raw / np.linalg.norm(raw)).astype(np.complex128)
