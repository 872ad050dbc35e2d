"""Validate the round-based demolition measurement.

'why': the protocol must identify eigenstates exactly, spend channels by the
round formula, and leave transcripts with no message used at the measurement time
"""
from __future__ import annotations

import numpy as np
import pytest

from tsvsim import (
    DomainError,
    NonlocalObservable,
    NumericalValidationError,
    RandomSource,
    StateVector,
    basis_state,
    bell_observable,
    check_instantaneity,
    check_message_causality,
    crossed_forward_states,
    crossed_observable,
    demolition_measure,
    fidelity_up_to_phase,
    forward_image,
    reconstruct_outcome,
    teleport_then_measure,
)
from tsvsim._demolition import eigenbasis_unitary

from ._utils import haar, rate_allowance


def _computational(site_partition: tuple[str, ...]) -> NonlocalObservable:
    n = len(site_partition)
    return NonlocalObservable(
        eigenstates=tuple(basis_state(n, k) for k in range(2**n)),
        eigenvalues=tuple(float(k) for k in range(2**n)),
        site_partition=site_partition,
    )


def test_observable_needs_a_full_eigenbasis() -> None:
    with pytest.raises(DomainError):
        _ = NonlocalObservable((basis_state(2, 0),), (0.0,), ("A", "B"))


def test_observable_needs_one_eigenvalue_per_eigenstate() -> None:
    with pytest.raises(DomainError) as exc:
        _ = NonlocalObservable(tuple(basis_state(2, k) for k in range(4)), (0.0, 1.0), ("A", "B"))

    assert "2 eigenvalues" in str(exc.value)


def test_observable_needs_orthonormal_eigenstates() -> None:
    states = (basis_state(2, 0), basis_state(2, 0), basis_state(2, 2), basis_state(2, 3))

    with pytest.raises(NumericalValidationError):
        _ = NonlocalObservable(states, (0.0, 1.0, 2.0, 3.0), ("A", "B"))


def test_product_labels_must_be_a_permutation() -> None:
    states = tuple(basis_state(2, k) for k in range(4))

    with pytest.raises(DomainError):
        _ = NonlocalObservable(states, (0.0, 1.0, 2.0, 3.0), ("A", "B"), product_labels=(0, 0, 1, 2))


def test_eigenbasis_unitary_sends_eigenstates_to_their_labels() -> None:
    """The rotation maps eigenstate k onto the computational state product_labels[k]."""

    image = forward_image(crossed_observable())
    unitary = eigenbasis_unitary(image)

    for eigenstate, label in zip(image.eigenstates, image.product_labels, strict=True):
        rotated = StateVector(2, unitary @ eigenstate.amplitudes)
        assert fidelity_up_to_phase(rotated, basis_state(2, label)) == pytest.approx(1.0)


def test_forward_image_of_crossed_observable() -> None:
    """Reversing the backward site turns the crossed eigenstates into forward states."""

    image = forward_image(crossed_observable())

    assert image.is_all_forward
    for actual, expected in zip(image.eigenstates, crossed_forward_states(), strict=True):
        assert fidelity_up_to_phase(actual, expected) == pytest.approx(1.0)


def test_bell_eigenstates_are_always_identified(rng: RandomSource) -> None:
    """Every successful run on an eigenstate reports that eigenstate."""

    observable = bell_observable()
    succeeded = 0
    for k, eigenstate in enumerate(observable.eigenstates):
        for run in range(25):
            # Given a Bell eigenstate
            stream = rng.substream(k).substream(run)

            # When it is measured by demolition
            result = demolition_measure(observable, eigenstate, stream, max_rounds=40)

            # Then a successful run names it
            if result.status == "succeeded":
                succeeded += 1
                assert result.eigen_index == k

    assert succeeded > 50


def test_channels_follow_the_round_formula(rng: RandomSource) -> None:
    """Round one costs three channels and every further round four."""

    observable = bell_observable()
    for run in range(40):
        result = demolition_measure(observable, haar(rng.substream(run), 2), rng.substream(run), max_rounds=12)

        assert result.channels_consumed == 3 + 4 * (len(result.rounds) - 1)


def test_single_round_budget_exhausts_without_an_index(rng: RandomSource) -> None:
    """With one round allowed, about three runs in four end without a result."""

    # Given a one-round budget
    observable = bell_observable()
    trials = 1200

    # When many random inputs are measured
    results = [demolition_measure(observable, haar(rng.substream(i), 2), rng.substream(i), max_rounds=1) for i in range(trials)]

    # Then round one succeeds a quarter of the time and failures carry no index
    failures = [result for result in results if result.status == "rounds_exhausted"]
    assert all(result.eigen_index is None and result.channels_consumed == 3 for result in failures)
    assert abs(1.0 - len(failures) / trials - 0.25) <= rate_allowance(0.25, trials)


def test_demolition_outcomes_follow_born_weights(rng: RandomSource) -> None:
    """A superposition of two eigenstates is split in proportion to its weights."""

    observable = bell_observable()
    amplitudes = np.sqrt(0.8) * observable.eigenstates[0].amplitudes + np.sqrt(0.2) * observable.eigenstates[3].amplitudes
    source = StateVector(2, amplitudes)
    trials = 600

    indices = [
        index
        for i in range(trials)
        if (index := demolition_measure(observable, source, rng.substream(i), max_rounds=60).eigen_index) is not None
    ]

    assert set(indices) <= {0, 3}
    assert abs(indices.count(0) / len(indices) - 0.8) <= rate_allowance(0.8, len(indices))


def test_demolition_needs_two_sites(rng: RandomSource) -> None:
    observable = _computational(("A", "B", "C"))

    with pytest.raises(DomainError) as exc:
        _ = demolition_measure(observable, basis_state(3, 0), rng)

    assert "exactly two sites" in str(exc.value)


def test_demolition_refuses_backward_sites(rng: RandomSource) -> None:
    with pytest.raises(DomainError):
        _ = demolition_measure(crossed_observable(), basis_state(2, 0), rng)


def test_demolition_refuses_a_zero_round_budget(rng: RandomSource) -> None:
    with pytest.raises(DomainError):
        _ = demolition_measure(bell_observable(), basis_state(2, 0), rng, max_rounds=0)


def test_reconstruction_needs_a_successful_round() -> None:
    with pytest.raises(DomainError):
        _ = reconstruct_outcome([], bell_observable())


def test_demolition_transcripts_are_instantaneous(rng: RandomSource) -> None:
    """Bits travel only after the measurement time, so both checks pass."""

    for run in range(20):
        result = demolition_measure(bell_observable(), haar(rng.substream(run), 2), rng.substream(run), max_rounds=20)

        assert check_instantaneity(result.transcript).passed
        assert check_message_causality(result.transcript).passed


def test_teleport_then_measure_is_not_instantaneous(bell: NonlocalObservable, rng: RandomSource) -> None:
    """The baseline is correct but its correction uses bits that arrive at the measurement time."""

    index, transcript = teleport_then_measure(bell, bell.eigenstates[2], rng)

    assert index == 2
    assert not check_instantaneity(transcript).passed
    assert check_message_causality(transcript).passed
