"""Validate the label-addressed register.

'why': protocols allocate and discard channel qubits mid-run and must keep
addressing the survivors by the same labels
"""
from __future__ import annotations

import pytest

from tsvsim import CapacityError, ChannelKind, DomainError, NumericalValidationError, RandomSource, Register, basis_state
from tsvsim._qcore import DOWN, PHI_PLUS, StateVector, fidelity_up_to_phase


def test_allocate_hands_out_fresh_labels() -> None:
    """Labels grow monotonically and are never reused after a discard."""

    # Given a one-qubit register
    register = Register(basis_state(1, 0))

    # When a pair is allocated, discarded, and another qubit allocated
    pair = register.allocate_pair(ChannelKind.PHI_PLUS)
    _ = register.discard(pair)
    (fresh,) = register.allocate(basis_state(1, 1))

    # Then the new label continues past the discarded ones
    assert pair == (1, 2)
    assert fresh == 3
    assert register.labels == (0, 3)


def test_discard_returns_the_factor() -> None:
    register = Register(basis_state(1, 0))
    pair = register.allocate(StateVector(2, PHI_PLUS))

    dropped = register.discard(pair)

    assert fidelity_up_to_phase(dropped, StateVector(2, PHI_PLUS)) == pytest.approx(1.0)
    assert register.num_qubits == 1


def test_discard_refuses_entangled_qubits() -> None:
    """A qubit entangled with the rest cannot leave the register."""

    register = Register(StateVector(2, PHI_PLUS))

    with pytest.raises(NumericalValidationError):
        _ = register.discard((0,))


def test_unknown_label_is_a_domain_error() -> None:
    register = Register(basis_state(1, 0))

    with pytest.raises(DomainError) as exc:
        _ = register.positions((5,))

    assert "label 5" in str(exc.value)


def test_allocation_over_the_cap_is_refused() -> None:
    register = Register(basis_state(15, 0))

    with pytest.raises(CapacityError):
        _ = register.allocate_pair(ChannelKind.SINGLET)


def test_reset_overwrites_and_keeps_labels(rng: RandomSource) -> None:
    """Reset measures the qubit away and reuses its label for the replacement."""

    # Given a two-qubit register
    register = Register(basis_state(2, 0))

    # When qubit 1 is reset to |down>
    register.reset((1,), StateVector(1, DOWN), rng)

    # Then label 1 now carries |down>
    assert register.labels == (0, 1)
    assert fidelity_up_to_phase(register.factor((1,)), StateVector(1, DOWN)) == pytest.approx(1.0)
