"""Validate time-direction reversal and backward-state transport.

'why': the deterministic backward-to-forward map and its guarded preconditions
are what every mixed-direction measurement is built on
"""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsvsim import (
    ChannelPool,
    CouplingStep,
    DomainError,
    Pauli,
    ProtocolError,
    RandomSource,
    Scenario,
    UnitaryStep,
    apply_byproduct,
    attempt_reverse_forward,
    basis_state,
    consolidate_backward_parts,
    erased_past,
    extract_factor,
    fidelity_up_to_phase,
    move_backward_state,
    postselect_onto,
    reverse_time_direction,
    run_timeline,
    tensor,
    time_reverse_backward,
)
from tsvsim._experiments import dispersed_backward_scenario
from tsvsim._qcore import PAULI_X
from tsvsim._reversal import reversal_scenario, with_fiducial_ancilla
from tsvsim._scenario import postselected_state

from ._utils import haar, rate_allowance, state


def test_reverse_time_direction_formula() -> None:
    """a|up> + b|down> becomes -b*|up> + a*|down>."""

    a, b = 0.6, 0.8j
    reversed_state = reverse_time_direction(state(a, b))

    assert np.allclose(reversed_state.amplitudes, [-np.conj(b), np.conj(a)])


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_singlet_reversal_is_deterministic(seed: int) -> None:
    """After post-selection the fresh ancilla carries the reversed backward state."""

    # Given a particle post-selected onto a random state and reversed onto an ancilla
    rng = RandomSource(seed)
    backward = haar(rng, 1)
    scenario = reversal_scenario(backward)

    # When one accepted run is projected
    final = postselected_state(scenario, run_timeline(scenario, rng).final_state)

    # Then the ancilla holds -b*|up> + a*|down>
    ancilla = extract_factor(final, (scenario.num_qubits - 1,))
    assert fidelity_up_to_phase(ancilla, reverse_time_direction(backward)) == pytest.approx(1.0, abs=1e-9)


def _protected(timeline: tuple[UnitaryStep, ...]) -> Scenario:
    return Scenario(
        num_qubits=3,
        preselection=tensor(erased_past(1), basis_state(1, 0)),
        timeline=timeline,
        postselections=(postselect_onto(basis_state(1, 0), (0,)),),
        final_time=1.0,
    )


def test_reversal_requires_a_post_selected_particle() -> None:
    scenario = Scenario(num_qubits=2, preselection=basis_state(2, 0), final_time=1.0)

    with pytest.raises(ProtocolError) as exc:
        _ = time_reverse_backward(scenario, 0, 1, 0.5)

    assert "never post-selected" in str(exc.value)


def test_reversal_refuses_a_later_disturbance() -> None:
    """Nothing may touch the particle between the reversal and its post-selection."""

    scenario = _protected((UnitaryStep("kick", "A", 0.8, (0,), PAULI_X),))

    with pytest.raises(ProtocolError) as exc:
        _ = time_reverse_backward(scenario, 0, 2, 0.5)

    assert "disturbs qubit 0" in str(exc.value)


def test_pointer_coupling_defines_the_backward_state(rng: RandomSource) -> None:
    """A later coupling to a post-selected pointer counts as the particle's future measurement."""

    # Given a particle whose z value is copied into a pointer that is post-selected onto |1>
    copy_z = np.kron(np.eye(2), np.diag([1.0, 0.0])) + np.kron(PAULI_X, np.diag([0.0, 1.0]))
    scenario = Scenario(
        num_qubits=4,
        preselection=tensor(erased_past(1), basis_state(2, 0)),
        timeline=(CouplingStep("copy", "A", 0.8, (0, 3), copy_z),),
        postselections=(postselect_onto(basis_state(1, 1), (3,)),),
        final_time=1.0,
    )

    # When the particle is reversed before the coupling
    reversed_scenario = time_reverse_backward(scenario, 0, 2, 0.5)
    final = postselected_state(reversed_scenario, run_timeline(reversed_scenario, rng).final_state)

    # Then the ancilla carries the reverse of |down>
    assert fidelity_up_to_phase(extract_factor(final, (2,)), basis_state(1, 0)) == pytest.approx(1.0, abs=1e-9)


def test_reversal_refuses_a_used_ancilla() -> None:
    scenario = _protected((UnitaryStep("warm", "A", 0.2, (2,), PAULI_X),))

    with pytest.raises(ProtocolError) as exc:
        _ = time_reverse_backward(scenario, 0, 2, 0.5)

    assert "ancilla 2" in str(exc.value)


def test_forward_reversal_succeeds_on_singlet_only(rng: RandomSource) -> None:
    """Only the singlet outcome reverses the state, about a quarter of the time."""

    # Given many random forward states next to a fiducial ancilla pair
    trials = 3000
    successes = 0
    for index in range(trials):
        stream = rng.substream(index)
        source = haar(stream, 1)
        combined, ancilla, partner = with_fiducial_ancilla(source)

        # When reversal is attempted
        attempt = attempt_reverse_forward(combined, 0, ancilla, stream, partner=partner)

        # Then successes leave XZ|psi> on the partner
        if attempt.success:
            successes += 1
            carried = extract_factor(attempt.state, (partner,))
            assert fidelity_up_to_phase(carried, apply_byproduct(source, (Pauli.XZ,), (0,))) == pytest.approx(1.0)

    assert abs(successes / trials - 0.25) <= rate_allowance(0.25, trials)


def test_forward_reversal_needs_a_fresh_pair(rng: RandomSource) -> None:
    combined = basis_state(3, 0)

    with pytest.raises(ProtocolError):
        _ = attempt_reverse_forward(combined, 0, 1, rng, partner=2)


def test_move_needs_a_channel_source() -> None:
    scenario = dispersed_backward_scenario([basis_state(1, 0)])

    with pytest.raises(DomainError):
        _ = move_backward_state(scenario, 0, "A", 1.0)


def test_consolidation_spends_one_singlet_per_remote_part(rng: RandomSource) -> None:
    """Each backward part reaches the target site as its reversed forward state."""

    # Given three backward parts at three sites
    backward = [haar(rng.substream(i), 1) for i in range(3)]
    scenario = dispersed_backward_scenario(backward)
    pool = ChannelPool()

    # When they are consolidated at A
    consolidated, placements = consolidate_backward_parts(scenario, range(3), "A", pool, 1.0)
    final = postselected_state(consolidated, run_timeline(consolidated, rng).final_state)

    # Then three singlets are consumed and every placement carries its reversed state
    assert pool.consumed_count == 3
    for particle, state_ in enumerate(backward):
        assert consolidated.site_partition[placements[particle]] == "A"
        carried = extract_factor(final, (placements[particle],))
        assert fidelity_up_to_phase(carried, reverse_time_direction(state_)) == pytest.approx(1.0)
