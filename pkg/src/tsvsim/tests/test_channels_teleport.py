"""Validate channel bookkeeping and teleportation.

'why': resource counts are acceptance criteria, and every demolition round is
built from half-teleportations
"""
from __future__ import annotations

import pytest

from tsvsim import (
    BellOutcome,
    ChannelKind,
    ChannelPair,
    ChannelPool,
    DomainError,
    RandomSource,
    Register,
    TranscriptRecorder,
    apply_byproduct,
    basis_state,
    byproduct_for,
    classical_bits_sent_by,
    complete_teleport,
    count_channels,
    extract_factor,
    fidelity_up_to_phase,
    half_teleport,
    tensor,
)
from tsvsim._errors import ResourceError
from tsvsim._qcore import BELL_OUTCOMES, StateVector, channel_vector
from tsvsim._scenario import Scenario
from tsvsim._teleport import half_teleport_register
from tsvsim._tsv import EmpiricalDistribution

from ._utils import haar, tv_allowance


def _with_channel(source: StateVector, kind: ChannelKind) -> tuple[StateVector, ChannelPair]:
    """Source on qubit 0, channel halves on qubits 1 (sender) and 2 (receiver)."""

    combined = tensor(source, StateVector(2, channel_vector(kind)))
    return combined, ChannelPair("c0", (1, 2), kind, ("A", "B"))


def test_pool_names_channels_in_order() -> None:
    register = Register(basis_state(0, 0))
    pool = ChannelPool()

    first = pool.provision(register, ChannelKind.PHI_PLUS, ("A", "B"))
    second = pool.provision(register, ChannelKind.SINGLET, ("A", "C"), channel_id="named")

    assert (first.channel_id, second.channel_id) == ("ch0", "named")
    assert register.num_qubits == 4


def test_channel_cannot_be_consumed_twice() -> None:
    """Reuse of a consumed channel is a resource error."""

    register = Register(basis_state(0, 0))
    pool = ChannelPool()
    channel = pool.provision(register, ChannelKind.PHI_PLUS, ("A", "B"))
    pool.consume(channel)

    with pytest.raises(ResourceError) as exc:
        pool.consume(channel)

    assert "already been consumed" in str(exc.value)


def test_pool_capacity_is_enforced() -> None:
    register = Register(basis_state(0, 0))
    pool = ChannelPool(capacity=1)
    _ = pool.provision(register, ChannelKind.PHI_PLUS, ("A", "B"))

    with pytest.raises(ResourceError):
        _ = pool.provision(register, ChannelKind.PHI_PLUS, ("A", "B"))


def test_take_unconsumed_matches_either_orientation() -> None:
    register = Register(basis_state(0, 0))
    pool = ChannelPool()
    channel = pool.provision(register, ChannelKind.SINGLET, ("A", "B"))

    assert pool.take_unconsumed(ChannelKind.SINGLET, ("B", "A")) is channel
    with pytest.raises(ResourceError):
        _ = pool.take_unconsumed(ChannelKind.PHI_PLUS, ("A", "B"))


def test_half_at_unknown_site_is_refused() -> None:
    channel = ChannelPair("c0", (0, 1), ChannelKind.PHI_PLUS, ("A", "B"))

    with pytest.raises(ResourceError):
        _ = channel.half_at("C")


def test_provision_in_scenario_assigns_both_sites() -> None:
    """The far half of a scenario channel belongs to the receiving site."""

    scenario = Scenario(num_qubits=1, preselection=basis_state(1, 0), site_partition=("B",))

    extended, channel = ChannelPool().provision_in_scenario(scenario, ChannelKind.SINGLET, ("A", "B"))

    assert extended.site_partition == ("B", "A", "B")
    assert channel.qubits == (1, 2)


@pytest.mark.parametrize("kind", [ChannelKind.PHI_PLUS, ChannelKind.SINGLET])
def test_complete_teleport_reproduces_the_source(kind: ChannelKind, rng: RandomSource) -> None:
    """Correction by the byproduct table recovers the source on every outcome."""

    for index in range(40):
        # Given a random source and a fresh channel
        source = haar(rng.substream(index), 1)
        combined, channel = _with_channel(source, kind)

        # When the source is teleported
        final = complete_teleport(combined, (0,), (channel,), rng.substream(index))

        # Then the far half carries it
        assert fidelity_up_to_phase(extract_factor(final, (2,)), source) == pytest.approx(1.0)


def test_half_teleport_leaves_the_byproduct(rng: RandomSource) -> None:
    """Without correction the far half carries the source up to the outcome's Pauli."""

    source = haar(rng, 1)
    combined, channel = _with_channel(source, ChannelKind.PHI_PLUS)

    (outcome,), remaining = half_teleport(combined, (0,), (channel,), rng)
    remote = extract_factor(remaining, (2,))

    assert channel.consumed
    assert fidelity_up_to_phase(apply_byproduct(remote, (byproduct_for(outcome),), (0,)), source) == pytest.approx(1.0)


def test_half_teleport_outcomes_are_uniform(rng: RandomSource) -> None:
    """Every Bell outcome is equally likely regardless of the source."""

    trials = 2000
    outcomes: list[int] = []
    for index in range(trials):
        stream = rng.substream(index)
        combined, channel = _with_channel(haar(stream, 1), ChannelKind.PHI_PLUS)
        (outcome,), _ = half_teleport(combined, (0,), (channel,), stream)
        outcomes.append(BELL_OUTCOMES.index(outcome))

    counts = EmpiricalDistribution.from_outcomes(outcomes, len(BellOutcome))

    assert counts.total_variation([0.25] * 4) <= tv_allowance(4, trials)


def test_teleport_length_mismatch_is_refused(rng: RandomSource) -> None:
    combined, channel = _with_channel(basis_state(1, 0), ChannelKind.PHI_PLUS)

    with pytest.raises(DomainError):
        _ = half_teleport(combined, (0, 1), (channel,), rng)


def test_failed_half_teleport_leaves_the_channel_unconsumed(rng: RandomSource) -> None:
    """A source the register does not hold is refused before any channel is spent."""

    # Given a pool-provisioned channel next to one source qubit
    pool = ChannelPool()
    register = Register(basis_state(1, 0))
    channel = pool.provision(register, ChannelKind.PHI_PLUS, ("A", "B"))
    before = register.state.amplitudes.copy()

    # When the half-teleportation names a missing source
    with pytest.raises(DomainError):
        _ = half_teleport_register(register, (7,), (channel,), rng, pool=pool)

    # Then the channel is still available and the register untouched
    assert not channel.consumed
    assert pool.unconsumed_count == 1
    assert (register.state.amplitudes == before).all()


def test_consumed_channel_is_refused_before_measuring(rng: RandomSource) -> None:
    pool = ChannelPool()
    register = Register(basis_state(1, 0))
    channel = pool.provision(register, ChannelKind.PHI_PLUS, ("A", "B"))
    pool.consume(channel)
    before = register.state.amplitudes.copy()

    with pytest.raises(ResourceError):
        _ = half_teleport_register(register, (0,), (channel,), rng, pool=pool)

    assert (register.state.amplitudes == before).all()


def test_teleport_transcript_counts_bits_and_channels(rng: RandomSource) -> None:
    """One complete teleportation costs one channel and two classical bits."""

    # Given a recorder and a pool-provisioned channel
    pool = ChannelPool()
    recorder = TranscriptRecorder()
    register = Register(basis_state(1, 0))
    channel = pool.provision(register, ChannelKind.PHI_PLUS, ("A", "B"), protocol_tag="teleport")

    # When the qubit is teleported with corrections
    _ = complete_teleport(register.state, (0,), (channel,), rng, pool=pool, recorder=recorder)
    transcript = recorder.finalize(0.0)

    # Then the ledger shows one channel and two bits
    assert count_channels(transcript, "teleport") == 1
    assert classical_bits_sent_by(transcript, 1.0) == 2
    assert pool.consumed_count == 1
    assert pool.consumed_by("teleport") == 1
    assert pool.consumed_by("other") == 0
