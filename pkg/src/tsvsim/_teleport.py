"""Teleportation and half-teleportation over pre-shared channels.

A channel's first qubit sits at the sending site and its second at the
receiving site. Half-teleportation performs the Bell measurements and stops;
the receiving halves then carry the source state up to a Pauli byproduct.
"""
from __future__ import annotations

from collections.abc import Sequence

from ._channels import ChannelPair, ChannelPool, consume_channel, require_available
from ._errors import DomainError
from ._ledger import EventKind, TranscriptRecorder
from ._qcore import BellOutcome, Pauli, StateVector, byproduct_for
from ._register import Register
from ._rng import RandomSource


def half_teleport_register(
    register: Register,
    sources: Sequence[int],
    channels: Sequence[ChannelPair],
    rng: RandomSource,
    *,
    pool: ChannelPool | None = None,
    recorder: TranscriptRecorder | None = None,
    time: float = 0.0,
    protocol_tag: str = "teleport",
    discard: bool = False,
    for_reconstruction: bool = True,
) -> list[BellOutcome]:
    """Bell-measure each source with the near half of its channel.

    A channel counts as consumed once its Bell measurement has happened. With
    `discard`, the measured pairs are removed from the register afterwards;
    they are left in a Bell state and so factor out. `for_reconstruction` marks
    the outcome records as needed by a later classical reconstruction.
    """

    _require_teleportable(register, sources, channels, pool)
    outcomes: list[BellOutcome] = []
    for source, channel in zip(sources, channels, strict=True):
        near = channel.qubits[0]
        outcome = register.bell_measure((source, near), rng)
        consume_channel(channel, pool)
        outcomes.append(outcome)
        if recorder is not None:
            _record_half_teleport(recorder, channel, outcome, time, protocol_tag, for_reconstruction)
        if discard:
            _ = register.discard((source, near))
    return outcomes


def _require_teleportable(register: Register, sources: Sequence[int], channels: Sequence[ChannelPair], pool: ChannelPool | None) -> None:
    if len(sources) != len(channels):
        raise DomainError(f"{len(sources)} sources need {len(sources)} channels (got {len(channels)})")
    _ = register.positions([*sources, *(channel.qubits[0] for channel in channels)])
    for channel in channels:
        require_available(channel, pool)


def _record_half_teleport(
    recorder: TranscriptRecorder,
    channel: ChannelPair,
    outcome: BellOutcome,
    time: float,
    protocol_tag: str,
    for_reconstruction: bool,
) -> None:
    site = channel.sites[0]
    _ = recorder.record(site, time, EventKind.CHANNEL_CONSUMED, channel.channel_id, protocol_tag)
    record_id = f"{protocol_tag}:{channel.channel_id}"
    recorder.measurement(site, time, outcome.value, protocol_tag, record_id, for_reconstruction=for_reconstruction)


def half_teleport(
    state: StateVector,
    sources: Sequence[int],
    channels: Sequence[ChannelPair],
    rng: RandomSource,
    *,
    pool: ChannelPool | None = None,
    recorder: TranscriptRecorder | None = None,
    time: float = 0.0,
    protocol_tag: str = "teleport",
) -> tuple[list[BellOutcome], StateVector]:
    """Half-teleport `sources` through `channels`; qubit indices refer to `state`."""

    register = Register(state)
    outcomes = half_teleport_register(register, sources, channels, rng, pool=pool, recorder=recorder, time=time, protocol_tag=protocol_tag)
    return outcomes, register.state


def correct_register(
    register: Register,
    outcomes: Sequence[BellOutcome],
    channels: Sequence[ChannelPair],
    *,
    recorder: TranscriptRecorder | None = None,
    time: float = 0.0,
    protocol_tag: str = "teleport",
) -> None:
    """Send both bits of every outcome and undo the byproduct on the far halves one step later."""

    for outcome, channel in zip(outcomes, channels, strict=True):
        byproduct = byproduct_for(outcome, channel.kind)
        if recorder is not None:
            source, destination = channel.sites
            messages = [
                recorder.send(source, destination, time, time + 1.0, f"x={int(byproduct.x)}", protocol_tag),
                recorder.send(source, destination, time, time + 1.0, f"z={int(byproduct.z)}", protocol_tag),
            ]
            correction = f"correct:{byproduct.value}"
            _ = recorder.record(destination, time + 1.0, EventKind.LOCAL_OP, correction, protocol_tag, depends_on=messages)
        if byproduct is not Pauli.I:
            register.apply_byproduct((byproduct,), (channel.qubits[1],))


def complete_teleport(
    state: StateVector,
    sources: Sequence[int],
    channels: Sequence[ChannelPair],
    rng: RandomSource,
    *,
    pool: ChannelPool | None = None,
    recorder: TranscriptRecorder | None = None,
    time: float = 0.0,
    protocol_tag: str = "teleport",
) -> StateVector:
    """Teleport `sources` onto the far channel halves, byproducts corrected."""

    register = Register(state)
    outcomes = half_teleport_register(register, sources, channels, rng, pool=pool, recorder=recorder, time=time, protocol_tag=protocol_tag)
    correct_register(register, outcomes, channels, recorder=recorder, time=time, protocol_tag=protocol_tag)
    return register.state
