"""Reverse the time direction of backward- and forward-evolving states.

'why': a backward-evolving state can be turned into a forward-evolving one
deterministically with a singlet, and moved to another site with one channel;
the forward-to-backward direction only succeeds on the singlet Bell outcome
"""
from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ._channels import ChannelPair, ChannelPool, consume_channel
from ._errors import DomainError, NumericalValidationError, ProtocolError
from ._logging import LOGGER_NAMESPACE
from ._qcore import (
    PAULI_XZ,
    PHI_PLUS,
    SWAP,
    BellOutcome,
    ChannelKind,
    StateVector,
    apply_matrix,
    basis_state,
    split_product,
    tensor,
)
from ._register import Register
from ._rng import RandomSource
from ._scenario import (
    ENVIRONMENT_SITE,
    ChannelEventStep,
    Scenario,
    SingletPreparationStep,
    Step,
    UnitaryStep,
    erased_past,
    is_disturbance,
    postselect_onto,
)
from ._tsv import SiteId
from ._validators import TOLERANCE, validate_targets

_LOGGER = logging.getLogger(f"{LOGGER_NAMESPACE}.reversal")


def reverse_time_direction(state: StateVector) -> StateVector:
    """Map a post-selected ket to the forward state a singlet partner acquires.

    Per qubit: complex conjugation followed by XZ, so a|up> + b|down> becomes
    -b*|up> + a*|down>.
    """

    amplitudes = state.amplitudes.conj()
    for qubit in range(state.num_qubits):
        amplitudes = apply_matrix(amplitudes, state.num_qubits, PAULI_XZ, (qubit,))
    return StateVector(state.num_qubits, amplitudes)


def time_reverse_backward(
    scenario: Scenario,
    particle: int,
    ancilla: int,
    t: float,
    *,
    step_id: str | None = None,
) -> Scenario:
    """Insert a singlet preparation of (particle, ancilla) at time `t`.

    The particle must be post-selected, or coupled to a post-selected pointer,
    later with nothing else touching it in between, and the ancilla must still
    be fresh at `t`.
    """

    _ = validate_targets(scenario.num_qubits, (particle, ancilla))
    if not scenario.carries_backward_state(particle, t):
        raise ProtocolError(f"qubit {particle} is never post-selected; it carries no backward-evolving state")
    step = SingletPreparationStep(step_id or f"reverse-{particle}-{ancilla}", scenario.site_partition[ancilla], t, (particle, ancilla))
    position = sum(1 for existing in scenario.timeline if existing.time <= t)
    _require_fresh(scenario, ancilla, position)
    _require_undisturbed(scenario, particle, position)
    return scenario.insert_at(position, step)


def _require_fresh(scenario: Scenario, qubit: int, position: int) -> None:
    for step in scenario.timeline[:position]:
        if qubit in step.targets:
            raise ProtocolError(f"ancilla {qubit} is touched by step {step.step_id!r} before the reversal")
    try:
        _ = split_product(scenario.preselection, (qubit,))
    except NumericalValidationError as exc:
        raise ProtocolError(f"ancilla {qubit} is entangled in the pre-selection") from exc


def _require_undisturbed(scenario: Scenario, qubit: int, position: int) -> None:
    for step in scenario.timeline[position:]:
        if qubit in step.targets and is_disturbance(step):
            raise ProtocolError(f"step {step.step_id!r} disturbs qubit {qubit} before its post-selection")


def with_fiducial_ancilla(state: StateVector) -> tuple[StateVector, int, int]:
    """Append an (ancilla, partner) PhiPlus pair; the ancilla alone is maximally mixed."""

    ancilla = state.num_qubits
    return tensor(state, StateVector(2, PHI_PLUS)), ancilla, ancilla + 1


@dataclass(frozen=True, eq=False)
class ReverseAttempt:
    """Outcome of trying to reverse a forward-evolving qubit.

    On success the ancilla carries the backward-evolving reverse of the input,
    visible as the forward state XZ|psi> of its partner.
    """

    success: bool
    outcome: BellOutcome
    state: StateVector


def attempt_reverse_forward(
    state: StateVector,
    qubit: int,
    ancilla: int,
    rng: RandomSource,
    *,
    partner: int,
) -> ReverseAttempt:
    """Bell-measure (qubit, ancilla); only the singlet outcome counts, nothing is corrected."""

    _ = validate_targets(state.num_qubits, (qubit, ancilla, partner))
    register = Register(state)
    pair = register.factor((ancilla, partner)) if _is_product(state, (ancilla, partner)) else None
    if pair is None or abs(np.vdot(PHI_PLUS, pair.amplitudes)) ** 2 < 1.0 - TOLERANCE:
        raise ProtocolError(f"ancilla {ancilla} is not half of a fresh PhiPlus pair with qubit {partner}")
    outcome = register.bell_measure((qubit, ancilla), rng)
    return ReverseAttempt(outcome is BellOutcome.PSI_MINUS, outcome, register.state)


def _is_product(state: StateVector, qubits: Sequence[int]) -> bool:
    try:
        _ = split_product(state, qubits)
    except NumericalValidationError:
        return False
    return True


def move_backward_state(
    scenario: Scenario,
    particle: int,
    target_site: SiteId,
    t: float,
    *,
    channel: ChannelPair | None = None,
    pool: ChannelPool | None = None,
    protocol_tag: str = "move",
) -> Scenario:
    """Move the backward-evolving state of `particle` to `target_site` as a forward state.

    Consumes one pre-shared singlet. When the channel half at the particle's
    site is the post-selected particle itself nothing is inserted but the
    consumption; otherwise a local swap at `t` hands the post-selection to the
    channel half.
    """

    source_site = scenario.site_partition[particle]
    channel = _singlet_for_move(channel, pool, (target_site, source_site))
    near = channel.half_at(source_site)
    position = sum(1 for existing in scenario.timeline if existing.time <= t)
    _require_untouched(scenario.timeline[:position], channel, (near, channel.half_at(target_site)))
    consume_channel(channel, pool)

    consumed = ChannelEventStep(f"{protocol_tag}:{channel.channel_id}", source_site, t, (near,), channel.channel_id)
    moved = scenario.insert_at(position, consumed)
    if near != particle:
        _require_undisturbed(moved, particle, position + 1)
        moved = moved.insert_at(position + 1, UnitaryStep(f"{protocol_tag}:swap-{particle}", source_site, t, (particle, near), SWAP))
    _LOGGER.debug("backward state moved: particle=%s from=%s to=%s channel=%s", particle, source_site, target_site, channel.channel_id)
    return moved


def _singlet_for_move(channel: ChannelPair | None, pool: ChannelPool | None, sites: tuple[SiteId, SiteId]) -> ChannelPair:
    if channel is None:
        if pool is None:
            raise DomainError("move_backward_state needs a channel or a pool to take one from")
        channel = pool.take_unconsumed(ChannelKind.SINGLET, sites)
    if channel.kind is not ChannelKind.SINGLET:
        raise DomainError(f"channel {channel.channel_id} is {channel.kind.value}, a singlet is required")
    return channel


def _require_untouched(steps: Sequence[Step], channel: ChannelPair, halves: Sequence[int]) -> None:
    for step in steps:
        if touched := set(halves) & set(step.targets):
            raise ProtocolError(f"channel {channel.channel_id} half {min(touched)} is touched before the move")


def consolidate_backward_parts(
    scenario: Scenario,
    particles: Sequence[int],
    target_site: SiteId,
    pool: ChannelPool,
    t: float,
    *,
    protocol_tag: str = "consolidation",
) -> tuple[Scenario, dict[int, int]]:
    """Bring the backward-evolving parts of every site to `target_site`.

    Returns the new scenario and, per particle, the qubit at `target_site` that
    now carries its reversed state. Particles already at the target stay put.
    """

    placements: dict[int, int] = {}
    consolidated = scenario
    for particle in particles:
        site = consolidated.site_partition[particle]
        if site == target_site:
            placements[particle] = particle
            continue
        route = (target_site, site)
        consolidated, channel = pool.provision_in_scenario(consolidated, ChannelKind.SINGLET, route, protocol_tag=protocol_tag)
        consolidated = move_backward_state(consolidated, particle, target_site, t, channel=channel, pool=pool, protocol_tag=protocol_tag)
        placements[particle] = channel.half_at(target_site)
    return consolidated, placements


def reversal_scenario(backward_state: StateVector, t: float = 0.5, *, final_time: float = 1.0) -> Scenario:
    """Particle 0 with an erased past, post-selected onto `backward_state`, reversed onto ancilla 2 at `t`.

    Qubit 1 is the unobserved partner that erases the particle's past.
    """

    if backward_state.num_qubits != 1:
        raise DomainError(f"reversal acts on one particle (got {backward_state.num_qubits} qubits)")
    base = Scenario(
        num_qubits=2,
        preselection=erased_past(1),
        postselections=(postselect_onto(backward_state, (0,), site="B"),),
        site_partition=("B", ENVIRONMENT_SITE),
        final_time=final_time,
    )
    with_ancilla, (ancilla,) = base.with_qubits(basis_state(1, 0), "B")
    return time_reverse_backward(with_ancilla, 0, ancilla, t)
