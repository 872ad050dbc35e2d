"""Round-based demolition measurement of nonlocal variables.

'why': a nonlocal variable can be measured instantaneously if every site only
performs local operations at the measurement time and leaves permanent records;
the eigenstate is reconstructed afterwards from those records

Each run is bipartite. Bob half-teleports his part to Alice, Alice rotates the
eigenbasis onto product states and half-teleports everything to Bob, and Bob
measures in the z basis when his own byproducts were trivial. Otherwise Bob
sends the qubits back through the channel group indexed by all his outcomes so
far, and Alice, who holds the matching group, undoes the pending frame before
rotating again. Unused channel groups are never provisioned.
"""
from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Final, Literal

import numpy as np
from numpy.typing import NDArray

from ._channels import ChannelPair, ChannelPool
from ._errors import DomainError
from ._ledger import EventKind, Transcript, TranscriptRecorder
from ._logging import LOGGER_NAMESPACE
from ._qcore import (
    BELL_OUTCOMES,
    PAULI_XZ,
    BellOutcome,
    ChannelKind,
    Pauli,
    StateVector,
    apply_matrix,
    byproduct_for,
    byproduct_matrix,
    computational_projectors,
)
from ._register import Register
from ._rng import RandomSource
from ._teleport import correct_register, half_teleport_register
from ._tsv import Direction, DirectionTag, SiteId, site_qubits, sites_of, validate_direction_tags
from ._validators import ComplexMatrix, validate_orthonormal, validate_unitary

MAX_QUBITS_PER_SITE: Final[int] = 2
DEFAULT_MAX_ROUNDS: Final[int] = 8

_LOGGER = logging.getLogger(f"{LOGGER_NAMESPACE}.demolition")


@dataclass(frozen=True, eq=False)
class NonlocalObservable:
    """Orthonormal eigenbasis over sites, each site evolving in one time direction.

    Factors at Backward sites are stored as bra coefficients: the stored vector
    holds the coefficients of <up| and <down| directly, so mixing directions stays
    linear. `product_labels[k]` is the computational basis state that the
    eigenbasis rotation sends eigenstate k to; it defaults to k.
    """

    eigenstates: tuple[StateVector, ...]
    eigenvalues: tuple[float, ...]
    site_partition: tuple[SiteId, ...]
    direction_tags: DirectionTag = field(default_factory=dict)
    product_labels: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.site_partition)
        dimension = 2**n
        if len(self.eigenstates) != dimension or any(state.num_qubits != n for state in self.eigenstates):
            raise DomainError(f"{n}-qubit observable needs {dimension} eigenstates of {n} qubits")
        if len(self.eigenvalues) != dimension:
            raise DomainError(f"{len(self.eigenvalues)} eigenvalues for {dimension} eigenstates")
        _ = validate_orthonormal([state.amplitudes for state in self.eigenstates])
        tags = self.direction_tags or {site: Direction.FORWARD for site in sites_of(self.site_partition)}
        object.__setattr__(self, "direction_tags", validate_direction_tags(self.site_partition, tags))
        labels = tuple(self.product_labels) or tuple(range(dimension))
        if sorted(labels) != list(range(dimension)):
            raise DomainError(f"product labels must be a permutation of 0..{dimension - 1}")
        object.__setattr__(self, "product_labels", labels)
        object.__setattr__(self, "eigenvalues", tuple(float(value) for value in self.eigenvalues))

    @property
    def num_qubits(self) -> int:
        return len(self.site_partition)

    @property
    def sites(self) -> tuple[SiteId, ...]:
        return sites_of(self.site_partition)

    @property
    def backward_qubits(self) -> tuple[int, ...]:
        return tuple(q for q, site in enumerate(self.site_partition) if self.direction_tags[site] is Direction.BACKWARD)

    @property
    def is_all_forward(self) -> bool:
        return not self.backward_qubits


def eigenbasis_unitary(observable: NonlocalObservable) -> ComplexMatrix:
    """Return U with U e_k = |product_labels[k]>."""

    columns = validate_orthonormal([state.amplitudes for state in observable.eigenstates])
    unitary = np.zeros_like(columns)
    unitary[list(observable.product_labels), :] = columns.conj().T
    return validate_unitary(unitary, columns.shape[0])


def forward_image(observable: NonlocalObservable) -> NonlocalObservable:
    """Return the all-Forward observable whose eigenstates are the direction-reversed originals.

    Reversal acts as XZ on the bra coefficients of every Backward qubit.
    """

    images: list[StateVector] = []
    for state in observable.eigenstates:
        amplitudes = state.amplitudes
        for qubit in observable.backward_qubits:
            amplitudes = apply_matrix(amplitudes, state.num_qubits, PAULI_XZ, (qubit,))
        images.append(StateVector(state.num_qubits, amplitudes))
    tags = {site: Direction.FORWARD for site in observable.sites}
    return NonlocalObservable(tuple(images), observable.eigenvalues, observable.site_partition, tags, observable.product_labels)


def eigen_probabilities(observable: NonlocalObservable, state: StateVector) -> NDArray[np.float64]:
    """Born probability of every eigenstate for `state` given in the observable's qubit order."""

    if state.num_qubits != observable.num_qubits:
        raise DomainError(f"state has {state.num_qubits} qubits, observable acts on {observable.num_qubits}")
    return np.array([float(abs(np.vdot(eigenstate.amplitudes, state.amplitudes)) ** 2) for eigenstate in observable.eigenstates])


def eigen_projectors(observable: NonlocalObservable) -> tuple[ComplexMatrix, ...]:
    return tuple(np.outer(state.amplitudes, state.amplitudes.conj()) for state in observable.eigenstates)


def bell_observable(sites: tuple[SiteId, SiteId] = ("A", "B")) -> NonlocalObservable:
    """Two-qubit Bell-operator variable, one qubit per site, eigenvalues 0..3 in Bell outcome order."""

    return NonlocalObservable(
        eigenstates=tuple(StateVector(2, outcome.vector) for outcome in BELL_OUTCOMES),
        eigenvalues=(0.0, 1.0, 2.0, 3.0),
        site_partition=sites,
    )


@dataclass(frozen=True)
class RoundRecord:
    """Local records of one round; `z_results` holds Bob's bits (qubit 0 first) on success."""

    round_index: int
    bob_bell_outcomes: tuple[BellOutcome, ...]
    alice_bell_outcomes: tuple[BellOutcome, ...]
    channel_ids_used: tuple[str, ...]
    success: bool
    z_results: tuple[int, ...] | None = None


DemolitionStatus = Literal["succeeded", "rounds_exhausted"]


@dataclass(frozen=True)
class DemolitionResult:
    """Outcome of one demolition run; `eigen_index` is None when rounds ran out."""

    status: DemolitionStatus
    eigen_index: int | None
    rounds: tuple[RoundRecord, ...]
    transcript: Transcript
    channels_consumed: int


def reconstruct_outcome(records: Sequence[RoundRecord], observable: NonlocalObservable) -> int:
    """Undo the bit flips of Alice's final byproducts on Bob's z bits and look up the eigenstate."""

    final = records[-1] if records else None
    z_results = final.z_results if final is not None and final.success else None
    if final is None or z_results is None:
        raise DomainError("no successful round to reconstruct from")
    flips = [byproduct_for(outcome).x for outcome in final.alice_bell_outcomes]
    if len(flips) != len(z_results):
        raise DomainError(f"{len(z_results)} z results for {len(flips)} teleported qubits")
    label = sum((bit ^ int(flip)) << qubit for qubit, (bit, flip) in enumerate(zip(z_results, flips, strict=True)))
    return observable.product_labels.index(label)


@dataclass(frozen=True)
class _Layout:
    alice: SiteId
    bob: SiteId
    bob_qubits: tuple[int, ...]


def _layout(observable: NonlocalObservable, alice_site: SiteId | None) -> _Layout:
    sites = observable.sites
    if len(sites) != 2:
        raise DomainError(f"demolition measurement needs exactly two sites (got {list(sites)})")
    _require_site_widths(observable)
    alice = alice_site or sites[0]
    if alice not in sites:
        raise DomainError(f"site {alice!r} is not part of the observable")
    bob = sites[1] if alice == sites[0] else sites[0]
    return _Layout(alice, bob, site_qubits(observable.site_partition, bob))


def _require_site_widths(observable: NonlocalObservable) -> None:
    for site in observable.sites:
        if len(site_qubits(observable.site_partition, site)) > MAX_QUBITS_PER_SITE:
            raise DomainError(f"site {site!r} holds more than {MAX_QUBITS_PER_SITE} qubits")


class _DemolitionRun:
    """Mutable bookkeeping of one run.

    `holders[q]` is the register label currently carrying logical qubit q, and
    `frame` the operator those holders carry relative to the input state.
    """

    def __init__(
        self,
        register: Register,
        system_labels: Sequence[int],
        unitary: ComplexMatrix,
        layout: _Layout,
        rng: RandomSource,
        pool: ChannelPool,
        recorder: TranscriptRecorder,
        time: float,
        protocol_tag: str,
    ) -> None:
        self._register: Register = register
        self._unitary: ComplexMatrix = unitary
        self._layout: _Layout = layout
        self._rng: RandomSource = rng
        self._pool: ChannelPool = pool
        self._recorder: TranscriptRecorder = recorder
        self._time: float = time
        self._tag: str = protocol_tag
        self._holders: list[int] = list(system_labels)
        self._frame: ComplexMatrix = np.eye(unitary.shape[0], dtype=np.complex128)
        self._history: list[BellOutcome] = []

    @property
    def num_qubits(self) -> int:
        return len(self._holders)

    def play_round(self, round_index: int) -> RoundRecord:
        if round_index == 1:
            opening = self._send(self._layout.bob_qubits, (self._layout.bob, self._layout.alice), "r1:b")
        else:
            group = f"r{round_index}:g{_group_index(self._history)}"
            opening = self._send(tuple(range(self.num_qubits)), (self._layout.bob, self._layout.alice), group)
        transform = self._unitary @ self._frame.conj().T
        self._register.apply(transform, self._holders)
        _ = self._recorder.record(self._layout.alice, self._time, EventKind.LOCAL_OP, f"transform:r{round_index}", self._tag)
        closing = self._send(tuple(range(self.num_qubits)), (self._layout.alice, self._layout.bob), f"r{round_index}:a")
        self._frame = _frame_of(closing, self.num_qubits) @ transform @ _frame_of(opening, self.num_qubits) @ self._frame

        bob_outcomes = tuple(outcome for _, outcome, _ in opening)
        alice_outcomes = tuple(outcome for _, outcome, _ in closing)
        channel_ids = tuple(channel.channel_id for _, _, channel in (*opening, *closing))
        self._history.extend(bob_outcomes)
        if any(byproduct_for(outcome) is not Pauli.I for outcome in bob_outcomes):
            return RoundRecord(round_index, bob_outcomes, alice_outcomes, channel_ids, False)
        return RoundRecord(round_index, bob_outcomes, alice_outcomes, channel_ids, True, self._measure_z())

    def _measure_z(self) -> tuple[int, ...]:
        z, _ = self._register.measure(computational_projectors(self.num_qubits), self._holders, self._rng)
        z_results = tuple((z >> qubit) & 1 for qubit in range(self.num_qubits))
        self._recorder.measurement(self._layout.bob, self._time, "".join(str(bit) for bit in z_results), self._tag, f"{self._tag}:z")
        return z_results

    def _send(self, qubits: Sequence[int], sites: tuple[SiteId, SiteId], group: str) -> list[tuple[int, BellOutcome, ChannelPair]]:
        """Half-teleport logical `qubits` across fresh PhiPlus channels of one group."""

        tag = self._tag
        channels = [
            self._pool.provision(self._register, ChannelKind.PHI_PLUS, sites, protocol_tag=tag, channel_id=f"{tag}:{group}:q{q}")
            for q in qubits
        ]
        sources = [self._holders[q] for q in qubits]
        outcomes = half_teleport_register(
            self._register,
            sources,
            channels,
            self._rng,
            pool=self._pool,
            recorder=self._recorder,
            time=self._time,
            protocol_tag=tag,
            discard=True,
        )
        for q, channel in zip(qubits, channels, strict=True):
            self._holders[q] = channel.qubits[1]
        return list(zip(qubits, outcomes, channels, strict=True))


def run_demolition(
    register: Register,
    system_labels: Sequence[int],
    observable: NonlocalObservable,
    rng: RandomSource,
    *,
    pool: ChannelPool,
    recorder: TranscriptRecorder,
    alice_site: SiteId | None = None,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    time: float = 0.0,
    protocol_tag: str = "demolition",
) -> tuple[RoundRecord, ...]:
    """Run the rounds on `system_labels` (observable qubit order) inside `register`.

    Every quantum event happens at `time`. Returns the round records; the last
    one has `success` set unless `max_rounds` ran out.
    """

    _require_demolition_input(observable, system_labels, max_rounds)
    recorder.declare(protocol_tag)
    layout = _layout(observable, alice_site)
    run = _DemolitionRun(register, system_labels, eigenbasis_unitary(observable), layout, rng, pool, recorder, time, protocol_tag)
    records: list[RoundRecord] = []
    for round_index in range(1, max_rounds + 1):
        record = run.play_round(round_index)
        records.append(record)
        _LOGGER.debug("demolition round: round=%s success=%s", round_index, record.success)
        if record.success:
            break
    return tuple(records)


def _require_demolition_input(observable: NonlocalObservable, system_labels: Sequence[int], max_rounds: int) -> None:
    if not observable.is_all_forward:
        raise DomainError("demolition measurement needs an all-Forward observable; reverse the backward parts first")
    if len(system_labels) != observable.num_qubits:
        raise DomainError(f"{len(system_labels)} system qubits for a {observable.num_qubits}-qubit observable")
    if max_rounds < 1:
        raise DomainError(f"max_rounds must be at least 1 (got {max_rounds})")


def _frame_of(sent: Sequence[tuple[int, BellOutcome, ChannelPair]], num_qubits: int) -> ComplexMatrix:
    byproduct = [Pauli.I] * num_qubits
    for q, outcome, _ in sent:
        byproduct[q] = byproduct_for(outcome)
    return byproduct_matrix(tuple(byproduct))


def _group_index(history: Sequence[BellOutcome]) -> int:
    """Encode Bob's outcomes so far as a base-4 channel group index."""

    index = 0
    for outcome in history:
        index = 4 * index + BELL_OUTCOMES.index(outcome)
    return index


def demolition_measure(
    observable: NonlocalObservable,
    input_state: StateVector,
    rng: RandomSource,
    *,
    alice_site: SiteId | None = None,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    pool: ChannelPool | None = None,
    recorder: TranscriptRecorder | None = None,
    measurement_time: float = 0.0,
    protocol_tag: str = "demolition",
) -> DemolitionResult:
    """Measure `observable` on `input_state` and reconstruct the eigen index afterwards.

    Returns status "rounds_exhausted" when no round succeeds within `max_rounds`.
    """

    if input_state.num_qubits != observable.num_qubits:
        raise DomainError(f"input has {input_state.num_qubits} qubits, observable acts on {observable.num_qubits}")
    pool = pool if pool is not None else ChannelPool()
    recorder = recorder if recorder is not None else TranscriptRecorder()
    register = Register(input_state)
    consumed_before = pool.consumed_count
    records = run_demolition(
        register,
        register.labels,
        observable,
        rng,
        pool=pool,
        recorder=recorder,
        alice_site=alice_site,
        max_rounds=max_rounds,
        time=measurement_time,
        protocol_tag=protocol_tag,
    )
    consumed = pool.consumed_count - consumed_before
    return finish_demolition(
        records,
        observable,
        recorder,
        alice_site=alice_site,
        measurement_time=measurement_time,
        protocol_tag=protocol_tag,
        channels_consumed=consumed,
    )


def finish_demolition(
    records: Sequence[RoundRecord],
    observable: NonlocalObservable,
    recorder: TranscriptRecorder,
    *,
    alice_site: SiteId | None = None,
    measurement_time: float = 0.0,
    protocol_tag: str = "demolition",
    channels_consumed: int = 0,
) -> DemolitionResult:
    """Reconcile the records classically after the measurement time and finalize the transcript.

    Bob sends his z bits to Alice one step after the measurement time; they
    arrive one step later, where Alice reconstructs the eigen index.
    """

    layout = _layout(observable, alice_site)
    if not records[-1].success:
        return DemolitionResult("rounds_exhausted", None, tuple(records), recorder.finalize(measurement_time), channels_consumed)
    z_results = records[-1].z_results or ()
    messages = [
        recorder.send(layout.bob, layout.alice, measurement_time + 1.0, measurement_time + 2.0, f"z{qubit}={bit}", protocol_tag)
        for qubit, bit in enumerate(z_results)
    ]
    eigen_index = reconstruct_outcome(records, observable)
    reconstructed_at = measurement_time + 2.0
    _ = recorder.record(layout.alice, reconstructed_at, EventKind.LOCAL_OP, f"reconstruct:{eigen_index}", protocol_tag, depends_on=messages)
    transcript = recorder.finalize(measurement_time)
    return DemolitionResult("succeeded", eigen_index, tuple(records), transcript, channels_consumed)


def teleport_then_measure(
    observable: NonlocalObservable,
    input_state: StateVector,
    rng: RandomSource,
    *,
    alice_site: SiteId | None = None,
    pool: ChannelPool | None = None,
    measurement_time: float = 0.0,
    protocol_tag: str = "teleport-then-measure",
) -> tuple[int, Transcript]:
    """Teleport Bob's part to Alice completely, then measure locally.

    Bob's Bell outcomes reach Alice exactly at the measurement time and her
    correction depends on them, so this strategy is not instantaneous.
    """

    if not observable.is_all_forward:
        raise DomainError("teleport_then_measure needs an all-Forward observable")
    layout = _layout(observable, alice_site)
    pool = pool if pool is not None else ChannelPool()
    recorder = TranscriptRecorder()
    register = Register(input_state)
    holders = list(register.labels)
    route = (layout.bob, layout.alice)
    channels = [pool.provision(register, ChannelKind.PHI_PLUS, route, protocol_tag=protocol_tag) for _ in layout.bob_qubits]
    sources = [holders[q] for q in layout.bob_qubits]
    sent_at = measurement_time - 1.0
    outcomes = half_teleport_register(
        register,
        sources,
        channels,
        rng,
        pool=pool,
        recorder=recorder,
        time=sent_at,
        protocol_tag=protocol_tag,
        discard=True,
        for_reconstruction=False,
    )
    correct_register(register, outcomes, channels, recorder=recorder, time=sent_at, protocol_tag=protocol_tag)
    for q, channel in zip(layout.bob_qubits, channels, strict=True):
        holders[q] = channel.qubits[1]
    register.apply(eigenbasis_unitary(observable), holders)
    _ = recorder.record(layout.alice, measurement_time, EventKind.LOCAL_OP, "transform", protocol_tag)
    label, _ = register.measure(computational_projectors(observable.num_qubits), holders, rng)
    recorder.measurement(layout.alice, measurement_time, str(label), protocol_tag, f"{protocol_tag}:z")
    return observable.product_labels.index(label), recorder.finalize(measurement_time)
