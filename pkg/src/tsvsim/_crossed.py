"""Mixed-direction descriptions, the crossed-measurement example, and their measurement.

'why': a state evolving forward at one site and backward at another only exists
inside a pre- and post-selected ensemble; these builders produce such ensembles
and measure them either by local reversal or by consolidating the backward parts

A general mixed description sum_i c_i |a_i>_A <b_i|_B is realized with a
memory register: (A, memory) is pre-selected in sum_i c_i |a_i>|i>, B starts
maximally entangled with an unobserved partner, and (B, memory) is
post-selected onto sum_i |b_i>|i>. The crossed example instead runs the four
pointer couplings of its measurements and post-selects the pointers.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace
from enum import Enum
from functools import partial, reduce
from typing import Final

import numpy as np
from numpy.typing import NDArray

from ._channels import ChannelPool
from ._demolition import (
    DEFAULT_MAX_ROUNDS,
    DemolitionResult,
    DemolitionStatus,
    NonlocalObservable,
    eigen_probabilities,
    eigenbasis_unitary,
    finish_demolition,
    forward_image,
    run_demolition,
)
from ._errors import DomainError, PostSelectionExhausted
from ._ledger import EventKind, Transcript, TranscriptRecorder, record_timeline
from ._logging import LOGGER_NAMESPACE
from ._parallel import DEFAULT_CHUNK_SIZE, map_chunks
from ._qcore import (
    DOWN,
    PAULI_X,
    PHI_PLUS,
    SWAP,
    UP,
    StateVector,
    basis_state,
    computational_projectors,
    extract_factor,
    permute_qubits,
    tensor,
)
from ._register import Register
from ._reversal import consolidate_backward_parts, time_reverse_backward
from ._rng import RandomSource
from ._scenario import (
    DEFAULT_MAX_ATTEMPTS,
    ENVIRONMENT_SITE,
    CouplingStep,
    Scenario,
    Step,
    UnitaryStep,
    erased_past,
    execute_on_register,
    postselect_onto,
    postselect_register,
    postselected_state,
    run_timeline,
)
from ._tsv import Direction, EmpiricalDistribution, SiteId
from ._validators import ComplexMatrix

MEMORY_SITE: Final[SiteId] = "memory"
CROSSED_MEASUREMENT_TIME: Final[float] = 1.0
CROSSED_FINAL_TIME: Final[float] = 2.0
CROSSED_COUPLING_TIMES: Final[tuple[float, float]] = (0.5, 1.5)
"""When the z parts of the crossed measurements act at A and at B."""
CROSSED_X_OFFSET: Final[float] = 0.1
"""How much earlier at A, and later at B, the x parts act."""
REVERSAL_LEAD: Final[float] = 0.25
"""How long before the measurement time the backward parts are reversed."""

_SQRT_HALF: Final[float] = math.sqrt(0.5)

_LOGGER = logging.getLogger(f"{LOGGER_NAMESPACE}.crossed")


def mixed_description(
    coefficients: Sequence[complex],
    forward_factors: Sequence[StateVector],
    backward_factors: Sequence[StateVector],
) -> StateVector:
    """Return sum_i c_i |a_i> <b_i| over (forward qubits, backward qubits), bra coefficients stored.

    `backward_factors` are the kets the future post-selection projects onto.
    """

    _require_terms(coefficients, forward_factors, backward_factors)
    amplitudes = sum(
        (c * np.kron(b.amplitudes.conj(), a.amplitudes) for c, a, b in zip(coefficients, forward_factors, backward_factors, strict=True)),
        start=np.zeros(2 ** (forward_factors[0].num_qubits + backward_factors[0].num_qubits), dtype=np.complex128),
    )
    return StateVector.from_amplitudes(amplitudes, normalize=True)


def _require_terms(
    coefficients: Sequence[complex],
    forward_factors: Sequence[StateVector],
    backward_factors: Sequence[StateVector],
) -> None:
    if not coefficients or not len(coefficients) == len(forward_factors) == len(backward_factors):
        raise DomainError("a mixed description needs equally many coefficients, forward factors and backward factors")
    if len({state.num_qubits for state in forward_factors}) != 1 or len({state.num_qubits for state in backward_factors}) != 1:
        raise DomainError("every term must act on the same forward and backward qubits")


def mixed_direction_scenario(
    coefficients: Sequence[complex],
    forward_factors: Sequence[StateVector],
    backward_factors: Sequence[StateVector],
    *,
    forward_site: SiteId = "A",
    backward_site: SiteId = "B",
    final_time: float = CROSSED_FINAL_TIME,
) -> Scenario:
    """Realize a forward-at-A, backward-at-B description through a memory register.

    Qubits are laid out as forward, backward, memory, then the partners that
    erase the backward qubits' past.
    """

    _require_terms(coefficients, forward_factors, backward_factors)
    num_forward = forward_factors[0].num_qubits
    num_backward = backward_factors[0].num_qubits
    num_memory = math.ceil(math.log2(len(coefficients))) if len(coefficients) > 1 else 0

    preselected = sum(
        (c * np.kron(_marker(i, num_memory), a.amplitudes) for i, (c, a) in enumerate(zip(coefficients, forward_factors, strict=True))),
        start=np.zeros(2 ** (num_forward + num_memory), dtype=np.complex128),
    )
    postselected = sum(
        (np.kron(_marker(i, num_memory), b.amplitudes) for i, b in enumerate(backward_factors)),
        start=np.zeros(2 ** (num_backward + num_memory), dtype=np.complex128),
    )
    # built as forward, memory, backward, partners; reorder to forward, backward, memory, partners
    stacked = tensor(StateVector.from_amplitudes(preselected, normalize=True), erased_past(num_backward))
    memory = list(range(num_forward, num_forward + num_memory))
    backward = list(range(num_forward + num_memory, num_forward + num_memory + num_backward))
    partners = list(range(num_forward + num_memory + num_backward, stacked.num_qubits))
    preselection = permute_qubits(stacked, [*range(num_forward), *backward, *memory, *partners])

    backward_qubits = tuple(range(num_forward, num_forward + num_backward))
    memory_qubits = tuple(range(num_forward + num_backward, num_forward + num_backward + num_memory))
    future = StateVector.from_amplitudes(postselected, normalize=True)
    return Scenario(
        num_qubits=preselection.num_qubits,
        preselection=preselection,
        postselections=(postselect_onto(future, (*backward_qubits, *memory_qubits), backward_site),),
        site_partition=(
            *([forward_site] * num_forward),
            *([backward_site] * num_backward),
            *([MEMORY_SITE] * num_memory),
            *([ENVIRONMENT_SITE] * num_backward),
        ),
        final_time=final_time,
    )


def _marker(index: int, num_qubits: int) -> NDArray[np.complex128]:
    return basis_state(num_qubits, index).amplitudes


_FIRST_VARIABLE_INDEX: Final[dict[int, int]] = {2: 0, -2: 1}


def crossed_eigen_index(o1_value: int, o2_value: int) -> int:
    """Map the crossed-measurement outcomes to the eigenstate they prepare.

    The second variable is taken mod 4, so only its residues 0 and 2 occur, and
    it only matters when the first variable is 0.
    """

    if o1_value in _FIRST_VARIABLE_INDEX:
        return _FIRST_VARIABLE_INDEX[o1_value]
    if o1_value != 0:
        raise DomainError(f"first crossed variable takes values 2, -2 or 0 (got {o1_value})")
    residue = o2_value % 4
    if residue not in (0, 2):
        raise DomainError(f"second crossed variable must be 0 or 2 mod 4 (got {o2_value})")
    return 2 if residue == 0 else 3


def crossed_terms(eigen_index: int) -> tuple[tuple[complex, ...], tuple[StateVector, ...], tuple[StateVector, ...]]:
    """Return (coefficients, forward kets at A, post-selected kets at B) of one crossed eigenstate."""

    up, down = StateVector(1, UP), StateVector(1, DOWN)
    table: dict[int, tuple[tuple[complex, ...], tuple[StateVector, ...], tuple[StateVector, ...]]] = {
        0: ((1.0,), (up,), (down,)),
        1: ((1.0,), (down,), (up,)),
        2: ((_SQRT_HALF, _SQRT_HALF), (up, down), (up, down)),
        3: ((_SQRT_HALF, -_SQRT_HALF), (up, down), (up, down)),
    }
    if eigen_index not in table:
        raise DomainError(f"crossed eigenstates are indexed 0..3 (got {eigen_index})")
    return table[eigen_index]


def _x_coupling() -> ComplexMatrix:
    """Flip the pointer when the subject is |->; targets are (subject, pointer)."""

    plus = np.full((2, 2), 0.5, dtype=np.complex128)
    return np.kron(np.eye(2), plus) + np.kron(PAULI_X, np.eye(2) - plus)


def _z_coupling(advance_on: int) -> ComplexMatrix:
    """Advance a two-qubit pointer by one, mod 4, when the subject is |advance_on>.

    Targets are (subject, pointer low bit, pointer high bit).
    """

    advance = np.roll(np.eye(4, dtype=np.complex128), 1, axis=0)
    projectors = computational_projectors(1)
    return np.kron(advance, projectors[advance_on]) + np.kron(np.eye(4), projectors[1 - advance_on])


def crossed_measurement_scenario(o1_value: int, o2_value: int) -> Scenario:
    """Return the ensemble in which the crossed measurements found `o1_value` and `o2_value`.

    Qubit 0 sits at A and qubit 1 at B, both with an erased past (partners 2
    and 3). Qubits 4 and 5 point to the first variable, qubit 6 to the second.
    A couples its x and then its z component before the measurement time, B
    its z and then its x component after it, and the pointers are post-selected
    onto the outcomes. The first pointer advances when A is down or B is up, so
    it reads 0, 1 or 2 for outcomes 2, 0 or -2 without telling up-up from
    down-down. The second pointer holds the x parity and is only read when the
    first variable is 0.
    """

    eigen_index = crossed_eigen_index(o1_value, o2_value)
    at_a, at_b = CROSSED_COUPLING_TIMES
    first, second = (4, 5), 6
    postselections = [postselect_onto(basis_state(2, (1 - o1_value // 2) % 4), first, MEMORY_SITE, "crossed:o1")]
    if eigen_index >= 2:
        postselections.append(postselect_onto(basis_state(1, (o2_value % 4) // 2), (second,), MEMORY_SITE, "crossed:o2"))
    return Scenario(
        num_qubits=7,
        preselection=tensor(erased_past(2), basis_state(3, 0)),
        timeline=(
            CouplingStep("crossed:x-A", "A", at_a - CROSSED_X_OFFSET, (0, second), _x_coupling()),
            CouplingStep("crossed:z-A", "A", at_a, (0, *first), _z_coupling(1)),
            CouplingStep("crossed:z-B", "B", at_b, (1, *first), _z_coupling(0)),
            CouplingStep("crossed:x-B", "B", at_b + CROSSED_X_OFFSET, (1, second), _x_coupling()),
        ),
        postselections=tuple(postselections),
        site_partition=("A", "B", ENVIRONMENT_SITE, ENVIRONMENT_SITE, MEMORY_SITE, MEMORY_SITE, MEMORY_SITE),
        final_time=CROSSED_FINAL_TIME,
    )


def crossed_observable() -> NonlocalObservable:
    """The variable forward at A and backward at B whose eigenstates the crossed measurements prepare.

    Eigenvalues are those of the first crossed variable; the product labels send
    the direction-reversed eigenstates to |up up>, |down down>, |up down>, |down up>.
    """

    eigenstates = tuple(mixed_description(*crossed_terms(k)) for k in range(4))
    return NonlocalObservable(
        eigenstates=eigenstates,
        eigenvalues=(2.0, -2.0, 0.0, 0.0),
        site_partition=("A", "B"),
        direction_tags={"A": Direction.FORWARD, "B": Direction.BACKWARD},
        product_labels=(0, 3, 2, 1),
    )


def crossed_forward_states() -> tuple[StateVector, ...]:
    """The four forward-evolving states the crossed eigenstates turn into after reversal at B."""

    up_down = basis_state(2, 2).amplitudes
    down_up = basis_state(2, 1).amplitudes
    return (
        basis_state(2, 0),
        basis_state(2, 3),
        StateVector(2, (up_down - down_up) * _SQRT_HALF),
        StateVector(2, (up_down + down_up) * _SQRT_HALF),
    )


def with_local_reversal(
    scenario: Scenario,
    particles: Sequence[int],
    t: float,
) -> tuple[Scenario, dict[int, int]]:
    """Give every particle a fresh ancilla at its own site and reverse it there at `t`.

    Returns the scenario and, per particle, the ancilla that now carries its
    forward-evolving reverse.
    """

    reversed_scenario = scenario
    ancillas: dict[int, int] = {}
    for particle in particles:
        reversed_scenario, (ancilla,) = reversed_scenario.with_qubits(basis_state(1, 0), reversed_scenario.site_partition[particle])
        reversed_scenario = time_reverse_backward(reversed_scenario, particle, ancilla, t)
        ancillas[particle] = ancilla
    return reversed_scenario, ancillas


def reversed_crossed_state(o1_value: int, o2_value: int, rng: RandomSource) -> StateVector:
    """Return the post-selected forward state of (A, reversal ancilla) for one crossed preparation."""

    scenario = crossed_measurement_scenario(o1_value, o2_value)
    reversed_scenario, ancillas = with_local_reversal(scenario, (1,), CROSSED_MEASUREMENT_TIME - REVERSAL_LEAD)
    final = postselected_state(reversed_scenario, run_timeline(reversed_scenario, rng).final_state)
    return extract_factor(final, (0, ancillas[1]))


@dataclass(frozen=True)
class MixedDirectionResult:
    """Outcome of one accepted mixed-direction measurement.

    `channels_consumed` includes the channels spent on rejected attempts.
    """

    status: DemolitionStatus
    eigen_index: int | None
    transcript: Transcript
    attempts: int
    channels_consumed: int


@dataclass(frozen=True, eq=False)
class _MixedRoute:
    """A scenario whose observable qubits are all forward-evolving by the measurement time.

    `labels` are the qubits carrying the observable, in its order, and `image`
    is its forward image placed on the sites those qubits occupy.
    """

    scenario: Scenario
    labels: tuple[int, ...]
    image: NonlocalObservable
    alice_site: SiteId | None
    time: float
    tag: str

    @property
    def before(self) -> list[Step]:
        return [step for step in self.scenario.timeline if step.time <= self.time]

    @property
    def after(self) -> list[Step]:
        return [step for step in self.scenario.timeline if step.time > self.time]

    def measure(
        self,
        register: Register,
        rng: RandomSource,
        pool: ChannelPool,
        recorder: TranscriptRecorder,
        max_rounds: int,
    ) -> Callable[[], DemolitionResult]:
        """Measure at `time` and return the classical reconciliation to run once the attempt is accepted."""

        if len(self.image.sites) == 1:
            return self._measure_locally(register, rng, recorder)
        records = run_demolition(
            register,
            self.labels,
            self.image,
            rng,
            pool=pool,
            recorder=recorder,
            alice_site=self.alice_site,
            max_rounds=max_rounds,
            time=self.time,
            protocol_tag=self.tag,
        )
        return partial(
            finish_demolition, records, self.image, recorder, alice_site=self.alice_site, measurement_time=self.time, protocol_tag=self.tag
        )

    def _measure_locally(self, register: Register, rng: RandomSource, recorder: TranscriptRecorder) -> Callable[[], DemolitionResult]:
        (site,) = self.image.sites
        register.apply(eigenbasis_unitary(self.image), self.labels)
        _ = recorder.record(site, self.time, EventKind.LOCAL_OP, "transform", self.tag)
        label, _ = register.measure(computational_projectors(len(self.labels)), self.labels, rng)
        recorder.measurement(site, self.time, str(label), self.tag, f"{self.tag}:z")
        eigen_index = self.image.product_labels.index(label)
        return lambda: DemolitionResult("succeeded", eigen_index, (), recorder.finalize(self.time), 0)


def measure_mixed_direction(
    observable: NonlocalObservable,
    scenario: Scenario,
    rng: RandomSource,
    *,
    system_qubits: Sequence[int],
    measurement_time: float = CROSSED_MEASUREMENT_TIME,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    pool: ChannelPool | None = None,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    consolidate_to: SiteId | None = None,
    protocol_tag: str = "mixed",
) -> MixedDirectionResult:
    """Measure a mixed-direction observable on the ensemble `scenario` describes at `measurement_time`.

    By default every backward part is reversed locally. With `consolidate_to`,
    the backward parts are moved to that site through singlet channels instead.
    The forward image is then measured locally when it sits on one site and by
    demolition, with `consolidate_to` as Alice, when it spans two.
    """

    _require_measurable(observable, system_qubits, max_attempts)
    pool = pool if pool is not None else ChannelPool()
    consumed_before = pool.consumed_count
    route = _prepare_route(observable, scenario, system_qubits, measurement_time, pool, consolidate_to, protocol_tag)
    for attempt in range(1, max_attempts + 1):
        result = _attempt(route, rng, pool, max_rounds)
        if result is not None:
            consumed = pool.consumed_count - consumed_before
            return MixedDirectionResult(result.status, result.eigen_index, result.transcript, attempt, consumed)
    _LOGGER.warning("mixed-direction post-selection exhausted: attempts=%s", max_attempts)
    raise PostSelectionExhausted(max_attempts)


def _require_measurable(observable: NonlocalObservable, system_qubits: Sequence[int], max_attempts: int) -> None:
    if len(system_qubits) != observable.num_qubits:
        raise DomainError(f"{len(system_qubits)} system qubits for a {observable.num_qubits}-qubit observable")
    if max_attempts < 1:
        raise DomainError(f"max_attempts must be at least 1 (got {max_attempts})")


def _prepare_route(
    observable: NonlocalObservable,
    scenario: Scenario,
    system_qubits: Sequence[int],
    measurement_time: float,
    pool: ChannelPool,
    consolidate_to: SiteId | None,
    protocol_tag: str,
) -> _MixedRoute:
    particles = [system_qubits[q] for q in observable.backward_qubits]
    forward = [qubit for qubit in system_qubits if qubit not in particles]
    prepared, holders = _detach_forward_parts(scenario, forward, measurement_time, protocol_tag)
    prepared, placements = _reverse_backward_parts(prepared, particles, measurement_time, pool, consolidate_to, protocol_tag)
    holders.update(placements)
    labels = tuple(holders.get(qubit, qubit) for qubit in system_qubits)
    placed = tuple(prepared.site_partition[label] for label in labels)
    image = replace(forward_image(observable), site_partition=placed, direction_tags={})
    return _MixedRoute(prepared, labels, image, consolidate_to, measurement_time, protocol_tag)


def _reverse_backward_parts(
    scenario: Scenario,
    particles: Sequence[int],
    measurement_time: float,
    pool: ChannelPool,
    consolidate_to: SiteId | None,
    protocol_tag: str,
) -> tuple[Scenario, dict[int, int]]:
    """Reverse locally, or move to `consolidate_to`; parts already there are reversed in place."""

    lead = measurement_time - REVERSAL_LEAD
    if consolidate_to is None:
        return with_local_reversal(scenario, particles, lead)
    moved, placements = consolidate_backward_parts(scenario, particles, consolidate_to, pool, measurement_time, protocol_tag=protocol_tag)
    staying = [particle for particle, holder in placements.items() if holder == particle]
    reversed_scenario, ancillas = with_local_reversal(moved, staying, lead)
    return reversed_scenario, {**placements, **ancillas}


def _detach_forward_parts(scenario: Scenario, qubits: Sequence[int], t: float, protocol_tag: str) -> tuple[Scenario, dict[int, int]]:
    """Swap every forward qubit that is also measured later into half of a fresh local pair at `t`.

    The returned qubit carries only the forward-evolving part; the later
    measurement lands on the other half, whose partner is never observed.
    """

    detached = scenario
    holders: dict[int, int] = {}
    for qubit in qubits:
        if not detached.carries_backward_state(qubit, t):
            continue
        site = detached.site_partition[qubit]
        detached, (fresh, _) = detached.with_qubits(StateVector(2, PHI_PLUS), site)
        detached = detached.insert(UnitaryStep(f"{protocol_tag}:detach-{qubit}", site, t, (qubit, fresh), SWAP))
        holders[qubit] = fresh
    return detached, holders


def _attempt(route: _MixedRoute, rng: RandomSource, pool: ChannelPool, max_rounds: int) -> DemolitionResult | None:
    recorder = TranscriptRecorder()
    before, after = route.before, route.after
    record_timeline(recorder, before, route.tag)
    register = Register(route.scenario.preselection)
    _ = execute_on_register(register, before, rng)
    reconcile = route.measure(register, rng, pool, recorder, max_rounds)
    _ = execute_on_register(register, after, rng)
    if not postselect_register(route.scenario, register, rng):
        return None
    record_timeline(recorder, after, route.tag)
    return reconcile()


class NaiveMode(str, Enum):
    """How the naive strategy picks the eigenstate it prepares."""

    FIXED = "fixed"
    UNIFORM = "uniform"


def backward_state_scenario(backward_state: StateVector, forward_state: StateVector | None = None) -> Scenario:
    """System post-selected onto `backward_state`; with no forward state its past is erased.

    The system occupies the first qubits; erasing partners follow.
    """

    n = backward_state.num_qubits
    if forward_state is not None and forward_state.num_qubits != n:
        raise DomainError(f"forward state has {forward_state.num_qubits} qubits, backward state {n}")
    preselection = erased_past(n) if forward_state is None else forward_state
    return Scenario(
        num_qubits=preselection.num_qubits,
        preselection=preselection,
        postselections=(postselect_onto(backward_state, tuple(range(n))),),
        site_partition=("A",) * n + (ENVIRONMENT_SITE,) * (preselection.num_qubits - n),
        final_time=CROSSED_FINAL_TIME,
    )


def naive_prepare_strategy(
    observable: NonlocalObservable,
    eigen_index: int,
    scenario: Scenario,
    rng: RandomSource,
    *,
    system_qubits: Sequence[int],
    num_accepted_runs: int,
    mode: NaiveMode = NaiveMode.FIXED,
    measurement_time: float = CROSSED_MEASUREMENT_TIME,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> EmpiricalDistribution:
    """Prepare an eigenstate at `measurement_time` instead of measuring, and tally it over accepted runs.

    The tally is what the strategy would report as the measured distribution.
    """

    _require_preparable(observable, eigen_index, num_accepted_runs)
    mode = NaiveMode(mode)
    before = [step for step in scenario.timeline if step.time <= measurement_time]
    after = [step for step in scenario.timeline if step.time > measurement_time]

    def run_chunk(index: int, _start: int, count: int) -> EmpiricalDistribution:
        stream = rng.substream(index)
        tallies = [
            _naive_accepted(observable, eigen_index, mode, scenario, system_qubits, before, after, stream, max_attempts)
            for _ in range(count)
        ]
        return EmpiricalDistribution.from_outcomes(tallies, len(observable.eigenstates))

    return reduce(EmpiricalDistribution.merge, map_chunks(run_chunk, num_accepted_runs, threads, chunk_size))


def _require_preparable(observable: NonlocalObservable, eigen_index: int, num_accepted_runs: int) -> None:
    if not 0 <= eigen_index < len(observable.eigenstates):
        raise DomainError(f"eigen index {eigen_index} out of range for {len(observable.eigenstates)} eigenstates")
    if num_accepted_runs < 1:
        raise DomainError(f"num_accepted_runs must be at least 1 (got {num_accepted_runs})")
    if not observable.is_all_forward:
        raise DomainError("naive preparation needs an all-Forward observable")


def _naive_accepted(
    observable: NonlocalObservable,
    eigen_index: int,
    mode: NaiveMode,
    scenario: Scenario,
    system_qubits: Sequence[int],
    before: Sequence[Step],
    after: Sequence[Step],
    rng: RandomSource,
    max_attempts: int,
) -> int:
    for _ in range(max_attempts):
        chosen = eigen_index if mode is NaiveMode.FIXED else rng.integers(len(observable.eigenstates))
        register = Register(scenario.preselection)
        _ = execute_on_register(register, before, rng)
        register.reset(system_qubits, observable.eigenstates[chosen], rng)
        _ = execute_on_register(register, after, rng)
        if postselect_register(scenario, register, rng):
            return chosen
    _LOGGER.warning("naive preparation post-selection exhausted: attempts=%s", max_attempts)
    raise PostSelectionExhausted(max_attempts)


def backward_born_distribution(observable: NonlocalObservable, backward_state: StateVector) -> NDArray[np.float64]:
    """Outcome probabilities when only the backward-evolving state is present: |<phi|e_k>|^2."""

    return eigen_probabilities(observable, backward_state)


def naive_distribution(
    observable: NonlocalObservable,
    eigen_index: int,
    backward_state: StateVector,
    mode: NaiveMode = NaiveMode.FIXED,
) -> NDArray[np.float64]:
    """Analytic counterpart of `naive_prepare_strategy`.

    A fixed preparation reports one outcome; a uniform one is accepted with
    probability |<phi|e_k>|^2 and so reproduces the backward Born weights.
    """

    if NaiveMode(mode) is NaiveMode.UNIFORM:
        weights = backward_born_distribution(observable, backward_state)
        return weights / weights.sum()
    distribution = np.zeros(len(observable.eigenstates))
    distribution[eigen_index] = 1.0
    return distribution
