"""Timed scenarios with pre- and post-selection, executed by rejection sampling.

'why': backward-evolving states exist only through post-selection; a Scenario is
the operational encoding that every protocol and experiment runs on
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from functools import reduce
from itertools import pairwise
from typing import Final

import numpy as np
from numpy.typing import NDArray

from ._errors import DomainError, NumericalValidationError, PostSelectionExhausted
from ._logging import LOGGER_NAMESPACE
from ._parallel import DEFAULT_CHUNK_SIZE, map_chunks
from ._qcore import (
    BELL_OUTCOMES,
    BELL_PROJECTORS,
    PHI_PLUS,
    ComplexVector,
    StateVector,
    apply_matrix,
    basis_state,
    measure_amplitudes,
    permute_qubits,
    prepare_singlet,
    tensor,
)
from ._register import Register
from ._rng import RandomSource
from ._tsv import EmpiricalDistribution, GeneralizedTwoStateVector, SiteId, TwoStateVector
from ._validators import (
    PROBABILITY_FLOOR,
    TOLERANCE,
    ComplexMatrix,
    validate_num_qubits,
    validate_pair,
    validate_projector,
    validate_projector_set,
    validate_targets,
    validate_unitary,
)

DEFAULT_MAX_ATTEMPTS: Final[int] = 1_000_000
ANCILLA_SITE: Final[SiteId] = "ancilla"
ENVIRONMENT_SITE: Final[SiteId] = "environment"

_LOGGER = logging.getLogger(f"{LOGGER_NAMESPACE}.scenario")


@dataclass(frozen=True, eq=False)
class UnitaryStep:
    step_id: str
    site: SiteId
    time: float
    targets: tuple[int, ...]
    matrix: ComplexMatrix = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "matrix", validate_unitary(self.matrix, 2 ** len(self.targets)))


@dataclass(frozen=True, eq=False)
class CouplingStep(UnitaryStep):
    """Von Neumann coupling of `targets[0]` to a pointer made of the remaining targets.

    The pointer is only ever read by a post-selection, so the coupling is part
    of a later measurement of its subject, not a disturbance of it.
    """

    @property
    def subject(self) -> int:
        return self.targets[0]


@dataclass(frozen=True, eq=False)
class MeasurementStep:
    """Projective measurement; the recorded outcome is the projector index."""

    step_id: str
    site: SiteId
    time: float
    targets: tuple[int, ...]
    projectors: tuple[ComplexMatrix, ...] = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "projectors", validate_projector_set(self.projectors, 2 ** len(self.targets)))

    @property
    def num_outcomes(self) -> int:
        return len(self.projectors)


@dataclass(frozen=True, eq=False)
class BellMeasurementStep:
    """Bell measurement; the recorded outcome indexes `BELL_OUTCOMES`."""

    step_id: str
    site: SiteId
    time: float
    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.targets) != 2:
            raise DomainError(f"Bell measurement needs a qubit pair (got {len(self.targets)} qubits)")
        object.__setattr__(self, "targets", tuple(self.targets))

    @property
    def num_outcomes(self) -> int:
        return len(BELL_OUTCOMES)


@dataclass(frozen=True, eq=False)
class SingletPreparationStep:
    """Put `targets` into the singlet, overwriting any entanglement with the rest."""

    step_id: str
    site: SiteId
    time: float
    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.targets) != 2:
            raise DomainError(f"singlet preparation needs a qubit pair (got {len(self.targets)} qubits)")
        object.__setattr__(self, "targets", tuple(self.targets))


@dataclass(frozen=True, eq=False)
class ChannelEventStep:
    """Consumption of a pre-shared channel half; bookkeeping only, no physics."""

    step_id: str
    site: SiteId
    time: float
    targets: tuple[int, ...]
    channel_id: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))


Step = UnitaryStep | MeasurementStep | BellMeasurementStep | SingletPreparationStep | ChannelEventStep


def is_disturbance(step: Step) -> bool:
    return not isinstance(step, (ChannelEventStep, CouplingStep))


@dataclass(frozen=True, eq=False)
class PostSelection:
    """Keep only runs in which `projector` fires on `targets` at the final time."""

    projector: ComplexMatrix = field(repr=False)
    targets: tuple[int, ...]
    site: SiteId = "A"
    label: str = "post"

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "projector", validate_projector(self.projector, 2 ** len(self.targets)))


def postselect_onto(state: StateVector, targets: Sequence[int], site: SiteId = "A", label: str = "post") -> PostSelection:
    """Return the post-selection onto the stored ket `state` on `targets`."""

    return PostSelection(np.outer(state.amplitudes, state.amplitudes.conj()), tuple(targets), site, label)


@dataclass(frozen=True, eq=False)
class Scenario:
    """Pre-selection, a timed list of steps, and final-time post-selections."""

    num_qubits: int
    preselection: StateVector
    timeline: tuple[Step, ...] = ()
    postselections: tuple[PostSelection, ...] = ()
    site_partition: tuple[SiteId, ...] = ()
    final_time: float | None = None

    def __post_init__(self) -> None:
        if self.preselection.num_qubits != self.num_qubits:
            raise DomainError(f"preselection has {self.preselection.num_qubits} qubits, scenario declares {self.num_qubits}")
        object.__setattr__(self, "timeline", tuple(self.timeline))
        object.__setattr__(self, "postselections", tuple(self.postselections))
        partition = tuple(self.site_partition) or ("A",) * self.num_qubits
        if len(partition) != self.num_qubits:
            raise DomainError(f"site partition names {len(partition)} qubits for a {self.num_qubits}-qubit scenario")
        object.__setattr__(self, "site_partition", partition)
        _require_well_formed(self)

    def step(self, step_id: str) -> Step:
        for candidate in self.timeline:
            if candidate.step_id == step_id:
                return candidate
        raise DomainError(f"scenario has no step {step_id!r}")

    def index_of(self, step_id: str) -> int:
        return self.timeline.index(self.step(step_id))

    def carries_backward_state(self, qubit: int, after: float) -> bool:
        """True when `qubit` is post-selected or coupled to a pointer later than `after`."""

        if any(qubit in postselection.targets for postselection in self.postselections):
            return True
        return any(isinstance(step, CouplingStep) and step.subject == qubit and step.time > after for step in self.timeline)

    def insert(self, step: Step) -> Scenario:
        """Return a scenario with `step` placed after every step at or before its time."""

        position = sum(1 for existing in self.timeline if existing.time <= step.time)
        return replace(self, timeline=(*self.timeline[:position], step, *self.timeline[position:]))

    def insert_at(self, position: int, step: Step) -> Scenario:
        """Return a scenario with `step` at an explicit timeline position."""

        return replace(self, timeline=(*self.timeline[:position], step, *self.timeline[position:]))

    def with_measurement(
        self,
        step_id: str,
        projectors: Sequence[NDArray[np.generic]],
        targets: Sequence[int],
        time: float,
        site: SiteId = "A",
    ) -> Scenario:
        matrices = tuple(np.asarray(p, dtype=np.complex128) for p in projectors)
        return self.insert(MeasurementStep(step_id, site, time, tuple(targets), matrices))

    def with_qubits(self, factor: StateVector, site: SiteId) -> tuple[Scenario, tuple[int, ...]]:
        """Append fresh qubits in state `factor` and return their indices."""

        added = tuple(range(self.num_qubits, self.num_qubits + factor.num_qubits))
        extended = replace(
            self,
            num_qubits=self.num_qubits + factor.num_qubits,
            preselection=tensor(self.preselection, factor),
            site_partition=(*self.site_partition, *([site] * factor.num_qubits)),
        )
        return extended, added


def _require_well_formed(scenario: Scenario) -> None:
    _require_unique_ordered(scenario.timeline)
    for step in scenario.timeline:
        _validate_step_targets(scenario.num_qubits, step)
    for postselection in scenario.postselections:
        _ = validate_targets(scenario.num_qubits, postselection.targets)
    last = scenario.timeline[-1].time if scenario.timeline else -math.inf
    if scenario.final_time is not None and scenario.final_time < last:
        raise NumericalValidationError(f"final time {scenario.final_time} precedes the last step at {last}")


def _validate_step_targets(num_qubits: int, step: Step) -> None:
    if isinstance(step, (BellMeasurementStep, SingletPreparationStep)):
        _ = validate_pair(num_qubits, step.targets)
    else:
        _ = validate_targets(num_qubits, step.targets)


def _require_unique_ordered(timeline: Sequence[Step]) -> None:
    duplicates = [step_id for step_id, count in Counter(step.step_id for step in timeline).items() if count > 1]
    if duplicates:
        raise NumericalValidationError(f"duplicate step id {duplicates[0]!r}")
    for earlier, later in pairwise(timeline):
        if later.time < earlier.time:
            raise NumericalValidationError(f"step {later.step_id!r} at time {later.time} precedes an earlier step at {earlier.time}")


@dataclass(frozen=True, eq=False)
class RunRecord:
    """Measurement record of one executed timeline."""

    outcomes: Mapping[str, int]
    probabilities: Mapping[str, float]
    final_state: StateVector
    attempts: int = 1


def run_timeline(scenario: Scenario, rng: RandomSource) -> RunRecord:
    """Execute every step once, without post-selection."""

    amplitudes, outcomes, probabilities = _execute(scenario, rng)
    return RunRecord(outcomes, probabilities, StateVector(scenario.num_qubits, amplitudes))


def apply_postselections(scenario: Scenario, state: StateVector, rng: RandomSource) -> StateVector | None:
    """Return the post-selected state, or None when any post-selection fails."""

    accepted = _postselect(scenario, state.amplitudes, rng)
    return None if accepted is None else StateVector(scenario.num_qubits, accepted)


def postselection_probability(scenario: Scenario, state: StateVector) -> float:
    """Return the probability that every post-selection fires on `state`."""

    amplitudes = state.amplitudes
    for postselection in scenario.postselections:
        amplitudes = apply_matrix(amplitudes, scenario.num_qubits, postselection.projector, postselection.targets)
    return float(np.vdot(amplitudes, amplitudes).real)


def sample_postselected(scenario: Scenario, rng: RandomSource, max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> RunRecord:
    """Repeat the timeline until every post-selection fires.

    Raises `PostSelectionExhausted` after `max_attempts` rejected runs.
    """

    if max_attempts < 1:
        raise DomainError(f"max_attempts must be at least 1 (got {max_attempts})")
    for attempt in range(1, max_attempts + 1):
        amplitudes, outcomes, probabilities = _execute(scenario, rng)
        accepted = _postselect(scenario, amplitudes, rng)
        if accepted is not None:
            return RunRecord(outcomes, probabilities, StateVector(scenario.num_qubits, accepted), attempt)
    _LOGGER.warning("post-selection exhausted: attempts=%s", max_attempts)
    raise PostSelectionExhausted(max_attempts)


def conditional_distribution(
    scenario: Scenario,
    step_id: str,
    rng: RandomSource,
    num_accepted_runs: int,
    *,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> EmpiricalDistribution:
    """Return outcome counts of `step_id` over exactly `num_accepted_runs` accepted runs."""

    step = scenario.step(step_id)
    if not isinstance(step, (MeasurementStep, BellMeasurementStep)):
        raise DomainError(f"step {step_id!r} is not a measurement")
    if num_accepted_runs < 1:
        raise DomainError(f"num_accepted_runs must be at least 1 (got {num_accepted_runs})")

    def run_chunk(index: int, _start: int, count: int) -> EmpiricalDistribution:
        stream = rng.substream(index)
        outcomes = [sample_postselected(scenario, stream, max_attempts).outcomes[step_id] for _ in range(count)]
        return EmpiricalDistribution.from_outcomes(outcomes, step.num_outcomes)

    return reduce(EmpiricalDistribution.merge, map_chunks(run_chunk, num_accepted_runs, threads, chunk_size))


def acceptance_counts(
    scenario: Scenario,
    rng: RandomSource,
    attempts: int,
    *,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> int:
    """Run `attempts` independent timelines and count how many pass post-selection."""

    def run_chunk(index: int, _start: int, count: int) -> int:
        stream = rng.substream(index)
        accepted = 0
        for _ in range(count):
            amplitudes, _, _ = _execute(scenario, stream)
            accepted += _postselect(scenario, amplitudes, stream) is not None
        return accepted

    return sum(map_chunks(run_chunk, attempts, threads, chunk_size))


def _execute(scenario: Scenario, rng: RandomSource) -> tuple[ComplexVector, dict[str, int], dict[str, float]]:
    n = scenario.num_qubits
    amplitudes = scenario.preselection.amplitudes
    outcomes: dict[str, int] = {}
    probabilities: dict[str, float] = {}
    for step in scenario.timeline:
        if isinstance(step, (MeasurementStep, BellMeasurementStep)):
            outcome, amplitudes, probability = measure_amplitudes(amplitudes, n, _projectors_of(step), step.targets, rng)
            outcomes[step.step_id] = outcome
            probabilities[step.step_id] = probability
        else:
            amplitudes = _evolve(step, amplitudes, n, rng)
    return amplitudes, outcomes, probabilities


def _projectors_of(step: MeasurementStep | BellMeasurementStep) -> Sequence[ComplexMatrix]:
    return BELL_PROJECTORS if isinstance(step, BellMeasurementStep) else step.projectors


def _evolve(step: Step, amplitudes: ComplexVector, n: int, rng: RandomSource) -> ComplexVector:
    if isinstance(step, UnitaryStep):
        return apply_matrix(amplitudes, n, step.matrix, step.targets)
    if isinstance(step, SingletPreparationStep):
        return prepare_singlet(StateVector(n, amplitudes), step.targets, overwrite=True, rng=rng).amplitudes
    return amplitudes


def _postselect(scenario: Scenario, amplitudes: ComplexVector, rng: RandomSource) -> ComplexVector | None:
    n = scenario.num_qubits
    for postselection in scenario.postselections:
        projected = apply_matrix(amplitudes, n, postselection.projector, postselection.targets)
        probability = float(np.vdot(projected, projected).real)
        if probability < PROBABILITY_FLOOR or not rng.bernoulli(min(probability, 1.0)):
            return None
        amplitudes = projected / np.sqrt(probability)
    return amplitudes


def erased_past(num_qubits: int) -> StateVector:
    """Return system qubits 0..n-1 each maximally entangled with partner qubit n+i.

    The system then carries no forward-evolving state of its own.
    """

    state = basis_state(0, 0)
    for _ in range(num_qubits):
        state = tensor(state, StateVector(2, PHI_PLUS))
    order = [2 * i for i in range(num_qubits)] + [2 * i + 1 for i in range(num_qubits)]
    return permute_qubits(state, order)


def scenario_for_tsv(tsv: TwoStateVector) -> Scenario:
    """Plain pre/post-selection scenario realizing `tsv` with no intermediate steps."""

    qubits = tuple(range(tsv.num_qubits))
    return Scenario(
        num_qubits=tsv.num_qubits,
        preselection=tsv.ket,
        postselections=(postselect_onto(tsv.bra, qubits),),
        site_partition=tsv.site_partition,
    )


def scenario_for_gtsv(gtsv: GeneralizedTwoStateVector) -> Scenario:
    """Realize a generalized two-state vector with an ancilla register.

    The transition operator sum_t c_t |Psi_t><Phi_t| is decomposed as
    sum_r s_r |u_r><v_r|; the system and ancilla are pre-selected in
    sum_r sqrt(s_r) |u_r>|r> and post-selected onto sum_r sqrt(s_r) |v_r>|r>.
    Rank 1 needs no ancilla.
    """

    left, singular, right = np.linalg.svd(gtsv.transition_operator())
    rank = int(np.sum(singular >= TOLERANCE * singular[0]))
    ancillas = math.ceil(math.log2(rank)) if rank > 1 else 0
    total = gtsv.num_qubits + ancillas
    _ = validate_num_qubits(total)

    pre = np.zeros(2**total, dtype=np.complex128)
    post = np.zeros(2**total, dtype=np.complex128)
    for r in range(rank):
        marker = np.zeros(2**ancillas, dtype=np.complex128)
        marker[r] = 1.0
        weight = math.sqrt(float(singular[r]))
        pre += weight * np.kron(marker, left[:, r])
        post += weight * np.kron(marker, right[r].conj())
    preselection = StateVector.from_amplitudes(pre, normalize=True)
    postselected = StateVector.from_amplitudes(post, normalize=True)
    return Scenario(
        num_qubits=total,
        preselection=preselection,
        postselections=(postselect_onto(postselected, tuple(range(total)), site=ANCILLA_SITE if ancillas else "A"),),
        site_partition=(*gtsv.site_partition, *([ANCILLA_SITE] * ancillas)),
    )


def postselected_state(scenario: Scenario, state: StateVector) -> StateVector:
    """Project `state` onto every post-selection and renormalize, without sampling."""

    amplitudes = state.amplitudes
    for postselection in scenario.postselections:
        amplitudes = apply_matrix(amplitudes, scenario.num_qubits, postselection.projector, postselection.targets)
    probability = float(np.vdot(amplitudes, amplitudes).real)
    if probability < PROBABILITY_FLOOR:
        raise DomainError("state is orthogonal to the scenario's post-selection")
    return StateVector(scenario.num_qubits, amplitudes / np.sqrt(probability))


def execute_on_register(register: Register, steps: Sequence[Step], rng: RandomSource) -> dict[str, int]:
    """Run `steps` on a register whose labels are the scenario's qubit indices."""

    outcomes: dict[str, int] = {}
    for step in steps:
        if isinstance(step, (MeasurementStep, BellMeasurementStep)):
            outcomes[step.step_id] = _measure_register(register, step, rng)
        else:
            _evolve_register(register, step, rng)
    return outcomes


def _measure_register(register: Register, step: MeasurementStep | BellMeasurementStep, rng: RandomSource) -> int:
    if isinstance(step, BellMeasurementStep):
        return BELL_OUTCOMES.index(register.bell_measure(step.targets, rng))
    outcome, _ = register.measure(step.projectors, step.targets, rng)
    return outcome


def _evolve_register(register: Register, step: Step, rng: RandomSource) -> None:
    if isinstance(step, UnitaryStep):
        register.apply(step.matrix, step.targets)
    elif isinstance(step, SingletPreparationStep):
        register.prepare_singlet(step.targets, rng, overwrite=True)


def postselect_register(scenario: Scenario, register: Register, rng: RandomSource) -> bool:
    """Apply the scenario's post-selections by label; False when any of them fails."""

    for postselection in scenario.postselections:
        positions = register.positions(postselection.targets)
        amplitudes = register.state.amplitudes
        projected = apply_matrix(amplitudes, register.num_qubits, postselection.projector, positions)
        probability = float(np.vdot(projected, projected).real)
        if probability < PROBABILITY_FLOOR or not rng.bernoulli(min(probability, 1.0)):
            return False
        register.replace_state(StateVector(register.num_qubits, projected / np.sqrt(probability)))
    return True
