"""Catalog of the built-in acceptance experiments and demos.

'why': every acceptance claim is an experiment with a stable id, fixed
parameters per profile, and criteria that cite both compared numbers

Each experiment receives an `ExperimentContext` and returns statistics,
criteria, and any transcripts it produced. All randomness flows from the
context's `RandomSource` through numbered substreams.
"""
from __future__ import annotations

import functools
import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Final

import numpy as np

from ._channels import ChannelPool
from ._crossed import (
    NaiveMode,
    backward_born_distribution,
    backward_state_scenario,
    crossed_forward_states,
    crossed_measurement_scenario,
    crossed_observable,
    measure_mixed_direction,
    mixed_description,
    mixed_direction_scenario,
    naive_distribution,
    naive_prepare_strategy,
    reversed_crossed_state,
)
from ._demolition import (
    NonlocalObservable,
    bell_observable,
    demolition_measure,
    eigen_probabilities,
    eigen_projectors,
    forward_image,
    teleport_then_measure,
)
from ._errors import ExperimentConfigurationError
from ._ledger import (
    Transcript,
    TranscriptRecorder,
    channel_balance,
    check_instantaneity,
    check_message_causality,
    classical_bits_sent_by,
    count_channels,
    scenario_transcript,
)
from ._models import CriterionResult, Profile, Settings, at_least, at_most, equals, within
from ._parallel import map_chunks
from ._qcore import (
    DOWN,
    UP,
    X_BASIS,
    Y_BASIS,
    Z_BASIS,
    BELL_OUTCOMES,
    BellOutcome,
    ChannelKind,
    Pauli,
    StateVector,
    apply_byproduct,
    apply_matrix,
    binary_projectors,
    extract_factor,
    fidelity_up_to_phase,
    projectors_for,
)
from ._register import Register
from ._reversal import (
    attempt_reverse_forward,
    consolidate_backward_parts,
    reversal_scenario,
    reverse_time_direction,
    with_fiducial_ancilla,
)
from ._rng import RandomSource
from ._scenario import (
    ENVIRONMENT_SITE,
    Scenario,
    acceptance_counts,
    conditional_distribution,
    erased_past,
    postselect_onto,
    postselected_state,
    run_timeline,
    scenario_for_gtsv,
    scenario_for_tsv,
)
from ._teleport import correct_register, half_teleport_register
from ._tsv import (
    EmpiricalDistribution,
    GeneralizedTerm,
    GeneralizedTwoStateVector,
    NotReducible,
    TwoStateVector,
    abl_probability,
    born_distribution,
    generalized_abl_probability,
    reduce_generalized,
)
from ._validators import ComplexMatrix

ParameterValue = int | float

FIDELITY_FLOOR: Final[float] = 1.0 - 1e-9
TOMOGRAPHY_TIME: Final[float] = 0.75
ACCEPTANCE_FLOOR: Final[float] = 0.02
"""Random two-state vectors whose post-selection fires less often than this are redrawn."""

COMMON_PARAMETERS: Final[Mapping[str, type[int] | type[float]]] = {
    "max_rounds": int,
    "max_attempts": int,
    "tv_tolerance": float,
    "sigma_multiplier": float,
}
"""Optional per-run overrides of the runner settings, accepted by every experiment."""

_SQRT_HALF: Final[float] = math.sqrt(0.5)


@dataclass(frozen=True)
class ExperimentContext:
    """Inputs of one experiment run; `settings` already carries any per-run overrides."""

    parameters: Mapping[str, ParameterValue]
    rng: RandomSource
    settings: Settings
    logger: logging.Logger
    scenario: str | None = None

    def count(self, name: str) -> int:
        return int(self.parameters[name])

    def tv_bound(self, num_outcomes: int, trials: int) -> float:
        """Allowed total variation: the configured floor or `sigma_multiplier` times its sampling scale."""

        return max(self.settings.tv_tolerance, self.settings.sigma_multiplier * 0.5 * math.sqrt(num_outcomes / trials))

    def rate_tolerance(self, p: float, trials: int) -> float:
        return self.settings.sigma_multiplier * math.sqrt(p * (1.0 - p) / trials)


@dataclass(frozen=True)
class ExperimentOutcome:
    statistics: Mapping[str, float]
    criteria: tuple[CriterionResult, ...]
    transcripts: tuple[Transcript, ...] = ()


ExperimentFn = Callable[[ExperimentContext], ExperimentOutcome]


@dataclass(frozen=True)
class ExperimentSpec:
    """One catalog entry.

    `trials_parameter` is what the CLI `--trials` flag sets; `scenarios` are the
    built-in scenario ids a config may narrow the run to.
    """

    experiment_id: str
    description: str
    run: ExperimentFn
    fast: Mapping[str, ParameterValue]
    full: Mapping[str, ParameterValue]
    trials_parameter: str | None = None
    scenarios: tuple[str, ...] = ()
    kinds: Mapping[str, type[int] | type[float]] = field(init=False)

    def __post_init__(self) -> None:
        kinds = {name: type(value) for name, value in self.fast.items()}
        object.__setattr__(self, "kinds", {**COMMON_PARAMETERS, **kinds})

    def defaults(self, profile: Profile) -> dict[str, ParameterValue]:
        return dict(self.fast if Profile(profile) is Profile.FAST else self.full)


def _merged(chunks: Sequence[EmpiricalDistribution]) -> EmpiricalDistribution:
    return functools.reduce(EmpiricalDistribution.merge, chunks)


def _haar(rng: RandomSource, num_qubits: int) -> StateVector:
    return StateVector.from_amplitudes(rng.haar_state(num_qubits), normalize=True)


# A1 ------------------------------------------------------------------------


def _time_reversal(ctx: ExperimentContext) -> ExperimentOutcome:
    states, trials = ctx.count("states"), ctx.count("trials")
    fidelities = [_reversal_fidelity(ctx.rng.substream(0).substream(i)) for i in range(states)]
    worst_tv = max(_reversal_tomography(ctx, ctx.rng.substream(1).substream(i), trials) for i in range(ctx.count("tomography_states")))
    sampled = reversal_scenario(_haar(ctx.rng.substream(2), 1))
    accepted = acceptance_counts(sampled, ctx.rng.substream(3), trials, threads=ctx.settings.threads)
    rate = accepted / trials
    return ExperimentOutcome(
        statistics={"min_fidelity": min(fidelities), "max_tomography_tv": worst_tv, "acceptance_rate": rate},
        criteria=(
            at_least("A1.fidelity", "reversed ancilla matches -b*|up> + a*|down>", min(fidelities), FIDELITY_FLOOR),
            at_most("A1.tomography", "three-basis ancilla statistics vs the reversed state", worst_tv, ctx.tv_bound(2, trials)),
            within("A1.acceptance", "post-selection acceptance rate", rate, 0.5, ctx.rate_tolerance(0.5, trials)),
        ),
    )


def _reversal_fidelity(rng: RandomSource) -> float:
    backward = _haar(rng, 1)
    scenario = reversal_scenario(backward)
    final = postselected_state(scenario, run_timeline(scenario, rng).final_state)
    return fidelity_up_to_phase(extract_factor(final, (scenario.num_qubits - 1,)), reverse_time_direction(backward))


def _reversal_tomography(ctx: ExperimentContext, rng: RandomSource, trials: int) -> float:
    backward = _haar(rng, 1)
    scenario = reversal_scenario(backward)
    ancilla = scenario.num_qubits - 1
    expected = reverse_time_direction(backward)
    worst = 0.0
    for index, basis in enumerate((Z_BASIS, X_BASIS, Y_BASIS)):
        projectors = projectors_for(basis)
        measured = scenario.with_measurement("tomography", projectors, (ancilla,), TOMOGRAPHY_TIME, site="B")
        counts = conditional_distribution(
            measured, "tomography", rng.substream(index), trials, max_attempts=ctx.settings.max_attempts, threads=ctx.settings.threads
        )
        worst = max(worst, counts.total_variation(born_distribution(expected, projectors)))
    return worst


# A2 ------------------------------------------------------------------------


def _forward_reversal(ctx: ExperimentContext) -> ExperimentOutcome:
    trials = ctx.count("trials")

    def run_chunk(index: int, _start: int, count: int) -> tuple[EmpiricalDistribution, float]:
        stream = ctx.rng.substream(index)
        outcomes: list[int] = []
        worst = 1.0
        for _ in range(count):
            source = _haar(stream, 1)
            state, ancilla, partner = with_fiducial_ancilla(source)
            attempt = attempt_reverse_forward(state, 0, ancilla, stream, partner=partner)
            outcomes.append(BELL_OUTCOMES.index(attempt.outcome))
            if attempt.success:
                carried = extract_factor(attempt.state, (partner,))
                worst = min(worst, fidelity_up_to_phase(carried, apply_byproduct(source, (Pauli.XZ,), (0,))))
        return EmpiricalDistribution.from_outcomes(outcomes, len(BellOutcome)), worst

    chunks = map_chunks(run_chunk, trials, ctx.settings.threads)
    counts = _merged([distribution for distribution, _ in chunks])
    rate = float(counts.frequencies[BELL_OUTCOMES.index(BellOutcome.PSI_MINUS)])
    worst = min(fidelity for _, fidelity in chunks)
    return ExperimentOutcome(
        statistics={"success_rate": rate, "min_success_fidelity": worst, **_frequency_stats("outcome", counts)},
        criteria=(
            within("A2.success-rate", "singlet outcome frequency", rate, 0.25, ctx.rate_tolerance(0.25, trials)),
            at_least("A2.success-state", "partner carries XZ|psi> after a singlet outcome", worst, FIDELITY_FLOOR),
        ),
    )


def _frequency_stats(prefix: str, counts: EmpiricalDistribution) -> dict[str, float]:
    return {f"{prefix}_{index}": float(value) for index, value in enumerate(counts.frequencies)}


# A3 / A4 -------------------------------------------------------------------


def _successful_indices(
    ctx: ExperimentContext,
    rng: RandomSource,
    observable: NonlocalObservable,
    state: StateVector,
    successes: int,
) -> EmpiricalDistribution:
    """Demolition outcomes over exactly `successes` successful runs."""

    def run_chunk(index: int, _start: int, count: int) -> EmpiricalDistribution:
        stream = rng.substream(index)
        found: list[int] = []
        while len(found) < count:
            result = demolition_measure(observable, state, stream, max_rounds=ctx.settings.max_rounds)
            if result.eigen_index is not None:
                found.append(result.eigen_index)
        return EmpiricalDistribution.from_outcomes(found, len(observable.eigenstates))

    return _merged(map_chunks(run_chunk, successes, ctx.settings.threads))


DEMOLITION_SCENARIOS: Final[tuple[str, ...]] = ("crossed-image", "bell")


def _demolition_observable(name: str) -> NonlocalObservable:
    return forward_image(crossed_observable()) if name == "crossed-image" else bell_observable()


def _selected_scenarios(ctx: ExperimentContext) -> list[tuple[int, str]]:
    """Catalog scenarios with their stable substream index, narrowed by the config's scenario id."""

    return [(index, name) for index, name in enumerate(DEMOLITION_SCENARIOS) if ctx.scenario in (None, name)]


def _demolition_reliability(ctx: ExperimentContext) -> ExperimentOutcome:
    successes = ctx.count("successes")
    mismatches = runs = 0
    for o_index, name in _selected_scenarios(ctx):
        observable = _demolition_observable(name)
        for k, eigenstate in enumerate(observable.eigenstates):
            oracle = int(np.argmax(eigen_probabilities(observable, eigenstate)))
            counts = _successful_indices(ctx, ctx.rng.substream(o_index).substream(k), observable, eigenstate, successes)
            mismatches += counts.total - counts.counts[oracle]
            runs += counts.total
    ctx.logger.info("demolition reliability: runs=%s mismatches=%s", runs, mismatches)
    return ExperimentOutcome(
        statistics={"successful_runs": float(runs), "mismatches": float(mismatches)},
        criteria=(equals("A3.mismatches", "reconstructed index vs direct projective measurement", mismatches, 0),),
    )


def _demolition_input(name: str, observable: NonlocalObservable, rng: RandomSource) -> StateVector:
    if name == "crossed-image":
        return StateVector.from_amplitudes(observable.eigenstates[0].amplitudes + observable.eigenstates[2].amplitudes, normalize=True)
    return _haar(rng, 2)


def _demolition_statistics(ctx: ExperimentContext) -> ExperimentOutcome:
    successes = ctx.count("successes")
    statistics: dict[str, float] = {}
    criteria: list[CriterionResult] = []
    for index, name in _selected_scenarios(ctx):
        observable = _demolition_observable(name)
        stream = ctx.rng.substream(index)
        state = _demolition_input(name, observable, stream.substream(0))
        counts = _successful_indices(ctx, stream.substream(1), observable, state, successes)
        tv = counts.total_variation(eigen_probabilities(observable, state))
        statistics[f"{name}_tv"] = tv
        statistics.update(_frequency_stats(name, counts))
        criteria.append(at_most(f"A4.{name}", f"{name} demolition frequencies vs Born rule", tv, ctx.tv_bound(4, successes)))
    return ExperimentOutcome(statistics, tuple(criteria))


# A5 ------------------------------------------------------------------------


def _round_convergence(ctx: ExperimentContext) -> ExperimentOutcome:
    trials, max_rounds = ctx.count("trials"), ctx.settings.max_rounds
    observable = bell_observable()

    def run_chunk(index: int, _start: int, count: int) -> tuple[EmpiricalDistribution, int]:
        stream = ctx.rng.substream(index)
        rounds: list[int] = []
        channel_mismatches = 0
        for _ in range(count):
            result = demolition_measure(observable, _haar(stream, 2), stream, max_rounds=max_rounds)
            used = len(result.rounds)
            rounds.append(used if result.status == "succeeded" else 0)
            channel_mismatches += result.channels_consumed != 3 + 4 * (used - 1)
        return EmpiricalDistribution.from_outcomes(rounds, max_rounds + 1), channel_mismatches

    chunks = map_chunks(run_chunk, trials, ctx.settings.threads)
    counts = _merged([distribution for distribution, _ in chunks])
    cumulative = np.cumsum(counts.counts[1:]) / trials
    monotone = bool(np.all(np.diff(cumulative) >= 0.0))
    pinned = 1.0 - 0.75 * (15.0 / 16.0) ** (max_rounds - 1)
    final = float(cumulative[-1])
    statistics = {f"cumulative_round_{r}": float(value) for r, value in enumerate(cumulative, start=1)}
    return ExperimentOutcome(
        statistics={**statistics, "pinned_cumulative": pinned},
        criteria=(
            within("A5.round-1", "round-1 success with one qubit at Bob", float(cumulative[0]), 0.25, ctx.rate_tolerance(0.25, trials)),
            equals("A5.monotone", "cumulative success is nondecreasing in rounds", float(monotone), 1.0),
            at_least("A5.floor", f"cumulative success after {max_rounds} rounds", final, 0.3),
            within("A5.pinned", "cumulative success vs 1-(3/4)(15/16)^(r-1)", final, pinned, ctx.rate_tolerance(pinned, trials)),
            equals("A5.channels", "runs whose channel count differs from 3 + 4(rounds-1)", sum(m for _, m in chunks), 0),
        ),
    )


# A6 ------------------------------------------------------------------------


def _abl_agreement(ctx: ExperimentContext) -> ExperimentOutcome:
    vectors, trials = ctx.count("vectors"), ctx.count("trials")
    worst = 0.0
    for index in range(vectors):
        stream = ctx.rng.substream(index)
        projectors = binary_projectors(stream.haar_state(1))
        tsv = _random_two_state_vector(stream, projectors)
        scenario = scenario_for_tsv(tsv).with_measurement("m", projectors, (0,), 0.5)
        counts = conditional_distribution(
            scenario, "m", stream.substream(0), trials, max_attempts=ctx.settings.max_attempts, threads=ctx.settings.threads
        )
        worst = max(worst, counts.total_variation(abl_probability(tsv, projectors, (0,))))
    return ExperimentOutcome(
        statistics={"max_tv": worst, "vectors": float(vectors)},
        criteria=(at_most("A6.tv", "sampler vs ABL formula, worst two-state vector", worst, ctx.tv_bound(2, trials)),),
    )


def _random_two_state_vector(rng: RandomSource, projectors: Sequence[ComplexMatrix]) -> TwoStateVector:
    while True:
        tsv = TwoStateVector(bra=_haar(rng, 2), ket=_haar(rng, 2))
        acceptance = sum(
            abs(np.vdot(tsv.bra.amplitudes, apply_matrix(tsv.ket.amplitudes, 2, projector, (0,)))) ** 2 for projector in projectors
        )
        if acceptance >= ACCEPTANCE_FLOOR:
            return tsv


# A7 ------------------------------------------------------------------------

_CROSSED_PREPARATIONS: Final[tuple[tuple[int, int], ...]] = ((2, 0), (-2, 0), (0, 0), (0, 2))


def _crossed_reversal(ctx: ExperimentContext) -> ExperimentOutcome:
    runs = ctx.count("runs")
    observable = crossed_observable()
    images = crossed_forward_states()
    fidelities = [
        fidelity_up_to_phase(reversed_crossed_state(o1, o2, ctx.rng.substream(0).substream(k)), images[k])
        for k, (o1, o2) in enumerate(_CROSSED_PREPARATIONS)
    ]
    fidelities += [fidelity_up_to_phase(image, images[k]) for k, image in enumerate(forward_image(observable).eigenstates)]
    mismatches = {"local": 0, "consolidated": 0}
    for k, (o1, o2) in enumerate(_CROSSED_PREPARATIONS):
        scenario = crossed_measurement_scenario(o1, o2)
        for p, (path, site) in enumerate((("local", None), ("consolidated", "A"))):
            counts = _mixed_indices(ctx, ctx.rng.substream(1).substream(k).substream(p), observable, scenario, runs, site)
            mismatches[path] += counts.total - counts.counts[k]
    superposition = mixed_direction_scenario((0.6, 0.8), _ud(), _ud()[::-1])
    oracle = eigen_probabilities(observable, mixed_description((0.6, 0.8), _ud(), _ud()[::-1]))
    local = _mixed_indices(ctx, ctx.rng.substream(2), observable, superposition, runs, None)
    consolidated = _mixed_indices(ctx, ctx.rng.substream(3), observable, superposition, runs, "A")
    generalized = generalized_crossed_scenario()
    generalized_gap = _mixed_indices(ctx, ctx.rng.substream(4), observable, generalized, runs, None).total_variation(
        _mixed_indices(ctx, ctx.rng.substream(5), observable, generalized, runs, "A").frequencies
    )
    bound = ctx.tv_bound(4, runs)
    return ExperimentOutcome(
        statistics={
            "min_fidelity": min(fidelities),
            "local_mismatches": float(mismatches["local"]),
            "consolidated_mismatches": float(mismatches["consolidated"]),
            "local_tv": local.total_variation(oracle),
            "consolidated_tv": consolidated.total_variation(oracle),
            "generalized_tv": generalized_gap,
        },
        criteria=(
            at_least("A7.fidelity", "reversed crossed eigenstates vs their forward images", min(fidelities), FIDELITY_FLOOR),
            equals("A7.local", "local-reversal pipeline mismatches", mismatches["local"], 0),
            equals("A7.consolidated", "consolidation pipeline mismatches", mismatches["consolidated"], 0),
            at_most("A7.local-statistics", "local pipeline on a superposition vs oracle", local.total_variation(oracle), bound),
            at_most("A7.consolidated-statistics", "consolidation pipeline on a superposition", consolidated.total_variation(oracle), bound),
            at_most("A7.generalized", "local vs consolidation pipeline on a generalized two-state vector", generalized_gap, 2.0 * bound),
        ),
    )


def generalized_crossed_scenario() -> Scenario:
    """A rank-2 generalized two-state vector over A and B, realized with one ancilla.

    Both A and B are pre- and post-selected, so measuring A forward and B
    backward has to separate the two directions at each site.
    """

    up, down = _ud()
    plus = StateVector(1, X_BASIS[0])
    gtsv = GeneralizedTwoStateVector(
        (GeneralizedTerm(0.8, (up, plus), (up, down)), GeneralizedTerm(0.6, (down, up), (plus, up))),
        ("A", "B"),
    )
    return scenario_for_gtsv(gtsv)


def _ud() -> tuple[StateVector, StateVector]:
    return StateVector(1, UP), StateVector(1, DOWN)


def _mixed_indices(
    ctx: ExperimentContext,
    rng: RandomSource,
    observable: NonlocalObservable,
    scenario: Scenario,
    runs: int,
    consolidate_to: str | None,
) -> EmpiricalDistribution:
    def run_chunk(index: int, _start: int, count: int) -> EmpiricalDistribution:
        stream = rng.substream(index)
        found: list[int] = []
        while len(found) < count:
            result = measure_mixed_direction(
                observable,
                scenario,
                stream,
                system_qubits=(0, 1),
                max_rounds=ctx.settings.max_rounds,
                max_attempts=ctx.settings.max_attempts,
                consolidate_to=consolidate_to,
            )
            if result.eigen_index is not None:
                found.append(result.eigen_index)
        return EmpiricalDistribution.from_outcomes(found, len(observable.eigenstates))

    return _merged(map_chunks(run_chunk, runs, ctx.settings.threads))


# A8 ------------------------------------------------------------------------

CONSOLIDATION_TAG: Final[str] = "consolidation"
CONSOLIDATION_TIME: Final[float] = 1.0


def dispersed_backward_scenario(backward_states: Sequence[StateVector]) -> Scenario:
    """One backward-evolving particle per site S1..Sn, each with an erased past; site A holds nothing yet."""

    n = len(backward_states)
    return Scenario(
        num_qubits=2 * n,
        preselection=erased_past(n),
        postselections=tuple(postselect_onto(state, (i,), site=f"S{i + 1}", label=f"post-{i}") for i, state in enumerate(backward_states)),
        site_partition=(*(f"S{i + 1}" for i in range(n)), *([ENVIRONMENT_SITE] * n)),
        final_time=CONSOLIDATION_TIME + 1.0,
    )


def _consolidation_resources(ctx: ExperimentContext) -> ExperimentOutcome:
    statistics: dict[str, float] = {}
    criteria: list[CriterionResult] = []
    transcripts: list[Transcript] = []
    for parties in range(2, ctx.count("max_parties") + 1):
        stream = ctx.rng.substream(parties)
        backward = [_haar(stream, 1) for _ in range(parties - 1)]
        pool = ChannelPool()
        consolidated, placements = consolidate_backward_parts(
            dispersed_backward_scenario(backward), range(parties - 1), "A", pool, CONSOLIDATION_TIME, protocol_tag=CONSOLIDATION_TAG
        )
        transcript = scenario_transcript(consolidated, CONSOLIDATION_TIME, CONSOLIDATION_TAG)
        transcripts.append(transcript)
        final = postselected_state(consolidated, run_timeline(consolidated, stream).final_state)
        fidelity = min(
            fidelity_up_to_phase(extract_factor(final, (placements[i],)), reverse_time_direction(state)) for i, state in enumerate(backward)
        )
        channels = count_channels(transcript, CONSOLIDATION_TAG)
        bits = classical_bits_sent_by(transcript, CONSOLIDATION_TIME)
        balanced = channel_balance(transcript, pool).verdict.passed
        statistics.update({f"channels_n{parties}": float(channels), f"bits_n{parties}": float(bits), f"fidelity_n{parties}": fidelity})
        criteria += [
            equals(f"A8.channels-n{parties}", f"singlet channels consumed for {parties} parties", channels, parties - 1),
            equals(f"A8.bits-n{parties}", "classical bits sent by the measurement time", bits, 0),
            equals(f"A8.balance-n{parties}", "provisioned = consumed + unconsumed", float(balanced), 1.0),
            at_least(f"A8.fidelity-n{parties}", "consolidated halves carry the reversed states", fidelity, FIDELITY_FLOOR),
        ]
    return ExperimentOutcome(statistics, tuple(criteria), tuple(transcripts))


# A9 ------------------------------------------------------------------------


def _instantaneity(ctx: ExperimentContext) -> ExperimentOutcome:
    observable = bell_observable()

    def run_chunk(index: int, _start: int, count: int) -> tuple[int, int, list[Transcript]]:
        stream = ctx.rng.substream(0).substream(index)
        failures = causality_failures = 0
        kept: list[Transcript] = []
        for _ in range(count):
            result = demolition_measure(observable, _haar(stream, 2), stream, max_rounds=ctx.settings.max_rounds)
            failures += not check_instantaneity(result.transcript).passed
            causality_failures += not check_message_causality(result.transcript).passed
            kept.append(result.transcript)
        return failures, causality_failures, kept

    chunks = map_chunks(run_chunk, ctx.count("transcripts"), ctx.settings.threads)
    control_stream = ctx.rng.substream(1)
    _, control = teleport_then_measure(observable, _haar(control_stream, 2), control_stream)
    flagged = len(check_instantaneity(control).violations)
    mixed = measure_mixed_direction(crossed_observable(), crossed_measurement_scenario(2, 0), control_stream, system_qubits=(0, 1))
    failures = sum(chunk[0] for chunk in chunks)
    causality_failures = sum(chunk[1] for chunk in chunks)
    transcripts = tuple(transcript for chunk in chunks for transcript in chunk[2])
    return ExperimentOutcome(
        statistics={
            "demolition_failures": float(failures),
            "control_violations": float(flagged),
            "causality_failures": float(causality_failures),
        },
        criteria=(
            equals("A9.demolition", "demolition transcripts failing the instantaneity check", failures, 0),
            equals("A9.causality", "demolition transcripts with unmatched messages", causality_failures, 0),
            at_least("A9.control", "violations flagged on teleport-then-measure", flagged, 1),
            equals("A9.mixed", "mixed-direction transcript passes", float(check_instantaneity(mixed.transcript).passed), 1.0),
        ),
        transcripts=(*transcripts, control, mixed.transcript),
    )


# A10 -----------------------------------------------------------------------


def _naive_preparation(ctx: ExperimentContext) -> ExperimentOutcome:
    trials = ctx.count("trials")
    observable = bell_observable()
    e = observable.eigenstates
    backward = StateVector.from_amplitudes(e[0].amplitudes + e[1].amplitudes, normalize=True)
    forward = StateVector.from_amplitudes(e[0].amplitudes + 2.0 * e[1].amplitudes, normalize=True)
    erased_oracle = backward_born_distribution(observable, backward)
    forward_oracle = abl_probability(TwoStateVector(bra=backward, ket=forward), eigen_projectors(observable))
    erased = backward_state_scenario(backward)
    with_forward = backward_state_scenario(backward, forward)

    def naive(scenario: Scenario, mode: NaiveMode, stream: int) -> EmpiricalDistribution:
        return naive_prepare_strategy(
            observable,
            0,
            scenario,
            ctx.rng.substream(stream),
            system_qubits=(0, 1),
            num_accepted_runs=trials,
            mode=mode,
            max_attempts=ctx.settings.max_attempts,
            threads=ctx.settings.threads,
        )

    fixed_tv = naive(erased, NaiveMode.FIXED, 0).total_variation(erased_oracle)
    uniform_tv = naive(erased, NaiveMode.UNIFORM, 1).total_variation(erased_oracle)
    forward_tv = naive(with_forward, NaiveMode.UNIFORM, 2).total_variation(forward_oracle)
    analytic_tv = 0.5 * float(np.abs(naive_distribution(observable, 0, backward) - erased_oracle).sum())
    return ExperimentOutcome(
        statistics={
            "fixed_tv": fixed_tv,
            "analytic_fixed_tv": analytic_tv,
            "uniform_erased_tv": uniform_tv,
            "uniform_forward_tv": forward_tv,
        },
        criteria=(
            at_least("A10.fixed", "always preparing e_0 vs the backward-state oracle", fixed_tv, 0.4),
            within("A10.analytic", "analytic deviation of the fixed strategy", analytic_tv, 0.5, 1e-9),
            at_most("A10.uniform-erased", "uniform preparation with an erased past vs oracle", uniform_tv, ctx.tv_bound(4, trials)),
            at_least("A10.uniform-forward", "uniform preparation with a forward state vs ABL oracle", forward_tv, 0.2),
        ),
    )


# demos ---------------------------------------------------------------------

_CARDINAL_STATES: Final[tuple[tuple[complex, complex], ...]] = (
    (1.0, 0.0),
    (0.0, 1.0),
    (_SQRT_HALF, _SQRT_HALF),
    (_SQRT_HALF, -_SQRT_HALF),
    (_SQRT_HALF, 1j * _SQRT_HALF),
    (_SQRT_HALF, -1j * _SQRT_HALF),
)


def _teleport_once(source: StateVector, rng: RandomSource, *, correct: bool) -> tuple[BellOutcome, StateVector, Transcript]:
    register = Register(source)
    pool = ChannelPool()
    recorder = TranscriptRecorder()
    channel = pool.provision(register, ChannelKind.PHI_PLUS, ("A", "B"), protocol_tag="teleport")
    (outcome,) = half_teleport_register(register, (0,), (channel,), rng, pool=pool, recorder=recorder)
    if correct:
        correct_register(register, (outcome,), (channel,), recorder=recorder)
    return outcome, register.factor((channel.qubits[1],)), recorder.finalize(0.0)


def _teleportation_demo(ctx: ExperimentContext) -> ExperimentOutcome:
    repeats, trials = ctx.count("repeats"), ctx.count("trials")
    worst = 1.0
    covered: set[tuple[int, BellOutcome]] = set()
    for index, amplitudes in enumerate(_CARDINAL_STATES):
        source = StateVector(1, np.array(amplitudes, dtype=np.complex128))
        stream = ctx.rng.substream(0).substream(index)
        for _ in range(repeats):
            outcome, remote, _ = _teleport_once(source, stream, correct=True)
            covered.add((index, outcome))
            worst = min(worst, fidelity_up_to_phase(remote, source))
    stream = ctx.rng.substream(1)
    outcomes: list[int] = []
    remote_z: list[int] = []
    for _ in range(trials):
        outcome, remote, _ = _teleport_once(_haar(stream, 1), stream, correct=False)
        outcomes.append(BELL_OUTCOMES.index(outcome))
        remote_z.append(stream.choice(remote.probabilities))
    outcome_tv = EmpiricalDistribution.from_outcomes(outcomes, 4).total_variation([0.25] * 4)
    signaling_tv = EmpiricalDistribution.from_outcomes(remote_z, 2).total_variation([0.5, 0.5])
    _, _, complete = _teleport_once(StateVector(1, UP), stream, correct=True)
    _, _, half = _teleport_once(StateVector(1, UP), stream, correct=False)
    bits = classical_bits_sent_by(complete, math.inf)
    return ExperimentOutcome(
        statistics={"min_fidelity": worst, "outcome_tv": outcome_tv, "remote_tv": signaling_tv, "complete_bits": float(bits)},
        criteria=(
            at_least("demo.identity", "corrected teleportation fidelity over cardinal inputs", worst, FIDELITY_FLOOR),
            equals("demo.coverage", "cardinal input and Bell outcome combinations observed", len(covered), 24),
            at_most("demo.outcomes", "Bell outcomes vs uniform", outcome_tv, ctx.tv_bound(4, trials)),
            at_most("demo.no-signaling", "unconditioned remote z statistics vs uniform", signaling_tv, ctx.tv_bound(2, trials)),
            equals("demo.complete-bits", "classical bits of one complete teleportation", bits, 2),
            equals("demo.half-bits", "classical bits of one half-teleportation", classical_bits_sent_by(half, math.inf), 0),
            equals("demo.channels", "channels consumed by one teleportation", count_channels(complete, "teleport"), 1),
        ),
        transcripts=(complete, half),
    )


def generalized_example() -> GeneralizedTwoStateVector:
    """Two-site superposition of product two-state vectors with no single bra/ket form."""

    up, down = _ud()
    plus = StateVector(1, np.array([_SQRT_HALF, _SQRT_HALF], dtype=np.complex128))
    return GeneralizedTwoStateVector(
        terms=(
            GeneralizedTerm(0.6, (up, up), (up, plus)),
            GeneralizedTerm(0.8, (down, down), (plus, down)),
        ),
        site_partition=("A", "B"),
    )


def _generalized_demo(ctx: ExperimentContext) -> ExperimentOutcome:
    trials = ctx.count("trials")
    gtsv = generalized_example()
    statistics: dict[str, float] = {}
    criteria: list[CriterionResult] = []
    for index, (name, basis, target) in enumerate((("z-at-A", Z_BASIS, 0), ("x-at-B", X_BASIS, 1))):
        projectors = projectors_for(basis)
        site = gtsv.site_partition[target]
        scenario = scenario_for_gtsv(gtsv).with_measurement("m", projectors, (target,), 0.5, site=site)
        counts = conditional_distribution(
            scenario, "m", ctx.rng.substream(index), trials, max_attempts=ctx.settings.max_attempts, threads=ctx.settings.threads
        )
        tv = counts.total_variation(generalized_abl_probability(gtsv, projectors, (target,)))
        statistics[f"{name}_tv"] = tv
        criteria.append(at_most(f"demo.{name}", f"{name} sampler vs generalized ABL rule", tv, ctx.tv_bound(2, trials)))
    irreducible = isinstance(reduce_generalized(gtsv), NotReducible)
    criteria.append(equals("demo.irreducible", "example has no single bra/ket form", float(irreducible), 1.0))
    return ExperimentOutcome(statistics, tuple(criteria))


EXPERIMENTS: Final[tuple[ExperimentSpec, ...]] = (
    ExperimentSpec(
        "A1-time-reversal",
        "deterministic reversal of a backward-evolving state with a singlet",
        _time_reversal,
        fast={"states": 50, "tomography_states": 1, "trials": 4000},
        full={"states": 1000, "tomography_states": 3, "trials": 100_000},
        trials_parameter="trials",
    ),
    ExperimentSpec(
        "A2-forward-reversal",
        "forward-to-backward reversal succeeds only on the singlet outcome",
        _forward_reversal,
        fast={"trials": 20_000},
        full={"trials": 100_000},
        trials_parameter="trials",
    ),
    ExperimentSpec(
        "A3-demolition-reliability",
        "demolition measurement of eigenstates never misidentifies them",
        _demolition_reliability,
        fast={"successes": 100},
        full={"successes": 10_000},
        trials_parameter="successes",
        scenarios=DEMOLITION_SCENARIOS,
    ),
    ExperimentSpec(
        "A4-demolition-statistics",
        "demolition measurement of superpositions follows the Born rule",
        _demolition_statistics,
        fast={"successes": 4000},
        full={"successes": 100_000},
        trials_parameter="successes",
        scenarios=DEMOLITION_SCENARIOS,
    ),
    ExperimentSpec(
        "A5-round-convergence",
        "cumulative demolition success over rounds",
        _round_convergence,
        fast={"trials": 8000},
        full={"trials": 100_000},
        trials_parameter="trials",
    ),
    ExperimentSpec(
        "A6-abl-agreement",
        "post-selected sampling agrees with the ABL rule",
        _abl_agreement,
        fast={"vectors": 10, "trials": 4000},
        full={"vectors": 50, "trials": 100_000},
        trials_parameter="trials",
    ),
    ExperimentSpec(
        "A7-crossed-reversal",
        "crossed-measurement eigenstates, their forward images, and both measurement pipelines",
        _crossed_reversal,
        fast={"runs": 200},
        full={"runs": 4000},
        trials_parameter="runs",
    ),
    ExperimentSpec(
        "A8-consolidation-resources",
        "consolidating N-1 backward parts costs N-1 singlets and no classical bits",
        _consolidation_resources,
        fast={"max_parties": 5},
        full={"max_parties": 5},
    ),
    ExperimentSpec(
        "A9-instantaneity",
        "demolition transcripts pass the instantaneity check; teleport-then-measure does not",
        _instantaneity,
        fast={"transcripts": 200},
        full={"transcripts": 1000},
        trials_parameter="transcripts",
    ),
    ExperimentSpec(
        "A10-naive-preparation",
        "preparing an eigenstate instead of measuring gives wrong probabilities",
        _naive_preparation,
        fast={"trials": 4000},
        full={"trials": 100_000},
        trials_parameter="trials",
    ),
    ExperimentSpec(
        "demo-teleportation",
        "teleportation identity, outcome uniformity, and classical cost",
        _teleportation_demo,
        fast={"repeats": 60, "trials": 4000},
        full={"repeats": 200, "trials": 100_000},
        trials_parameter="trials",
    ),
    ExperimentSpec(
        "demo-generalized",
        "sampling a generalized two-state vector through its ancilla realization",
        _generalized_demo,
        fast={"trials": 4000},
        full={"trials": 100_000},
        trials_parameter="trials",
    ),
)

_BY_ID: Final[dict[str, ExperimentSpec]] = {spec.experiment_id: spec for spec in EXPERIMENTS}


def get_experiment(experiment_id: str) -> ExperimentSpec:
    try:
        return _BY_ID[experiment_id]
    except KeyError as exc:
        raise ExperimentConfigurationError(f"unknown experiment {experiment_id!r}; run `tsvsim list` for the catalog") from exc


def experiment_ids() -> tuple[str, ...]:
    return tuple(_BY_ID)
