"""Expose the two-state-vector simulator, its protocols, and the experiment runner."""

from __future__ import annotations

from ._channels import ChannelPair, ChannelPool
from ._config import build_settings, load_experiment_config
from ._crossed import (
    NaiveMode,
    backward_born_distribution,
    crossed_eigen_index,
    crossed_forward_states,
    crossed_measurement_scenario,
    crossed_observable,
    measure_mixed_direction,
    mixed_description,
    mixed_direction_scenario,
    naive_distribution,
    naive_prepare_strategy,
)
from ._demolition import (
    DemolitionResult,
    NonlocalObservable,
    RoundRecord,
    bell_observable,
    demolition_measure,
    eigen_probabilities,
    forward_image,
    reconstruct_outcome,
    teleport_then_measure,
)
from ._errors import (
    CapacityError,
    DomainError,
    ExperimentConfigurationError,
    NumericalError,
    NumericalValidationError,
    OutputLocationError,
    PostSelectionExhausted,
    ProtocolError,
    ResourceError,
    TranscriptStateError,
    TsvSimError,
)
from ._experiments import experiment_ids
from ._ledger import (
    Event,
    EventKind,
    Transcript,
    TranscriptRecorder,
    Verdict,
    channel_balance,
    check_instantaneity,
    check_message_causality,
    classical_bits_sent_by,
    count_channels,
    scenario_transcript,
)
from ._logging import LOGGER_NAMESPACE
from ._models import CriterionResult, ExperimentConfig, LogLevel, OutputPaths, Profile, Report, Settings
from ._qcore import (
    BellOutcome,
    ChannelKind,
    Pauli,
    StateVector,
    apply_byproduct,
    apply_unitary,
    basis_state,
    bell_measure,
    byproduct_for,
    compose_byproducts,
    extract_factor,
    fidelity_up_to_phase,
    measure_projective,
    prepare_singlet,
    tensor,
)
from ._register import Register
from ._reversal import (
    attempt_reverse_forward,
    consolidate_backward_parts,
    move_backward_state,
    reverse_time_direction,
    time_reverse_backward,
)
from ._rng import RandomSource
from ._runner import ExperimentRunner
from ._scenario import (
    MeasurementStep,
    PostSelection,
    RunRecord,
    Scenario,
    CouplingStep,
    UnitaryStep,
    conditional_distribution,
    erased_past,
    postselect_onto,
    run_timeline,
    sample_postselected,
    scenario_for_gtsv,
    scenario_for_tsv,
)
from ._teleport import complete_teleport, half_teleport
from ._tsv import (
    Direction,
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

__all__ = [
    # Runner
    "ExperimentRunner",
    "LOGGER_NAMESPACE",
    "build_settings",
    "experiment_ids",
    "load_experiment_config",
    # Settings and reports
    "CriterionResult",
    "ExperimentConfig",
    "LogLevel",
    "OutputPaths",
    "Profile",
    "Report",
    "Settings",
    # State-vector engine
    "BellOutcome",
    "ChannelKind",
    "Pauli",
    "RandomSource",
    "Register",
    "StateVector",
    "apply_byproduct",
    "apply_unitary",
    "basis_state",
    "bell_measure",
    "byproduct_for",
    "compose_byproducts",
    "extract_factor",
    "fidelity_up_to_phase",
    "measure_projective",
    "prepare_singlet",
    "tensor",
    # Two-state vectors and scenarios
    "Direction",
    "EmpiricalDistribution",
    "GeneralizedTerm",
    "GeneralizedTwoStateVector",
    "MeasurementStep",
    "NotReducible",
    "PostSelection",
    "RunRecord",
    "Scenario",
    "TwoStateVector",
    "CouplingStep",
    "UnitaryStep",
    "abl_probability",
    "born_distribution",
    "conditional_distribution",
    "erased_past",
    "generalized_abl_probability",
    "postselect_onto",
    "reduce_generalized",
    "run_timeline",
    "sample_postselected",
    "scenario_for_gtsv",
    "scenario_for_tsv",
    # Protocols
    "ChannelPair",
    "ChannelPool",
    "DemolitionResult",
    "NaiveMode",
    "NonlocalObservable",
    "RoundRecord",
    "attempt_reverse_forward",
    "backward_born_distribution",
    "bell_observable",
    "complete_teleport",
    "consolidate_backward_parts",
    "crossed_eigen_index",
    "crossed_forward_states",
    "crossed_measurement_scenario",
    "crossed_observable",
    "demolition_measure",
    "eigen_probabilities",
    "forward_image",
    "half_teleport",
    "measure_mixed_direction",
    "mixed_description",
    "mixed_direction_scenario",
    "move_backward_state",
    "naive_distribution",
    "naive_prepare_strategy",
    "reconstruct_outcome",
    "reverse_time_direction",
    "teleport_then_measure",
    "time_reverse_backward",
    # Transcripts
    "Event",
    "EventKind",
    "Transcript",
    "TranscriptRecorder",
    "Verdict",
    "channel_balance",
    "check_instantaneity",
    "check_message_causality",
    "classical_bits_sent_by",
    "count_channels",
    "scenario_transcript",
    # Exceptions
    "TsvSimError",
    "CapacityError",
    "DomainError",
    "ExperimentConfigurationError",
    "NumericalError",
    "NumericalValidationError",
    "OutputLocationError",
    "PostSelectionExhausted",
    "ProtocolError",
    "ResourceError",
    "TranscriptStateError",
    # Metadata
    "__version__",
]

__version__ = "0.1.0"
