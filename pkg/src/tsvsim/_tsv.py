"""Two-state vectors, their generalization, and the ABL probability rule.

'why': keep the analytic side of pre- and post-selected ensembles in one place
so the samplers in `_scenario` always have an oracle to be checked against

Backward-evolving states are stored as kets: `bra` holds the vector onto which
the future post-selection projects, and conjugation happens inside the inner
products.
"""
from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from ._errors import DomainError, NumericalValidationError
from ._qcore import ComplexVector, StateVector, apply_matrix, basis_state, embed_factors
from ._validators import PROBABILITY_FLOOR, TOLERANCE, validate_projector_set, validate_targets

SiteId = str


class Direction(str, Enum):
    """Time direction of the state carried by one site."""

    FORWARD = "Forward"
    BACKWARD = "Backward"


DirectionTag = Mapping[SiteId, Direction]


def _default_partition(num_qubits: int) -> tuple[SiteId, ...]:
    return ("A",) * num_qubits


def sites_of(partition: Sequence[SiteId]) -> tuple[SiteId, ...]:
    """Return the distinct sites of a partition in order of first qubit."""

    return tuple(dict.fromkeys(partition))


def site_qubits(partition: Sequence[SiteId], site: SiteId) -> tuple[int, ...]:
    qubits = tuple(index for index, owner in enumerate(partition) if owner == site)
    if not qubits:
        raise DomainError(f"site {site!r} owns no qubits")
    return qubits


def validate_direction_tags(partition: Sequence[SiteId], tags: DirectionTag) -> dict[SiteId, Direction]:
    """Ensure every site of `partition` carries exactly one direction."""

    sites = set(sites_of(partition))
    missing = sites - set(tags)
    extra = set(tags) - sites
    if missing or extra:
        raise DomainError(f"direction tags must cover sites {sorted(sites)} exactly (missing {sorted(missing)}, extra {sorted(extra)})")
    return {site: Direction(tags[site]) for site in sites_of(partition)}


@dataclass(frozen=True, eq=False)
class TwoStateVector:
    """Pre- and post-selected description <bra| |ket> of `num_qubits` qubits."""

    bra: StateVector
    ket: StateVector
    site_partition: tuple[SiteId, ...] = ()

    def __post_init__(self) -> None:
        if self.bra.num_qubits != self.ket.num_qubits:
            raise DomainError(f"bra has {self.bra.num_qubits} qubits but ket has {self.ket.num_qubits}")
        partition = self.site_partition or _default_partition(self.ket.num_qubits)
        if len(partition) != self.ket.num_qubits:
            raise DomainError(f"site partition names {len(partition)} qubits for a {self.ket.num_qubits}-qubit system")
        object.__setattr__(self, "site_partition", tuple(partition))

    @property
    def num_qubits(self) -> int:
        return self.ket.num_qubits


@dataclass(frozen=True, eq=False)
class GeneralizedTerm:
    """One product term c <Phi_1|...<Phi_N| |Psi_1>...|Psi_N> with one factor per site."""

    coefficient: complex
    bra_factors: tuple[StateVector, ...]
    ket_factors: tuple[StateVector, ...]


def _require_term_widths(index: int, term: GeneralizedTerm, widths: list[int]) -> None:
    for label, factors in (("bra", term.bra_factors), ("ket", term.ket_factors)):
        if [factor.num_qubits for factor in factors] != widths:
            raise DomainError(f"term {index} {label} factors do not match per-site qubit counts {widths}")


@dataclass(frozen=True, eq=False)
class GeneralizedTwoStateVector:
    """Superposition of per-site product two-state vectors."""

    terms: tuple[GeneralizedTerm, ...]
    site_partition: tuple[SiteId, ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise DomainError("generalized two-state vector needs at least one term")
        widths = [len(site_qubits(self.site_partition, site)) for site in sites_of(self.site_partition)]
        for index, term in enumerate(self.terms):
            _require_term_widths(index, term, widths)
        norm = float(np.linalg.norm([term.coefficient for term in self.terms]))
        if not np.isfinite(norm) or norm < PROBABILITY_FLOOR:
            raise NumericalValidationError("coefficient vector must have finite nonzero norm")

    @property
    def num_qubits(self) -> int:
        return len(self.site_partition)

    @property
    def sites(self) -> tuple[SiteId, ...]:
        return sites_of(self.site_partition)

    def full_vectors(self) -> list[tuple[complex, ComplexVector, ComplexVector]]:
        """Return (coefficient, bra amplitudes, ket amplitudes) per term over the whole system."""

        groups = [site_qubits(self.site_partition, site) for site in self.sites]
        return [
            (
                complex(term.coefficient),
                embed_factors(term.bra_factors, groups, self.num_qubits).amplitudes,
                embed_factors(term.ket_factors, groups, self.num_qubits).amplitudes,
            )
            for term in self.terms
        ]

    def transition_operator(self) -> NDArray[np.complex128]:
        """Return sum_t c_t |Psi_t><Phi_t| as a dense matrix."""

        dimension = 2**self.num_qubits
        operator = np.zeros((dimension, dimension), dtype=np.complex128)
        for coefficient, bra, ket in self.full_vectors():
            operator += coefficient * np.outer(ket, bra.conj())
        return operator

    @classmethod
    def from_two_state_vector(cls, tsv: TwoStateVector) -> GeneralizedTwoStateVector:
        """Embed a two-state vector under its own site partition.

        On one site bra and ket stay single factors. Across sites they are
        expanded over computational basis states, so every term is a product of
        per-site factors.
        """

        sites = sites_of(tsv.site_partition)
        if len(sites) == 1:
            return cls((GeneralizedTerm(1.0, (tsv.bra,), (tsv.ket,)),), tsv.site_partition)
        groups = [site_qubits(tsv.site_partition, site) for site in sites]
        kets = np.flatnonzero(np.abs(tsv.ket.amplitudes) > TOLERANCE)
        bras = np.flatnonzero(np.abs(tsv.bra.amplitudes) > TOLERANCE)
        terms = tuple(
            GeneralizedTerm(
                complex(tsv.ket.amplitudes[k] * np.conj(tsv.bra.amplitudes[b])),
                _basis_factors(int(b), groups),
                _basis_factors(int(k), groups),
            )
            for k in kets
            for b in bras
        )
        return cls(terms, tsv.site_partition)


def _basis_factors(index: int, groups: Sequence[Sequence[int]]) -> tuple[StateVector, ...]:
    """Split computational basis state `index` into one basis factor per qubit group."""

    return tuple(
        basis_state(len(group), sum(((index >> qubit) & 1) << position for position, qubit in enumerate(group))) for group in groups
    )


@dataclass(frozen=True)
class NotReducible:
    """Returned when a generalized two-state vector has no single bra/ket form."""

    singular_values: tuple[float, ...]


def abl_probability(
    tsv: TwoStateVector,
    projectors: Sequence[NDArray[np.generic]],
    targets: Sequence[int] | None = None,
) -> NDArray[np.float64]:
    """Return P(k) = |<bra|P_k|ket>|^2 normalized over k."""

    return _normalized_weights([(1.0, tsv.bra.amplitudes, tsv.ket.amplitudes)], tsv.num_qubits, projectors, targets)


def generalized_abl_probability(
    gtsv: GeneralizedTwoStateVector,
    projectors: Sequence[NDArray[np.generic]],
    targets: Sequence[int] | None = None,
) -> NDArray[np.float64]:
    """Return P(k) proportional to |sum_t c_t <Phi_t|P_k|Psi_t>|^2."""

    return _normalized_weights(gtsv.full_vectors(), gtsv.num_qubits, projectors, targets)


def born_distribution(
    state: StateVector,
    projectors: Sequence[NDArray[np.generic]],
    targets: Sequence[int] | None = None,
) -> NDArray[np.float64]:
    """Return the plain Born distribution <psi|P_k|psi>."""

    resolved = _resolved_targets(state.num_qubits, targets)
    checked = validate_projector_set(projectors, 2 ** len(resolved))
    psi = state.amplitudes
    return np.array([float(np.vdot(psi, apply_matrix(psi, state.num_qubits, projector, resolved)).real) for projector in checked])


def reduce_generalized(gtsv: GeneralizedTwoStateVector) -> TwoStateVector | NotReducible:
    """Factor a generalized two-state vector into one bra/ket pair when its rank is 1."""

    left, singular, right = np.linalg.svd(gtsv.transition_operator())
    if len(singular) > 1 and singular[1] >= TOLERANCE * singular[0]:
        return NotReducible(tuple(float(value) for value in singular if value >= TOLERANCE * singular[0]))
    ket = StateVector.from_amplitudes(left[:, 0], normalize=True)
    bra = StateVector.from_amplitudes(right[0].conj(), normalize=True)
    return TwoStateVector(bra=bra, ket=ket, site_partition=gtsv.site_partition)


def _normalized_weights(
    terms: Sequence[tuple[complex, ComplexVector, ComplexVector]],
    num_qubits: int,
    projectors: Sequence[NDArray[np.generic]],
    targets: Sequence[int] | None,
) -> NDArray[np.float64]:
    resolved = _resolved_targets(num_qubits, targets)
    checked = validate_projector_set(projectors, 2 ** len(resolved))
    amplitudes = [
        sum(
            (coefficient * np.vdot(bra, apply_matrix(ket, num_qubits, projector, resolved)) for coefficient, bra, ket in terms),
            start=0j,
        )
        for projector in checked
    ]
    weights = np.abs(np.array(amplitudes, dtype=np.complex128)) ** 2
    total = float(weights.sum())
    if total < PROBABILITY_FLOOR:
        raise DomainError("pre- and post-selection are incompatible with this measurement (vanishing ABL denominator)")
    return weights / total


def _resolved_targets(num_qubits: int, targets: Sequence[int] | None) -> tuple[int, ...]:
    if targets is None:
        return tuple(range(num_qubits))
    return validate_targets(num_qubits, targets)


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Outcome counts from accepted runs."""

    counts: tuple[int, ...]
    labels: tuple[str, ...] = field(default=())

    @classmethod
    def from_outcomes(cls, outcomes: Sequence[int], num_outcomes: int, labels: Sequence[str] = ()) -> EmpiricalDistribution:
        tally = np.bincount(np.asarray(outcomes, dtype=np.int64), minlength=num_outcomes)
        if tally.shape[0] != num_outcomes:
            raise DomainError(f"outcome index out of range for {num_outcomes} outcomes")
        return cls(tuple(int(value) for value in tally), tuple(labels))

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def frequencies(self) -> NDArray[np.float64]:
        if self.total == 0:
            return np.zeros(len(self.counts))
        return np.asarray(self.counts, dtype=np.float64) / self.total

    @property
    def standard_errors(self) -> NDArray[np.float64]:
        """Binomial standard error of each frequency."""

        if self.total == 0:
            return np.zeros(len(self.counts))
        frequencies = self.frequencies
        return np.sqrt(frequencies * (1.0 - frequencies) / self.total)

    def total_variation(self, reference: Sequence[float] | NDArray[np.float64]) -> float:
        expected = np.asarray(reference, dtype=np.float64)
        if expected.shape[0] != len(self.counts):
            raise DomainError(f"reference has {expected.shape[0]} outcomes, distribution has {len(self.counts)}")
        return 0.5 * float(np.abs(self.frequencies - expected).sum())

    def merge(self, other: EmpiricalDistribution) -> EmpiricalDistribution:
        if len(other.counts) != len(self.counts):
            raise DomainError("cannot merge distributions over different outcome sets")
        return EmpiricalDistribution(tuple(a + b for a, b in zip(self.counts, other.counts, strict=True)), self.labels or other.labels)

    def to_frame(self, reference: Sequence[float] | None = None) -> pd.DataFrame:
        """Return a per-outcome table of counts, frequencies, and standard errors."""

        labels = list(self.labels) if self.labels else [str(index) for index in range(len(self.counts))]
        frame = pd.DataFrame(
            {
                "outcome": labels,
                "count": list(self.counts),
                "frequency": self.frequencies,
                "standard_error": self.standard_errors,
            }
        )
        if reference is not None:
            frame["expected"] = list(reference)
        return frame
