"""Validate two-state vectors and the ABL rule.

'why': the analytic side is the oracle every sampler in the suite is checked against
"""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsvsim import (
    Direction,
    DomainError,
    EmpiricalDistribution,
    GeneralizedTerm,
    GeneralizedTwoStateVector,
    NotReducible,
    NumericalValidationError,
    RandomSource,
    TwoStateVector,
    abl_probability,
    basis_state,
    born_distribution,
    generalized_abl_probability,
    reduce_generalized,
)
from tsvsim._experiments import generalized_example
from tsvsim._qcore import X_BASIS, computational_projectors, projectors_for
from tsvsim._tsv import validate_direction_tags

from ._utils import haar, state

Z = computational_projectors(1)
X = projectors_for(X_BASIS)


def test_abl_weights_follow_both_boundary_states() -> None:
    """P(k) is |<bra|P_k|ket>|^2, normalized."""

    # Given a ket at angle pi/6 and a |+> post-selection
    theta = math.pi / 6
    tsv = TwoStateVector(bra=state(1, 1), ket=state(math.cos(theta), math.sin(theta)))

    # When the z outcome probabilities are computed
    probabilities = abl_probability(tsv, Z)

    # Then they are cos^2 and sin^2 of the angle
    assert probabilities == pytest.approx([0.75, 0.25])


def test_abl_rejects_incompatible_boundaries() -> None:
    """A measurement every branch of which is orthogonal to the post-selection is refused."""

    tsv = TwoStateVector(bra=state(1, -1), ket=state(1, 1))

    with pytest.raises(DomainError) as exc:
        _ = abl_probability(tsv, X)

    assert "vanishing ABL denominator" in str(exc.value)


def test_abl_on_a_subsystem() -> None:
    """Targets restrict the projectors to a subset of the qubits."""

    tsv = TwoStateVector(bra=basis_state(2, 2), ket=basis_state(2, 2))

    assert abl_probability(tsv, Z, (1,)) == pytest.approx([0.0, 1.0])


def test_born_distribution_matches_amplitudes() -> None:
    assert born_distribution(state(1, 1j), X) == pytest.approx([0.5, 0.5])


def test_two_state_vector_requires_matching_sizes() -> None:
    with pytest.raises(DomainError):
        _ = TwoStateVector(bra=basis_state(1, 0), ket=basis_state(2, 0))


def test_generalized_factors_must_match_site_widths() -> None:
    up = basis_state(1, 0)

    with pytest.raises(DomainError) as exc:
        _ = GeneralizedTwoStateVector((GeneralizedTerm(1.0, (up,), (up, up)),), ("A", "B"))

    assert "per-site qubit counts" in str(exc.value)


def test_generalized_coefficients_must_not_vanish() -> None:
    up = basis_state(1, 0)

    with pytest.raises(NumericalValidationError):
        _ = GeneralizedTwoStateVector((GeneralizedTerm(0.0, (up,), (up,)),), ("A",))


def test_generalized_example_is_not_reducible() -> None:
    """A genuine superposition of product two-state vectors has rank two."""

    reduced = reduce_generalized(generalized_example())

    assert isinstance(reduced, NotReducible)
    assert len(reduced.singular_values) == 2


def test_single_term_reduces_to_the_same_predictions(rng: RandomSource) -> None:
    """Reduction of a rank-1 generalized vector keeps every ABL prediction."""

    # Given a single-term generalized two-state vector
    tsv = TwoStateVector(bra=haar(rng, 2), ket=haar(rng, 2))
    gtsv = GeneralizedTwoStateVector.from_two_state_vector(tsv)

    # When it is reduced back
    reduced = reduce_generalized(gtsv)

    # Then it predicts the same outcome weights
    assert isinstance(reduced, TwoStateVector)
    assert abl_probability(reduced, Z, (0,)) == pytest.approx(abl_probability(tsv, Z, (0,)))


def test_embedding_keeps_the_site_partition(rng: RandomSource) -> None:
    """An entangled multi-site two-state vector keeps its sites and its transition operator."""

    # Given random three-qubit boundary states with qubits 0 and 2 at A and qubit 1 at B
    tsv = TwoStateVector(bra=haar(rng, 3), ket=haar(rng, 3), site_partition=("A", "B", "A"))

    # When it is embedded as a generalized two-state vector
    gtsv = GeneralizedTwoStateVector.from_two_state_vector(tsv)

    # Then every term factorizes per site and the terms sum to |ket><bra|
    assert gtsv.site_partition == ("A", "B", "A")
    assert {tuple(factor.num_qubits for factor in term.ket_factors) for term in gtsv.terms} == {(2, 1)}
    expected = np.outer(tsv.ket.amplitudes, tsv.bra.amplitudes.conj())
    assert np.allclose(gtsv.transition_operator(), expected)


def test_direction_tags_must_cover_every_site() -> None:
    with pytest.raises(DomainError) as exc:
        _ = validate_direction_tags(("A", "B"), {"A": Direction.FORWARD})

    assert "missing ['B']" in str(exc.value)


def test_empirical_distribution_counts_and_distance() -> None:
    """Counts tally outcomes and total variation is half the L1 distance."""

    counts = EmpiricalDistribution.from_outcomes([0, 1, 1, 3], 4)

    assert counts.counts == (1, 2, 0, 1)
    assert counts.total_variation([0.25, 0.25, 0.25, 0.25]) == pytest.approx(0.25)
    assert counts.merge(counts).counts == (2, 4, 0, 2)


def test_empirical_distribution_rejects_foreign_outcomes() -> None:
    with pytest.raises(DomainError):
        _ = EmpiricalDistribution.from_outcomes([0, 4], 4)


def test_empirical_distribution_frame() -> None:
    frame = EmpiricalDistribution.from_outcomes([0, 0, 1], 2, labels=("up", "down")).to_frame(reference=[0.5, 0.5])

    assert list(frame.columns) == ["outcome", "count", "frequency", "standard_error", "expected"]
    assert frame["count"].tolist() == [2, 1]


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_abl_is_a_distribution(seed: int) -> None:
    """ABL weights are non-negative and sum to one."""

    rng = RandomSource(seed)
    tsv = TwoStateVector(bra=haar(rng, 2), ket=haar(rng, 2))

    probabilities = abl_probability(tsv, computational_projectors(2))

    assert (probabilities >= 0.0).all()
    assert float(probabilities.sum()) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_eigenstate_post_selection_fixes_the_outcome(seed: int) -> None:
    """Post-selecting onto a z eigenstate makes that z outcome certain."""

    tsv = TwoStateVector(bra=basis_state(1, 1), ket=haar(RandomSource(seed), 1))

    assert abl_probability(tsv, Z) == pytest.approx([0.0, 1.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_generalized_rule_extends_the_plain_rule(seed: int) -> None:
    """A one-term generalized vector predicts exactly what its two-state vector does."""

    rng = RandomSource(seed)
    tsv = TwoStateVector(bra=haar(rng, 2), ket=haar(rng, 2))
    gtsv = GeneralizedTwoStateVector.from_two_state_vector(tsv)

    assert np.allclose(generalized_abl_probability(gtsv, Z, (1,)), abl_probability(tsv, Z, (1,)))
