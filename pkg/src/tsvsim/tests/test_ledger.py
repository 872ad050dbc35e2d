"""Validate transcripts and the checks run over them.

'why': instantaneity is judged from transcripts alone, so the checks must flag
exactly the runs that use a message at or before the measurement time
"""
from __future__ import annotations

from pathlib import Path

import pytest

from tsvsim import (
    ChannelKind,
    ChannelPool,
    DomainError,
    EventKind,
    Register,
    Scenario,
    TranscriptRecorder,
    TranscriptStateError,
    UnitaryStep,
    basis_state,
    channel_balance,
    check_instantaneity,
    check_message_causality,
    classical_bits_sent_by,
    count_channels,
    scenario_transcript,
)
from tsvsim._ledger import Transcript, merge_digests
from tsvsim._qcore import PAULI_X


def _local_run(measured_at: float = 0.0) -> Transcript:
    """Alice measures and records locally, then sends her bit after the measurement time."""

    recorder = TranscriptRecorder()
    recorder.measurement("A", measured_at, "1", "local", "a:z")
    message = recorder.send("A", "B", 1.0, 2.0, "1", "local")
    _ = recorder.record("B", 2.0, EventKind.LOCAL_OP, "reconstruct", "local", depends_on=[message])
    return recorder.finalize(0.0)


def test_finalized_recorder_refuses_new_events() -> None:
    recorder = TranscriptRecorder()
    _ = recorder.finalize(0.0)

    with pytest.raises(TranscriptStateError):
        _ = recorder.record("A", 0.0, EventKind.LOCAL_OP, "late", "p")
    with pytest.raises(TranscriptStateError):
        _ = recorder.finalize(0.0)


def test_checks_need_a_finalized_transcript() -> None:
    with pytest.raises(TranscriptStateError) as exc:
        _ = check_instantaneity(TranscriptRecorder())

    assert "finalized" in str(exc.value)


def test_finalize_orders_by_time_site_and_sequence() -> None:
    recorder = TranscriptRecorder()
    _ = recorder.record("B", 1.0, EventKind.LOCAL_OP, "second", "p")
    _ = recorder.record("B", 0.0, EventKind.LOCAL_OP, "first-b", "p")
    _ = recorder.record("A", 0.0, EventKind.LOCAL_OP, "first-a", "p")

    transcript = recorder.finalize(0.0)

    assert [event.payload for event in transcript.events] == ["first-a", "first-b", "second"]


def test_local_records_and_late_messages_are_instantaneous() -> None:
    """Messages sent after the measurement time never break instantaneity."""

    transcript = _local_run()

    assert check_instantaneity(transcript).passed
    assert check_message_causality(transcript).passed
    assert classical_bits_sent_by(transcript, 0.0) == 0
    assert classical_bits_sent_by(transcript, 1.0) == 1


def test_late_record_is_a_violation() -> None:
    verdict = check_instantaneity(_local_run(measured_at=0.5))

    assert not verdict.passed
    assert "not at the measurement time" in verdict.violations[0].reason


def test_operation_using_an_arrived_message_is_a_violation() -> None:
    """An operation at the measurement time that depends on a received message fails."""

    # Given a message that arrives exactly at the measurement time
    recorder = TranscriptRecorder()
    message = recorder.send("B", "A", -1.0, 0.0, "x", "p")

    # When Alice acts on it at the measurement time
    _ = recorder.record("A", 0.0, EventKind.LOCAL_OP, "correct", "p", depends_on=[message])
    verdict = check_instantaneity(recorder.finalize(0.0))

    # Then the dependency is flagged
    assert [violation.message_id for violation in verdict.violations] == [message]


def test_dependency_on_a_missing_message_is_a_violation() -> None:
    recorder = TranscriptRecorder()
    _ = recorder.record("A", 0.0, EventKind.LOCAL_OP, "guess", "p", depends_on=["m9"])

    verdict = check_instantaneity(recorder.finalize(0.0))

    assert "never arrives" in verdict.violations[0].reason


def test_receive_without_send_breaks_causality() -> None:
    recorder = TranscriptRecorder()
    _ = recorder.record("B", 1.0, EventKind.CLASSICAL_RECEIVE, "0", "p", message_id="ghost")

    verdict = check_message_causality(recorder.finalize(0.0))

    assert not verdict.passed
    assert "0 sends" in verdict.violations[0].reason


def test_receive_at_send_time_breaks_causality() -> None:
    recorder = TranscriptRecorder()
    _ = recorder.send("A", "B", 1.0, 1.0, "0", "p")

    assert not check_message_causality(recorder.finalize(0.0)).passed


def test_channel_count_needs_a_known_tag() -> None:
    transcript = _local_run()

    with pytest.raises(DomainError):
        _ = count_channels(transcript, "elsewhere")


def test_declared_tag_counts_zero_channels() -> None:
    recorder = TranscriptRecorder()
    recorder.declare("idle")

    assert count_channels(recorder.finalize(0.0), "idle") == 0


def test_digest_is_deterministic_and_content_sensitive() -> None:
    """Equal event lists hash equally; any change in content changes the digest."""

    same = _local_run().digest()

    assert _local_run().digest() == same
    assert _local_run(measured_at=0.5).digest() != same
    assert merge_digests([_local_run(), _local_run()]) == merge_digests([_local_run(), _local_run()])
    assert merge_digests([_local_run()]) != merge_digests([_local_run(), _local_run()])


def test_jsonl_export_writes_one_line_per_event(tmp_path: Path) -> None:
    transcript = _local_run()

    written = transcript.write(tmp_path / "run.jsonl")

    lines = written.read_text(encoding="utf-8").splitlines()
    assert len(lines) == len(transcript.events)
    assert '"kind": "LocalMeasurement"' in lines[0]


def test_channel_balance_tracks_pool_and_transcript() -> None:
    """Every consumed channel needs exactly one ChannelConsumed event."""

    # Given two provisioned channels, one of them consumed
    register = Register(basis_state(0, 0))
    pool = ChannelPool()
    used = pool.provision(register, ChannelKind.SINGLET, ("A", "B"))
    _ = pool.provision(register, ChannelKind.SINGLET, ("A", "C"))
    pool.consume(used)

    # When the transcript does and does not record the consumption
    recorder = TranscriptRecorder()
    _ = recorder.record("A", 0.0, EventKind.CHANNEL_CONSUMED, used.channel_id, "p")
    recorded = channel_balance(recorder.finalize(0.0), pool)
    silent = channel_balance(TranscriptRecorder().finalize(0.0), pool)

    # Then only the recorded run balances
    assert (recorded.provisioned, recorded.consumed, recorded.unconsumed) == (2, 1, 1)
    assert recorded.verdict.passed
    assert not silent.verdict.passed


def test_scenario_transcript_maps_steps_to_events() -> None:
    scenario = Scenario(
        num_qubits=1,
        preselection=basis_state(1, 0),
        timeline=(UnitaryStep("flip", "A", 0.5, (0,), PAULI_X),),
    )

    transcript = scenario_transcript(scenario, 0.5, "timeline")

    assert [(event.kind, event.payload) for event in transcript.events] == [(EventKind.LOCAL_OP, "flip")]
    assert count_channels(transcript, "timeline") == 0
