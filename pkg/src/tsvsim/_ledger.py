"""Append-only protocol transcripts, instantaneity checks, and resource counts.

'why': the instantaneous-measurement contract is a statement about which events
exist at the measurement time and which classical messages they depend on; a
transcript makes that contract checkable per run
"""
from __future__ import annotations

import hashlib
import json
from collections import Counter
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path

import msgpack

from ._channels import ChannelPool
from ._errors import DomainError, TranscriptStateError
from ._io import write_text_atomic
from ._scenario import BellMeasurementStep, ChannelEventStep, MeasurementStep, Scenario, Step
from ._tsv import SiteId


class EventKind(str, Enum):
    LOCAL_OP = "LocalOp"
    LOCAL_MEASUREMENT = "LocalMeasurement"
    RECORD_WRITTEN = "RecordWritten"
    CLASSICAL_SEND = "ClassicalSend"
    CLASSICAL_RECEIVE = "ClassicalReceive"
    CHANNEL_CONSUMED = "ChannelConsumed"


@dataclass(frozen=True)
class Event:
    """One local event; `depends_on` lists the message ids whose content it used."""

    site: SiteId
    time: float
    kind: EventKind
    payload: str
    protocol_tag: str
    message_id: str | None = None
    depends_on: tuple[str, ...] = ()
    record_id: str | None = None
    for_reconstruction: bool = False
    seq: int = 0

    def as_row(self) -> list[object]:
        return [
            self.site,
            self.time,
            self.kind.value,
            self.payload,
            self.protocol_tag,
            self.message_id,
            list(self.depends_on),
            self.record_id,
            self.for_reconstruction,
            self.seq,
        ]


@dataclass(frozen=True)
class Violation:
    reason: str
    message_id: str | None = None
    seq: int | None = None


@dataclass(frozen=True)
class Verdict:
    violations: tuple[Violation, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class Transcript:
    """Finalized, immutable event list ordered by (time, site, seq)."""

    events: tuple[Event, ...]
    measurement_time: float
    protocol_tags: frozenset[str]

    def digest(self) -> str:
        """Return SHA-256 over the msgpack encoding of the measurement time and event rows."""

        packed = msgpack.packb([self.measurement_time, [event.as_row() for event in self.events]], use_bin_type=True)
        return hashlib.sha256(packed).hexdigest()

    def to_jsonl(self) -> str:
        lines = []
        for event in self.events:
            row = asdict(event)
            row["kind"] = event.kind.value
            row["depends_on"] = list(event.depends_on)
            lines.append(json.dumps(row, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")

    def write(self, path: Path) -> Path:
        return write_text_atomic(path, self.to_jsonl())


class TranscriptRecorder:
    """Collect events for one protocol run; `finalize` freezes them into a Transcript."""

    def __init__(self) -> None:
        self._events: list[Event] = []
        self._tags: set[str] = set()
        self._messages: int = 0
        self._finalized: bool = False

    @property
    def events(self) -> tuple[Event, ...]:
        return tuple(self._events)

    def declare(self, protocol_tag: str) -> None:
        """Register a protocol tag even if it ends up emitting no channel events."""

        self._require_open()
        self._tags.add(protocol_tag)

    def record(
        self,
        site: SiteId,
        time: float,
        kind: EventKind,
        payload: str,
        protocol_tag: str,
        *,
        message_id: str | None = None,
        depends_on: Sequence[str] = (),
        record_id: str | None = None,
        for_reconstruction: bool = False,
    ) -> Event:
        self._require_open()
        self._tags.add(protocol_tag)
        seq = len(self._events)
        event = Event(site, float(time), kind, payload, protocol_tag, message_id, tuple(depends_on), record_id, for_reconstruction, seq)
        self._events.append(event)
        return event

    def measurement(
        self,
        site: SiteId,
        time: float,
        outcome: str,
        protocol_tag: str,
        record_id: str,
        *,
        for_reconstruction: bool = True,
    ) -> None:
        """Record a local measurement and the permanent record it leaves at the same site."""

        _ = self.record(site, time, EventKind.LOCAL_MEASUREMENT, outcome, protocol_tag, record_id=record_id)
        written = EventKind.RECORD_WRITTEN
        _ = self.record(site, time, written, outcome, protocol_tag, record_id=record_id, for_reconstruction=for_reconstruction)

    def send(self, source: SiteId, destination: SiteId, sent_at: float, received_at: float, payload: str, protocol_tag: str) -> str:
        """Record a one-bit classical message and its arrival; return the message id."""

        message_id = f"m{self._messages}"
        self._messages += 1
        _ = self.record(source, sent_at, EventKind.CLASSICAL_SEND, payload, protocol_tag, message_id=message_id)
        _ = self.record(destination, received_at, EventKind.CLASSICAL_RECEIVE, payload, protocol_tag, message_id=message_id)
        return message_id

    def finalize(self, measurement_time: float) -> Transcript:
        self._require_open()
        self._finalized = True
        ordered = sorted(self._events, key=lambda event: (event.time, event.site, event.seq))
        return Transcript(tuple(ordered), float(measurement_time), frozenset(self._tags))

    def _require_open(self) -> None:
        if self._finalized:
            raise TranscriptStateError("transcript has already been finalized")


def _require_finalized(transcript: Transcript | TranscriptRecorder) -> Transcript:
    if isinstance(transcript, TranscriptRecorder):
        raise TranscriptStateError("transcript must be finalized before it is checked")
    return transcript


def check_instantaneity(transcript: Transcript | TranscriptRecorder) -> Verdict:
    """Check that records exist at the measurement time and nothing then used a received message."""

    finalized = _require_finalized(transcript)
    return Verdict((*_record_violations(finalized), *_dependency_violations(finalized)))


def _record_violations(finalized: Transcript) -> Iterator[Violation]:
    t = finalized.measurement_time
    measured_at = {event.record_id: event for event in finalized.events if event.kind is EventKind.LOCAL_MEASUREMENT}
    records = (event for event in finalized.events if event.kind is EventKind.RECORD_WRITTEN and event.for_reconstruction)
    for event in records:
        if event.time != t:
            yield Violation(f"record {event.record_id} written at {event.time}, not at the measurement time {t}", seq=event.seq)
        source = measured_at.get(event.record_id)
        if source is None or source.site != event.site:
            yield Violation(f"record {event.record_id} is not written at the site that measured it", seq=event.seq)


def _dependency_violations(finalized: Transcript) -> Iterator[Violation]:
    t = finalized.measurement_time
    received = {event.message_id: event for event in finalized.events if event.kind is EventKind.CLASSICAL_RECEIVE}
    local = (EventKind.LOCAL_OP, EventKind.LOCAL_MEASUREMENT)
    at_measurement = (event for event in finalized.events if event.time == t and event.kind in local)
    dependencies = ((event, message_id) for event in at_measurement for message_id in event.depends_on)
    for event, message_id in dependencies:
        arrival = received.get(message_id)
        if arrival is None:
            yield Violation("operation depends on a message that never arrives", message_id, event.seq)
        elif arrival.time <= t:
            yield Violation(f"message received at {arrival.time} influences an operation at the measurement time", message_id, event.seq)


def check_message_causality(transcript: Transcript | TranscriptRecorder) -> Verdict:
    """Every ClassicalReceive pairs with exactly one strictly earlier ClassicalSend."""

    finalized = _require_finalized(transcript)
    sends = Counter(event.message_id for event in finalized.events if event.kind is EventKind.CLASSICAL_SEND)
    send_times = {event.message_id: event.time for event in finalized.events if event.kind is EventKind.CLASSICAL_SEND}
    violations: list[Violation] = []
    for event in (event for event in finalized.events if event.kind is EventKind.CLASSICAL_RECEIVE):
        if sends[event.message_id] != 1:
            violations.append(Violation(f"receive matches {sends[event.message_id]} sends", event.message_id, event.seq))
        elif send_times[event.message_id] >= event.time:
            violations.append(Violation("receive does not follow its send", event.message_id, event.seq))
    return Verdict(tuple(violations))


def count_channels(transcript: Transcript | TranscriptRecorder, protocol_tag: str) -> int:
    finalized = _require_finalized(transcript)
    if protocol_tag not in finalized.protocol_tags:
        raise DomainError(f"unknown protocol tag {protocol_tag!r}")
    return sum(1 for event in finalized.events if event.kind is EventKind.CHANNEL_CONSUMED and event.protocol_tag == protocol_tag)


def classical_bits_sent_by(transcript: Transcript | TranscriptRecorder, t_cutoff: float) -> int:
    """Count ClassicalSend events at or before `t_cutoff`; each carries one bit."""

    finalized = _require_finalized(transcript)
    return sum(1 for event in finalized.events if event.kind is EventKind.CLASSICAL_SEND and event.time <= t_cutoff)


@dataclass(frozen=True)
class ChannelBalance:
    provisioned: int
    consumed: int
    unconsumed: int
    verdict: Verdict


def channel_balance(transcript: Transcript | TranscriptRecorder, pool: ChannelPool) -> ChannelBalance:
    """Check provisioned = consumed + unconsumed and one ChannelConsumed event per consumed channel."""

    finalized = _require_finalized(transcript)
    consumed_events = Counter(event.payload for event in finalized.events if event.kind is EventKind.CHANNEL_CONSUMED)
    violations = [*_consumption_violations(consumed_events, pool), *_unrecorded_consumptions(consumed_events, pool)]
    provisioned = len(pool.channels)
    if provisioned != pool.consumed_count + pool.unconsumed_count:
        violations.append(Violation("provisioned channels do not balance"))
    return ChannelBalance(provisioned, pool.consumed_count, pool.unconsumed_count, Verdict(tuple(violations)))


def _consumption_violations(consumed_events: Counter[str], pool: ChannelPool) -> Iterator[Violation]:
    known = {channel.channel_id for channel in pool.channels}
    for channel_id, count in consumed_events.items():
        if channel_id not in known:
            yield Violation(f"consumption of unprovisioned channel {channel_id}")
        elif count != 1:
            yield Violation(f"channel {channel_id} consumed {count} times")


def _unrecorded_consumptions(consumed_events: Counter[str], pool: ChannelPool) -> Iterator[Violation]:
    for channel in pool.channels:
        if channel.consumed and channel.channel_id not in consumed_events:
            yield Violation(f"channel {channel.channel_id} consumed without a transcript event")


def record_timeline(recorder: TranscriptRecorder, steps: Iterable[Step], protocol_tag: str) -> None:
    """Append one event per timeline step; channel events become ChannelConsumed."""

    recorder.declare(protocol_tag)
    for step in steps:
        if isinstance(step, ChannelEventStep):
            _ = recorder.record(step.site, step.time, EventKind.CHANNEL_CONSUMED, step.channel_id, protocol_tag)
        elif isinstance(step, (MeasurementStep, BellMeasurementStep)):
            recorder.measurement(step.site, step.time, step.step_id, protocol_tag, step.step_id, for_reconstruction=False)
        else:
            _ = recorder.record(step.site, step.time, EventKind.LOCAL_OP, step.step_id, protocol_tag)


def scenario_transcript(
    scenario: Scenario,
    measurement_time: float,
    protocol_tag: str,
    recorder: TranscriptRecorder | None = None,
) -> Transcript:
    """Translate a scenario timeline into transcript events and finalize them."""

    target = recorder or TranscriptRecorder()
    record_timeline(target, scenario.timeline, protocol_tag)
    return target.finalize(measurement_time)


def merge_digests(transcripts: Iterable[Transcript]) -> str:
    """Return one SHA-256 over the ordered digests of many transcripts."""

    hasher = hashlib.sha256()
    for transcript in transcripts:
        hasher.update(transcript.digest().encode("ascii"))
    return hasher.hexdigest()
