"""Pre-shared entangled channels and the pool that provisions them.

'why': every protocol pays for entanglement; a single owner of provisioning and
consumption keeps the ledger's resource counts exact
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from ._errors import ResourceError
from ._qcore import ChannelKind, StateVector, channel_vector
from ._register import Register
from ._scenario import Scenario
from ._tsv import SiteId


@dataclass(eq=False)
class ChannelPair:
    """Two qubits shared between `sites[0]` (holding `qubits[0]`) and `sites[1]`."""

    channel_id: str
    qubits: tuple[int, int]
    kind: ChannelKind
    sites: tuple[SiteId, SiteId]
    protocol_tag: str = ""
    consumed: bool = False

    def half_at(self, site: SiteId) -> int:
        if site == self.sites[0]:
            return self.qubits[0]
        if site == self.sites[1]:
            return self.qubits[1]
        raise ResourceError(f"channel {self.channel_id} does not reach site {site!r}")


class ChannelPool:
    """Provision channels on demand up to an optional capacity.

    Provisioned channels are never removed, so provisioned = consumed + unconsumed
    holds at every point of a run.
    """

    def __init__(self, capacity: int | None = None) -> None:
        if capacity is not None and capacity < 0:
            raise ResourceError(f"channel capacity must be non-negative (got {capacity})")
        self._capacity: int | None = capacity
        self._channels: list[ChannelPair] = []

    @property
    def channels(self) -> tuple[ChannelPair, ...]:
        return tuple(self._channels)

    @property
    def consumed_count(self) -> int:
        return sum(channel.consumed for channel in self._channels)

    @property
    def unconsumed_count(self) -> int:
        return len(self._channels) - self.consumed_count

    def consumed_by(self, protocol_tag: str) -> int:
        return sum(channel.consumed for channel in self._channels if channel.protocol_tag == protocol_tag)

    def provision(
        self,
        register: Register,
        kind: ChannelKind,
        sites: tuple[SiteId, SiteId],
        *,
        protocol_tag: str = "",
        channel_id: str | None = None,
    ) -> ChannelPair:
        """Allocate a fresh pair in `register`."""

        self._require_capacity()
        first, second = register.allocate(StateVector(2, channel_vector(kind)))
        return self._record(ChannelPair(channel_id or self._next_id(), (first, second), kind, sites, protocol_tag))

    def provision_in_scenario(
        self,
        scenario: Scenario,
        kind: ChannelKind,
        sites: tuple[SiteId, SiteId],
        *,
        protocol_tag: str = "",
        channel_id: str | None = None,
    ) -> tuple[Scenario, ChannelPair]:
        """Append a pair to the scenario's pre-selection; the pair is shared before any step."""

        self._require_capacity()
        extended, (first, second) = scenario.with_qubits(StateVector(2, channel_vector(kind)), sites[0])
        partition = list(extended.site_partition)
        partition[second] = sites[1]
        extended = replace(extended, site_partition=tuple(partition))
        channel = self._record(ChannelPair(channel_id or self._next_id(), (first, second), kind, sites, protocol_tag))
        return extended, channel

    def consume(self, channel: ChannelPair) -> None:
        self.require_available(channel)
        channel.consumed = True

    def require_available(self, channel: ChannelPair) -> None:
        """Raise unless `channel` was provisioned here and is still unconsumed."""

        if channel not in self._channels:
            raise ResourceError(f"channel {channel.channel_id} was not provisioned by this pool")
        if channel.consumed:
            raise ResourceError(f"channel {channel.channel_id} has already been consumed")

    def take_unconsumed(self, kind: ChannelKind, sites: tuple[SiteId, SiteId]) -> ChannelPair:
        """Return the oldest unconsumed channel of `kind` joining `sites`, in either orientation."""

        for channel in self._channels:
            if not channel.consumed and channel.kind is kind and set(channel.sites) == set(sites):
                return channel
        raise ResourceError(f"no unconsumed {kind.value} channel between {sites[0]!r} and {sites[1]!r}")

    def _require_capacity(self) -> None:
        if self._capacity is not None and len(self._channels) >= self._capacity:
            raise ResourceError(f"channel pool exhausted after {self._capacity} channels")

    def _record(self, channel: ChannelPair) -> ChannelPair:
        self._channels.append(channel)
        return channel

    def _next_id(self) -> str:
        return f"ch{len(self._channels)}"


def require_available(channel: ChannelPair, pool: ChannelPool | None) -> None:
    if pool is not None:
        pool.require_available(channel)
    elif channel.consumed:
        raise ResourceError(f"channel {channel.channel_id} has already been consumed")


def consume_channel(channel: ChannelPair, pool: ChannelPool | None) -> None:
    """Mark `channel` consumed through its pool when one is given."""

    require_available(channel, pool)
    channel.consumed = True
