"""Topic names, message envelopes and service descriptors."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional


class SubscriptionMode(Enum):
    """How pending messages are handed to a subscriber."""

    LATEST = "latest"    # only the most recent pending message survives
    COLLECT = "collect"  # every pending message, in publish order


#: Topic names the dialog system itself publishes on; services may subscribe
#: to them but the graph utility treats the system as their implicit peer.
LIFECYCLE_TOPICS = ("dialog_start", "dialog_end", "dialog_exit")


@dataclass(frozen=True)
class TopicName:
    """A topic, optionally scoped to a single domain.

    Rendered as ``base`` or ``base/domain``.  A subscription to a bare base
    matches every domain-scoped variant of it; a domain-scoped subscription
    matches only its own domain.
    """

    base: str
    domain: Optional[str] = None

    def __post_init__(self):
        if not self.base:
            raise ValueError("topic base must be non-empty")
        if "/" in self.base:
            raise ValueError(f"topic base may not contain '/': {self.base!r}")
        if self.domain == "":
            raise ValueError("topic domain, when given, must be non-empty")

    @classmethod
    def parse(cls, rendered: str) -> "TopicName":
        base, sep, domain = rendered.partition("/")
        return cls(base, domain if sep else None)

    def render(self) -> str:
        return self.base if self.domain is None else f"{self.base}/{self.domain}"

    def matches(self, concrete: "TopicName") -> bool:
        """Prefix rule: does this (subscription) topic match a published one?"""
        if self.base != concrete.base:
            return False
        return self.domain is None or self.domain == concrete.domain

    def __str__(self):
        return self.render()


def as_topic(topic) -> TopicName:
    return topic if isinstance(topic, TopicName) else TopicName.parse(str(topic))


@dataclass(frozen=True)
class MessageEnvelope:
    """One published message.

    ``seq`` is assigned by the bus, counts from 0 and is strictly increasing
    per topic.  ``order`` is a bus-global publish index used to compare
    recency across different topics matched by one base subscription.
    """

    topic: TopicName
    seq: int
    wall_time: int  # epoch milliseconds
    payload: Any
    order: int = 0

    def to_dict(self) -> dict:
        return {
            "topic": self.topic.render(),
            "seq": self.seq,
            "wall_time": self.wall_time,
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, data: dict, order: int = 0) -> "MessageEnvelope":
        return cls(
            topic=TopicName.parse(data["topic"]),
            seq=int(data["seq"]),
            wall_time=int(data["wall_time"]),
            payload=data["payload"],
            order=order,
        )


def freeze_payload(payload) -> Any:
    """Canonicalize a payload through JSON.

    Publishing hands the payload to arbitrarily many subscribers, possibly in
    other processes; a JSON round trip both checks serializability and
    decouples the stored message from the caller's mutable objects, so local
    and remote services observe byte-identical content.
    """
    try:
        return json.loads(json.dumps(payload))
    except (TypeError, ValueError) as exc:
        raise TypeError(f"payload is not JSON-serializable: {exc}") from exc


@dataclass(frozen=True)
class Subscription:
    topic: TopicName
    mode: SubscriptionMode

    def to_dict(self) -> dict:
        return {"topic": self.topic.render(), "mode": self.mode.value}

    @classmethod
    def from_dict(cls, data: dict) -> "Subscription":
        return cls(TopicName.parse(data["topic"]), SubscriptionMode(data["mode"]))


@dataclass(frozen=True)
class Local:
    def __str__(self):
        return "local"


@dataclass(frozen=True)
class Remote:
    address: str

    def __str__(self):
        return f"remote({self.address})"


@dataclass
class ServiceDescriptor:
    """Declared shape of a service: what it consumes and produces."""

    name: str
    subscriptions: list = field(default_factory=list)   # list[Subscription]
    publications: list = field(default_factory=list)    # list[TopicName]
    location: Any = field(default_factory=Local)

    def __post_init__(self):
        if not self.name:
            raise ValueError("service name must be non-empty")
        if not self.subscriptions and not self.publications:
            raise ValueError(
                f"service {self.name!r} declares neither subscriptions nor publications"
            )

    @property
    def is_remote(self) -> bool:
        return isinstance(self.location, Remote)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "subscriptions": [s.to_dict() for s in self.subscriptions],
            "publications": [t.render() for t in self.publications],
        }

    @classmethod
    def from_dict(cls, data: dict, location=None) -> "ServiceDescriptor":
        return cls(
            name=data["name"],
            subscriptions=[Subscription.from_dict(s) for s in data["subscriptions"]],
            publications=[TopicName.parse(t) for t in data["publications"]],
            location=location if location is not None else Local(),
        )


def subscription(topic, mode=SubscriptionMode.LATEST) -> Subscription:
    """Convenience constructor accepting rendered topic strings."""
    if isinstance(mode, str):
        mode = SubscriptionMode(mode)
    return Subscription(as_topic(topic), mode)
