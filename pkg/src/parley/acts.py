"""Semantic dialog acts exchanged between understanding, policies and generation."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class UserActType(Enum):
    INFORM = "inform"
    REQUEST = "request"
    HELLO = "hello"
    BYE = "bye"
    THANKS = "thanks"
    AFFIRM = "affirm"
    DENY = "deny"
    REQUEST_ALTERNATIVES = "request_alternatives"
    BAD = "bad"
    SELECT_DOMAIN = "select_domain"


class SysActType(Enum):
    WELCOME = "welcome"
    REQUEST = "request"
    INFORM_BY_NAME = "inform_by_name"
    INFORM_BY_ALTERNATIVES = "inform_by_alternatives"
    SELECT = "select"
    CONFIRM = "confirm"
    REQUEST_MORE = "request_more"
    BAD = "bad"
    BYE = "bye"


class SystemEmotion(Enum):
    NEUTRAL = "Neutral"
    COMPASSIONATE = "Compassionate"
    ENTHUSIASTIC = "Enthusiastic"


@dataclass(frozen=True)
class UserAct:
    """One unit of user meaning: an intent with optional slot and value."""

    act_type: UserActType
    slot: Optional[str] = None
    value: Optional[str] = None
    score: float = 1.0

    def __post_init__(self):
        if self.act_type is UserActType.INFORM and (self.slot is None or self.value is None):
            raise ValueError("inform acts need both a slot and a value")
        if self.act_type is UserActType.REQUEST and (self.slot is None or self.value is not None):
            raise ValueError("request acts need a slot and no value")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must lie in [0, 1], got {self.score}")

    def to_dict(self) -> dict:
        return {
            "act_type": self.act_type.value,
            "slot": self.slot,
            "value": self.value,
            "score": self.score,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "UserAct":
        return cls(
            act_type=UserActType(data["act_type"]),
            slot=data.get("slot"),
            value=data.get("value"),
            score=data.get("score", 1.0),
        )

    def __repr__(self):
        parts = [self.act_type.value]
        if self.slot is not None:
            parts.append(self.slot)
        if self.value is not None:
            parts.append(repr(self.value))
        return f"UserAct({', '.join(parts)})"


@dataclass(frozen=True)
class SysAct:
    """A system action plus the slot values it communicates.

    Keys of ``slot_values`` define the act's template signature; a request
    carries its single slot with an empty value.
    """

    act_type: SysActType
    slot_values: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.act_type is SysActType.REQUEST and len(self.slot_values) != 1:
            raise ValueError("request acts carry exactly one slot")
        object.__setattr__(self, "slot_values", dict(self.slot_values))

    def signature(self) -> tuple:
        return (self.act_type, tuple(sorted(self.slot_values)))

    def to_dict(self) -> dict:
        return {"act_type": self.act_type.value, "slot_values": dict(self.slot_values)}

    @classmethod
    def from_dict(cls, data: dict) -> "SysAct":
        return cls(SysActType(data["act_type"]), dict(data.get("slot_values", {})))

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self.slot_values.items())
        return f"SysAct({self.act_type.value}{', ' if inner else ''}{inner})"


def acts_to_payload(acts) -> dict:
    return {"acts": [a.to_dict() for a in acts]}


def acts_from_payload(payload) -> list:
    return [UserAct.from_dict(a) for a in payload.get("acts", [])]
