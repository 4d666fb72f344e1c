"""Domain ontologies: slots, legal values and domain-tracking keywords."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

DONTCARE = "dontcare"


class UnknownSlot(KeyError):
    def __init__(self, slot, domain=None):
        where = f" in domain {domain!r}" if domain else ""
        super().__init__(f"unknown slot {slot!r}{where}")
        self.slot = slot


def normalize_value(value) -> str:
    """Comparison form for slot values: trimmed, lowercased."""
    return str(value).strip().lower()


@dataclass
class Ontology:
    domain_name: str
    informable: dict               # slot -> list of legal values
    requestable: list
    primary_key: str
    keywords: list
    display_name: str = ""
    synonyms: dict = field(default_factory=dict)  # slot -> {surface: canonical}

    def __post_init__(self):
        if not self.informable:
            raise ValueError(f"domain {self.domain_name!r} has no informable slots")
        if not self.requestable:
            raise ValueError(f"domain {self.domain_name!r} has no requestable slots")
        if self.primary_key not in self.requestable:
            raise ValueError(
                f"primary key {self.primary_key!r} must be requestable in {self.domain_name!r}"
            )
        if not self.keywords:
            raise ValueError(f"domain {self.domain_name!r} has no tracking keywords")
        if not self.display_name:
            self.display_name = self.domain_name.capitalize()

    def informable_slots(self) -> list:
        return list(self.informable)

    def is_informable(self, slot) -> bool:
        return slot in self.informable

    def is_requestable(self, slot) -> bool:
        return slot in self.requestable

    def legal_value(self, slot, value) -> bool:
        if slot not in self.informable:
            raise UnknownSlot(slot, self.domain_name)
        if normalize_value(value) == DONTCARE:
            return True
        wanted = normalize_value(value)
        return any(normalize_value(v) == wanted for v in self.informable[slot])

    def canonical_value(self, slot, surface):
        """Map a surface form to its canonical ontology value, or None.

        Checks the slot's synonym table first, then a case-insensitive match
        against the legal value list.  "dontcare" is always canonical.
        """
        if slot not in self.informable:
            raise UnknownSlot(slot, self.domain_name)
        wanted = normalize_value(surface)
        if wanted == DONTCARE:
            return DONTCARE
        synonyms = self.synonyms.get(slot, {})
        for form, canonical in synonyms.items():
            if normalize_value(form) == wanted:
                return canonical
        for value in self.informable[slot]:
            if normalize_value(value) == wanted:
                return value
        return None

    @classmethod
    def from_file(cls, path) -> "Ontology":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "Ontology":
        return cls(
            domain_name=data["domain"],
            informable={slot: list(values) for slot, values in data["informable"].items()},
            requestable=list(data["requestable"]),
            primary_key=data["primary_key"],
            keywords=list(data["keywords"]),
            display_name=data.get("display_name", ""),
            synonyms={s: dict(m) for s, m in data.get("synonyms", {}).items()},
        )
