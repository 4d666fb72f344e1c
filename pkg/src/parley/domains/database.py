"""Entity databases and the constraint query used everywhere else."""

from __future__ import annotations

import json

from .ontology import DONTCARE, Ontology, UnknownSlot, normalize_value


class NoSuchEntity(LookupError):
    def __init__(self, key):
        super().__init__(f"no entity with primary key {key!r}")
        self.key = key


class EntityDatabase:
    """Immutable table of entities conforming to an ontology."""

    def __init__(self, ontology: Ontology, rows):
        self.ontology = ontology
        self.rows = [dict(r) for r in rows]
        self._validate()

    def _validate(self):
        seen = set()
        pk = self.ontology.primary_key
        for row in self.rows:
            key = normalize_value(row[pk])
            if key in seen:
                raise ValueError(f"duplicate primary key {row[pk]!r}")
            seen.add(key)
            for slot, value in row.items():
                if slot == pk or not self.ontology.is_informable(slot):
                    continue
                if not self.ontology.legal_value(slot, value):
                    raise ValueError(
                        f"row {row[pk]!r}: value {value!r} not legal for slot {slot!r}"
                    )

    def __len__(self):
        return len(self.rows)

    @classmethod
    def from_file(cls, ontology: Ontology, path) -> "EntityDatabase":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return cls(ontology, data["rows"])


def query_entities(db: EntityDatabase, constraints: dict) -> list:
    """Rows matching every constraint; "dontcare" matches anything.

    Value comparison is case-insensitive and whitespace-trimmed.  Raises
    UnknownSlot for constraint slots outside the ontology's informables.
    """
    for slot in constraints:
        if not db.ontology.is_informable(slot):
            raise UnknownSlot(slot, db.ontology.domain_name)
    results = []
    for row in db.rows:
        for slot, value in constraints.items():
            if normalize_value(value) == DONTCARE:
                continue
            if normalize_value(row.get(slot, "")) != normalize_value(value):
                break
        else:
            results.append(dict(row))
    return results


def lookup_entity(db: EntityDatabase, primary_key_value, requested) -> dict:
    """Requested slot values for the single entity with the given key."""
    for slot in requested:
        if not db.ontology.is_requestable(slot):
            raise UnknownSlot(slot, db.ontology.domain_name)
    pk = db.ontology.primary_key
    wanted = normalize_value(primary_key_value)
    for row in db.rows:
        if normalize_value(row[pk]) == wanted:
            return {slot: row[slot] for slot in requested}
    raise NoSuchEntity(primary_key_value)
