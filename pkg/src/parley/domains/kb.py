"""Local knowledge-triple store for factual question answering."""

from __future__ import annotations

import json

from .ontology import normalize_value


class NoTriple(LookupError):
    def __init__(self, subject, relation):
        super().__init__(f"no triple for ({subject!r}, {relation!r})")
        self.subject = subject
        self.relation = relation


class TripleStore:
    def __init__(self, triples):
        self._by_key = {}
        for subject, relation, obj in triples:
            key = (normalize_value(subject), normalize_value(relation))
            if key in self._by_key:
                raise ValueError(f"duplicate (subject, relation) pair: {key}")
            self._by_key[key] = str(obj)

    def __len__(self):
        return len(self._by_key)

    @classmethod
    def from_file(cls, path) -> "TripleStore":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return cls(data["triples"])


def kb_answer(store: TripleStore, subject: str, relation: str) -> str:
    """Object of the unique triple for (subject, relation).

    Extracting subject and relation from free text is the caller's problem;
    this is a plain lookup.
    """
    key = (normalize_value(subject), normalize_value(relation))
    try:
        return store._by_key[key]
    except KeyError:
        raise NoTriple(subject, relation) from None
