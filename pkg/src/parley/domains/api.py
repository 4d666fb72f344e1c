"""Deterministic API backends loaded from fixture files.

A fixture replaces a live HTTP endpoint: a total lookup table from
parameter records to result records. Entry files store flat records;
which slots are parameters and which are results comes from the domain
manifest, so the same loader serves any API-backed domain.
"""

from __future__ import annotations

import json

from .ontology import normalize_value


class MissingParameter(ValueError):
    def __init__(self, missing):
        super().__init__(f"missing parameters: {sorted(missing)}")
        self.missing = sorted(missing)


class NoFixtureEntry(LookupError):
    def __init__(self, params):
        super().__init__(f"no fixture entry for {params!r}")
        self.params = dict(params)


def _key(param_slots, record):
    return tuple(normalize_value(str(record[slot])) for slot in param_slots)


class ApiFixture:
    def __init__(self, param_slots, result_slots, entries):
        self.param_slots = tuple(param_slots)
        self.result_slots = tuple(result_slots)
        self._table = {}
        for entry in entries:
            for slot in (*self.param_slots, *self.result_slots):
                if slot not in entry:
                    raise ValueError(f"fixture entry missing slot {slot!r}: {entry!r}")
            key = _key(self.param_slots, entry)
            if key in self._table:
                raise ValueError(f"duplicate fixture entry for parameters {key}")
            self._table[key] = {slot: entry[slot] for slot in self.result_slots}

    def __len__(self):
        return len(self._table)

    @classmethod
    def from_file(cls, path, param_slots, result_slots) -> "ApiFixture":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return cls(param_slots, result_slots, data["entries"])


def api_query(fixture: ApiFixture, params) -> dict:
    """Look up the result record for a complete parameter record."""
    missing = [slot for slot in fixture.param_slots if slot not in params]
    if missing:
        raise MissingParameter(missing)
    key = _key(fixture.param_slots, params)
    try:
        return dict(fixture._table[key])
    except KeyError:
        raise NoFixtureEntry(params) from None
