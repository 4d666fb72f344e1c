"""Domain bundles: ontology plus backend plus the file assets a dialog needs.

A domain is either entity-backed (rows in a local database, e.g. canteen
meals) or api-backed (a deterministic fixture standing in for a remote
endpoint, e.g. weather). Bundles ship inside the package under
``parley/assets/<name>/`` with a small ``domain.json`` manifest tying the
pieces together.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .ontology import DONTCARE, Ontology, UnknownSlot, normalize_value
from .database import EntityDatabase, NoSuchEntity, lookup_entity, query_entities
from .api import ApiFixture, MissingParameter, NoFixtureEntry, api_query
from .kb import NoTriple, TripleStore, kb_answer

__all__ = [
    "DONTCARE",
    "Ontology",
    "UnknownSlot",
    "normalize_value",
    "EntityDatabase",
    "NoSuchEntity",
    "lookup_entity",
    "query_entities",
    "ApiFixture",
    "MissingParameter",
    "NoFixtureEntry",
    "api_query",
    "TripleStore",
    "NoTriple",
    "kb_answer",
    "Domain",
    "UnknownDomain",
    "load_domain",
    "builtin_domain_names",
    "assets_root",
    "general_asset",
]


class UnknownDomain(KeyError):
    def __init__(self, name):
        super().__init__(f"unknown domain {name!r}")
        self.name = name


@dataclass(frozen=True)
class Domain:
    """Everything one topic of conversation needs, loaded and validated."""

    name: str
    kind: str  # "entity" or "api"
    ontology: Ontology
    database: Optional[EntityDatabase] = None
    fixture: Optional[ApiFixture] = None
    mandatory_params: tuple = ()
    param_defaults: dict = field(default_factory=dict)
    nlu_rules_path: str = ""
    templates_path: str = ""

    @property
    def display_name(self) -> str:
        return self.ontology.display_name or self.name


def assets_root():
    return resources.files("parley") / "assets"


def general_asset(filename: str):
    """Path-like handle to a shared (non-domain) asset file."""
    return assets_root() / "general" / filename


def builtin_domain_names() -> list:
    names = []
    for entry in assets_root().iterdir():
        if entry.is_dir() and (entry / "domain.json").is_file():
            names.append(entry.name)
    return sorted(names)


def load_domain(name: str) -> Domain:
    base = assets_root() / name
    manifest_path = base / "domain.json"
    if not manifest_path.is_file():
        raise UnknownDomain(name)
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))

    kind = manifest["kind"]
    if kind not in ("entity", "api"):
        raise ValueError(f"domain {name!r} has unsupported kind {kind!r}")
    ontology = Ontology.from_dict(
        json.loads((base / manifest["ontology"]).read_text(encoding="utf-8"))
    )

    database = None
    fixture = None
    mandatory = ()
    defaults = {}
    if kind == "entity":
        data = json.loads((base / manifest["database"]).read_text(encoding="utf-8"))
        database = EntityDatabase(ontology, data["rows"])
    else:
        mandatory = tuple(manifest["mandatory"])
        defaults = dict(manifest.get("defaults", {}))
        data = json.loads((base / manifest["fixture"]).read_text(encoding="utf-8"))
        result_slots = [s for s in ontology.requestable if s not in mandatory]
        fixture = ApiFixture(mandatory, result_slots, data["entries"])

    return Domain(
        name=manifest.get("name", name),
        kind=kind,
        ontology=ontology,
        database=database,
        fixture=fixture,
        mandatory_params=mandatory,
        param_defaults=defaults,
        nlu_rules_path=str(base / manifest["nlu_rules"]),
        templates_path=str(base / manifest["templates"]),
    )
