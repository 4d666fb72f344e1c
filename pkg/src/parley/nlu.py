"""Rule-based understanding: utterances to dialog acts, keyword domain tracking.

Three layers of rules produce acts:
  - general patterns (greeting, bye, thanks, affirm, deny, alternatives)
  - domain patterns from the domain's rules file (mostly requests)
  - value matchers generated from the ontology: every legal value and every
    synonym surface becomes an Inform pattern, which is what makes the
    coverage property ("i want <value>" parses for every value) hold by
    construction.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Optional

from .acts import UserAct, UserActType
from .domains import Ontology

_WORDISH = re.compile(r"\w")


@dataclass(frozen=True)
class NluRule:
    pattern: "re.Pattern"
    act_type: UserActType
    slot: Optional[str] = None
    value_group: Optional[str] = None


class NluRuleSet:
    def __init__(self, rules, synonyms=None):
        self.rules = tuple(rules)
        self.synonyms = {slot: dict(table) for slot, table in (synonyms or {}).items()}

    @classmethod
    def from_dict(cls, data: dict) -> "NluRuleSet":
        rules = []
        for entry in data.get("rules", []):
            rules.append(
                NluRule(
                    pattern=re.compile(entry["pattern"], re.IGNORECASE),
                    act_type=UserActType(entry["act_type"]),
                    slot=entry.get("slot"),
                    value_group=entry.get("value_group"),
                )
            )
        return cls(rules, data.get("synonyms"))

    @classmethod
    def from_file(cls, path) -> "NluRuleSet":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def merged_with(self, other: "NluRuleSet") -> "NluRuleSet":
        synonyms = {slot: dict(table) for slot, table in self.synonyms.items()}
        for slot, table in other.synonyms.items():
            synonyms.setdefault(slot, {}).update(table)
        return NluRuleSet(self.rules + other.rules, synonyms)


def _surface_pattern(surface: str) -> "re.Pattern":
    # \b only works against word characters, so guard the escape explicitly
    # for surfaces like "non-vegan".
    escaped = re.escape(surface)
    head = r"\b" if _WORDISH.match(surface[0]) else ""
    tail = r"\b" if _WORDISH.match(surface[-1]) else ""
    return re.compile(head + escaped + tail, re.IGNORECASE)


def _value_matchers(ontology: Ontology, extra_synonyms: dict):
    """(slot, canonical value, pattern) triples for every value surface."""
    matchers = []
    for slot in ontology.informable:
        for value in ontology.informable[slot]:
            matchers.append((slot, value, _surface_pattern(value)))
        for surface, canonical in ontology.synonyms.get(slot, {}).items():
            matchers.append((slot, canonical, _surface_pattern(surface)))
        for surface, canonical in extra_synonyms.get(slot, {}).items():
            matchers.append((slot, canonical, _surface_pattern(surface)))
    return matchers


def parse(utterance: str, ontology: Ontology, rules: NluRuleSet) -> list:
    """Dialog acts for one utterance; [Bad] when nothing matches."""
    text = (utterance or "").strip()
    if not text:
        return [UserAct(UserActType.BAD)]

    general: list = []
    requests: list = []
    request_spans: dict = {}
    for rule in rules.rules:
        match = rule.pattern.search(text)
        if match is None:
            continue
        if rule.act_type is UserActType.REQUEST:
            if rule.slot and not any(a.slot == rule.slot for a in requests):
                requests.append(UserAct(UserActType.REQUEST, slot=rule.slot))
                request_spans.setdefault(rule.slot, []).append(match.span())
        elif rule.act_type is UserActType.INFORM:
            surface = match.group(rule.value_group) if rule.value_group else match.group(0)
            canonical = ontology.canonical_value(rule.slot, surface)
            if canonical is not None:
                general.append(UserAct(UserActType.INFORM, slot=rule.slot, value=canonical))
        else:
            if not any(a.act_type is rule.act_type for a in general):
                general.append(UserAct(rule.act_type))

    # Value informs: gather candidate spans, keep the longest match per
    # overlapping region of a slot ("not vegan" beats "vegan"), then drop
    # matches that only occur inside a request about the same slot.
    candidates = []
    for slot, value, pattern in _value_matchers(ontology, rules.synonyms):
        for match in pattern.finditer(text):
            candidates.append((slot, value, match.span()))
    informs = []
    for slot, value, span in candidates:
        shadowed = False
        for other_slot, _, other_span in candidates:
            if other_slot != slot or other_span == span:
                continue
            overlaps = span[0] < other_span[1] and other_span[0] < span[1]
            longer = (other_span[1] - other_span[0], -other_span[0]) > (span[1] - span[0], -span[0])
            if overlaps and longer:
                shadowed = True
                break
        for req_span in request_spans.get(slot, []):
            if req_span[0] <= span[0] and span[1] <= req_span[1]:
                shadowed = True
                break
        if not shadowed:
            informs.append((span[0], UserAct(UserActType.INFORM, slot=slot, value=value)))

    acts = list(general)
    for a in requests:
        acts.append(a)
    seen = set()
    for _, act in sorted(informs, key=lambda pair: pair[0]):
        key = (act.slot, act.value)
        if key not in seen:
            seen.add(key)
            acts.append(act)

    if not acts:
        return [UserAct(UserActType.BAD)]
    return acts


def track_domain(utterance: str, current: Optional[str], domains) -> tuple:
    """(active domain name or None, SelectDomain act when the domain changes).

    The last mentioned keyword wins when several domains appear in one
    utterance; without any keyword the current domain is kept.
    """
    text = (utterance or "").lower()
    best_name = None
    best_pos = (-1, -1)
    for ontology in domains:
        for keyword in ontology.keywords:
            for match in _surface_pattern(keyword).finditer(text):
                pos = (match.end(), match.start())
                if pos > best_pos:
                    best_pos = pos
                    best_name = ontology.domain_name
    if best_name is None:
        return current, None
    if best_name == current:
        return current, None
    return best_name, UserAct(UserActType.SELECT_DOMAIN, value=best_name)


_FACTUAL_PATTERNS = (
    (re.compile(r"where was (?P<subject>.+?) born", re.IGNORECASE), "place of birth"),
    (re.compile(r"what is the (?P<relation>[\w ]+?) of (?P<subject>.+)", re.IGNORECASE), None),
)


def parse_factual_question(utterance: str) -> Optional[tuple]:
    """(subject, relation) for pattern-matched factual questions, else None."""
    text = (utterance or "").strip()
    for pattern, fixed_relation in _FACTUAL_PATTERNS:
        match = pattern.search(text)
        if match is None:
            continue
        subject = match.group("subject").strip().strip("?!.,")
        relation = fixed_relation or match.group("relation").strip()
        if subject:
            return subject, relation
    return None
