"""The system action space: abstract actions and their grounding.

The learned policy picks from a fixed list of abstract actions (request a
slot, confirm a slot, offer an entity, ...). Grounding an abstract action
against the current belief state yields the concrete SysAct the rest of the
pipeline consumes. The enumeration order is part of the trained model's
contract, so keep it stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..acts import SysAct, SysActType
from ..domains import DONTCARE, Domain, query_entities
from ..tracking import BeliefState

DISCARDED_SLOT = "discarded"


@dataclass(frozen=True)
class AbstractAction:
    act_type: SysActType
    slot: Optional[str] = None

    def label(self) -> str:
        if self.slot:
            return f"{self.act_type.value}#{self.slot}"
        return self.act_type.value


_PARAMETERLESS = (
    SysActType.WELCOME,
    SysActType.REQUEST_MORE,
    SysActType.BAD,
    SysActType.BYE,
    SysActType.INFORM_BY_NAME,
)


def enumerate_actions(ontology, kind: str = "entity") -> list:
    actions = [AbstractAction(t) for t in _PARAMETERLESS]
    if kind == "entity":
        actions.append(AbstractAction(SysActType.INFORM_BY_ALTERNATIVES))
    for slot in ontology.informable:
        actions.append(AbstractAction(SysActType.REQUEST, slot))
        actions.append(AbstractAction(SysActType.CONFIRM, slot))
        actions.append(AbstractAction(SysActType.SELECT, slot))
    return actions


def expected_signatures(domain: Domain) -> frozenset:
    """Every act signature the action space can produce for this domain.

    The Neutral template set must cover all of them.
    """
    ontology = domain.ontology
    signatures = {
        (SysActType.WELCOME, ()),
        (SysActType.REQUEST_MORE, ()),
        (SysActType.BAD, ()),
        (SysActType.BYE, ()),
    }
    for slot in ontology.informable:
        signatures.add((SysActType.REQUEST, (slot,)))
        signatures.add((SysActType.CONFIRM, (slot,)))
        signatures.add((SysActType.SELECT, (slot,)))
    if domain.kind == "entity":
        row_slots = tuple(sorted(ontology.requestable))
        signatures.add((SysActType.INFORM_BY_NAME, row_slots))
        signatures.add(
            (SysActType.INFORM_BY_ALTERNATIVES,
             tuple(sorted(ontology.requestable + [DISCARDED_SLOT])))
        )
    else:
        record = tuple(sorted((*domain.mandatory_params, *domain.fixture.result_slots)))
        signatures.add((SysActType.INFORM_BY_NAME, record))
    return frozenset(signatures)


def matching_rows(bs: BeliefState, db) -> list:
    """Database rows consistent with the constraints, minus rejected offers."""
    rows = query_entities(db, bs.constraints())
    if bs.excluded_entities:
        key = db.ontology.primary_key
        dropped = {e.lower() for e in bs.excluded_entities}
        rows = [r for r in rows if str(r[key]).lower() not in dropped]
    return rows


def _row_act(row, ontology, act_type, extra=None) -> SysAct:
    slot_values = {slot: row[slot] for slot in ontology.requestable}
    if extra:
        slot_values.update(extra)
    return SysAct(act_type, slot_values)


def inform_by_name(bs: BeliefState, db) -> SysAct:
    """Offer the first matching entity; fall back to relaxation when none match."""
    rows = matching_rows(bs, db)
    if not rows:
        return inform_by_alternatives(bs, db)
    return _row_act(rows[0], db.ontology, SysActType.INFORM_BY_NAME)


def inform_by_alternatives(bs: BeliefState, db) -> SysAct:
    """Drop constraints, newest first, until something matches.

    An exhausted database (possible only when every row was explicitly
    rejected) clears the rejections rather than dead-ending.
    """
    constraints = bs.constraints()
    order = [slot for slot, _pair in bs.informs]
    discarded = []
    while True:
        probe = BeliefState(
            informs=tuple((s, (constraints[s], 1.0)) for s in order if s in constraints),
            excluded_entities=bs.excluded_entities,
        )
        rows = matching_rows(probe, db)
        if rows:
            extra = {DISCARDED_SLOT: ", ".join(discarded) if discarded else "none"}
            return _row_act(rows[0], db.ontology, SysActType.INFORM_BY_ALTERNATIVES, extra)
        if order:
            slot = order.pop()  # newest constraint goes first
            del constraints[slot]
            discarded.append(slot)
        else:
            bs = BeliefState()  # nothing left to drop: forget rejections too
            discarded = []
            order = []
            constraints = {}
            if not query_entities(db, {}):
                raise ValueError("entity database is empty")


def execute_action(action: AbstractAction, bs: BeliefState, domain: Domain) -> SysAct:
    """Ground an abstract action into a concrete system act."""
    t = action.act_type
    ontology = domain.ontology
    if t in (SysActType.WELCOME, SysActType.REQUEST_MORE, SysActType.BAD, SysActType.BYE):
        return SysAct(t)
    if t is SysActType.REQUEST:
        return SysAct(t, {action.slot: ""})
    if t is SysActType.CONFIRM:
        value, _score = bs.informs_dict.get(
            action.slot, (ontology.informable[action.slot][0], 1.0)
        )
        if value == DONTCARE:
            value = ontology.informable[action.slot][0]
        return SysAct(t, {action.slot: value})
    if t is SysActType.SELECT:
        options = " or ".join(ontology.informable[action.slot])
        return SysAct(t, {action.slot: options})
    if t is SysActType.INFORM_BY_NAME:
        if domain.kind == "entity":
            return inform_by_name(bs, domain.database)
        return api_inform(bs, domain)
    if t is SysActType.INFORM_BY_ALTERNATIVES:
        return inform_by_alternatives(bs, domain.database)
    raise ValueError(f"cannot execute action {action!r}")


def api_inform(bs: BeliefState, domain: Domain) -> SysAct:
    # local import: handcrafted.py needs this module for the entity helpers
    from .handcrafted import api_policy

    return api_policy(
        bs, domain.fixture, domain.mandatory_params, defaults=domain.param_defaults
    )
