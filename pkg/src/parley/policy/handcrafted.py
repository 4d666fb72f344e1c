"""Rule policies: entity search over a database, parameter filling for APIs."""

from __future__ import annotations

from ..acts import SysAct, SysActType, UserActType
from ..domains import DONTCARE, MissingParameter, NoFixtureEntry, api_query
from ..tracking import BeliefState
from .actions import inform_by_alternatives, inform_by_name


def handcrafted_policy(bs: BeliefState, db, ontology=None) -> SysAct:
    """Entity-domain action selection.

    Rule order: close on user Bye; admit confusion on an all-Bad turn;
    greet when the user has said nothing yet; offer the entity once the
    constraints pin down exactly one (or the user asked for details);
    relax constraints when nothing matches; otherwise request the next
    slot that still splits the candidates.
    """
    if ontology is None:
        ontology = db.ontology
    if UserActType.BYE in bs.last_act_types:
        return SysAct(SysActType.BYE)
    if bs.last_act_types and bs.last_act_types <= {UserActType.BAD}:
        return SysAct(SysActType.BAD)
    if not bs.last_act_types:
        return SysAct(SysActType.WELCOME)
    if bs.requests and bs.num_matches == 1:
        return inform_by_name(bs, db)
    if bs.num_matches == 0:
        return inform_by_alternatives(bs, db)
    if bs.num_matches == 1:
        return inform_by_name(bs, db)
    if bs.discriminable_slots:
        return SysAct(SysActType.REQUEST, {bs.discriminable_slots[0]: ""})
    # several matches but nothing left to ask: offer the first one
    return inform_by_name(bs, db)


def api_policy(bs: BeliefState, fixture, mandatory, defaults=None) -> SysAct:
    """API-domain action selection: fill parameters, then look up and inform."""
    defaults = defaults or {}
    params = {}
    for slot in mandatory:
        value, _score = bs.informs_dict.get(slot, (None, None))
        if value is None or value == DONTCARE:
            value = defaults.get(slot)
        if value is not None:
            params[slot] = value
    missing = [slot for slot in mandatory if slot not in params]
    if missing:
        return SysAct(SysActType.REQUEST, {missing[0]: ""})
    try:
        result = api_query(fixture, params)
    except (MissingParameter, NoFixtureEntry):
        return SysAct(SysActType.BAD)
    return SysAct(SysActType.INFORM_BY_NAME, {**params, **result})
