"""Turn-by-turn tracking of task constraints and of the user's social state."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .acts import SysAct, SysActType, UserAct, UserActType
from .domains import DONTCARE, EntityDatabase, UnknownSlot, query_entities

ENGAGEMENT_LABELS = ("looking", "not_looking")
VALENCE_LABELS = ("negative", "neutral", "positive")
AROUSAL_LABELS = ("low", "medium", "high")
EMOTION_LABELS = ("angry", "happy", "neutral", "sad")


class InvalidLabel(ValueError):
    def __init__(self, field, value, allowed):
        super().__init__(f"{field} must be one of {sorted(allowed)}, got {value!r}")
        self.field = field
        self.value = value


def _check_label(field, value, allowed):
    if value not in allowed:
        raise InvalidLabel(field, value, allowed)
    return value


@dataclass(frozen=True)
class BeliefState:
    """Accumulated record of what the user wants, one snapshot per turn."""

    turn: int = 0
    informs: tuple = ()  # ((slot, (value, score)), ...), oldest constraint first
    requests: frozenset = frozenset()
    last_act_types: frozenset = frozenset()
    num_matches: int = 0
    discriminable_slots: tuple = ()
    excluded_entities: tuple = ()
    history: tuple = ()

    @property
    def informs_dict(self) -> dict:
        return {slot: pair for slot, pair in self.informs}

    def constraints(self) -> dict:
        return {slot: value for slot, (value, _score) in self.informs}

    def snapshot(self) -> dict:
        return {
            "turn": self.turn,
            "informs": {slot: [value, score] for slot, (value, score) in self.informs},
            "requests": sorted(self.requests),
            "last_act_types": sorted(t.value for t in self.last_act_types),
            "num_matches": self.num_matches,
            "discriminable_slots": list(self.discriminable_slots),
            "excluded_entities": list(self.excluded_entities),
        }

    def to_payload(self) -> dict:
        body = self.snapshot()
        body["history"] = list(self.history)
        return body

    @classmethod
    def from_payload(cls, data: dict) -> "BeliefState":
        return cls(
            turn=data["turn"],
            informs=tuple(
                (slot, (value_score[0], value_score[1]))
                for slot, value_score in data["informs"].items()
            ),
            requests=frozenset(data["requests"]),
            last_act_types=frozenset(UserActType(v) for v in data["last_act_types"]),
            num_matches=data["num_matches"],
            discriminable_slots=tuple(data["discriminable_slots"]),
            excluded_entities=tuple(data["excluded_entities"]),
            history=tuple(data.get("history", ())),
        )

    @classmethod
    def initial(cls, db: Optional[EntityDatabase] = None) -> "BeliefState":
        num_matches = len(db.rows) if db is not None else 0
        discriminable = _discriminable(db, {}, ()) if db is not None else ()
        state = cls(num_matches=num_matches, discriminable_slots=discriminable)
        return replace(state, history=(state.snapshot(),))


def _matching_rows(db, constraints, excluded):
    rows = query_entities(db, constraints)
    if excluded:
        key = db.ontology.primary_key
        dropped = {e.lower() for e in excluded}
        rows = [r for r in rows if str(r[key]).lower() not in dropped]
    return rows


def _discriminable(db, constraints, excluded) -> tuple:
    """Unconstrained informable slots that still split the matching rows."""
    rows = _matching_rows(db, constraints, excluded)
    out = []
    for slot in db.ontology.informable:
        if slot in constraints:
            continue
        values = {str(r[slot]).lower() for r in rows}
        if len(values) >= 2:
            out.append(slot)
    return tuple(out)


def bst_update(prev: BeliefState, acts, db: Optional[EntityDatabase],
               ontology=None) -> BeliefState:
    """Fold one turn's user acts into a new belief state.

    Informs accumulate across turns (later values win), requests hold for
    one turn only. Needs the database to recompute the match count; API
    domains pass None and keep num_matches at 0.
    """
    if ontology is None and db is not None:
        ontology = db.ontology

    informs = dict(prev.informs)
    requests = set()
    excluded = list(prev.excluded_entities)
    act_types = set()

    for act in acts:
        act_types.add(act.act_type)
        if act.act_type is UserActType.INFORM:
            if ontology is not None:
                if not ontology.is_informable(act.slot):
                    raise UnknownSlot(act.slot, ontology.domain_name)
                if act.value != DONTCARE and not ontology.legal_value(act.slot, act.value):
                    raise ValueError(
                        f"value {act.value!r} not legal for slot {act.slot!r}"
                    )
            # re-informing moves the slot to the most-recent position, which
            # is what constraint relaxation keys on
            informs.pop(act.slot, None)
            informs[act.slot] = (act.value, act.score)
        elif act.act_type is UserActType.REQUEST:
            if ontology is not None and not ontology.is_requestable(act.slot):
                raise UnknownSlot(act.slot, ontology.domain_name)
            requests.add(act.slot)
        elif act.act_type is UserActType.REQUEST_ALTERNATIVES:
            if act.value and act.value not in excluded:
                excluded.append(act.value)

    constraints = {slot: value for slot, (value, _s) in informs.items()}
    if db is not None:
        num_matches = len(_matching_rows(db, constraints, excluded))
        discriminable = _discriminable(db, constraints, excluded)
    else:
        num_matches = 0
        discriminable = ()

    state = BeliefState(
        turn=prev.turn + 1,
        informs=tuple(informs.items()),
        requests=frozenset(requests),
        last_act_types=frozenset(act_types),
        num_matches=num_matches,
        discriminable_slots=discriminable,
        excluded_entities=tuple(excluded),
        history=prev.history,
    )
    return replace(state, history=prev.history + (state.snapshot(),))


_BOOL_VALUES = {"true", "false"}


def _is_boolean_slot(ontology, slot) -> bool:
    if ontology is None or not ontology.is_informable(slot):
        return False
    return {v.lower() for v in ontology.informable[slot]} <= _BOOL_VALUES


def resolve_context_acts(acts, last_sys_act: Optional[SysAct], ontology,
                         last_offered: Optional[str] = None) -> list:
    """Ground context-dependent acts against the previous system act.

    "Yes." after Request(vegan) means Inform(vegan, true); after a Confirm it
    means Inform of the confirmed value. RequestAlternatives gets the last
    offered entity attached so the tracker can exclude it.
    """
    resolved = []
    for act in acts:
        if act.act_type in (UserActType.AFFIRM, UserActType.DENY) and last_sys_act is not None:
            if last_sys_act.act_type is SysActType.CONFIRM and last_sys_act.slot_values:
                slot, value = next(iter(last_sys_act.slot_values.items()))
                if act.act_type is UserActType.AFFIRM:
                    resolved.append(UserAct(UserActType.INFORM, slot=slot, value=value))
                    continue
                resolved.append(act)
                continue
            if last_sys_act.act_type is SysActType.REQUEST and last_sys_act.slot_values:
                slot = next(iter(last_sys_act.slot_values))
                if _is_boolean_slot(ontology, slot):
                    value = "true" if act.act_type is UserActType.AFFIRM else "false"
                    resolved.append(UserAct(UserActType.INFORM, slot=slot, value=value))
                    continue
        if act.act_type is UserActType.REQUEST_ALTERNATIVES and not act.value and last_offered:
            resolved.append(UserAct(UserActType.REQUEST_ALTERNATIVES, value=last_offered))
            continue
        resolved.append(act)
    return resolved


@dataclass(frozen=True)
class UserState:
    """Social-signal record: engagement, valence, arousal, emotion per turn."""

    engagement: str = "looking"
    valence: str = "neutral"
    arousal: str = "medium"
    emotion: str = "neutral"
    history: tuple = ()

    @property
    def turn(self) -> int:
        return len(self.history) - 1

    def snapshot(self) -> dict:
        return {
            "engagement": self.engagement,
            "valence": self.valence,
            "arousal": self.arousal,
            "emotion": self.emotion,
        }

    def to_payload(self) -> dict:
        body = self.snapshot()
        body["history"] = list(self.history)
        return body

    @classmethod
    def initial(cls) -> "UserState":
        state = cls()
        return replace(state, history=(state.snapshot(),))


def ust_update(prev: UserState, emotion_prediction, engagement: str) -> UserState:
    """Replace the per-turn labels and append a snapshot."""
    state = UserState(
        engagement=_check_label("engagement", engagement, ENGAGEMENT_LABELS),
        valence=_check_label("valence", emotion_prediction.valence, VALENCE_LABELS),
        arousal=_check_label("arousal", emotion_prediction.arousal, AROUSAL_LABELS),
        emotion=_check_label("emotion", emotion_prediction.category, EMOTION_LABELS),
        history=prev.history,
    )
    return replace(state, history=prev.history + (state.snapshot(),))
