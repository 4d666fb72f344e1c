"""Agenda-based user simulator.

The simulated user carries a sampled goal (constraints plus requests) and a
stack of pending acts. Each turn it first reacts to the system act, then pops
its own agenda: constraints get stated top-down, the Bye waits at the bottom
until every request is answered and every constraint has been said out loud.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..acts import SysAct, SysActType, UserAct, UserActType
from ..domains.database import EntityDatabase, query_entities
from ..domains.ontology import DONTCARE, Ontology, normalize_value


class UnsatisfiableOntology(RuntimeError):
    pass


@dataclass
class UserGoal:
    constraints: Dict[str, str]
    requests: Dict[str, Optional[str]]  # slot -> answer once fulfilled
    communicated: Dict[str, str] = field(default_factory=dict)

    @property
    def open_requests(self) -> List[str]:
        return [slot for slot, answer in self.requests.items() if answer is None]

    @property
    def requests_fulfilled(self) -> bool:
        return all(answer is not None for answer in self.requests.values())

    @property
    def constraints_communicated(self) -> bool:
        return all(
            normalize_value(self.communicated.get(slot, "")) == normalize_value(value)
            for slot, value in self.constraints.items()
        )

    @property
    def complete(self) -> bool:
        return self.requests_fulfilled and self.constraints_communicated

    def violations(self, slot_values: dict) -> List[str]:
        """Constrained slots that the offer gets wrong (dontcare never objects)."""
        violated = []
        for slot, wanted in self.constraints.items():
            if wanted == DONTCARE or slot not in slot_values:
                continue
            if normalize_value(slot_values[slot]) != normalize_value(wanted):
                violated.append(slot)
        return violated


def sample_goal(ontology: Ontology, db: Optional[EntityDatabase], rng,
                max_tries: int = 100) -> UserGoal:
    """Rejection-sample constraints until at least one entity matches."""
    slots = [s for s in ontology.informable_slots() if s != ontology.primary_key]
    requestable = list(ontology.requestable)
    if not slots or not requestable:
        raise UnsatisfiableOntology("ontology has no informable or requestable slots")

    for _ in range(max_tries):
        n_constraints = int(rng.integers(1, len(slots) + 1))
        chosen = [str(s) for s in rng.choice(slots, size=n_constraints, replace=False)]
        constraints = {}
        for slot in chosen:
            values = ontology.informable[slot]
            pick = int(rng.integers(0, len(values) + 1))  # one extra for dontcare
            constraints[slot] = DONTCARE if pick == len(values) else values[pick]
        if db is not None and not query_entities(db, constraints):
            continue
        n_requests = int(rng.integers(1, min(3, len(requestable)) + 1))
        requested = [str(s) for s in rng.choice(requestable, size=n_requests, replace=False)]
        return UserGoal(constraints=constraints,
                        requests={slot: None for slot in requested})
    raise UnsatisfiableOntology(f"no satisfiable constraint set in {max_tries} tries")


class Agenda:
    """Stack of pending user acts; Bye sits at the bottom."""

    def __init__(self, goal: UserGoal):
        self._stack: List[UserAct] = [UserAct(UserActType.BYE)]
        for slot in goal.requests:
            self._stack.append(UserAct(UserActType.REQUEST, slot=slot))
        for slot, value in goal.constraints.items():
            self._stack.append(UserAct(UserActType.INFORM, slot=slot, value=value))
        self.pushes = len(self._stack)
        self.pops = 0

    def __len__(self):
        return len(self._stack)

    def push(self, act: UserAct):
        self._stack.append(act)
        self.pushes += 1

    def pop(self) -> UserAct:
        self.pops += 1
        return self._stack.pop()

    def peek(self) -> Optional[UserAct]:
        return self._stack[-1] if self._stack else None

    def remove(self, act_type: UserActType, slot: str):
        self._stack = [
            a for a in self._stack
            if not (a.act_type == act_type and a.slot == slot)
        ]

    def has(self, act_type: UserActType, slot: str) -> bool:
        return any(a.act_type == act_type and a.slot == slot for a in self._stack)


class SimulatedUser:
    """Bundles goal + agenda and tracks completion across a dialog."""

    def __init__(self, ontology: Ontology, db: Optional[EntityDatabase], rng,
                 goal: Optional[UserGoal] = None):
        self.ontology = ontology
        self.goal = goal if goal is not None else sample_goal(ontology, db, rng)
        self.agenda = Agenda(self.goal)
        self.said_bye = False

    def respond(self, sys_act: SysAct) -> List[UserAct]:
        acts = simulate_turn(sys_act, self.goal, self.agenda)
        if any(a.act_type == UserActType.BYE for a in acts):
            self.said_bye = True
        return acts


def _inform(goal: UserGoal, agenda: Agenda, slot: str, value: str) -> UserAct:
    goal.communicated[slot] = value
    agenda.remove(UserActType.INFORM, slot)
    return UserAct(UserActType.INFORM, slot=slot, value=value)


def _absorb_offer(goal: UserGoal, agenda: Agenda, slot_values: dict) -> List[UserAct]:
    """Handle an entity offer: object to the first violated constraint, or
    mark the requests it answers as fulfilled."""
    violated = goal.violations(slot_values)
    if violated:
        slot = violated[0]
        return [
            UserAct(UserActType.DENY),
            _inform(goal, agenda, slot, goal.constraints[slot]),
        ]
    for slot in goal.open_requests:
        if slot in slot_values:
            goal.requests[slot] = str(slot_values[slot])
            agenda.remove(UserActType.REQUEST, slot)
    for slot in goal.open_requests:
        if not agenda.has(UserActType.REQUEST, slot):
            agenda.push(UserAct(UserActType.REQUEST, slot=slot))
    return []


def simulate_turn(sys_act: SysAct, goal: UserGoal, agenda: Agenda) -> List[UserAct]:
    """React to the system act, then pop the agenda for the user's next move."""
    response: List[UserAct] = []
    kind = sys_act.act_type

    if kind in (SysActType.REQUEST, SysActType.SELECT):
        # the requested slot is the act's (single) key
        slot = next(iter(sys_act.slot_values), None)
        if slot is not None:
            value = goal.constraints.get(slot, DONTCARE)
            response.append(_inform(goal, agenda, slot, value))
    elif kind == SysActType.CONFIRM:
        slot = next(iter(sys_act.slot_values), None)
        if slot is not None:
            proposed = sys_act.slot_values[slot]
            wanted = goal.constraints.get(slot, DONTCARE)
            if wanted == DONTCARE or normalize_value(wanted) == normalize_value(proposed):
                response.append(UserAct(UserActType.AFFIRM))
                if wanted != DONTCARE:
                    goal.communicated[slot] = wanted
            else:
                response.append(UserAct(UserActType.DENY))
                response.append(_inform(goal, agenda, slot, wanted))
    elif kind in (SysActType.INFORM_BY_NAME, SysActType.INFORM_BY_ALTERNATIVES):
        offered = {k: v for k, v in sys_act.slot_values.items() if k != "discarded"}
        response.extend(_absorb_offer(goal, agenda, offered))
    elif kind == SysActType.BYE:
        return []

    if response:
        return response

    # Fulfillment phase: surface the next pending act.
    while len(agenda):
        act = agenda.peek()
        if act.act_type == UserActType.INFORM:
            known = goal.communicated.get(act.slot)
            if known is not None and normalize_value(known) == normalize_value(act.value):
                agenda.pop()  # already said
                continue
            agenda.pop()
            goal.communicated[act.slot] = act.value
            return [act]
        if act.act_type == UserActType.REQUEST:
            if act.slot not in goal.open_requests:
                agenda.pop()  # answered in the meantime
                continue
            return [act]  # stays pending until answered
        if act.act_type == UserActType.BYE:
            if goal.complete:
                agenda.pop()
                return [act]
            # goal still open: repeat the oldest unanswered request
            open_requests = goal.open_requests
            if open_requests:
                return [UserAct(UserActType.REQUEST, slot=open_requests[0])]
            return []
        agenda.pop()
        return [act]
    return []


def compute_reward(turns_so_far: int, success: bool, terminal: bool, *,
                   turn_penalty: float = -1.0, success_reward: float = 20.0) -> float:
    reward = turn_penalty
    if terminal and success:
        reward += success_reward
    return reward
