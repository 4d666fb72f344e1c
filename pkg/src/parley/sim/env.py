"""Single-domain dialog environment for policy training.

Runs the simulator against the belief tracker directly (no bus) so the RL
loop spends its time on learning, not dispatch. The bus-level evaluation
harness exercises the same simulator through the full topology.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..acts import SysAct, SysActType
from ..domains import Domain
from ..policy.actions import enumerate_actions, execute_action
from ..policy.vectorize import belief_dim, vectorize_belief
from ..tracking import BeliefState, bst_update, resolve_context_acts
from .simulator import SimulatedUser, compute_reward


class DialogEnv:
    def __init__(self, domain: Domain, max_turns: int = 25,
                 turn_penalty: float = -1.0, success_reward: float = 20.0):
        self.domain = domain
        self.actions = enumerate_actions(domain.ontology, domain.kind)
        self.n_actions = len(self.actions)
        self.state_dim = belief_dim(domain.ontology)
        self.max_turns = max_turns
        self.turn_penalty = turn_penalty
        self.success_reward = success_reward
        self.sim: Optional[SimulatedUser] = None
        self.bs = BeliefState()
        self.turns = 0

    def _state(self) -> np.ndarray:
        return vectorize_belief(self.bs, self.domain.ontology)

    def _user_turn(self, sys_act: SysAct):
        acts = self.sim.respond(sys_act)
        resolved = resolve_context_acts(acts, sys_act, self.domain.ontology)
        self.bs = bst_update(self.bs, resolved, self.domain.database, self.domain.ontology)

    def reset(self, rng) -> np.ndarray:
        self.sim = SimulatedUser(self.domain.ontology, self.domain.database, rng)
        self.bs = BeliefState.initial(self.domain.database)
        self.turns = 0
        self._user_turn(SysAct(SysActType.WELCOME))
        return self._state()

    def step(self, action_index: int):
        action = self.actions[action_index]
        sys_act = execute_action(action, self.bs, self.domain)
        self.turns += 1

        ended = action.act_type is SysActType.BYE
        out_of_time = self.turns >= self.max_turns
        if ended or out_of_time:
            success = self.sim.goal.complete
            reward = compute_reward(self.turns, success, True,
                                    turn_penalty=self.turn_penalty,
                                    success_reward=self.success_reward)
            return self._state(), reward, True

        self._user_turn(sys_act)
        reward = compute_reward(self.turns, False, False,
                                turn_penalty=self.turn_penalty,
                                success_reward=self.success_reward)
        return self._state(), reward, False
