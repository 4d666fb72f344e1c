from .actions import (
    DISCARDED_SLOT,
    AbstractAction,
    enumerate_actions,
    execute_action,
    expected_signatures,
    inform_by_alternatives,
    inform_by_name,
    matching_rows,
)
from .affective import affective_policy
from .handcrafted import api_policy, handcrafted_policy
from .vectorize import belief_dim, slot_fill_states, vectorize_belief

__all__ = [
    "DISCARDED_SLOT",
    "AbstractAction",
    "enumerate_actions",
    "execute_action",
    "expected_signatures",
    "inform_by_alternatives",
    "inform_by_name",
    "matching_rows",
    "affective_policy",
    "api_policy",
    "handcrafted_policy",
    "belief_dim",
    "slot_fill_states",
    "vectorize_belief",
]
