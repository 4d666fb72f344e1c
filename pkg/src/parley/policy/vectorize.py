"""Fixed-length encoding of a belief state for the learned policy."""

from __future__ import annotations

import numpy as np

from ..acts import UserActType
from ..domains import DONTCARE
from ..tracking import BeliefState

NUM_MATCH_BUCKETS = 4  # 0, 1, 2-4, 5+
_ACT_TYPES = tuple(UserActType)


def belief_dim(ontology) -> int:
    return 3 * len(ontology.informable) + NUM_MATCH_BUCKETS + len(_ACT_TYPES)


def _bucket(num_matches: int) -> int:
    if num_matches == 0:
        return 0
    if num_matches == 1:
        return 1
    if num_matches <= 4:
        return 2
    return 3


def vectorize_belief(bs: BeliefState, ontology) -> np.ndarray:
    """Per slot a filled/dontcare/empty one-hot, then the match-count bucket,
    then a multi-hot of the turn's user act types."""
    informs = bs.informs_dict
    parts = np.zeros(belief_dim(ontology))
    offset = 0
    for slot in ontology.informable:
        value, _score = informs.get(slot, (None, None))
        if value is None:
            parts[offset + 2] = 1.0
        elif value == DONTCARE:
            parts[offset + 1] = 1.0
        else:
            parts[offset] = 1.0
        offset += 3
    parts[offset + _bucket(bs.num_matches)] = 1.0
    offset += NUM_MATCH_BUCKETS
    for i, act_type in enumerate(_ACT_TYPES):
        if act_type in bs.last_act_types:
            parts[offset + i] = 1.0
    return parts


def slot_fill_states(vec: np.ndarray, ontology) -> dict:
    """Decode the per-slot one-hots back to labels (test support)."""
    out = {}
    offset = 0
    for slot in ontology.informable:
        triple = vec[offset:offset + 3]
        out[slot] = ("filled", "dontcare", "empty")[int(np.argmax(triple))]
        offset += 3
    return out
