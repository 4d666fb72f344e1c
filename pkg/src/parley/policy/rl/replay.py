"""Prioritized experience replay with proportional sampling.

P(i) = p_i^alpha / sum_j p_j^alpha over the stored transitions, importance
weights w_i = (N * P(i))^(-beta) normalized by the largest weight any stored
entry would get, so corrections stay in (0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class BufferTooSmall(ValueError):
    def __init__(self, size, requested):
        super().__init__(f"buffer holds {size} entries, batch of {requested} requested")
        self.size = size
        self.requested = requested


@dataclass(frozen=True)
class Experience:
    state: "np.ndarray"
    action: int
    reward: float
    next_state: "np.ndarray"
    terminal: bool


class PrioritizedReplayBuffer:
    def __init__(self, capacity: int, alpha: float = 0.6, priority_epsilon: float = 1e-6):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = int(capacity)
        self.alpha = float(alpha)
        self.priority_epsilon = float(priority_epsilon)
        self._entries: list = []
        self._priorities = np.zeros(self.capacity)
        self._next = 0  # ring cursor once full

    def __len__(self):
        return len(self._entries)

    def add(self, experience: Experience, initial_priority=None):
        """Store a transition; new entries default to the current max priority."""
        if initial_priority is None:
            if self._entries:
                initial_priority = float(self._priorities[: len(self._entries)].max())
            else:
                initial_priority = 1.0
        if initial_priority <= 0:
            raise ValueError("priorities must be positive")
        if len(self._entries) < self.capacity:
            self._entries.append(experience)
            self._priorities[len(self._entries) - 1] = initial_priority
        else:
            self._entries[self._next] = experience
            self._priorities[self._next] = initial_priority
            self._next = (self._next + 1) % self.capacity

    def probabilities(self) -> np.ndarray:
        scaled = self._priorities[: len(self._entries)] ** self.alpha
        return scaled / scaled.sum()

    def sample(self, batch_size: int, beta: float, rng):
        if len(self._entries) < batch_size:
            raise BufferTooSmall(len(self._entries), batch_size)
        probs = self.probabilities()
        indices = rng.choice(len(self._entries), size=batch_size, p=probs)
        n = len(self._entries)
        weights = (n * probs[indices]) ** (-beta)
        max_weight = (n * probs.min()) ** (-beta)
        weights = weights / max_weight
        batch = [self._entries[i] for i in indices]
        return batch, indices, weights

    def update_priorities(self, indices, td_errors):
        for i, delta in zip(indices, td_errors):
            self._priorities[i] = abs(float(delta)) + self.priority_epsilon
