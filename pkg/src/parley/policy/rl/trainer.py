"""Q-learning loop: epsilon-greedy rollouts, replay, target network.

Environments expose n_actions, state_dim, reset(rng) -> state and
step(action) -> (next_state, reward, done). Everything is driven by one
numpy Generator, so a fixed seed gives a fixed training run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

import numpy as np

from .network import Adam, QNetwork, loss_and_grads, select_action, sgd_step
from .replay import Experience, PrioritizedReplayBuffer


@dataclass
class DqnConfig:
    gamma: float = 0.99
    learning_rate: float = 1e-3
    batch_size: int = 32
    buffer_capacity: int = 50_000
    alpha: float = 0.6
    beta_start: float = 0.4
    beta_end: float = 1.0
    priority_epsilon: float = 1e-6
    epsilon_start: float = 0.5
    epsilon_end: float = 0.05
    anneal_fraction: float = 0.8  # share of episodes over which schedules run
    target_sync_interval: int = 500
    train_start: int = 200  # transitions stored before learning begins
    hidden: tuple = (128, 128)
    seed: int = 0

    def __post_init__(self):
        self.hidden = tuple(self.hidden)

    @classmethod
    def from_dict(cls, data: dict) -> "DqnConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown training config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "DqnConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def train_batch(net: QNetwork, target_net: QNetwork, buf: PrioritizedReplayBuffer,
                gamma: float, learning_rate: float, *, batch_size: int = 32,
                beta: float = 1.0, rng=None, optimizer=None) -> float:
    """One gradient step on a prioritized batch; refreshes sampled priorities."""
    if rng is None:
        rng = np.random.default_rng(0)
    batch, indices, weights = buf.sample(batch_size, beta, rng)
    states = np.stack([e.state for e in batch])
    actions = np.array([e.action for e in batch], dtype=int)
    rewards = np.array([e.reward for e in batch], dtype=float)
    next_states = np.stack([e.next_state for e in batch])
    terminal = np.array([e.terminal for e in batch], dtype=bool)

    next_q = target_net.forward(next_states)
    targets = rewards + gamma * np.where(terminal, 0.0, next_q.max(axis=1))

    loss, grads, td = loss_and_grads(net, states, actions, targets, weights)
    if optimizer is not None:
        optimizer.step(grads)
    else:
        sgd_step(net, grads, learning_rate)
    buf.update_priorities(indices, td)
    return loss


def _interpolate(start: float, end: float, progress: float) -> float:
    return start + (end - start) * min(1.0, max(0.0, progress))


@dataclass
class EpisodeStats:
    episode: int
    steps: int
    reward: float
    epsilon: float
    loss: float


class DqnTrainer:
    def __init__(self, env, config: DqnConfig = None):
        self.env = env
        self.config = config or DqnConfig()
        self.rng = np.random.default_rng(self.config.seed)
        self.net = QNetwork(
            env.state_dim, env.n_actions,
            hidden=self.config.hidden, seed=self.config.seed,
        )
        self.target_net = self.net.copy()
        self.optimizer = Adam(self.net, learning_rate=self.config.learning_rate)
        self.buffer = PrioritizedReplayBuffer(
            self.config.buffer_capacity,
            alpha=self.config.alpha,
            priority_epsilon=self.config.priority_epsilon,
        )
        self.total_steps = 0

    def train(self, n_episodes: int, max_steps_per_episode: int = 200) -> list:
        cfg = self.config
        horizon = max(1, int(n_episodes * cfg.anneal_fraction))
        history = []
        for episode in range(n_episodes):
            progress = episode / horizon
            epsilon = _interpolate(cfg.epsilon_start, cfg.epsilon_end, progress)
            beta = _interpolate(cfg.beta_start, cfg.beta_end, progress)
            state = self.env.reset(self.rng)
            episode_reward = 0.0
            last_loss = 0.0
            steps = 0
            for _step in range(max_steps_per_episode):
                action = select_action(self.net, state, epsilon, self.rng)
                next_state, reward, done = self.env.step(action)
                self.buffer.add(Experience(
                    state=np.asarray(state, dtype=float),
                    action=action,
                    reward=float(reward),
                    next_state=np.asarray(next_state, dtype=float),
                    terminal=bool(done),
                ))
                episode_reward += reward
                state = next_state
                steps += 1
                if len(self.buffer) >= max(cfg.batch_size, cfg.train_start):
                    last_loss = train_batch(
                        self.net, self.target_net, self.buffer,
                        cfg.gamma, cfg.learning_rate,
                        batch_size=cfg.batch_size, beta=beta,
                        rng=self.rng, optimizer=self.optimizer,
                    )
                    self.total_steps += 1
                    if self.total_steps % cfg.target_sync_interval == 0:
                        self.target_net.load_params_from(self.net)
                if done:
                    break
            history.append(EpisodeStats(
                episode=episode, steps=steps, reward=episode_reward,
                epsilon=epsilon, loss=last_loss,
            ))
        return history

    def greedy_action(self, state) -> int:
        return int(np.argmax(self.net.forward(np.asarray(state, dtype=float))))
