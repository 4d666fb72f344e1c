from .network import (
    Adam,
    DimensionMismatch,
    QNetwork,
    loss_and_grads,
    q_forward,
    select_action,
    sgd_step,
)
from .replay import BufferTooSmall, Experience, PrioritizedReplayBuffer
from .trainer import DqnConfig, DqnTrainer, EpisodeStats, train_batch

__all__ = [
    "Adam",
    "DimensionMismatch",
    "QNetwork",
    "loss_and_grads",
    "q_forward",
    "select_action",
    "sgd_step",
    "BufferTooSmall",
    "Experience",
    "PrioritizedReplayBuffer",
    "DqnConfig",
    "DqnTrainer",
    "EpisodeStats",
    "train_batch",
]
