"""Q-network math, replay buffer and the training loop.

The forward pass and gradients are checked against independent
implementations: a per-sample loop for the forward pass, central finite
differences for the gradients.
"""

import numpy as np
import pytest

from parley.policy.rl.network import (
    Adam,
    DimensionMismatch,
    QNetwork,
    loss_and_grads,
    q_forward,
    select_action,
)
from parley.policy.rl.replay import (
    BufferTooSmall,
    Experience,
    PrioritizedReplayBuffer,
)
from parley.policy.rl.trainer import DqnConfig, DqnTrainer, train_batch


def reference_forward(net, x):
    """Loop-based dueling forward pass, one sample at a time."""
    out = []
    for sample in np.atleast_2d(x):
        h = np.array(sample, dtype=float)
        for i in range(len(net.hidden)):
            z = np.zeros(net.params[f"w{i}"].shape[1])
            for j in range(len(z)):
                acc = net.params[f"b{i}"][j]
                for k in range(len(h)):
                    acc += h[k] * net.params[f"w{i}"][k, j]
                z[j] = acc
            h = np.where(z > 0, z, 0.0)
        v = float(h @ net.params["wv"][:, 0] + net.params["bv"][0])
        a = h @ net.params["wa"] + net.params["ba"]
        out.append(v + a - np.mean(a))
    return np.array(out)


# -- network ------------------------------------------------------------------


def test_forward_matches_reference_loop():
    rng = np.random.default_rng(3)
    net = QNetwork(6, 4, hidden=(9, 5), seed=11)
    x = rng.normal(size=(8, 6))
    assert np.allclose(net.forward(x), reference_forward(net, x), atol=1e-12)


def test_dueling_decomposition_mean_of_q_is_v():
    # Q = V + A - mean(A) forces mean_a Q(s, a) = V(s)
    rng = np.random.default_rng(4)
    net = QNetwork(5, 3, hidden=(8,), seed=2)
    x = rng.normal(size=(10, 5))
    q = net.forward(x)
    h = np.maximum(x @ net.params["w0"] + net.params["b0"], 0.0)
    v = h @ net.params["wv"] + net.params["bv"]
    assert np.allclose(q.mean(axis=1, keepdims=True), v, atol=1e-12)


def test_forward_single_vector_squeezes():
    net = QNetwork(3, 2, hidden=(4,), seed=0)
    q = net.forward(np.zeros(3))
    assert q.shape == (2,)
    assert np.allclose(q, q_forward(net, [0, 0, 0]))


def test_dimension_mismatch():
    net = QNetwork(3, 2, hidden=(4,), seed=0)
    with pytest.raises(DimensionMismatch):
        net.forward(np.zeros(5))
    with pytest.raises(DimensionMismatch):
        loss_and_grads(net, np.zeros((2, 5)), [0, 1], [0.0, 0.0], [1.0, 1.0])


def test_gradients_match_central_differences():
    rng = np.random.default_rng(7)
    net = QNetwork(4, 3, hidden=(6, 5), seed=5)
    states = rng.normal(size=(8, 4))
    actions = rng.integers(3, size=8)
    targets = rng.normal(size=8)
    weights = rng.uniform(0.2, 1.0, size=8)

    def loss_at():
        loss, _, _ = loss_and_grads(net, states, actions, targets, weights)
        return loss

    _, grads, _ = loss_and_grads(net, states, actions, targets, weights)
    eps = 1e-6
    worst = 0.0
    for name in net.param_names():
        flat = net.params[name].reshape(-1)
        grad_flat = grads[name].reshape(-1)
        for idx in range(flat.size):
            saved = flat[idx]
            flat[idx] = saved + eps
            up = loss_at()
            flat[idx] = saved - eps
            down = loss_at()
            flat[idx] = saved
            fd = (up - down) / (2 * eps)
            scale = max(1.0, abs(fd), abs(grad_flat[idx]))
            worst = max(worst, abs(fd - grad_flat[idx]) / scale)
    assert worst < 1e-6


def test_td_errors_returned_per_sample():
    net = QNetwork(2, 2, hidden=(3,), seed=1)
    states = np.eye(2)
    actions = [0, 1]
    q = net.forward(states)
    targets = [1.0, -1.0]
    _, _, td = loss_and_grads(net, states, actions, targets, [1.0, 1.0])
    assert np.allclose(td, [q[0, 0] - 1.0, q[1, 1] + 1.0])


def test_select_action_greedy_tiebreak_and_exploration():
    net = QNetwork(2, 3, hidden=(4,), seed=0)
    for name in net.param_names():
        net.params[name][:] = 0.0
    net.params["ba"][:] = [1.0, 1.0, 0.0]  # actions 0 and 1 tie at the top
    rng = np.random.default_rng(0)
    assert select_action(net, [0.0, 0.0], 0.0, rng) == 0
    picks = {select_action(net, [0.0, 0.0], 1.0, rng) for _ in range(200)}
    assert picks == {0, 1, 2}


def test_adam_single_step_closed_form():
    net = QNetwork(1, 1, hidden=(1,), seed=0)
    net.params["bv"][:] = 0.0
    opt = Adam(net, learning_rate=0.1, beta1=0.9, beta2=0.999, eps=1e-8)
    grad = 0.4
    grads = {"bv": np.array([grad])}
    opt.step(grads)
    # t=1: m_hat = grad, v_hat = grad^2, step = lr * grad / (|grad| + eps)
    expected = -0.1 * grad / (abs(grad) + 1e-8)
    assert abs(net.params["bv"][0] - expected) < 1e-12


def test_save_load_round_trip(tmp_path):
    net = QNetwork(7, 4, hidden=(10, 6), seed=9)
    path = tmp_path / "model.advq"
    net.save(path)
    clone = QNetwork.load(path)
    assert clone.input_dim == 7
    assert clone.n_actions == 4
    assert clone.hidden == (10, 6)
    for name in net.param_names():
        assert np.array_equal(clone.params[name], net.params[name])
    x = np.random.default_rng(0).normal(size=(3, 7))
    assert np.array_equal(clone.forward(x), net.forward(x))


def test_load_rejects_corrupt_files(tmp_path):
    net = QNetwork(3, 2, hidden=(4,), seed=0)
    path = tmp_path / "model.advq"
    net.save(path)
    raw = path.read_bytes()

    bad_magic = tmp_path / "bad_magic"
    bad_magic.write_bytes(b"NOPE" + raw[4:])
    with pytest.raises(ValueError):
        QNetwork.load(bad_magic)

    truncated = tmp_path / "truncated"
    truncated.write_bytes(raw[:-16])
    with pytest.raises(ValueError):
        QNetwork.load(truncated)

    padded = tmp_path / "padded"
    padded.write_bytes(raw + b"\x00")
    with pytest.raises(ValueError):
        QNetwork.load(padded)


# -- replay buffer ----------------------------------------------------------------


def exp(reward=0.0):
    return Experience(
        state=np.zeros(2), action=0, reward=reward, next_state=np.zeros(2), terminal=False
    )


def test_probabilities_closed_form():
    buf = PrioritizedReplayBuffer(8, alpha=1.0)
    buf.add(exp(), initial_priority=1.0)
    buf.add(exp(), initial_priority=3.0)
    assert np.allclose(buf.probabilities(), [0.25, 0.75])
    # alpha = 0.5 takes square roots before normalizing
    buf2 = PrioritizedReplayBuffer(8, alpha=0.5)
    buf2.add(exp(), initial_priority=1.0)
    buf2.add(exp(), initial_priority=9.0)
    assert np.allclose(buf2.probabilities(), [0.25, 0.75])


def test_importance_weights_closed_form():
    # priorities (1, 3), alpha=1, beta=1, N=2: raw weights (2, 2/3),
    # normalized by the max possible weight 2 -> (1, 1/3)
    buf = PrioritizedReplayBuffer(8, alpha=1.0)
    buf.add(exp(reward=1.0), initial_priority=1.0)
    buf.add(exp(reward=2.0), initial_priority=3.0)
    rng = np.random.default_rng(0)
    batch, indices, weights = buf.sample(2, beta=1.0, rng=rng)
    expected = {0: 1.0, 1: 1.0 / 3.0}
    for idx, w in zip(indices, weights):
        assert abs(w - expected[int(idx)]) < 1e-12
    # beta = 0 disables the correction entirely
    _, _, flat = buf.sample(2, beta=0.0, rng=rng)
    assert np.allclose(flat, 1.0)


def test_new_entries_default_to_max_priority():
    buf = PrioritizedReplayBuffer(8, alpha=1.0)
    buf.add(exp(), initial_priority=2.0)
    buf.add(exp(), initial_priority=6.0)
    buf.add(exp())  # no explicit priority
    assert np.allclose(buf.probabilities(), [2 / 14, 6 / 14, 6 / 14])
    with pytest.raises(ValueError):
        buf.add(exp(), initial_priority=0.0)


def test_ring_eviction_replaces_oldest_first():
    buf = PrioritizedReplayBuffer(2, alpha=1.0)
    buf.add(exp(reward=1.0), initial_priority=1.0)
    buf.add(exp(reward=2.0), initial_priority=1.0)
    buf.add(exp(reward=3.0), initial_priority=1.0)  # evicts reward=1.0
    assert len(buf) == 2
    rewards = set()
    rng = np.random.default_rng(0)
    for _ in range(20):
        batch, _, _ = buf.sample(2, beta=0.0, rng=rng)
        rewards.update(e.reward for e in batch)
    assert rewards == {2.0, 3.0}


def test_update_priorities_uses_abs_td_plus_epsilon():
    buf = PrioritizedReplayBuffer(4, alpha=1.0, priority_epsilon=0.5)
    buf.add(exp(), initial_priority=1.0)
    buf.add(exp(), initial_priority=1.0)
    buf.update_priorities([0, 1], [-2.0, 0.0])
    assert np.allclose(buf.probabilities(), [2.5 / 3.0, 0.5 / 3.0])


def test_sample_requires_enough_entries():
    buf = PrioritizedReplayBuffer(4)
    buf.add(exp())
    with pytest.raises(BufferTooSmall):
        buf.sample(2, beta=1.0, rng=np.random.default_rng(0))


def test_sampling_distribution_tracks_priorities():
    buf = PrioritizedReplayBuffer(4, alpha=1.0)
    for p in (1.0, 1.0, 8.0):
        buf.add(exp(reward=p), initial_priority=p)
    rng = np.random.default_rng(42)
    counts = np.zeros(3)
    draws = 6000
    for _ in range(draws // 3):
        _, indices, _ = buf.sample(3, beta=0.0, rng=rng)
        for i in indices:
            counts[int(i)] += 1
    freqs = counts / draws
    assert np.allclose(freqs, [0.1, 0.1, 0.8], atol=0.02)


# -- training loop ----------------------------------------------------------------


class TwoStateEnv:
    """Move right to finish (+1); anything else pays -0.1 and loops."""

    n_actions = 2
    state_dim = 2

    def reset(self, rng):
        return np.array([1.0, 0.0])

    def step(self, action):
        if action == 1:
            return np.array([0.0, 1.0]), 1.0, True
        return np.array([1.0, 0.0]), -0.1, False


def test_train_batch_reduces_loss():
    rng = np.random.default_rng(0)
    net = QNetwork(2, 2, hidden=(16,), seed=0)
    target = net.copy()
    buf = PrioritizedReplayBuffer(64, alpha=0.6)
    env = TwoStateEnv()
    state = env.reset(rng)
    for _ in range(64):
        action = int(rng.integers(2))
        next_state, reward, done = env.step(action)
        buf.add(Experience(state, action, reward, next_state, done))
        state = env.reset(rng) if done else next_state
    opt = Adam(net, learning_rate=1e-2)
    first = train_batch(net, target, buf, 0.9, 1e-2, batch_size=32, beta=0.4,
                        rng=np.random.default_rng(1), optimizer=opt)
    losses = [
        train_batch(net, target, buf, 0.9, 1e-2, batch_size=32, beta=0.4,
                    rng=np.random.default_rng(i + 2), optimizer=opt)
        for i in range(60)
    ]
    assert np.mean(losses[-10:]) < first


def test_trainer_learns_trivial_mdp_and_is_deterministic():
    config = DqnConfig(
        hidden=(16,), buffer_capacity=512, train_start=32, batch_size=16,
        target_sync_interval=50, epsilon_start=1.0, epsilon_end=0.05, seed=3,
    )
    trainer = DqnTrainer(TwoStateEnv(), config)
    history = trainer.train(80, max_steps_per_episode=20)
    assert len(history) == 80
    assert trainer.greedy_action(np.array([1.0, 0.0])) == 1
    # same seed, same run
    again = DqnTrainer(TwoStateEnv(), config).train(80, max_steps_per_episode=20)
    assert [h.reward for h in again] == [h.reward for h in history]
    assert [h.epsilon for h in again] == [h.epsilon for h in history]


def test_config_validation():
    with pytest.raises(ValueError):
        DqnConfig.from_dict({"gamma": 0.9, "bogus_knob": 1})
    cfg = DqnConfig.from_dict({"hidden": [32, 32]})
    assert cfg.hidden == (32, 32)
