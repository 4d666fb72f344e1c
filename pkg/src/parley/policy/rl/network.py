"""Dueling Q-network on plain numpy: forward pass, gradients, Adam, file format.

The trunk is a stack of rectified linear layers; on top sit two linear
streams, a scalar state value V(s) and per-action advantages A(s, a),
recombined as Q(s, a) = V(s) + A(s, a) - mean_a A(s, a). Gradients are
hand-derived so they can be checked against finite differences.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"ADVQ"
FORMAT_VERSION = 1


class DimensionMismatch(ValueError):
    def __init__(self, expected, got):
        super().__init__(f"expected input dimension {expected}, got {got}")
        self.expected = expected
        self.got = got


_PARAM_ORDER_HEAD = ("wv", "bv", "wa", "ba")


class QNetwork:
    def __init__(self, input_dim: int, n_actions: int, hidden=(128, 128), seed=0):
        if not hidden:
            raise ValueError("at least one hidden layer is required")
        self.input_dim = int(input_dim)
        self.n_actions = int(n_actions)
        self.hidden = tuple(int(h) for h in hidden)
        rng = np.random.default_rng(seed)
        self.params = {}
        fan_in = self.input_dim
        for i, width in enumerate(self.hidden):
            self.params[f"w{i}"] = rng.normal(0.0, np.sqrt(2.0 / fan_in), (fan_in, width))
            self.params[f"b{i}"] = np.zeros(width)
            fan_in = width
        self.params["wv"] = rng.normal(0.0, np.sqrt(2.0 / fan_in), (fan_in, 1))
        self.params["bv"] = np.zeros(1)
        self.params["wa"] = rng.normal(0.0, np.sqrt(2.0 / fan_in), (fan_in, self.n_actions))
        self.params["ba"] = np.zeros(self.n_actions)

    def param_names(self) -> list:
        names = []
        for i in range(len(self.hidden)):
            names.extend((f"w{i}", f"b{i}"))
        names.extend(_PARAM_ORDER_HEAD)
        return names

    def _forward_cached(self, x: np.ndarray):
        h = x
        pre = []
        post = [x]
        for i in range(len(self.hidden)):
            z = h @ self.params[f"w{i}"] + self.params[f"b{i}"]
            h = np.maximum(z, 0.0)
            pre.append(z)
            post.append(h)
        v = h @ self.params["wv"] + self.params["bv"]
        a = h @ self.params["wa"] + self.params["ba"]
        q = v + a - a.mean(axis=1, keepdims=True)
        return q, (pre, post, v, a)

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[None, :]
        if x.shape[1] != self.input_dim:
            raise DimensionMismatch(self.input_dim, x.shape[1])
        q, _cache = self._forward_cached(x)
        return q[0] if squeeze else q

    def copy(self) -> "QNetwork":
        clone = QNetwork.__new__(QNetwork)
        clone.input_dim = self.input_dim
        clone.n_actions = self.n_actions
        clone.hidden = self.hidden
        clone.params = {k: v.copy() for k, v in self.params.items()}
        return clone

    def load_params_from(self, other: "QNetwork"):
        for name, value in other.params.items():
            self.params[name] = value.copy()

    # -- persistence --------------------------------------------------------

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<III", FORMAT_VERSION, self.input_dim, self.n_actions))
            fh.write(struct.pack("<I", len(self.hidden)))
            fh.write(struct.pack(f"<{len(self.hidden)}I", *self.hidden))
            for name in self.param_names():
                array = np.ascontiguousarray(self.params[name], dtype="<f8")
                fh.write(array.tobytes())

    @classmethod
    def load(cls, path) -> "QNetwork":
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != MAGIC:
                raise ValueError(f"not a Q-network file (magic {magic!r})")
            version, input_dim, n_actions = struct.unpack("<III", fh.read(12))
            if version != FORMAT_VERSION:
                raise ValueError(f"unsupported Q-network format version {version}")
            (n_hidden,) = struct.unpack("<I", fh.read(4))
            hidden = struct.unpack(f"<{n_hidden}I", fh.read(4 * n_hidden))
            net = cls(input_dim, n_actions, hidden=hidden, seed=0)
            for name in net.param_names():
                shape = net.params[name].shape
                count = int(np.prod(shape))
                raw = fh.read(8 * count)
                if len(raw) != 8 * count:
                    raise ValueError("truncated Q-network file")
                net.params[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
            if fh.read(1):
                raise ValueError("trailing bytes in Q-network file")
        return net


def q_forward(net: QNetwork, s) -> np.ndarray:
    """Action values for one state vector."""
    return net.forward(np.asarray(s, dtype=float))


def select_action(net: QNetwork, s, epsilon: float, rng) -> int:
    """Epsilon-greedy choice; exploitation breaks ties toward the lowest index."""
    if rng.random() < epsilon:
        return int(rng.integers(net.n_actions))
    return int(np.argmax(q_forward(net, s)))


def loss_and_grads(net: QNetwork, states, actions, targets, weights):
    """Importance-weighted squared TD error and its parameter gradients.

    Returns (loss, grads, td_errors) where td_errors are per-sample
    Q(s, a) - target, used to refresh replay priorities.
    """
    x = np.asarray(states, dtype=float)
    actions = np.asarray(actions, dtype=int)
    targets = np.asarray(targets, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if x.shape[1] != net.input_dim:
        raise DimensionMismatch(net.input_dim, x.shape[1])
    batch = x.shape[0]
    rows = np.arange(batch)

    q, (pre, post, _v, _a) = net._forward_cached(x)
    td = q[rows, actions] - targets
    loss = float(np.mean(weights * td ** 2))

    dq = np.zeros_like(q)
    dq[rows, actions] = 2.0 * weights * td / batch
    dv = dq.sum(axis=1, keepdims=True)
    da = dq - dq.sum(axis=1, keepdims=True) / net.n_actions

    h_top = post[-1]
    grads = {
        "wv": h_top.T @ dv,
        "bv": dv.sum(axis=0),
        "wa": h_top.T @ da,
        "ba": da.sum(axis=0),
    }
    dh = dv @ net.params["wv"].T + da @ net.params["wa"].T
    for i in reversed(range(len(net.hidden))):
        dz = dh * (pre[i] > 0.0)
        grads[f"w{i}"] = post[i].T @ dz
        grads[f"b{i}"] = dz.sum(axis=0)
        dh = dz @ net.params[f"w{i}"].T
    return loss, grads, td


class Adam:
    def __init__(self, net: QNetwork, learning_rate=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.net = net
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in net.params.items()}
        self.v = {k: np.zeros_like(v) for k, v in net.params.items()}

    def step(self, grads: dict):
        self.t += 1
        for name, grad in grads.items():
            self.m[name] = self.beta1 * self.m[name] + (1 - self.beta1) * grad
            self.v[name] = self.beta2 * self.v[name] + (1 - self.beta2) * grad ** 2
            m_hat = self.m[name] / (1 - self.beta1 ** self.t)
            v_hat = self.v[name] / (1 - self.beta2 ** self.t)
            self.net.params[name] -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


def sgd_step(net: QNetwork, grads: dict, learning_rate: float):
    for name, grad in grads.items():
        net.params[name] -= learning_rate * grad
