"""Single-layer LSTM regressor over scalar sequences, with hand-written BPTT.

The network reads one scalar per timestep and maps the final hidden state
through one affine unit to a scalar. Training is full backprop-through-time
on squared error with global gradient-norm clipping; the analytic gradients
are verified against finite differences in the test suite.
"""

from __future__ import annotations

import numpy as np


class DivergenceError(Exception):
    pass


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -30.0, 30.0)))


def init_params(hidden: int, seed: int) -> dict[str, np.ndarray]:
    """Uniform init scaled by 1/sqrt(hidden); forget-gate bias starts at 1."""
    rng = np.random.default_rng(seed)
    s = 1.0 / np.sqrt(hidden)
    p = {
        "wx": rng.uniform(-s, s, 4 * hidden),
        "wh": rng.uniform(-s, s, (4 * hidden, hidden)),
        "b": np.zeros(4 * hidden),
        "wo": rng.uniform(-s, s, hidden),
        "bo": np.zeros(1),
    }
    p["b"][hidden: 2 * hidden] = 1.0
    return p


def forward(params: dict[str, np.ndarray], x: np.ndarray):
    """Run the recurrence over a batch. x is (batch, seq_len).

    Returns (predictions, cache) where cache holds per-step activations
    for the backward pass. Hidden and cell states start at zero, so the
    first step depends only on the first input and the biases.
    """
    batch, seq_len = x.shape
    hidden = params["wo"].shape[0]
    h = np.zeros((batch, hidden))
    c = np.zeros((batch, hidden))
    steps = []
    for t in range(seq_len):
        z = x[:, t, None] * params["wx"][None, :] + h @ params["wh"].T + params["b"]
        i = _sigmoid(z[:, :hidden])
        f = _sigmoid(z[:, hidden: 2 * hidden])
        g = np.tanh(z[:, 2 * hidden: 3 * hidden])
        o = _sigmoid(z[:, 3 * hidden:])
        c_new = f * c + i * g
        h_new = o * np.tanh(c_new)
        steps.append((h, c, i, f, g, o, c_new))
        h, c = h_new, c_new
    y_hat = h @ params["wo"] + params["bo"][0]
    return y_hat, (x, steps, h)


def loss_and_grads(params: dict[str, np.ndarray], x: np.ndarray, y: np.ndarray):
    """Mean squared error and its analytic gradients (BPTT)."""
    y_hat, (x, steps, h_final) = forward(params, x)
    batch, seq_len = x.shape
    hidden = params["wo"].shape[0]
    err = y_hat - y
    loss = float(np.mean(err ** 2))
    dy = 2.0 * err / batch

    grads = {k: np.zeros_like(v) for k, v in params.items()}
    grads["wo"] = dy @ h_final
    grads["bo"][0] = dy.sum()
    dh = dy[:, None] * params["wo"][None, :]
    dc = np.zeros((batch, hidden))
    for t in range(seq_len - 1, -1, -1):
        h_prev, c_prev, i, f, g, o, c_new = steps[t]
        tanh_c = np.tanh(c_new)
        do = dh * tanh_c
        dct = dc + dh * o * (1.0 - tanh_c ** 2)
        di = dct * g
        df = dct * c_prev
        dg = dct * i
        dc = dct * f
        dz = np.concatenate(
            [
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                dg * (1.0 - g ** 2),
                do * o * (1.0 - o),
            ],
            axis=1,
        )
        grads["wx"] += dz.T @ x[:, t]
        grads["wh"] += dz.T @ h_prev
        grads["b"] += dz.sum(axis=0)
        dh = dz @ params["wh"]
    return loss, grads


def clip_gradients(grads: dict[str, np.ndarray], max_norm: float) -> None:
    total = np.sqrt(sum(float((g ** 2).sum()) for g in grads.values()))
    if total > max_norm:
        scale = max_norm / total
        for g in grads.values():
            g *= scale


class LstmRegressor:
    """Trains with Adam on minibatches; deterministic for a fixed seed."""

    def __init__(self, hidden: int = 32, epochs: int = 100, lr: float = 1e-2,
                 batch: int = 64, seed: int = 1, clip: float = 5.0):
        self.hidden = hidden
        self.epochs = epochs
        self.lr = lr
        self.batch = batch
        self.seed = seed
        self.clip = clip
        self.params: dict[str, np.ndarray] | None = None
        self.loss_history: list[float] = []
        self._x_mean = 0.0
        self._x_std = 1.0
        self._y_mean = 0.0
        self._y_std = 1.0

    def fit(self, x: np.ndarray, y: np.ndarray) -> "LstmRegressor":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        self._x_mean = float(x.mean())
        self._x_std = float(x.std()) or 1.0
        self._y_mean = float(y.mean())
        self._y_std = float(y.std()) or 1.0
        xs = (x - self._x_mean) / self._x_std
        ys = (y - self._y_mean) / self._y_std

        params = init_params(self.hidden, self.seed)
        m = {k: np.zeros_like(v) for k, v in params.items()}
        v = {k: np.zeros_like(v_) for k, v_ in params.items()}
        beta1, beta2, eps = 0.9, 0.999, 1e-8
        rng = np.random.default_rng(self.seed + 1)
        step = 0
        n = len(xs)
        for epoch in range(self.epochs):
            order = rng.permutation(n)
            epoch_loss = 0.0
            for start in range(0, n, self.batch):
                idx = order[start: start + self.batch]
                loss, grads = loss_and_grads(params, xs[idx], ys[idx])
                if not np.isfinite(loss):
                    raise DivergenceError(f"NaN loss at epoch {epoch}")
                epoch_loss += loss * len(idx)
                clip_gradients(grads, self.clip)
                step += 1
                for k in params:
                    m[k] = beta1 * m[k] + (1 - beta1) * grads[k]
                    v[k] = beta2 * v[k] + (1 - beta2) * grads[k] ** 2
                    mh = m[k] / (1 - beta1 ** step)
                    vh = v[k] / (1 - beta2 ** step)
                    params[k] -= self.lr * mh / (np.sqrt(vh) + eps)
            self.loss_history.append(epoch_loss / n)
        self.params = params
        return self

    def predict(self, x: np.ndarray) -> np.ndarray:
        if self.params is None:
            raise RuntimeError("model is not fitted")
        xs = (np.asarray(x, dtype=np.float64) - self._x_mean) / self._x_std
        y_hat, _ = forward(self.params, xs)
        return y_hat * self._y_std + self._y_mean
