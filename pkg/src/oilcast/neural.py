"""Minimal neural kit: LSTM regressor, MLP head, Adam optimizer.

All gradients are coded analytically; there is no autodiff. Forward
passes accept batches (leading axis) so training over a full dataset is
a handful of matrix products per timestep. Parameters live in plain
name-to-array dicts, which keeps the optimizer generic over both model
kinds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import modeldoc
from .errors import OptimizationError


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _uniform_init(rng, fan_in, shape):
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


@dataclass(eq=False)
class LstmRegressor:
    """Single-layer LSTM with a scalar output head.

    Gate blocks are stored in one matrix, column order input, forget,
    candidate, output. `version` advances on every parameter replacement
    so a backward pass can detect a cache taken from older parameters.
    """

    input_dim: int
    hidden_dim: int
    params: dict
    seed: int
    version: int = 0

    def validate(self) -> None:
        d, h = self.input_dim, self.hidden_dim
        shapes = {"W": (d + h, 4 * h), "b": (4 * h,), "w_out": (h,), "b_out": (1,)}
        for name, shape in shapes.items():
            arr = self.params[name]
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")

    def replace_params(self, new_params: dict) -> None:
        self.params = new_params
        self.version += 1
        self.validate()

    def to_json(self, path) -> None:
        modeldoc.dump(path, "lstm-checkpoint", {
            "input_dim": self.input_dim,
            "hidden_dim": self.hidden_dim,
            "seed": self.seed,
            "params": {k: v for k, v in self.params.items()},
        })

    @classmethod
    def from_json(cls, path) -> "LstmRegressor":
        doc = modeldoc.load(path, "lstm-checkpoint")
        params = {k: np.asarray(v, dtype=float) for k, v in doc["params"].items()}
        params["b"] = params["b"].reshape(-1)
        params["w_out"] = params["w_out"].reshape(-1)
        params["b_out"] = params["b_out"].reshape(-1)
        model = cls(input_dim=doc["input_dim"], hidden_dim=doc["hidden_dim"],
                    params=params, seed=doc["seed"])
        model.validate()
        return model


def init_lstm(input_dim: int, hidden_dim: int = 64, seed: int = 0) -> LstmRegressor:
    """Seeded uniform init in +-1/sqrt(fan_in); forget-gate bias starts at 1."""
    rng = np.random.default_rng(seed)
    d, h = input_dim, hidden_dim
    b = np.zeros(4 * h)
    b[h:2 * h] = 1.0
    params = {
        "W": _uniform_init(rng, d + h, (d + h, 4 * h)),
        "b": b,
        "w_out": _uniform_init(rng, h, (h,)),
        "b_out": np.zeros(1),
    }
    model = LstmRegressor(input_dim=d, hidden_dim=h, params=params, seed=seed)
    model.validate()
    return model


@dataclass
class LstmCache:
    model: LstmRegressor
    version: int
    x: np.ndarray
    gates: list  # per step (i, f, g, o)
    cells: list  # per step c_t
    tanh_cells: list
    hiddens: list  # h_0 .. h_T with h_0 = 0


def lstm_forward(model: LstmRegressor, sequence) -> tuple[np.ndarray, LstmCache]:
    """Run the recurrence; returns predictions and the backward-pass cache.

    `sequence` is (T, input_dim) for one series or (N, T, input_dim) for a
    batch; predictions come back as a scalar ndarray () or shape (N,).
    """
    x = np.asarray(sequence, dtype=float)
    single = x.ndim == 2
    if single:
        x = x[None, :, :]
    if x.ndim != 3 or x.shape[2] != model.input_dim:
        raise ValueError(
            f"expected (*, T, {model.input_dim}) input, got {np.asarray(sequence).shape}"
        )
    if x.shape[1] == 0:
        raise ValueError("sequence must have at least one step")

    n, steps, d = x.shape
    h_dim = model.hidden_dim
    W, b = model.params["W"], model.params["b"]
    h = np.zeros((n, h_dim))
    c = np.zeros((n, h_dim))
    gates, cells, tanh_cells, hiddens = [], [], [], [h]
    for t in range(steps):
        z = np.concatenate((x[:, t, :], h), axis=1) @ W + b
        i = _sigmoid(z[:, :h_dim])
        f = _sigmoid(z[:, h_dim:2 * h_dim])
        g = np.tanh(z[:, 2 * h_dim:3 * h_dim])
        o = _sigmoid(z[:, 3 * h_dim:])
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        gates.append((i, f, g, o))
        cells.append(c)
        tanh_cells.append(tc)
        hiddens.append(h)
    pred = h @ model.params["w_out"] + model.params["b_out"][0]
    cache = LstmCache(model=model, version=model.version, x=x, gates=gates,
                      cells=cells, tanh_cells=tanh_cells, hiddens=hiddens)
    return (pred[0] if single else pred), cache


def lstm_backward(cache: LstmCache, upstream_grad) -> dict:
    """Exact gradients of sum(upstream * prediction) via BPTT."""
    model = cache.model
    if cache.version != model.version:
        raise ValueError("cache is stale: parameters changed since the forward pass")
    x = cache.x
    n, steps, d = x.shape
    h_dim = model.hidden_dim
    W = model.params["W"]
    up = np.atleast_1d(np.asarray(upstream_grad, dtype=float))
    if up.shape != (n,):
        up = np.broadcast_to(up, (n,)).copy()

    h_final = cache.hiddens[-1]
    grads = {
        "w_out": h_final.T @ up,
        "b_out": np.array([up.sum()]),
        "W": np.zeros_like(W),
        "b": np.zeros(4 * h_dim),
    }
    dh = up[:, None] * model.params["w_out"][None, :]
    dc = np.zeros((n, h_dim))
    for t in range(steps - 1, -1, -1):
        i, f, g, o = cache.gates[t]
        tc = cache.tanh_cells[t]
        c_prev = cache.cells[t - 1] if t > 0 else np.zeros((n, h_dim))
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc * tc)
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dz = np.concatenate((
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ), axis=1)
        inp = np.concatenate((x[:, t, :], cache.hiddens[t]), axis=1)
        grads["W"] += inp.T @ dz
        grads["b"] += dz.sum(axis=0)
        back = dz @ W.T
        dh = back[:, d:]
        dc = dc * f
    return grads


@dataclass(eq=False)
class MlpHead:
    """Fully connected stack, nonlinear hidden layers, identity output."""

    weights: list
    biases: list
    seed: int

    def validate(self) -> None:
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("need matching, nonempty weight/bias lists")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ValueError(f"layer {k} weight/bias shapes disagree")
            if k > 0 and self.weights[k - 1].shape[1] != w.shape[0]:
                raise ValueError(f"layer {k - 1} output does not feed layer {k}")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(f"layer {k} has non-finite parameters")

    @property
    def params(self) -> dict:
        out = {}
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            out[f"W{k}"] = w
            out[f"b{k}"] = b
        return out

    def replace_params(self, params: dict) -> None:
        for k in range(len(self.weights)):
            self.weights[k] = params[f"W{k}"]
            self.biases[k] = params[f"b{k}"]
        self.validate()

    def to_json(self, path) -> None:
        modeldoc.dump(path, "mlp-checkpoint", {
            "seed": self.seed,
            "dims": [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights],
            "params": self.params,
        })

    @classmethod
    def from_json(cls, path) -> "MlpHead":
        doc = modeldoc.load(path, "mlp-checkpoint")
        n_layers = len(doc["dims"]) - 1
        weights = [np.asarray(doc["params"][f"W{k}"], dtype=float)
                   for k in range(n_layers)]
        biases = [np.asarray(doc["params"][f"b{k}"], dtype=float).reshape(-1)
                  for k in range(n_layers)]
        head = cls(weights=weights, biases=biases, seed=doc["seed"])
        head.validate()
        return head


def init_mlp(dims, seed: int = 0) -> MlpHead:
    """dims = [in, hidden..., out]; uniform +-1/sqrt(fan_in) init."""
    if len(dims) < 2:
        raise ValueError("need at least an input and an output dimension")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(_uniform_init(rng, fan_in, (fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    head = MlpHead(weights=weights, biases=biases, seed=seed)
    head.validate()
    return head


def mlp_forward(head: MlpHead, inputs) -> tuple[np.ndarray, list]:
    """Returns outputs and per-layer activations for the backward pass."""
    a = np.asarray(inputs, dtype=float)
    single = a.ndim == 1
    if single:
        a = a[None, :]
    if a.shape[1] != head.weights[0].shape[0]:
        raise ValueError(
            f"input dimension {a.shape[1]} does not match first layer "
            f"{head.weights[0].shape[0]}"
        )
    activations = [a]
    last = len(head.weights) - 1
    for k, (w, b) in enumerate(zip(head.weights, head.biases)):
        a = a @ w + b
        if k < last:
            a = np.tanh(a)
        activations.append(a)
    return (a[0] if single else a), activations


def mlp_backward(head: MlpHead, activations, upstream_grad) -> tuple[dict, np.ndarray]:
    """Gradients of sum(upstream * output) plus the gradient on the input."""
    up = np.asarray(upstream_grad, dtype=float)
    delta = np.atleast_2d(up)
    if delta.shape[0] == 1 and activations[0].shape[0] > 1:
        delta = np.broadcast_to(delta, (activations[0].shape[0], delta.shape[1])).copy()
    grads = {}
    last = len(head.weights) - 1
    for k in range(last, -1, -1):
        if k < last:
            delta = delta * (1.0 - activations[k + 1] ** 2)
        grads[f"W{k}"] = activations[k].T @ delta
        grads[f"b{k}"] = delta.sum(axis=0)
        delta = delta @ head.weights[k].T
    return grads, delta


@dataclass
class AdamState:
    lr: float
    beta1: float
    beta2: float
    eps: float
    m: dict
    v: dict
    step: int = 0

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in (0, 1)")
        if self.eps <= 0:
            raise ValueError("eps must be positive")


def init_adam(params: dict, lr: float = 0.005, beta1: float = 0.8,
              beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    return AdamState(
        lr=lr, beta1=beta1, beta2=beta2, eps=eps,
        m={k: np.zeros_like(v) for k, v in params.items()},
        v={k: np.zeros_like(v) for k, v in params.items()},
    )


def adam_step(state: AdamState, params: dict, grads: dict) -> dict:
    """Bias-corrected Adam update; returns the new parameter dict."""
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            finite = np.abs(g)[np.isfinite(g)]
            raise OptimizationError(
                "non-finite gradient encountered",
                diagnostics={"param": name, "step": state.step,
                             "max_finite_abs": float(finite.max()) if finite.size else 0.0},
            )
    state.step += 1
    t = state.step
    out = {}
    for name, p in params.items():
        g = grads[name]
        state.m[name] = state.beta1 * state.m[name] + (1 - state.beta1) * g
        state.v[name] = state.beta2 * state.v[name] + (1 - state.beta2) * g * g
        m_hat = state.m[name] / (1 - state.beta1 ** t)
        v_hat = state.v[name] / (1 - state.beta2 ** t)
        out[name] = p - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return out
