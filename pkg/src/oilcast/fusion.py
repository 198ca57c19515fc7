"""AGESL fusion: LSTM over fused features plus a linear head that
combines the statistical and neural channels.

The fusion input order is fixed: [arima_mean, garch_var,
lstm_prediction, neg, neu, pos, compound]. The head is a single affine
layer, which makes the identity initialization (weight one on
arima_mean, zeros elsewhere) reproduce the ARIMA forecast exactly.

Training runs in two phases on the training split: the LSTM first fits
the target on its own in standardized space, then the head and LSTM
train jointly with gradients flowing through the lstm_prediction input.
Both phases stop early on validation RMSE.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OptimizationError
from .features import SplitPlan, sequence_inputs
from .neural import (
    LstmRegressor,
    MlpHead,
    adam_step,
    init_adam,
    lstm_backward,
    lstm_forward,
    mlp_backward,
    mlp_forward,
)

FUSION_INPUT_DIM = 7
LSTM_SLOT = 2  # position of lstm_prediction in the fusion input

_STD_FLOOR = 1e-8


def identity_head() -> MlpHead:
    """Linear head that copies the arima_mean input."""
    return copy_head(0)


def copy_head(slot: int) -> MlpHead:
    """Linear head passing through one fusion input untouched."""
    if not 0 <= slot < FUSION_INPUT_DIM:
        raise ValueError(f"slot must lie in [0, {FUSION_INPUT_DIM})")
    weights = np.zeros((FUSION_INPUT_DIM, 1))
    weights[slot, 0] = 1.0
    head = MlpHead(weights=[weights], biases=[np.zeros(1)], seed=0)
    head.validate()
    return head


def fusion_inputs(rows, lstm_preds) -> np.ndarray:
    preds = np.asarray(lstm_preds, dtype=float)
    out = np.empty((len(rows), FUSION_INPUT_DIM))
    for k, row in enumerate(rows):
        neg, neu, pos, compound = row.sentiment.as_tuple()
        out[k] = (row.arima_mean, row.garch_var, preds[k],
                  neg, neu, pos, compound)
    return out


@dataclass
class AgeslModel:
    """Trained fusion model; either network piece may be absent."""

    lstm: LstmRegressor
    head: MlpHead
    window: int
    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: float
    y_std: float

    def lstm_predictions(self, x_std: np.ndarray) -> np.ndarray:
        if self.lstm is None:
            return np.zeros(x_std.shape[0])
        pred, _ = lstm_forward(self.lstm, x_std)
        return pred * self.y_std + self.y_mean

    def predict_prepared(self, rows, x_std: np.ndarray) -> np.ndarray:
        lstm_raw = self.lstm_predictions(x_std)
        if self.head is None:
            return lstm_raw
        fused = fusion_inputs(rows, lstm_raw)
        out, _ = mlp_forward(self.head, fused)
        return out[:, 0]

    def predict(self, rows) -> tuple[np.ndarray, np.ndarray]:
        """Predictions for every row with a full window; returns
        (predictions, kept row indices)."""
        x, kept = sequence_inputs(rows, self.window)
        x_std = (x - self.x_mean) / self.x_std
        window_rows = [rows[k] for k in kept]
        return self.predict_prepared(window_rows, x_std), kept


def _segment_masks(rows, kept, plan: SplitPlan):
    segments = np.array([plan.segment_of(rows[k].price_index) for k in kept])
    return segments == "train", segments == "val"


def _check_finite(loss: float, phase: str, epoch: int) -> None:
    if not np.isfinite(loss):
        raise OptimizationError(
            f"{phase} training loss diverged",
            diagnostics={"phase": phase, "epoch": epoch, "loss": loss},
        )


def _train_lstm_phase(lstm, x_std, y_std, train_mask, val_mask, epochs, lr,
                      beta1, beta2, patience):
    x_train, y_train = x_std[train_mask], y_std[train_mask]
    x_val, y_val = x_std[val_mask], y_std[val_mask]
    state = init_adam(lstm.params, lr=lr, beta1=beta1, beta2=beta2)
    best = {k: v.copy() for k, v in lstm.params.items()}
    best_val = np.inf
    stale = 0
    for epoch in range(epochs):
        pred, cache = lstm_forward(lstm, x_train)
        err = pred - y_train
        loss = float(np.mean(err ** 2))
        _check_finite(loss, "lstm", epoch)
        grads = lstm_backward(cache, 2.0 * err / err.size)
        lstm.replace_params(adam_step(state, lstm.params, grads))

        val_pred, _ = lstm_forward(lstm, x_val)
        val_rmse = float(np.sqrt(np.mean((val_pred - y_val) ** 2)))
        if val_rmse < best_val - 1e-12:
            best_val = val_rmse
            best = {k: v.copy() for k, v in lstm.params.items()}
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                break
    lstm.replace_params(best)


def _train_joint_phase(model: AgeslModel, rows_kept, x_std, y_raw, train_mask,
                       val_mask, epochs, lr, beta1, beta2, patience):
    head, lstm = model.head, model.lstm
    train_rows = [r for r, m in zip(rows_kept, train_mask) if m]
    val_rows = [r for r, m in zip(rows_kept, val_mask) if m]
    x_train, y_train = x_std[train_mask], y_raw[train_mask]
    x_val, y_val = x_std[val_mask], y_raw[val_mask]

    params = {f"head.{k}": v for k, v in head.params.items()}
    if lstm is not None:
        params.update({f"lstm.{k}": v for k, v in lstm.params.items()})
    state = init_adam(params, lr=lr, beta1=beta1, beta2=beta2)

    def snapshot():
        saved = {k: v.copy() for k, v in head.params.items()}
        return (saved, None if lstm is None else
                {k: v.copy() for k, v in lstm.params.items()})

    def restore(snap):
        head.replace_params({k: v for k, v in snap[0].items()})
        if lstm is not None:
            lstm.replace_params({k: v for k, v in snap[1].items()})

    best = snapshot()
    best_val = np.inf
    stale = 0
    n_train = y_train.size
    for epoch in range(epochs):
        if lstm is not None:
            lstm_z, cache = lstm_forward(lstm, x_train)
            lstm_raw = lstm_z * model.y_std + model.y_mean
        else:
            lstm_raw = np.zeros(n_train)
        fused = fusion_inputs(train_rows, lstm_raw)
        out, acts = mlp_forward(head, fused)
        err = out[:, 0] - y_train
        loss = float(np.mean(err ** 2))
        _check_finite(loss, "fusion", epoch)

        upstream = (2.0 * err / n_train)[:, None]
        head_grads, dinput = mlp_backward(head, acts, upstream)
        grads = {f"head.{k}": v for k, v in head_grads.items()}
        if lstm is not None:
            lstm_grads = lstm_backward(cache, dinput[:, LSTM_SLOT] * model.y_std)
            grads.update({f"lstm.{k}": v for k, v in lstm_grads.items()})

        params = {f"head.{k}": v for k, v in head.params.items()}
        if lstm is not None:
            params.update({f"lstm.{k}": v for k, v in lstm.params.items()})
        updated = adam_step(state, params, grads)
        head.replace_params(
            {k.split(".", 1)[1]: v for k, v in updated.items()
             if k.startswith("head.")})
        if lstm is not None:
            lstm.replace_params(
                {k.split(".", 1)[1]: v for k, v in updated.items()
                 if k.startswith("lstm.")})

        val_pred = model.predict_prepared(val_rows, x_val)
        val_rmse = float(np.sqrt(np.mean((val_pred - y_val) ** 2)))
        if val_rmse < best_val - 1e-12:
            best_val = val_rmse
            best = snapshot()
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                break
    restore(best)


def fuse_and_train(rows, targets, head, lstm, epochs: int, *, plan: SplitPlan,
                   window: int = 10, lr: float = 0.005, beta1: float = 0.8,
                   beta2: float = 0.999, patience: int = 25) -> AgeslModel:
    """Train the AGESL stack on the training split of `rows`.

    `targets` aligns with `rows`; `head` and `lstm` may each be None to
    drop that piece. With epochs=0 the returned model carries the inputs
    unchanged, so an identity-initialized head reproduces the ARIMA
    channel exactly.
    """
    y = np.asarray(targets, dtype=float)
    if len(rows) != y.size:
        raise ValueError(f"{len(rows)} rows but {y.size} targets")
    x, kept = sequence_inputs(rows, window)
    rows_kept = [rows[k] for k in kept]
    y = y[kept]
    train_mask, val_mask = _segment_masks(rows, kept, plan)
    if not train_mask.any() or not val_mask.any():
        raise ValueError("both the train and validation segments need rows")

    flat_train = x[train_mask].reshape(-1, x.shape[2])
    x_mean = flat_train.mean(axis=0)
    x_std = np.maximum(flat_train.std(axis=0), _STD_FLOOR)
    y_mean = float(y[train_mask].mean())
    y_std = max(float(y[train_mask].std()), _STD_FLOOR)
    x_standard = (x - x_mean) / x_std

    model = AgeslModel(lstm=lstm, head=head, window=window, x_mean=x_mean,
                       x_std=x_std, y_mean=y_mean, y_std=y_std)
    if epochs == 0:
        return model

    if lstm is not None:
        y_z = (y - y_mean) / y_std
        _train_lstm_phase(lstm, x_standard, y_z, train_mask, val_mask, epochs,
                          lr, beta1, beta2, patience)
    if head is not None:
        _train_joint_phase(model, rows_kept, x_standard, y, train_mask,
                           val_mask, epochs, lr, beta1, beta2, patience)
    return model
