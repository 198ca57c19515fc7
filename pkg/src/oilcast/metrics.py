"""Forecast evaluation: point metrics, the Diebold-Mariano test, and
schema matching for extracted events."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.stats

from .errors import AlignmentError, DegenerateSeriesError, InsufficientDataError
from .events import OOV_TOKEN
from .timeseries import TestReport


@dataclass(frozen=True)
class EvalReport:
    rmse: float
    mape: float
    ds: float
    n: int

    def __post_init__(self):
        if self.rmse < 0 or self.mape < 0:
            raise ValueError("rmse and mape cannot be negative")
        if not 0.0 <= self.ds <= 1.0:
            raise ValueError("ds must lie in [0, 1]")
        if self.n < 1:
            raise ValueError("report needs at least one observation")


def point_metrics(actuals, predictions, ds_rule: str = "paper") -> EvalReport:
    """RMSE, MAPE, and direction statistic for aligned forecasts.

    `ds_rule` selects the direction test: "paper" scores day t+1 as
    correct when (y_{t+1} - y_t)(y_{t+1} - yhat_{t+1}) >= 0; "standard"
    compares the signs of predicted and realized changes,
    (y_{t+1} - y_t)(yhat_{t+1} - y_t) >= 0. A single observation has no
    direction pairs and scores ds = 1 vacuously.
    """
    y = np.asarray(actuals, dtype=float)
    p = np.asarray(predictions, dtype=float)
    if y.shape != p.shape or y.ndim != 1:
        raise AlignmentError(
            f"actuals and predictions disagree: {y.shape} vs {p.shape}"
        )
    if y.size == 0:
        raise InsufficientDataError("cannot score an empty forecast")
    if np.any(y == 0.0):
        raise DegenerateSeriesError("MAPE is undefined for zero actuals")
    if ds_rule not in ("paper", "standard"):
        raise ValueError(f"unknown ds_rule {ds_rule!r}")

    rmse = float(np.sqrt(np.mean((y - p) ** 2)))
    mape = float(np.mean(np.abs(y - p) / np.abs(y)))
    if y.size == 1:
        ds = 1.0
    else:
        move = y[1:] - y[:-1]
        other = (y[1:] - p[1:]) if ds_rule == "paper" else (p[1:] - y[:-1])
        ds = float(np.mean(move * other >= 0.0))
    return EvalReport(rmse=rmse, mape=mape, ds=ds, n=int(y.size))


def dm_test(losses_a, losses_b, horizon: int = 1) -> TestReport:
    """Diebold-Mariano test of equal predictive accuracy.

    The variance of the mean loss differential uses the rectangular HAC
    estimator with truncation lag horizon - 1; the p-value is two-sided
    normal. Identical loss sequences give statistic 0 and p = 1.
    """
    a = np.asarray(losses_a, dtype=float)
    b = np.asarray(losses_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise AlignmentError(f"loss sequences disagree: {a.shape} vs {b.shape}")
    if a.size < 10:
        raise InsufficientDataError("Diebold-Mariano needs at least 10 losses")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")

    if np.array_equal(a, b):
        return TestReport(statistic=0.0, p_value=1.0, lags_used=horizon - 1)
    d = a - b
    n = d.size
    centered = d - d.mean()
    gamma0 = float(np.mean(centered ** 2))
    if gamma0 == 0.0:
        raise DegenerateSeriesError(
            "loss differential has zero variance but nonzero mean"
        )
    variance = gamma0
    for k in range(1, horizon):
        gamma_k = float(np.sum(centered[k:] * centered[:-k]) / n)
        variance += 2.0 * gamma_k
    if variance <= 0.0:
        raise DegenerateSeriesError(
            "HAC variance estimate is nonpositive at this truncation lag"
        )
    statistic = float(d.mean() / np.sqrt(variance / n))
    p_value = float(2.0 * scipy.stats.norm.sf(abs(statistic)))
    return TestReport(statistic=statistic, p_value=p_value, lags_used=horizon - 1)


@dataclass(frozen=True)
class SchemaMatchReport:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


def _normalize_event(event):
    if hasattr(event, "trigger"):
        trigger = event.trigger
        args = [text for _, text in event.arguments]
    else:
        trigger = event["trigger"]
        args = [a["text"] if isinstance(a, dict) else a
                for a in event.get("arguments", ())]
    return trigger.lower(), frozenset(a.lower() for a in args)


def schema_match_eval(predicted, gold) -> SchemaMatchReport:
    """Greedy one-to-one matching of predicted events against gold.

    A predicted event can match a gold event only when their triggers
    agree case-insensitively; among admissible pairs, those with the
    largest argument overlap are matched first. Padding events (the
    reserved OOV trigger) never count as predictions.
    """
    preds = [_normalize_event(e) for e in predicted]
    preds = [p for p in preds if p[0] != OOV_TOKEN]
    golds = [_normalize_event(e) for e in gold]

    pairs = []
    for i, (pt, pa) in enumerate(preds):
        for j, (gt, ga) in enumerate(golds):
            if pt == gt:
                pairs.append((-(len(pa & ga) + 1), i, j))
    pairs.sort()
    used_p, used_g = set(), set()
    tp = 0
    for _, i, j in pairs:
        if i in used_p or j in used_g:
            continue
        used_p.add(i)
        used_g.add(j)
        tp += 1
    fp = len(preds) - tp
    fn = len(golds) - tp
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return SchemaMatchReport(precision=precision, recall=recall, f1=f1,
                             tp=tp, fp=fp, fn=fn)
