"""Per-day fused feature rows and the chronological split plan."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, InsufficientDataError
from .events import ARG_DIM, TYPE_DIM, EventRecord, neutral_record
from .sentiment import NEUTRAL_DAY, SentimentVector
from .timeseries import PriceSeries

PRICE_LAGS = 20
INPUT_DIM = TYPE_DIM + ARG_DIM + PRICE_LAGS  # 320


@dataclass(frozen=True)
class SplitPlan:
    """Chronological train/validation/test boundaries over n observations.

    The first 80 percent of observations form the training block, whose
    last tenth is held out for validation; the final 20 percent is the
    test set. All indices are exclusive ends.
    """

    train_end: int
    val_end: int
    test_end: int

    def __post_init__(self):
        if not 0 < self.train_end < self.val_end < self.test_end:
            raise ValueError(
                f"split indices must be strictly increasing and positive, got "
                f"{self.train_end}/{self.val_end}/{self.test_end}"
            )

    @classmethod
    def for_length(cls, n: int, train_frac: float = 0.8,
                   val_frac_of_train: float = 0.1) -> "SplitPlan":
        block = int(np.floor(n * train_frac))
        train_end = int(np.floor(block * (1.0 - val_frac_of_train)))
        if train_end < 1 or block <= train_end or n <= block:
            raise InsufficientDataError(
                f"{n} observations are too few for a {train_frac:.0%} split"
            )
        return cls(train_end=train_end, val_end=block, test_end=n)

    @property
    def n_train(self) -> int:
        return self.train_end

    @property
    def n_val(self) -> int:
        return self.val_end - self.train_end

    @property
    def n_test(self) -> int:
        return self.test_end - self.val_end

    def segment_of(self, index: int) -> str:
        if index < 0 or index >= self.test_end:
            raise IndexError(f"index {index} outside the plan")
        if index < self.train_end:
            return "train"
        if index < self.val_end:
            return "val"
        return "test"


@dataclass(frozen=True)
class FeatureRow:
    """Everything known before predicting one day's closing price.

    `price_index` is the row's position in the underlying price series;
    lags run backward from the previous trading day. News enters with a
    one-day delay: sentiment and events come from the prior trading day.
    """

    date: dt.date
    price_index: int
    type_vec: np.ndarray
    arg_embedding: np.ndarray
    price_lags: np.ndarray
    sentiment: SentimentVector
    arima_mean: float
    garch_var: float

    def __post_init__(self):
        type_vec = np.asarray(self.type_vec, dtype=float)
        arg = np.asarray(self.arg_embedding, dtype=float)
        lags = np.asarray(self.price_lags, dtype=float)
        if type_vec.shape != (TYPE_DIM,):
            raise ValueError(f"type_vec must have dimension {TYPE_DIM}")
        if arg.shape != (ARG_DIM,):
            raise ValueError(f"arg_embedding must have dimension {ARG_DIM}")
        if lags.shape != (PRICE_LAGS,):
            raise ValueError(f"price_lags must have length {PRICE_LAGS}")
        if self.garch_var < 0:
            raise ValueError("garch_var cannot be negative")
        if not (np.all(np.isfinite(type_vec)) and np.all(np.isfinite(arg))
                and np.all(np.isfinite(lags)) and np.isfinite(self.arima_mean)
                and np.isfinite(self.garch_var)):
            raise ValueError("feature row contains non-finite values")
        object.__setattr__(self, "type_vec", type_vec)
        object.__setattr__(self, "arg_embedding", arg)
        object.__setattr__(self, "price_lags", lags)

    def lstm_input(self) -> np.ndarray:
        """The 320-dimensional concatenated network input."""
        return np.concatenate((self.type_vec, self.arg_embedding,
                               self.price_lags))


def build_features(prices: PriceSeries, sentiments: dict, event_records: dict,
                   arima_means, garch_vars) -> list:
    """One FeatureRow per forecastable trading day.

    `sentiments` and `event_records` are keyed by the calendar date the
    news appeared; a row for day t reads them at day t-1 and falls back
    to the neutral vector and a padded record when that day had no news.
    `arima_means` and `garch_vars` are aligned with the price series and
    hold the one-step-ahead mean and variance for each position.
    """
    means = np.asarray(arima_means, dtype=float)
    variances = np.asarray(garch_vars, dtype=float)
    n = len(prices)
    if means.shape != (n,) or variances.shape != (n,):
        raise AlignmentError(
            f"model paths must align with the {n} prices, got "
            f"{means.shape} and {variances.shape}"
        )
    unknown = sorted(set(sentiments) - set(prices.dates))
    unknown += sorted(set(event_records) - set(prices.dates))
    if unknown:
        listed = ", ".join(d.isoformat() for d in unknown[:5])
        raise AlignmentError(
            f"news dates are not trading days of the price series: {listed}"
        )
    if n <= PRICE_LAGS:
        raise InsufficientDataError(
            f"need more than {PRICE_LAGS} prices to build features"
        )

    neutral = SentimentVector(*NEUTRAL_DAY)
    rows = []
    for i in range(PRICE_LAGS, n):
        news_day = prices.dates[i - 1]
        record = event_records.get(news_day)
        if record is None:
            record = neutral_record()
        rows.append(FeatureRow(
            date=prices.dates[i],
            price_index=i,
            type_vec=record.type_vec.values,
            arg_embedding=record.arg_embedding,
            price_lags=prices.values[i - PRICE_LAGS:i],
            sentiment=sentiments.get(news_day, neutral),
            arima_mean=float(means[i]),
            garch_var=float(variances[i]),
        ))
    return rows


def sequence_inputs(rows, window: int) -> tuple[np.ndarray, np.ndarray]:
    """Stack rows into LSTM windows.

    Returns (X, kept) where X[k] holds the `window` consecutive input
    vectors ending at rows[kept[k]]; rows too early for a full window
    are dropped.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    if len(rows) < window:
        raise InsufficientDataError(
            f"{len(rows)} rows cannot fill a window of {window}"
        )
    inputs = np.stack([row.lstm_input() for row in rows])
    kept = np.arange(window - 1, len(rows))
    x = np.stack([inputs[k - window + 1:k + 1] for k in kept])
    return x, kept
