"""Price series container and the diagnostics used for model identification.

Stationarity testing, differencing, correlograms, and residual whiteness
checks. Everything here is a pure function of its inputs; the heavier
model fitting lives in the arima and garch modules.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import DegenerateSeriesError, InsufficientDataError

_ADF_TABLE = None


@dataclass(frozen=True)
class PriceSeries:
    """Ordered daily closing prices, equally spaced by trading index.

    Missing calendar days carry no imputation: day t means the t-th
    trading day, not the t-th calendar day.
    """

    dates: tuple
    values: np.ndarray

    def __post_init__(self):
        dates = tuple(self.dates)
        values = np.asarray(self.values, dtype=float)
        if len(dates) != len(values):
            raise ValueError(
                f"dates and values disagree: {len(dates)} vs {len(values)}"
            )
        if any(b <= a for a, b in zip(dates, dates[1:])):
            raise ValueError("dates must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("prices must be finite")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)
        values.flags.writeable = False

    def __len__(self):
        return len(self.values)

    def index_of(self, date: dt.date) -> int:
        try:
            return self.dates.index(date)
        except ValueError:
            raise KeyError(f"{date} is not a trading day of this series") from None


@dataclass(frozen=True)
class Correlogram:
    """Sample autocorrelations and partial autocorrelations by lag."""

    acf: np.ndarray
    pacf: np.ndarray
    n: int


@dataclass(frozen=True)
class TestReport:
    """Outcome of a single hypothesis test at the 5 percent level."""

    statistic: float
    p_value: float
    lags_used: int
    reject_at_5pct: bool = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")
        object.__setattr__(self, "reject_at_5pct", self.p_value < 0.05)


def difference(series, d: int) -> np.ndarray:
    """Apply d rounds of first differencing; output is shorter by d."""
    x = np.asarray(series, dtype=float)
    if d < 0:
        raise ValueError("differencing order must be nonnegative")
    if len(x) <= d:
        raise InsufficientDataError(
            f"need more than {d} observations to difference {d} times, got {len(x)}"
        )
    for _ in range(d):
        x = x[1:] - x[:-1]
    return x


def _adf_table():
    global _ADF_TABLE
    if _ADF_TABLE is None:
        raw = resources.files("oilcast.assets").joinpath("adf_quantiles.json")
        _ADF_TABLE = json.loads(raw.read_text())
    return _ADF_TABLE


def _adf_pvalue(tau: float) -> float:
    """Interpolate the simulated quantile table; clamped at the grid edges."""
    table = _adf_table()
    qs = np.asarray(table["tau"])
    ps = np.asarray(table["percentiles"])
    if tau <= qs[0]:
        return float(ps[0])
    if tau >= qs[-1]:
        return float(ps[-1])
    return float(np.interp(tau, qs, ps))


def _ols(y, X):
    beta, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    return beta, resid


def default_adf_lag(n: int) -> int:
    """Schwert-style cap used when the caller does not fix max_lag."""
    return int(np.floor(12.0 * (n / 100.0) ** 0.25))


def adf_test(series, max_lag: int | None = None) -> TestReport:
    """Augmented Dickey-Fuller unit-root test, constant-only regression.

    The augmentation lag is chosen by AIC over 0..max_lag. The p-value is
    interpolated from a bundled simulated quantile table for the
    constant-only variant. Null hypothesis: unit root; rejection means
    the series looks stationary.
    """
    y = np.asarray(series, dtype=float)
    n = len(y)
    if max_lag is None:
        max_lag = default_adf_lag(n)
    if n < 10 + max_lag:
        raise InsufficientDataError(
            f"ADF with max_lag={max_lag} needs at least {10 + max_lag} points, got {n}"
        )
    if np.ptp(y) == 0.0:
        raise DegenerateSeriesError("constant series has no unit-root question to ask")

    dy = np.diff(y)

    def regression(k, first_row):
        rows = np.arange(first_row, n)
        resp = dy[rows - 1]
        cols = [np.ones(len(rows)), y[rows - 1]]
        cols += [dy[rows - 1 - j] for j in range(1, k + 1)]
        X = np.column_stack(cols)
        beta, resid = _ols(resp, X)
        return beta, resid, X

    best = None
    for k in range(max_lag + 1):
        # lag selection runs on the common sample so AIC values compare
        beta, resid, X = regression(k, max_lag + 1)
        nobs = n - max_lag - 1
        sigma2 = resid @ resid / nobs
        aic = nobs * np.log(max(sigma2, 1e-300)) + 2 * (k + 2)
        if best is None or aic < best[0]:
            best = (aic, k)

    # final statistic refit on the longest sample the chosen lag allows
    k = best[1]
    beta, resid, X = regression(k, k + 1)
    s2 = resid @ resid / (X.shape[0] - X.shape[1])
    cov = s2 * np.linalg.inv(X.T @ X)
    tau = beta[1] / np.sqrt(cov[1, 1])
    return TestReport(statistic=float(tau), p_value=_adf_pvalue(tau), lags_used=k)


def correlogram(series, max_lag: int) -> Correlogram:
    """ACF (biased estimator) and PACF via the Durbin-Levinson recursion."""
    x = np.asarray(series, dtype=float)
    n = len(x)
    if not 1 <= max_lag < n:
        raise ValueError(f"max_lag must satisfy 1 <= max_lag < {n}, got {max_lag}")
    xc = x - x.mean()
    denom = xc @ xc
    if denom == 0.0:
        raise DegenerateSeriesError("constant series has undefined autocorrelation")

    acf = np.empty(max_lag + 1)
    acf[0] = 1.0
    for k in range(1, max_lag + 1):
        acf[k] = (xc[k:] @ xc[:-k]) / denom

    # Durbin-Levinson: phi[k][k] is the lag-k partial autocorrelation
    pacf = np.empty(max_lag + 1)
    pacf[0] = 1.0
    phi_prev = np.zeros(0)
    for k in range(1, max_lag + 1):
        if k == 1:
            phi_kk = acf[1]
            phi = np.array([phi_kk])
        else:
            num = acf[k] - phi_prev @ acf[1:k][::-1]
            den = 1.0 - phi_prev @ acf[1:k]
            phi_kk = num / den if den != 0.0 else 0.0
            phi = np.empty(k)
            phi[:-1] = phi_prev - phi_kk * phi_prev[::-1]
            phi[-1] = phi_kk
        pacf[k] = phi_kk
        phi_prev = phi
    return Correlogram(acf=acf, pacf=pacf, n=n)


def box_pierce(
    residuals,
    lags: int,
    fitted_params: int = 0,
    ljung_box: bool = False,
) -> TestReport:
    """Residual whiteness test: Q = n * sum of squared autocorrelations.

    With ljung_box=True the small-sample (n+2)/(n-k) weighting is applied
    instead. Degrees of freedom are reduced by fitted_params when the
    residuals come from an estimated model.
    """
    from scipy import stats

    x = np.asarray(residuals, dtype=float)
    n = len(x)
    if lags < 1:
        raise ValueError("lags must be >= 1")
    if n <= lags:
        raise ValueError(f"lags must be < series length {n}, got {lags}")
    acf = correlogram(x, lags).acf[1:]
    if ljung_box:
        q = n * (n + 2) * np.sum(acf**2 / (n - np.arange(1, lags + 1)))
    else:
        q = n * np.sum(acf**2)
    dof = max(lags - fitted_params, 1)
    p = float(stats.chi2.sf(q, dof))
    return TestReport(statistic=float(q), p_value=p, lags_used=lags)
