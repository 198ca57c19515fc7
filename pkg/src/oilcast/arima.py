"""ARMA(p,q) estimation on the differenced price series.

Estimation maximizes the conditional Gaussian likelihood (pre-sample
residuals zero, first p observations conditioned on). Stationarity and
invertibility are enforced through a partial-autocorrelation
reparameterization, so the optimizer moves through unconstrained space
while every candidate model is admissible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, signal

from . import modeldoc
from .errors import DegenerateSeriesError, InsufficientDataError, OptimizationError
from .timeseries import PriceSeries, adf_test, difference

MAX_DIFF = 2


@dataclass(frozen=True)
class ArimaSpec:
    p: int
    d: int
    q: int
    intercept_only: bool = False

    def __post_init__(self):
        if min(self.p, self.d, self.q) < 0:
            raise ValueError("orders must be nonnegative")
        if self.p + self.q == 0 and not self.intercept_only:
            raise ValueError("p + q must be >= 1 unless intercept_only is set")


@dataclass(frozen=True)
class ArimaModel:
    spec: ArimaSpec
    intercept: float
    ar_coeffs: np.ndarray
    ma_coeffs: np.ndarray
    sigma2: float
    loglik: float
    aic: float
    bic: float
    residuals: np.ndarray
    stderr: np.ndarray  # intercept, then AR, then MA

    @property
    def n_params(self) -> int:
        return 1 + self.spec.p + self.spec.q

    def to_json(self, path) -> None:
        modeldoc.dump(path, "arima-model", {
            "spec": {"p": self.spec.p, "d": self.spec.d, "q": self.spec.q,
                     "intercept_only": self.spec.intercept_only},
            "intercept": self.intercept,
            "ar_coeffs": self.ar_coeffs,
            "ma_coeffs": self.ma_coeffs,
            "sigma2": self.sigma2,
            "loglik": self.loglik,
            "aic": self.aic,
            "bic": self.bic,
            "stderr": self.stderr,
        })

    @classmethod
    def from_json(cls, path) -> "ArimaModel":
        doc = modeldoc.load(path, "arima-model")
        spec = ArimaSpec(**doc["spec"])
        return cls(
            spec=spec,
            intercept=doc["intercept"],
            ar_coeffs=np.asarray(doc["ar_coeffs"], dtype=float),
            ma_coeffs=np.asarray(doc["ma_coeffs"], dtype=float),
            sigma2=doc["sigma2"],
            loglik=doc["loglik"],
            aic=doc["aic"],
            bic=doc["bic"],
            residuals=np.zeros(0),
            stderr=np.asarray(doc["stderr"], dtype=float),
        )


def pacf_to_ar(r: np.ndarray) -> np.ndarray:
    """Map partial autocorrelations in (-1,1) to stationary AR coefficients."""
    phi = np.zeros(0)
    for k in range(len(r)):
        nxt = np.empty(k + 1)
        nxt[:k] = phi - r[k] * phi[::-1]
        nxt[k] = r[k]
        phi = nxt
    return phi


def _unconstrained_to_coeffs(u: np.ndarray, p: int, q: int):
    c = u[0]
    ar = pacf_to_ar(np.tanh(u[1:1 + p])) if p else np.zeros(0)
    # same recursion gives an invertible MA polynomial after a sign flip
    ma = -pacf_to_ar(np.tanh(u[1 + p:1 + p + q])) if q else np.zeros(0)
    return c, ar, ma


def _css_z(x, c, ar):
    """z_t = x_t - c - sum_i ar_i x_{t-i}, zero over the conditioned prefix."""
    p = len(ar)
    z = x - c
    if p:
        z = z.copy()
        acc = np.zeros(len(x) - p)
        for i in range(p):
            acc += ar[i] * x[p - 1 - i: len(x) - 1 - i]
        z[p:] = x[p:] - c - acc
        z[:p] = 0.0
    return z


def _neg_loglik(u, x, p, q):
    c, ar, ma = _unconstrained_to_coeffs(u, p, q)
    z = _css_z(x, c, ar)
    if q:
        eps = signal.lfilter([1.0], np.concatenate(([1.0], ma)), z)
    else:
        eps = z
    eps = eps[p:]
    n = len(eps)
    ssr = eps @ eps
    sigma2 = max(ssr / n, 1e-300)
    return 0.5 * n * (np.log(2.0 * np.pi * sigma2) + 1.0)


def _loglik_at(x, c, ar, ma, p):
    z = _css_z(x, c, ar)
    if len(ma):
        eps = signal.lfilter([1.0], np.concatenate(([1.0], ma)), z)
    else:
        eps = z
    tail = eps[p:]
    n = len(tail)
    sigma2 = max(tail @ tail / n, 1e-300)
    ll = -0.5 * n * (np.log(2.0 * np.pi * sigma2) + 1.0)
    return ll, sigma2, eps


def _coeff_stderr(x, c, ar, ma, p):
    """Numeric-Hessian standard errors in coefficient space."""
    theta0 = np.concatenate(([c], ar, ma))
    k = len(theta0)

    def nll(theta):
        cc = theta[0]
        aa = theta[1:1 + len(ar)]
        mm = theta[1 + len(ar):]
        ll, _, _ = _loglik_at(x, cc, aa, mm, p)
        return -ll

    h = 1e-4 * np.maximum(np.abs(theta0), 1.0)
    hess = np.zeros((k, k))
    f0 = nll(theta0)
    for i in range(k):
        for j in range(i, k):
            ei = np.zeros(k); ei[i] = h[i]
            ej = np.zeros(k); ej[j] = h[j]
            if i == j:
                hess[i, i] = (nll(theta0 + ei) - 2 * f0 + nll(theta0 - ei)) / h[i] ** 2
            else:
                val = (nll(theta0 + ei + ej) - nll(theta0 + ei - ej)
                       - nll(theta0 - ei + ej) + nll(theta0 - ei - ej))
                hess[i, j] = hess[j, i] = val / (4 * h[i] * h[j])
    try:
        cov = np.linalg.pinv(hess)
        se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    except np.linalg.LinAlgError:
        se = np.full(k, np.nan)
    return se


def fit(series, spec: ArimaSpec) -> ArimaModel:
    """Fit by conditional maximum likelihood on the d-times differenced data."""
    values = series.values if isinstance(series, PriceSeries) else np.asarray(series, dtype=float)
    if len(values) == 0:
        raise InsufficientDataError("cannot fit on an empty series")
    x = difference(values, spec.d)
    p, q = spec.p, spec.q
    if len(x) <= 10 * (p + q + 1):
        raise InsufficientDataError(
            f"need more than {10 * (p + q + 1)} differenced observations "
            f"for ARMA({p},{q}), got {len(x)}"
        )
    if np.ptp(x) == 0.0:
        raise DegenerateSeriesError("differenced series is constant")

    u0 = np.zeros(1 + p + q)
    u0[0] = x.mean()
    res = optimize.minimize(
        _neg_loglik, u0, args=(x, p, q), method="L-BFGS-B",
        options={"maxiter": 500},
    )
    if not res.success and not np.isfinite(res.fun):
        raise OptimizationError(
            "ARMA likelihood optimization did not converge",
            diagnostics={"message": res.message, "best_fun": float(res.fun),
                         "best_u": res.x.tolist(), "iterations": int(res.nit)},
        )
    c, ar, ma = _unconstrained_to_coeffs(res.x, p, q)
    ll, sigma2, eps = _loglik_at(x, c, ar, ma, p)
    n = len(x) - p
    k = 1 + p + q + 1  # intercept + coefficients + innovation variance
    se = _coeff_stderr(x, c, ar, ma, p)
    return ArimaModel(
        spec=spec,
        intercept=float(c),
        ar_coeffs=ar,
        ma_coeffs=ma,
        sigma2=float(sigma2),
        loglik=float(ll),
        aic=float(2 * k - 2 * ll),
        bic=float(k * np.log(n) - 2 * ll),
        residuals=eps,
        stderr=se,
    )


def select_order(series, max_p: int = 3, max_q: int = 3) -> ArimaSpec:
    """Smallest d that passes the unit-root test, then BIC over the (p,q) grid.

    Ties break toward smaller p+q, then smaller p. If every candidate fit
    fails, (1, d, 1) is returned.
    """
    if not 0 <= max_p <= 5 or not 0 <= max_q <= 5:
        raise ValueError("max_p and max_q must be in 0..5")
    values = series.values if isinstance(series, PriceSeries) else np.asarray(series, dtype=float)

    d = MAX_DIFF
    for cand in range(MAX_DIFF + 1):
        if adf_test(difference(values, cand)).reject_at_5pct:
            d = cand
            break

    best = None
    for p in range(max_p + 1):
        for q in range(max_q + 1):
            spec = ArimaSpec(p, d, q, intercept_only=(p + q == 0))
            try:
                model = fit(values, spec)
            except (ValueError, OptimizationError):
                continue
            key = (model.bic, p + q, p)
            if best is None or key < best[0]:
                best = (key, spec)
    if best is None:
        return ArimaSpec(1, d, 1)
    return best[1]


def forecast(model: ArimaModel, history, horizon: int) -> np.ndarray:
    """Mean forecasts on the original scale.

    One step ahead on the differenced scale is
    c + sum_i ar_i * c_{t-i} + sum_j ma_j * eps_{t-j}; beyond the sample,
    future innovations are replaced by their zero mean and forecasts feed
    back into the recursion. Differencing is then inverted cumulatively.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    hist = np.asarray(history, dtype=float)
    spec = model.spec
    p, q, d = spec.p, spec.q, spec.d
    x = difference(hist, d) if d else hist
    if len(x) < max(p, 1):
        raise InsufficientDataError(
            f"history must supply at least {max(p, 1)} differenced values"
        )
    eps = css_residuals_for(model, x)

    xs = list(x)
    es = list(eps)
    out = []
    for _ in range(horizon):
        val = model.intercept
        for i in range(p):
            val += model.ar_coeffs[i] * xs[-1 - i]
        for j in range(q):
            val += model.ma_coeffs[j] * es[-1 - j]
        out.append(val)
        xs.append(val)
        es.append(0.0)
    fc = np.asarray(out)

    # undo differencing: prepend the last observed value at each level
    for level in range(d, 0, -1):
        base = hist
        for _ in range(level - 1):
            base = base[1:] - base[:-1]
        fc = base[-1] + np.cumsum(fc)
    return fc


def css_residuals_for(model: ArimaModel, x) -> np.ndarray:
    """Innovations implied by a fitted model on a differenced series."""
    z = _css_z(np.asarray(x, dtype=float), model.intercept, model.ar_coeffs)
    if model.spec.q:
        return signal.lfilter(
            [1.0], np.concatenate(([1.0], model.ma_coeffs)), z
        )
    return z


def rolling_one_step(values, spec: ArimaSpec, start: int,
                     refit_every: int = 20) -> np.ndarray:
    """One-step-ahead forecasts for values[start:], refit every `refit_every`.

    The forecast for index t uses only values[:t]. Parameters are held
    fixed between refits; only the conditioning history advances.
    """
    x = np.asarray(values, dtype=float)
    n = len(x)
    if not 0 < start < n:
        raise ValueError("start must lie inside the series")
    if refit_every < 1:
        raise ValueError("refit_every must be >= 1")
    out = np.empty(n - start)
    model = None
    for k, t in enumerate(range(start, n)):
        if model is None or k % refit_every == 0:
            model = fit(x[:t], spec)
        out[k] = forecast(model, x[:t], 1)[0]
    return out
