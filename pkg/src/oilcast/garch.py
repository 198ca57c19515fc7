"""GARCH(m,s) volatility modeling for mean-model residuals.

The conditional variance follows
sigma2_t = alpha0 + sum_i alpha_i a2_{t-i} + sum_j beta_j sigma2_{t-j}.
Estimation is Gaussian maximum likelihood. The optimizer works in an
unconstrained space: alpha0 through a log link, and the ARCH/GARCH
coefficients through a stick-breaking map that keeps every iterate
nonnegative with persistence strictly below one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, signal, stats

from . import modeldoc
from .errors import DegenerateSeriesError, InsufficientDataError, OptimizationError
from .timeseries import TestReport


@dataclass(frozen=True)
class GarchModel:
    alpha0: float
    alpha: np.ndarray
    beta: np.ndarray
    sigma2_path: np.ndarray
    loglik: float
    aic: float
    bic: float
    projected: bool = False

    def __post_init__(self):
        if self.alpha0 <= 0:
            raise ValueError("alpha0 must be positive")
        if np.any(self.alpha < 0) or np.any(self.beta < 0):
            raise ValueError("ARCH/GARCH coefficients must be nonnegative")
        if self.alpha.sum() + self.beta.sum() >= 1.0:
            raise ValueError("persistence must be below one")

    @property
    def m(self) -> int:
        return len(self.alpha)

    @property
    def s(self) -> int:
        return len(self.beta)

    @property
    def unconditional_variance(self) -> float:
        return self.alpha0 / (1.0 - self.alpha.sum() - self.beta.sum())

    def to_json(self, path) -> None:
        modeldoc.dump(path, "garch-model", {
            "alpha0": self.alpha0,
            "alpha": self.alpha,
            "beta": self.beta,
            "loglik": self.loglik,
            "aic": self.aic,
            "bic": self.bic,
            "projected": self.projected,
        })

    @classmethod
    def from_json(cls, path) -> "GarchModel":
        doc = modeldoc.load(path, "garch-model")
        return cls(
            alpha0=doc["alpha0"],
            alpha=np.asarray(doc["alpha"], dtype=float),
            beta=np.asarray(doc["beta"], dtype=float),
            sigma2_path=np.zeros(0),
            loglik=doc["loglik"],
            aic=doc["aic"],
            bic=doc["bic"],
            projected=doc["projected"],
        )


def lm_arch_test(residuals, lags: int) -> TestReport:
    """Engle LM test: regress squared residuals on their own lags.

    The statistic is n times the auxiliary regression R-squared, where n
    is the auxiliary sample size; chi-square with `lags` degrees of
    freedom under no-ARCH.
    """
    a = np.asarray(residuals, dtype=float)
    n = len(a)
    if lags < 1:
        raise ValueError("lags must be >= 1")
    if n <= 2 * lags + 1:
        raise InsufficientDataError(
            f"LM test with {lags} lags needs more than {2 * lags + 1} residuals, got {n}"
        )
    a2 = a * a
    if np.ptp(a2) == 0.0:
        raise DegenerateSeriesError("squared residuals are constant")
    y = a2[lags:]
    X = np.column_stack(
        [np.ones(n - lags)] + [a2[lags - k: n - k] for k in range(1, lags + 1)]
    )
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    tss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - resid @ resid / tss if tss > 0 else 0.0
    stat = (n - lags) * r2
    p = float(stats.chi2.sf(stat, lags))
    return TestReport(statistic=float(stat), p_value=p, lags_used=lags)


def _stick_break(u: np.ndarray) -> np.ndarray:
    """Map R^k to nonnegative coefficients with sum strictly below one."""
    g = 1.0 / (1.0 + np.exp(-u))
    out = np.empty(len(u))
    remaining = 1.0
    for i, gi in enumerate(g):
        out[i] = gi * remaining
        remaining -= out[i]
    return out


def _stick_break_inverse(p: np.ndarray) -> np.ndarray:
    u = np.empty(len(p))
    remaining = 1.0
    for i, pi in enumerate(p):
        frac = np.clip(pi / remaining, 1e-12, 1 - 1e-12)
        u[i] = np.log(frac / (1.0 - frac))
        remaining -= pi
    return u


def _sigma2_path(a2, alpha0, alpha, beta, backcast):
    """Conditional variance recursion; pre-sample a2 and sigma2 = backcast."""
    m, s = len(alpha), len(beta)
    a2_ext = np.concatenate((np.full(m, backcast), a2))
    driver = np.full(len(a2), alpha0)
    for i in range(m):
        driver += alpha[i] * a2_ext[m - 1 - i: m - 1 - i + len(a2)]
    if s == 0:
        return driver
    poly = np.concatenate(([1.0], -beta))
    zi = signal.lfiltic([1.0], poly, y=np.full(s, backcast))
    sig, _ = signal.lfilter([1.0], poly, driver, zi=zi)
    return sig


def _neg_loglik(u, a2, m, s, backcast):
    alpha0 = np.exp(u[0])
    coeffs = _stick_break(u[1:])
    sig = _sigma2_path(a2, alpha0, coeffs[:m], coeffs[m:], backcast)
    if np.any(sig <= 0.0):
        return 1e12
    return 0.5 * np.sum(np.log(2.0 * np.pi * sig) + a2 / sig)


def fit(residuals, m: int = 1, s: int = 1) -> GarchModel:
    """Gaussian MLE for GARCH(m,s) on mean-model residuals."""
    a = np.asarray(residuals, dtype=float)
    if m < 1 or s < 0:
        raise ValueError("need m >= 1 ARCH lags and s >= 0 GARCH lags")
    if len(a) < 100:
        raise InsufficientDataError(
            f"GARCH fit needs at least 100 residuals, got {len(a)}"
        )
    backcast = float(np.var(a))
    if backcast == 0.0:
        raise DegenerateSeriesError("residuals have zero variance")
    a2 = a * a

    start = np.concatenate((
        [0.05 * backcast],
        np.full(m, 0.1 / m),
        np.full(s, 0.8 / max(s, 1))[:s],
    ))
    u0 = np.empty(1 + m + s)
    u0[0] = np.log(start[0])
    u0[1:] = _stick_break_inverse(start[1:])

    res = optimize.minimize(
        _neg_loglik, u0, args=(a2, m, s, backcast), method="L-BFGS-B",
        options={"maxiter": 500},
    )
    if not np.isfinite(res.fun):
        raise OptimizationError(
            "GARCH likelihood optimization did not converge",
            diagnostics={"message": str(res.message), "best_fun": float(res.fun),
                         "iterations": int(res.nit)},
        )
    alpha0 = float(np.exp(res.x[0]))
    coeffs = _stick_break(res.x[1:])
    alpha, beta = coeffs[:m], coeffs[m:]
    sig = _sigma2_path(a2, alpha0, alpha, beta, backcast)
    ll = -0.5 * float(np.sum(np.log(2.0 * np.pi * sig) + a2 / sig))
    k = 1 + m + s
    n = len(a)
    return GarchModel(
        alpha0=alpha0,
        alpha=alpha,
        beta=beta,
        sigma2_path=sig,
        loglik=ll,
        aic=float(2 * k - 2 * ll),
        bic=float(k * np.log(n) - 2 * ll),
    )


def select_order(residuals, max_order: int = 2) -> tuple[int, int]:
    """BIC grid search over m, s in 1..max_order; ties favor smaller m+s."""
    best = None
    for m in range(1, max_order + 1):
        for s in range(1, max_order + 1):
            try:
                model = fit(residuals, m, s)
            except (ValueError, OptimizationError):
                continue
            key = (model.bic, m + s, m)
            if best is None or key < best[0]:
                best = (key, (m, s))
    if best is None:
        return (1, 1)
    return best[1]


def conditional_variances(model: GarchModel, residuals) -> np.ndarray:
    """One-step-ahead conditional variance for each residual position.

    Entry t depends only on residuals before t (pre-sample lags take the
    sample-variance backcast), so the path is safe to use as a forecast
    feature without lookahead.
    """
    a = np.asarray(residuals, dtype=float)
    if a.size == 0:
        raise InsufficientDataError("need at least one residual")
    return _sigma2_path(a ** 2, model.alpha0, model.alpha, model.beta,
                        backcast=float(np.var(a)))


def forecast_variance(model: GarchModel, last_resid2: float, last_sigma2: float,
                      horizon: int) -> np.ndarray:
    """Expected conditional variances for the next `horizon` steps.

    The supplied scalars seed every required lag. Beyond one step the
    unknown squared shocks are replaced by their conditional expectation,
    which is the variance forecast itself.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if last_resid2 < 0 or last_sigma2 < 0:
        raise ValueError("squared residual and variance seeds must be nonnegative")
    a2 = [last_resid2] * max(model.m, 1)
    sig = [last_sigma2] * max(model.s, 1)
    out = np.empty(horizon)
    for h in range(horizon):
        nxt = model.alpha0
        for i in range(model.m):
            nxt += model.alpha[i] * a2[-1 - i]
        for j in range(model.s):
            nxt += model.beta[j] * sig[-1 - j]
        out[h] = nxt
        a2.append(nxt)  # E[a^2] = sigma^2 past the sample edge
        sig.append(nxt)
    return out
