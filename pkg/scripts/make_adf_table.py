#!/usr/bin/env python3
"""Regenerate the bundled unit-root test quantile table.

Simulates the constant-only Dickey-Fuller t-statistic distribution under
the random-walk null and writes the quantile grid used for p-value
interpolation to src/oilcast/assets/adf_quantiles.json.

Deterministic; rerunning reproduces the committed asset byte for byte.
"""

import json
import pathlib

import numpy as np

REPS = 200_000
T = 1_500
CHUNK = 10_000
SEED = 20240817

PERCENTILES = [
    0.1, 0.5, 1.0, 2.5, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0,
    60.0, 70.0, 80.0, 90.0, 95.0, 97.5, 99.0, 99.5, 99.9,
]


def df_tau_batch(rng, batch, t_len):
    """Constant-only DF t-statistics for `batch` simulated random walks."""
    y = np.cumsum(rng.standard_normal((batch, t_len)), axis=1)
    x = y[:, :-1]
    dy = np.diff(y, axis=1)
    n = t_len - 1
    xc = x - x.mean(axis=1, keepdims=True)
    dc = dy - dy.mean(axis=1, keepdims=True)
    sxx = np.sum(xc * xc, axis=1)
    rho = np.sum(xc * dc, axis=1) / sxx
    resid = dc - rho[:, None] * xc
    s2 = np.sum(resid * resid, axis=1) / (n - 2)
    se = np.sqrt(s2 / sxx)
    return rho / se


def main():
    rng = np.random.default_rng(SEED)
    taus = np.concatenate(
        [df_tau_batch(rng, CHUNK, T) for _ in range(REPS // CHUNK)]
    )
    qs = np.percentile(taus, PERCENTILES)
    table = {
        "description": "Quantiles of the constant-only Dickey-Fuller "
        "t-statistic under the random-walk null "
        f"(Monte Carlo, {REPS} replications, T={T})",
        "seed": SEED,
        "percentiles": [round(p / 100.0, 4) for p in PERCENTILES],
        "tau": [round(float(q), 5) for q in qs],
    }
    out = (
        pathlib.Path(__file__).resolve().parents[1]
        / "src" / "oilcast" / "assets" / "adf_quantiles.json"
    )
    out.write_text(json.dumps(table, indent=2) + "\n")
    print(f"wrote {out}")
    print(f"  5 pct quantile: {qs[4]:.3f} (asymptotic reference approx -2.86)")


if __name__ == "__main__":
    main()
