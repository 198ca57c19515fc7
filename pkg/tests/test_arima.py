import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oilcast.arima import (
    ArimaModel,
    ArimaSpec,
    fit,
    forecast,
    pacf_to_ar,
    rolling_one_step,
    select_order,
)
from oilcast.errors import DegenerateSeriesError, InsufficientDataError


def simulate_arma(ar, ma, n, seed, c=0.0, burn=200):
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal(n + burn)
    x = np.zeros(n + burn)
    p, q = len(ar), len(ma)
    for t in range(max(p, q), n + burn):
        x[t] = c + eps[t]
        for i in range(p):
            x[t] += ar[i] * x[t - 1 - i]
        for j in range(q):
            x[t] += ma[j] * eps[t - 1 - j]
    return x[burn:]


def make_model(spec, c, ar, ma):
    return ArimaModel(
        spec=spec,
        intercept=c,
        ar_coeffs=np.asarray(ar, dtype=float),
        ma_coeffs=np.asarray(ma, dtype=float),
        sigma2=1.0,
        loglik=0.0,
        aic=0.0,
        bic=0.0,
        residuals=np.zeros(0),
        stderr=np.zeros(1 + len(ar) + len(ma)),
    )


class TestSpec:
    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            ArimaSpec(-1, 0, 0)

    def test_no_structure_needs_flag(self):
        with pytest.raises(ValueError):
            ArimaSpec(0, 0, 0)
        ArimaSpec(0, 0, 0, intercept_only=True)


class TestFit:
    def test_ar1_recovery(self):
        x = simulate_arma([0.6], [], 2000, seed=42)
        model = fit(x, ArimaSpec(1, 0, 0))
        assert 0.5 <= model.ar_coeffs[0] <= 0.7

    def test_ma1_recovery(self):
        x = simulate_arma([], [0.4], 2000, seed=43)
        model = fit(x, ArimaSpec(0, 0, 1))
        assert 0.3 <= model.ma_coeffs[0] <= 0.5

    def test_empty_series_error(self):
        with pytest.raises(InsufficientDataError):
            fit(np.array([]), ArimaSpec(1, 0, 0))

    def test_short_series_error(self):
        with pytest.raises(InsufficientDataError):
            fit(np.arange(15.0), ArimaSpec(1, 0, 1))

    def test_constant_series_error(self):
        with pytest.raises(DegenerateSeriesError):
            fit(np.full(100, 7.0), ArimaSpec(1, 0, 0))

    def test_residual_length_and_mean(self):
        x = simulate_arma([0.5], [], 1500, seed=44)
        model = fit(x, ArimaSpec(1, 0, 0))
        assert len(model.residuals) == len(x)
        n = len(x)
        assert abs(model.residuals[model.spec.p:].mean()) < 3 * np.sqrt(model.sigma2 / n)

    def test_sigma2_positive_and_criteria_consistent(self):
        x = simulate_arma([0.5], [0.2], 1000, seed=45)
        model = fit(x, ArimaSpec(1, 0, 1))
        assert model.sigma2 > 0
        k = 1 + 1 + 1 + 1  # intercept, one AR, one MA, variance
        assert model.aic == pytest.approx(2 * k - 2 * model.loglik)
        n = len(x) - model.spec.p
        assert model.bic == pytest.approx(k * np.log(n) - 2 * model.loglik)

    def test_stationarity_invariants(self):
        # near-unit-root data must still produce an admissible model
        x = np.cumsum(np.random.default_rng(46).standard_normal(600)) * 0.98
        model = fit(x, ArimaSpec(2, 0, 1))
        ar_poly = np.concatenate(([1.0], -model.ar_coeffs))
        ma_poly = np.concatenate(([1.0], model.ma_coeffs))
        assert np.all(np.abs(np.roots(ar_poly)) < 1.0 + 1e-8)
        assert np.all(np.abs(np.roots(ma_poly)) < 1.0 + 1e-8)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_parameter_recovery_within_2se(self, seed):
        # refit on data simulated from a fitted shape; 5-seed property
        x = simulate_arma([0.55], [0.3], 3000, seed=seed, c=0.1)
        model = fit(x, ArimaSpec(1, 0, 1))
        se_ar = model.stderr[1]
        se_ma = model.stderr[2]
        assert abs(model.ar_coeffs[0] - 0.55) < 2 * se_ar + 0.02
        assert abs(model.ma_coeffs[0] - 0.3) < 2 * se_ma + 0.02


class TestSelectOrder:
    def test_ar2_grid(self):
        x = simulate_arma([0.5, -0.3], [], 2000, seed=47)
        spec = select_order(x, 3, 3)
        assert spec.d == 0
        assert spec.p in (1, 2, 3)

    def test_random_walk_gets_d1(self):
        rw = np.cumsum(np.random.default_rng(48).standard_normal(800))
        assert select_order(rw, 2, 2).d == 1

    def test_white_noise_intercept_only(self):
        wn = np.random.default_rng(49).standard_normal(1500)
        spec = select_order(wn, 2, 2)
        assert (spec.p, spec.q) == (0, 0)
        assert spec.intercept_only

    def test_grid_bounds(self):
        with pytest.raises(ValueError):
            select_order(np.arange(100.0), 6, 1)


class TestForecast:
    def test_one_step_ar1(self):
        model = make_model(ArimaSpec(1, 0, 0), 0.0, [0.5], [])
        out = forecast(model, [0.0, 1.0, 2.0], 1)
        assert out[0] == pytest.approx(1.0)

    def test_two_step_recursion(self):
        model = make_model(ArimaSpec(1, 0, 0), 0.0, [0.5], [])
        out = forecast(model, [0.0, 1.0, 2.0], 2)
        assert out[1] == pytest.approx(0.5)

    def test_zero_coefficients_returns_intercept(self):
        model = make_model(ArimaSpec(1, 0, 0), 3.25, [0.0], [])
        assert np.allclose(forecast(model, [1.0, 2.0], 4), 3.25)

    def test_horizon_range_error(self):
        model = make_model(ArimaSpec(1, 0, 0), 0.0, [0.5], [])
        with pytest.raises(ValueError):
            forecast(model, [1.0, 2.0], 0)

    def test_ma_term_uses_residual(self):
        # d=0, pure MA(1): one-step forecast is c + theta * eps_T
        model = make_model(ArimaSpec(0, 0, 1), 0.0, [], [0.4])
        hist = [1.0, -1.0, 2.0]
        # residual recursion with zero pre-sample: e1=1, e2=-1.4, e3=2.56
        out = forecast(model, hist, 2)
        assert out[0] == pytest.approx(0.4 * 2.56)
        assert out[1] == pytest.approx(0.0)

    def test_level_shift_invariance_d1(self):
        x = np.cumsum(np.random.default_rng(50).standard_normal(400)) + 60
        model = fit(x, ArimaSpec(1, 1, 0))
        base = forecast(model, x, 5)
        shifted = forecast(model, x + 250.0, 5)
        assert np.allclose(base + 250.0, shifted, atol=1e-8)

    def test_integration_back_to_levels(self):
        model = make_model(ArimaSpec(0, 1, 0, intercept_only=True), 0.5, [], [])
        out = forecast(model, [10.0, 11.0], 3)
        assert np.allclose(out, [11.5, 12.0, 12.5])


class TestRolling:
    def test_shapes_and_refit_schedule(self):
        x = np.cumsum(np.random.default_rng(51).standard_normal(300)) + 50
        out = rolling_one_step(x, ArimaSpec(1, 1, 0), start=260, refit_every=20)
        assert out.shape == (40,)
        assert np.all(np.isfinite(out))

    def test_start_bounds(self):
        with pytest.raises(ValueError):
            rolling_one_step(np.arange(50.0), ArimaSpec(1, 0, 0), start=0)

    def test_tracks_series_level(self):
        x = np.cumsum(np.random.default_rng(52).standard_normal(320)) + 80
        out = rolling_one_step(x, ArimaSpec(1, 1, 0), start=300)
        assert np.max(np.abs(out - x[300:])) < 6.0


class TestSerialization:
    def test_round_trip(self, tmp_path):
        x = simulate_arma([0.4], [0.2], 800, seed=53)
        model = fit(np.cumsum(x) + 50, ArimaSpec(1, 1, 1))
        path = tmp_path / "model.json"
        model.to_json(path)
        back = ArimaModel.from_json(path)
        assert back.spec == model.spec
        assert np.allclose(back.ar_coeffs, model.ar_coeffs)
        assert np.allclose(back.ma_coeffs, model.ma_coeffs)
        assert back.sigma2 == pytest.approx(model.sigma2)
        hist = np.cumsum(simulate_arma([0.4], [0.2], 100, seed=54)) + 50
        assert np.allclose(forecast(model, hist, 3), forecast(back, hist, 3))


class TestPacfTransform:
    @given(st.lists(st.floats(-0.99, 0.99), min_size=1, max_size=5))
    @settings(max_examples=50, deadline=None)
    def test_always_stationary(self, rs):
        phi = pacf_to_ar(np.array(rs))
        roots = np.roots(np.concatenate(([1.0], -phi)))
        assert np.all(np.abs(roots) < 1.0 + 1e-9)

    def test_single_lag_identity(self):
        assert pacf_to_ar(np.array([0.37]))[0] == pytest.approx(0.37)
