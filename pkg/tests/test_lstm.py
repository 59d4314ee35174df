import numpy as np
import pytest

from driftscope import lstm


def numeric_grads(params, x, y, eps=1e-6):
    out = {}
    for k, mat in params.items():
        g = np.zeros_like(mat)
        for i in range(mat.size):
            orig = mat.flat[i]
            mat.flat[i] = orig + eps
            lp, _ = lstm.loss_and_grads(params, x, y)
            mat.flat[i] = orig - eps
            lm, _ = lstm.loss_and_grads(params, x, y)
            mat.flat[i] = orig
            g.flat[i] = (lp - lm) / (2 * eps)
        out[k] = g
    return out


class TestGradients:
    def test_bptt_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        params = lstm.init_params(hidden=4, seed=7)
        x = rng.normal(size=(3, 5))
        y = rng.normal(size=3)
        _, analytic = lstm.loss_and_grads(params, x, y)
        numeric = numeric_grads(params, x, y)
        for k in params:
            denom = max(np.abs(numeric[k]).max(), 1e-8)
            rel = np.abs(analytic[k] - numeric[k]).max() / denom
            assert rel <= 1e-4, f"gradient mismatch in {k}: {rel}"

    def test_loss_is_mse(self):
        params = lstm.init_params(hidden=3, seed=0)
        x = np.array([[0.5, -0.2], [1.0, 0.3]])
        y = np.array([0.1, 0.4])
        y_hat, _ = lstm.forward(params, x)
        loss, _ = lstm.loss_and_grads(params, x, y)
        assert loss == pytest.approx(float(np.mean((y_hat - y) ** 2)))


class TestForward:
    def test_first_step_ignores_later_inputs(self):
        params = lstm.init_params(hidden=5, seed=2)
        a = np.array([[0.7, 1.0, -1.0]])
        b = np.array([[0.7, -3.0, 2.0]])
        _, (_, steps_a, _) = lstm.forward(params, a)
        _, (_, steps_b, _) = lstm.forward(params, b)
        # states after step 0 agree because hidden/cell start at zero
        np.testing.assert_allclose(steps_a[0][6], steps_b[0][6])

    def test_batch_rows_independent(self):
        params = lstm.init_params(hidden=4, seed=5)
        x = np.random.default_rng(1).normal(size=(6, 7))
        full, _ = lstm.forward(params, x)
        solo = np.concatenate([lstm.forward(params, x[i:i + 1])[0] for i in range(6)])
        np.testing.assert_allclose(full, solo, atol=1e-12)

    def test_forget_bias_initialized_to_one(self):
        params = lstm.init_params(hidden=6, seed=0)
        assert np.all(params["b"][6:12] == 1.0)
        assert np.all(params["b"][:6] == 0.0)


class TestClipping:
    def test_large_gradients_scaled_to_norm(self):
        grads = {"a": np.array([3.0, 4.0]), "b": np.array([0.0])}
        lstm.clip_gradients(grads, 1.0)
        total = np.sqrt(sum((g ** 2).sum() for g in grads.values()))
        assert total == pytest.approx(1.0)

    def test_small_gradients_untouched(self):
        grads = {"a": np.array([0.3, 0.4])}
        lstm.clip_gradients(grads, 5.0)
        np.testing.assert_array_equal(grads["a"], [0.3, 0.4])


class TestRegressor:
    def test_memorizes_small_dataset(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(8, 6))
        y = rng.normal(size=8)
        model = lstm.LstmRegressor(hidden=16, epochs=400, lr=1e-2, batch=8, seed=1)
        model.fit(x, y)
        mse = float(np.mean((model.predict(x) - y) ** 2))
        assert mse <= 1e-3

    def test_learns_last_element_rule(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(200, 5))
        y = x[:, -1]
        model = lstm.LstmRegressor(hidden=16, epochs=60, lr=1e-2, batch=32, seed=1)
        model.fit(x, y)
        resid = model.predict(x) - y
        assert float(np.mean(resid ** 2)) < 0.05 * float(np.var(y))

    def test_deterministic_for_fixed_seed(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(30, 4))
        y = rng.normal(size=30)
        a = lstm.LstmRegressor(hidden=8, epochs=5, seed=3).fit(x, y)
        b = lstm.LstmRegressor(hidden=8, epochs=5, seed=3).fit(x, y)
        assert a.loss_history == b.loss_history
        np.testing.assert_array_equal(a.predict(x), b.predict(x))

    def test_loss_history_trends_down(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=(64, 6))
        y = x[:, 0] + 0.5 * x[:, -1]
        model = lstm.LstmRegressor(hidden=8, epochs=40, seed=1).fit(x, y)
        assert model.loss_history[-1] < model.loss_history[0]

    def test_predict_before_fit_raises(self):
        with pytest.raises(RuntimeError):
            lstm.LstmRegressor().predict(np.ones((1, 3)))

    def test_standardization_round_trip(self):
        # constant target should be recoverable regardless of its scale
        rng = np.random.default_rng(8)
        x = rng.normal(size=(40, 4))
        y = np.full(40, 123.456)
        model = lstm.LstmRegressor(hidden=8, epochs=10, seed=1).fit(x, y)
        np.testing.assert_allclose(model.predict(x), y, atol=1e-6)
