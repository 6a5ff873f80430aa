import numpy as np
import pytest

from hierstream.scoring.histogram import HistogramConfig
from hierstream.scoring.rnn import ScorerConfig, ScorerModel, infer_scores
from oracles import numeric_gradient, relative_error


def small_cfg(**overrides):
    base = dict(feature_dim=3, recurrent_layers=2, hidden_dim=6,
                histogram=HistogramConfig(bins=5), bptt_window=32)
    base.update(overrides)
    return ScorerConfig(**base)


def random_targets(rng, T, bins):
    return (
        rng.integers(0, 3, T),
        rng.dirichlet(np.ones(bins), T),
        rng.random(T) < 0.6,
        rng.dirichlet(np.ones(bins), T),
        rng.random(T) < 0.6,
    )


class TestForward:
    def test_one_output_per_frame(self):
        model = ScorerModel.init(small_cfg(), seed=0)
        scores = infer_scores(model, np.zeros((7, 3)), fps=2.0)
        assert len(scores) == 7
        assert scores[3].timestamp == pytest.approx(1.5)

    def test_distributions_normalized(self):
        model = ScorerModel.init(small_cfg(), seed=1)
        rng = np.random.default_rng(0)
        for fs in infer_scores(model, rng.normal(0, 1, (9, 3)), fps=1.0):
            assert abs(fs.state_probs.sum() - 1.0) <= 1e-6
            assert abs(fs.step_progress_dist.sum() - 1.0) <= 1e-6
            assert abs(fs.substep_progress_dist.sum() - 1.0) <= 1e-6

    def test_zero_weights_give_uniform_heads(self):
        model = ScorerModel.zeros(small_cfg())
        fs = infer_scores(model, np.ones((4, 3)), fps=1.0)[2]
        np.testing.assert_allclose(fs.state_probs, 1 / 3, atol=1e-12)
        np.testing.assert_allclose(fs.step_progress_dist, 1 / 5, atol=1e-12)

    def test_prefix_property_exact(self):
        model = ScorerModel.init(small_cfg(), seed=2)
        rng = np.random.default_rng(3)
        feats = rng.normal(0, 1, (20, 3))
        full = infer_scores(model, feats, fps=1.0)
        for cut in (1, 7, 13, 20):
            prefix = infer_scores(model, feats[:cut], fps=1.0)
            for a, b in zip(prefix, full[:cut]):
                np.testing.assert_array_equal(a.state_probs, b.state_probs)
                np.testing.assert_array_equal(a.step_progress_dist, b.step_progress_dist)
                np.testing.assert_array_equal(a.substep_progress_dist, b.substep_progress_dist)

    def test_feature_dim_checked(self):
        model = ScorerModel.init(small_cfg(), seed=0)
        with pytest.raises(ValueError):
            model.forward(np.zeros((4, 5)))


class TestGradients:
    def test_full_model_gradcheck(self):
        rng = np.random.default_rng(7)
        for trial in range(8):
            D = int(rng.integers(2, 5))
            H = int(rng.integers(3, 9))
            L = int(rng.integers(1, 4))
            T = int(rng.integers(2, 13))
            cfg = ScorerConfig(feature_dim=D, recurrent_layers=L, hidden_dim=H,
                               histogram=HistogramConfig(bins=4), bptt_window=T + 1)
            model = ScorerModel.init(cfg, seed=trial)
            feats = rng.normal(0, 1, (T, D))
            targets = random_targets(rng, T, 4)

            cache = model.forward(feats)
            _, d_logits = model.window_loss(cache, *targets)
            grads = model.backward(cache, d_logits)

            def loss_fn():
                c = model.forward(feats)
                return model.window_loss(c, *targets)[0]

            for name, param in model.params.items():
                numeric = numeric_gradient(loss_fn, param)
                assert relative_error(grads[name], numeric) < 1e-3, name

    def test_truncation_stops_gradient_at_window_edge(self):
        # Backward with a carried-in hidden state must not touch gradients
        # of the frames that produced it.
        cfg = small_cfg()
        model = ScorerModel.init(cfg, seed=4)
        rng = np.random.default_rng(5)
        feats = rng.normal(0, 1, (6, 3))
        targets = random_targets(rng, 3, 5)

        first = model.forward(feats[:3])
        second = model.forward(feats[3:], h0=first["h_last"])
        _, d_logits = model.window_loss(second, *targets)
        grads = model.backward(second, d_logits, h0=first["h_last"])
        assert all(np.isfinite(g).all() for g in grads.values())


class TestSerialization:
    def test_save_load_round_trip(self, tmp_path):
        model = ScorerModel.init(small_cfg(), seed=9)
        path = tmp_path / "model.npz"
        model.save(path)
        loaded = ScorerModel.load(path)
        assert loaded.cfg.hidden_dim == model.cfg.hidden_dim
        assert loaded.cfg.histogram == model.cfg.histogram
        for k in model.params:
            np.testing.assert_array_equal(model.params[k], loaded.params[k])
        feats = np.random.default_rng(1).normal(0, 1, (5, 3))
        a = infer_scores(model, feats, fps=1.0)
        b = infer_scores(loaded, feats, fps=1.0)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.state_probs, y.state_probs)


def test_config_rejects_nonpositive_dims():
    with pytest.raises(ValueError):
        ScorerConfig(feature_dim=0)
    with pytest.raises(ValueError):
        ScorerConfig(feature_dim=4, hidden_dim=-1)
