import math

import numpy as np
import pytest

from hierstream.scoring.losses import log_softmax, soft_cross_entropy, softmax
from oracles import numeric_gradient, relative_error


def test_uniform_logits_one_hot_target():
    loss, _ = soft_cross_entropy(np.zeros(3), np.array([1.0, 0.0, 0.0]))
    assert loss == pytest.approx(math.log(3.0))


def test_zero_gradient_at_match():
    logits = np.array([1.0, -0.5, 2.0, 0.0])
    _, grad = soft_cross_entropy(logits, softmax(logits))
    np.testing.assert_allclose(grad, 0.0, atol=1e-12)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    for _ in range(20):
        logits = rng.normal(0, 2, 10)
        target = rng.dirichlet(np.ones(10))
        _, grad = soft_cross_entropy(logits, target)
        numeric = numeric_gradient(lambda: soft_cross_entropy(logits, target)[0], logits)
        assert relative_error(grad, numeric) < 1e-4


def test_large_logits_stay_finite():
    loss, grad = soft_cross_entropy(np.array([1e4, -1e4, 0.0]), np.array([0.0, 1.0, 0.0]))
    assert np.isfinite(loss) and np.all(np.isfinite(grad))


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        soft_cross_entropy(np.zeros(3), np.zeros(4))


def test_log_softmax_normalizes():
    x = np.random.default_rng(0).normal(0, 3, (5, 7))
    probs = np.exp(log_softmax(x))
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-12)
