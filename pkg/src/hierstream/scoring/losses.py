"""Soft-target cross-entropy with a log-sum-exp stabilized softmax."""

from __future__ import annotations

import numpy as np


def log_softmax(logits: np.ndarray) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax(logits: np.ndarray) -> np.ndarray:
    return np.exp(log_softmax(logits))


def soft_cross_entropy(logits: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Cross-entropy of a probability target against logits.

    Returns (loss, gradient wrt logits). The gradient is the classic
    softmax(logits) - target, which also serves as the finite-difference
    oracle's reference point.
    """
    logits = np.asarray(logits, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if logits.shape != target.shape:
        raise ValueError(f"shape mismatch: logits {logits.shape} vs target {target.shape}")
    lsm = log_softmax(logits)
    loss = float(-(target * lsm).sum())
    grad = np.exp(lsm) - target
    return loss, grad
