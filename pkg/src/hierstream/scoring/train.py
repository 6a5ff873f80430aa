"""AdamW training loop for the recurrent scorer.

Targets come straight from annotations: per-frame state classes plus
histogram-encoded progress for frames inside step/substep instances.
Training is single-threaded and fully determined by the seed.
"""

from __future__ import annotations

import numpy as np

from ..core import AnnotationSet, HierarchyLevel, frame_timestamps
from .histogram import histogram_target
from .rnn import ScorerConfig, ScorerModel
from .targets import instance_at, progress_target, state_target


def build_frame_targets(a: AnnotationSet, cfg: ScorerConfig) -> dict[str, np.ndarray]:
    """Per-frame training targets for one video at its fps grid."""
    ts = frame_timestamps(a.duration, a.fps)
    T = len(ts)
    bins = cfg.histogram.bins
    state = np.zeros(T, dtype=np.int64)
    step_target = np.zeros((T, bins))
    sub_target = np.zeros((T, bins))
    step_mask = np.zeros(T, dtype=bool)
    sub_mask = np.zeros(T, dtype=bool)
    for t_idx, t in enumerate(ts):
        state[t_idx] = state_target(t, a)
        for level, mask, target in (
            (HierarchyLevel.STEP, step_mask, step_target),
            (HierarchyLevel.SUBSTEP, sub_mask, sub_target),
        ):
            iv = instance_at(t, a, level)
            if iv is not None and iv.end > iv.start:
                mask[t_idx] = True
                target[t_idx] = histogram_target(progress_target(t, iv), cfg.histogram)
    return {
        "timestamps": ts,
        "state": state,
        "step_target": step_target,
        "step_mask": step_mask,
        "sub_target": sub_target,
        "sub_mask": sub_mask,
    }


class AdamW:
    """Decoupled weight decay Adam; bias-corrected, beta1=0.9 beta2=0.999."""

    def __init__(self, params: dict[str, np.ndarray], lr: float, weight_decay: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.wd = weight_decay
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for k in sorted(params):
            g = grads[k]
            self.m[k] = self.beta1 * self.m[k] + (1 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1 - self.beta2) * g * g
            m_hat = self.m[k] / bc1
            v_hat = self.v[k] / bc2
            params[k] -= self.lr * (m_hat / (np.sqrt(v_hat) + self.eps) + self.wd * params[k])


def _video_grads(
    model: ScorerModel, features: np.ndarray, targets: dict[str, np.ndarray]
) -> tuple[float, dict[str, np.ndarray], int]:
    """Windowed forward/backward over one video; hidden state carries across
    windows but gradients do not (truncated BPTT)."""
    W = model.cfg.bptt_window
    T = features.shape[0]
    total = {k: np.zeros_like(v) for k, v in model.params.items()}
    loss_sum, n_windows = 0.0, 0
    h = model.zero_state()
    for start in range(0, T, W):
        stop = min(start + W, T)
        cache = model.forward(features[start:stop], h0=h)
        loss, d_logits = model.window_loss(
            cache,
            targets["state"][start:stop],
            targets["step_target"][start:stop],
            targets["step_mask"][start:stop],
            targets["sub_target"][start:stop],
            targets["sub_mask"][start:stop],
        )
        grads = model.backward(cache, d_logits, h0=h)
        for k in total:
            total[k] += grads[k]
        loss_sum += loss
        n_windows += 1
        h = cache["h_last"]
    return loss_sum, total, n_windows


def train_scorer(
    features: list[np.ndarray],
    annotations: list[AnnotationSet],
    cfg: ScorerConfig,
    seed: int = 0,
) -> tuple[ScorerModel, list[float]]:
    """Train the scorer; returns the model and the per-epoch mean loss trace."""
    if not features or not annotations:
        raise ValueError("empty training set")
    if len(features) != len(annotations):
        raise ValueError(f"{len(features)} feature sequences vs {len(annotations)} annotation sets")

    feats = [np.asarray(f, dtype=np.float64) for f in features]
    for f, a in zip(feats, annotations):
        if f.ndim != 2 or f.shape[1] != cfg.feature_dim:
            raise ValueError(f"features for {a.video_id}: expected dim {cfg.feature_dim}, got {f.shape}")
        expected = len(frame_timestamps(a.duration, a.fps))
        if f.shape[0] != expected:
            raise ValueError(
                f"features for {a.video_id}: {f.shape[0]} frames, annotations imply {expected}"
            )

    targets = [build_frame_targets(a, cfg) for a in annotations]
    model = ScorerModel.init(cfg, seed=seed)
    opt = AdamW(model.params, lr=cfg.learning_rate, weight_decay=cfg.weight_decay)
    rng = np.random.default_rng(seed)

    trace: list[float] = []
    n = len(feats)
    for _epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss, epoch_windows = 0.0, 0
        for batch_start in range(0, n, cfg.batch_size):
            batch = order[batch_start: batch_start + cfg.batch_size]
            acc = {k: np.zeros_like(v) for k, v in model.params.items()}
            batch_windows = 0
            for vid in batch:
                loss_sum, grads, n_windows = _video_grads(model, feats[vid], targets[vid])
                for k in acc:
                    acc[k] += grads[k]
                epoch_loss += loss_sum
                epoch_windows += n_windows
                batch_windows += n_windows
            for k in acc:
                acc[k] /= max(1, batch_windows)
            opt.step(model.params, acc)
        trace.append(epoch_loss / max(1, epoch_windows))
    return model, trace
