"""A small recurrent scorer: a stack of tanh (Elman) layers shared by three
linear heads (state class, step progress, substep progress).

All math is plain numpy with hand-written backpropagation; no autodiff.
The forward pass is strictly causal, so scores for frame t depend only on
frames 0..t and inference over a prefix equals the prefix of full-sequence
inference exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import FrameScores
from .histogram import HistogramConfig
from .losses import soft_cross_entropy, softmax


@dataclass(frozen=True)
class ScorerConfig:
    feature_dim: int
    recurrent_layers: int = 3
    hidden_dim: int = 768
    learning_rate: float = 3e-4
    weight_decay: float = 0.01
    batch_size: int = 16
    epochs: int = 30
    bptt_window: int = 64
    histogram: HistogramConfig = field(default_factory=HistogramConfig)
    # Per-head loss weights; defaults keep the three terms unweighted.
    state_weight: float = 1.0
    step_weight: float = 1.0
    substep_weight: float = 1.0

    def __post_init__(self) -> None:
        for name in ("feature_dim", "recurrent_layers", "hidden_dim",
                     "batch_size", "epochs", "bptt_window"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


class ScorerModel:
    """Parameter container plus forward/backward passes.

    Parameters live in a name -> ndarray dict. Layer l uses ``wx{l}`` (input
    projection), ``wh{l}`` (recurrence), ``b{l}``; the heads use
    ``w_state/b_state``, ``w_step/b_step``, ``w_sub/b_sub``.
    """

    def __init__(self, cfg: ScorerConfig, params: dict[str, np.ndarray]):
        self.cfg = cfg
        self.params = params

    # ------------------------------------------------------------------
    # construction / io
    # ------------------------------------------------------------------

    @classmethod
    def init(cls, cfg: ScorerConfig, seed: int = 0) -> "ScorerModel":
        rng = np.random.default_rng(seed)
        h, bins = cfg.hidden_dim, cfg.histogram.bins
        params: dict[str, np.ndarray] = {}
        for layer in range(cfg.recurrent_layers):
            in_dim = cfg.feature_dim if layer == 0 else h
            params[f"wx{layer}"] = rng.normal(0, 1.0 / np.sqrt(in_dim), (h, in_dim))
            params[f"wh{layer}"] = rng.normal(0, 1.0 / np.sqrt(h), (h, h))
            params[f"b{layer}"] = np.zeros(h)
        for name, out_dim in (("state", 3), ("step", bins), ("sub", bins)):
            params[f"w_{name}"] = rng.normal(0, 1.0 / np.sqrt(h), (out_dim, h))
            params[f"b_{name}"] = np.zeros(out_dim)
        return cls(cfg, params)

    @classmethod
    def zeros(cls, cfg: ScorerConfig) -> "ScorerModel":
        model = cls.init(cfg, seed=0)
        model.params = {k: np.zeros_like(v) for k, v in model.params.items()}
        return model

    def save(self, path) -> None:
        meta = dict(
            feature_dim=self.cfg.feature_dim,
            recurrent_layers=self.cfg.recurrent_layers,
            hidden_dim=self.cfg.hidden_dim,
            bins=self.cfg.histogram.bins,
            sigma=self.cfg.histogram.sigma,
        )
        np.savez(path, __meta__=np.array(list(meta.items()), dtype=object), **self.params)

    @classmethod
    def load(cls, path) -> "ScorerModel":
        data = np.load(path, allow_pickle=True)
        meta = dict(data["__meta__"].tolist())
        cfg = ScorerConfig(
            feature_dim=int(meta["feature_dim"]),
            recurrent_layers=int(meta["recurrent_layers"]),
            hidden_dim=int(meta["hidden_dim"]),
            histogram=HistogramConfig(bins=int(meta["bins"]), sigma=float(meta["sigma"])),
        )
        params = {k: data[k] for k in data.files if k != "__meta__"}
        return cls(cfg, params)

    def zero_state(self) -> list[np.ndarray]:
        return [np.zeros(self.cfg.hidden_dim) for _ in range(self.cfg.recurrent_layers)]

    # ------------------------------------------------------------------
    # forward
    # ------------------------------------------------------------------

    def forward(
        self, features: np.ndarray, h0: list[np.ndarray] | None = None
    ) -> dict[str, np.ndarray]:
        """Run the stack over a (T, D) feature window.

        Returns a cache holding hidden states and head logits; the cache
        feeds both inference and the backward pass.
        """
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[1] != self.cfg.feature_dim:
            raise ValueError(
                f"expected (T, {self.cfg.feature_dim}) features, got {features.shape}"
            )
        T = features.shape[0]
        L, H = self.cfg.recurrent_layers, self.cfg.hidden_dim
        p = self.params
        h_prev = [np.array(h, dtype=np.float64) for h in (h0 or self.zero_state())]
        hs = np.zeros((L, T, H))
        bins = self.cfg.histogram.bins
        state_logits = np.zeros((T, 3))
        step_logits = np.zeros((T, bins))
        sub_logits = np.zeros((T, bins))
        for t in range(T):
            inp = features[t]
            for layer in range(L):
                a = p[f"wx{layer}"] @ inp + p[f"wh{layer}"] @ h_prev[layer] + p[f"b{layer}"]
                h = np.tanh(a)
                hs[layer, t] = h
                h_prev[layer] = h
                inp = h
            # Heads run per frame: batched matmuls can round differently for
            # different sequence lengths, which would break the exact
            # prefix property of streaming inference.
            state_logits[t] = p["w_state"] @ inp + p["b_state"]
            step_logits[t] = p["w_step"] @ inp + p["b_step"]
            sub_logits[t] = p["w_sub"] @ inp + p["b_sub"]
        return {
            "features": features,
            "hidden": hs,
            "h_last": [hs[layer, -1].copy() for layer in range(L)] if T else h_prev,
            "state_logits": state_logits,
            "step_logits": step_logits,
            "sub_logits": sub_logits,
        }

    # ------------------------------------------------------------------
    # loss and gradients
    # ------------------------------------------------------------------

    def window_loss(
        self,
        cache: dict[str, np.ndarray],
        state_target: np.ndarray,
        step_target: np.ndarray,
        step_mask: np.ndarray,
        sub_target: np.ndarray,
        sub_mask: np.ndarray,
    ) -> tuple[float, dict[str, np.ndarray]]:
        """Loss over one window plus per-frame logit gradients.

        The state head is averaged over every frame; each progress head is
        averaged over the frames inside that level's instances only.
        """
        cfg = self.cfg
        T = cache["features"].shape[0]
        d_state = np.zeros_like(cache["state_logits"])
        d_step = np.zeros_like(cache["step_logits"])
        d_sub = np.zeros_like(cache["sub_logits"])

        loss = 0.0
        eye = np.eye(3)
        for t in range(T):
            l, g = soft_cross_entropy(cache["state_logits"][t], eye[state_target[t]])
            loss += cfg.state_weight * l / T
            d_state[t] = cfg.state_weight * g / T

        n_step = max(1, int(step_mask.sum()))
        for t in np.nonzero(step_mask)[0]:
            l, g = soft_cross_entropy(cache["step_logits"][t], step_target[t])
            loss += cfg.step_weight * l / n_step
            d_step[t] = cfg.step_weight * g / n_step

        n_sub = max(1, int(sub_mask.sum()))
        for t in np.nonzero(sub_mask)[0]:
            l, g = soft_cross_entropy(cache["sub_logits"][t], sub_target[t])
            loss += cfg.substep_weight * l / n_sub
            d_sub[t] = cfg.substep_weight * g / n_sub

        return loss, {"state": d_state, "step": d_step, "sub": d_sub}

    def backward(
        self,
        cache: dict[str, np.ndarray],
        d_logits: dict[str, np.ndarray],
        h0: list[np.ndarray] | None = None,
    ) -> dict[str, np.ndarray]:
        """Backpropagate logit gradients through heads and time.

        Gradients stop at the window boundary (truncated BPTT): the incoming
        hidden state h0 is treated as a constant.
        """
        p = self.params
        L, H = self.cfg.recurrent_layers, self.cfg.hidden_dim
        feats = cache["features"]
        hs = cache["hidden"]
        T = feats.shape[0]
        h_in = h0 or self.zero_state()

        grads = {k: np.zeros_like(v) for k, v in p.items()}
        top = hs[-1]
        d_top = np.zeros((T, H))
        for name in ("state", "step", "sub"):
            dl = d_logits[name]
            grads[f"w_{name}"] += dl.T @ top
            grads[f"b_{name}"] += dl.sum(axis=0)
            d_top += dl @ p[f"w_{name}"]

        dh_carry = [np.zeros(H) for _ in range(L)]
        for t in range(T - 1, -1, -1):
            dh = [np.zeros(H) for _ in range(L)]
            dh[L - 1] = d_top[t].copy()
            for layer in range(L - 1, -1, -1):
                total = dh[layer] + dh_carry[layer]
                da = total * (1.0 - hs[layer, t] ** 2)
                h_before = hs[layer, t - 1] if t > 0 else h_in[layer]
                inp = hs[layer - 1, t] if layer > 0 else feats[t]
                grads[f"wx{layer}"] += np.outer(da, inp)
                grads[f"wh{layer}"] += np.outer(da, h_before)
                grads[f"b{layer}"] += da
                dh_carry[layer] = p[f"wh{layer}"].T @ da
                if layer > 0:
                    dh[layer - 1] += p[f"wx{layer}"].T @ da
        return grads


def infer_scores(
    model: ScorerModel,
    features: np.ndarray,
    timestamps: np.ndarray | None = None,
    fps: float | None = None,
) -> list[FrameScores]:
    """Forward a full feature sequence into per-frame score distributions.

    Timestamps default to index / fps. Causality is structural: the
    recurrence never looks ahead.
    """
    features = np.asarray(features, dtype=np.float64)
    cache = model.forward(features)
    T = features.shape[0]
    if timestamps is None:
        if fps is None:
            raise ValueError("provide timestamps or fps")
        timestamps = np.arange(T, dtype=np.float64) / fps
    state = softmax(cache["state_logits"])
    step = softmax(cache["step_logits"])
    sub = softmax(cache["sub_logits"])
    return [
        FrameScores(
            timestamp=float(timestamps[t]),
            state_probs=state[t],
            step_progress_dist=step[t],
            substep_progress_dist=sub[t],
        )
        for t in range(T)
    ]
