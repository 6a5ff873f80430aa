from .histogram import HistogramConfig, histogram_expectation, histogram_target
from .losses import log_softmax, soft_cross_entropy, softmax
from .rnn import ScorerConfig, ScorerModel, infer_scores
from .targets import progress_target, state_target
from .train import build_frame_targets, train_scorer

__all__ = [
    "HistogramConfig",
    "histogram_target",
    "histogram_expectation",
    "progress_target",
    "state_target",
    "softmax",
    "log_softmax",
    "soft_cross_entropy",
    "ScorerConfig",
    "ScorerModel",
    "infer_scores",
    "train_scorer",
    "build_frame_targets",
]
