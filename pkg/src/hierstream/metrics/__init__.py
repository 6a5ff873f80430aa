from .embedding import Embedder, HashedBagOfWordsEmbedder, HttpEmbedder
from .judge import (
    JUDGE_TEMPLATES,
    JudgeReport,
    JudgeRequest,
    judge_report,
    judge_requests,
    parse_judge,
)
from .matching import (
    DelayStats,
    MatchResult,
    aedt,
    aedt_corpus,
    greedy_match,
    hungarian_f1,
    hungarian_f1_corpus,
    hungarian_match,
    tiou,
)
from .semantic import description_rank, goal_accuracy, topk_f1, topk_f1_corpus

__all__ = [
    "tiou",
    "MatchResult",
    "hungarian_match",
    "hungarian_f1",
    "hungarian_f1_corpus",
    "greedy_match",
    "DelayStats",
    "aedt",
    "aedt_corpus",
    "Embedder",
    "HashedBagOfWordsEmbedder",
    "HttpEmbedder",
    "topk_f1",
    "topk_f1_corpus",
    "goal_accuracy",
    "description_rank",
    "JUDGE_TEMPLATES",
    "JudgeRequest",
    "JudgeReport",
    "judge_requests",
    "judge_report",
    "parse_judge",
]
