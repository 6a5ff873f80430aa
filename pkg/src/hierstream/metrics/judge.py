"""LLM-judge request harness for description quality scoring.

Builds one chat payload per (matched pair, criterion) from fixed templates
covering four criteria: CI (correctness of information), DO (detail
orientation), CU (contextual understanding), and TU (temporal
understanding). Replies are expected to be Python-dictionary strings like
``{'score': 4}``; scoring itself happens on the judge side, this module
only assembles requests and parses replies into a report.

Several template lines carry significant trailing spaces; the templates
are checksum-pinned in the tests, so edit with care.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

_CI_SYSTEM = """You are an intelligent chatbot designed for evaluating the factual accuracy of generative outputs for video-based question-answer pairs. 
Your task is to compare the predicted answer with the correct answer and determine if they are factually consistent. Here's how you can accomplish the task:
------
##INSTRUCTIONS: 
- Focus on the factual consistency between the predicted answer and the correct answer. The predicted answer should not contain any misinterpretations or misinformation.
- The predicted answer must be factually accurate and align with the video content.
- Consider synonyms or paraphrases as valid matches.
- Evaluate the factual accuracy of the prediction compared to the answer."""

_CI_USER = """Please evaluate the following video-based question-answer pair:"
Question: {question}
Correct Answer: {answer}
Predicted Answer: {pred}
Provide your evaluation only as a factual accuracy score where the factual accuracy score is an integer value between 0 and 5, with 5 indicating the highest level of factual consistency. 
Please generate the response in the form of a Python dictionary string with keys 'score', where its value is the factual accuracy score in INTEGER, not STRING.
DO NOT PROVIDE ANY OTHER OUTPUT TEXT OR EXPLANATION. Only provide the Python dictionary string. 
For example, your response should look like this: {''score': 4.8}."""

_DO_SYSTEM = """You are an intelligent chatbot designed for evaluating the detail orientation of generative outputs for video-based question-answer pairs. 
Your task is to compare the predicted answer with the correct answer and determine its level of detail, considering both completeness and specificity. Here's how you can accomplish the task:
------
##INSTRUCTIONS: 
- Check if the predicted answer covers all major points from the video. The response should not leave out any key aspects.
- Evaluate whether the predicted answer includes specific details rather than just generic points. It should provide comprehensive information that is tied to specific elements of the video.
- Consider synonyms or paraphrases as valid matches.
- Provide a single evaluation score that reflects the level of detail orientation of the prediction, considering both completeness and specificity."""

_DO_USER = """Please evaluate the following video-based question-answer pair:
Question: {question}
Correct Answer: {answer}
Predicted Answer: {pred}
Provide your evaluation only as a detail orientation score where the detail orientation score is an integer value between 0 and 5, with 5 indicating the highest level of detail orientation. 
Please generate the response in the form of a Python dictionary string with keys 'score', where its value is the detail orientation score in INTEGER, not STRING.
DO NOT PROVIDE ANY OTHER OUTPUT TEXT OR EXPLANATION. Only provide the Python dictionary string. 
For example, your response should look like this: {''score': 4.8}."""

_CU_SYSTEM = """You are an intelligent chatbot designed for evaluating the contextual understanding of generative outputs for video-based question-answer pairs. 
Your task is to compare the predicted answer with the correct answer and determine if the generated response aligns with the overall context of the video content. Here's how you can accomplish the task:
------
##INSTRUCTIONS: 
- Evaluate whether the predicted answer aligns with the overall context of the video content. It should not provide information that is out of context or misaligned.
- The predicted answer must capture the main themes and sentiments of the video.
- Consider synonyms or paraphrases as valid matches.
- Provide your evaluation of the contextual understanding of the prediction compared to the answer."""

_CU_USER = """Please evaluate the following video-based question-answer pair:
Question: {question}
Correct Answer: {answer}
Predicted Answer: {pred}
Provide your evaluation only as a contextual understanding score where the contextual understanding score is an integer value between 0 and 5, with 5 indicating the highest level of contextual understanding. 
Please generate the response in the form of a Python dictionary string with keys 'score', where its value is contextual understanding score in INTEGER, not STRING.
DO NOT PROVIDE ANY OTHER OUTPUT TEXT OR EXPLANATION. Only provide the Python dictionary string. 
For example, your response should look like this: {''score': 4.8}."""

_TU_SYSTEM = """You are an intelligent chatbot designed for evaluating the temporal understanding of generative outputs for video-based question-answer pairs. 
Your task is to compare the predicted answer with the correct answer and determine if they correctly reflect the temporal sequence of events in the video content. Here's how you can accomplish the task:
------
##INSTRUCTIONS: 
- Focus on the temporal consistency between the predicted answer and the correct answer. The predicted answer should correctly reflect the sequence of events or details as they are presented in the video content.
- Consider synonyms or paraphrases as valid matches, but only if the temporal order is maintained.
- Evaluate the temporal accuracy of the prediction compared to the answer."""

_TU_USER = """Please evaluate the following video-based question-answer pair:
Question: {question}
Correct Answer: {answer}
Predicted Answer: {pred}
Provide your evaluation only as a temporal accuracy score where the temporal accuracy score is an integer value between 0 and 5, with 5 indicating the highest level of temporal consistency. 
Please generate the response in the form of a Python dictionary string with keys 'score', where its value is the temporal accuracy score in INTEGER, not STRING.
DO NOT PROVIDE ANY OTHER OUTPUT TEXT OR EXPLANATION. Only provide the Python dictionary string. 
For example, your response should look like this: {''score': 4.8}."""

JUDGE_TEMPLATES: dict[str, tuple[str, str]] = {
    "CI": (_CI_SYSTEM, _CI_USER),
    "DO": (_DO_SYSTEM, _DO_USER),
    "CU": (_CU_SYSTEM, _CU_USER),
    "TU": (_TU_SYSTEM, _TU_USER),
}

DEFAULT_QUESTION = "What is happening in this video segment?"


@dataclass(frozen=True)
class JudgeRequest:
    pair_index: int
    criterion: str
    messages: tuple[dict, ...]


def judge_requests(
    pairs: Sequence[tuple[str, str]],
    criteria: Sequence[str] = ("CI", "DO", "CU", "TU"),
    question: str = DEFAULT_QUESTION,
) -> list[JudgeRequest]:
    """One request per (matched pair, criterion); pairs are (gt text,
    predicted text)."""
    unknown = [c for c in criteria if c not in JUDGE_TEMPLATES]
    if unknown:
        raise ValueError(f"unknown criteria {unknown}; expected subset of {sorted(JUDGE_TEMPLATES)}")
    out = []
    for idx, (answer, prediction) in enumerate(pairs):
        for criterion in criteria:
            system, user = JUDGE_TEMPLATES[criterion]
            filled = (
                user.replace("{question}", question)
                .replace("{answer}", answer)
                .replace("{pred}", prediction)
            )
            out.append(JudgeRequest(
                pair_index=idx,
                criterion=criterion,
                messages=(
                    {"role": "system", "content": system},
                    {"role": "user", "content": filled},
                ),
            ))
    return out


_SCORE_RE = re.compile(r"['\"]+score['\"]*\s*:\s*([0-9]+(?:\.[0-9]+)?)")


def parse_judge(text: str) -> float:
    """Extract the score from a dictionary-string reply. Integer replies are
    the contract, but real-valued scores are accepted as-is."""
    m = _SCORE_RE.search(text)
    if not m:
        raise ValueError(f"no score found in judge reply: {text[:120]!r}")
    return float(m.group(1))


@dataclass(frozen=True)
class JudgeReport:
    mean_score: float | None
    n_scored: int
    n_missing: int
    per_criterion: dict[str, float]


def judge_report(
    requests: Sequence[JudgeRequest], replies: Sequence[str]
) -> JudgeReport:
    """Aggregate raw judge replies: mean over all parsed (pair, criterion)
    scores, with unparseable replies counted and excluded."""
    if len(requests) != len(replies):
        raise ValueError(f"{len(requests)} requests but {len(replies)} replies")
    scored: list[float] = []
    missing = 0
    by_criterion: dict[str, list[float]] = {}
    for req, reply in zip(requests, replies):
        try:
            score = parse_judge(reply)
        except ValueError:
            missing += 1
            continue
        scored.append(score)
        by_criterion.setdefault(req.criterion, []).append(score)
    return JudgeReport(
        mean_score=sum(scored) / len(scored) if scored else None,
        n_scored=len(scored),
        n_missing=missing,
        per_criterion={c: sum(v) / len(v) for c, v in sorted(by_criterion.items())},
    )
