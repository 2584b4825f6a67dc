"""Per-question facts derived from one student's raw event stream.

The derivation is pure: the same session always produces the same
responses, so students can be processed in parallel without shared
state.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .domain_model import AnswerOption, EventKind, QuestionnaireSpec, StudentSession


class SrtMode(Enum):
    """How inter-event time is attributed to questions.

    VIEW_INTERVALS charges the gap between consecutive events to the
    question current at the gap's start (the question of the most
    recent view or answer); the tail up to the session end goes to the
    question current at the last event. ANSWER_INTERVALS, meant for
    logs without view events, charges the gap between consecutive
    answers to the later answer's question (the time spent arriving at
    it); the first answer is charged from the session's first
    timestamp, and time after the last answer stays unattributed.
    """

    VIEW_INTERVALS = "view"
    ANSWER_INTERVALS = "answer"


@dataclass(frozen=True)
class QuestionResponse:
    """What a student did on one question: markings, final pick, time."""

    question_id: int
    markings: int
    final_option: AnswerOption | None
    srt_s: float

    def __post_init__(self) -> None:
        if (self.final_option is not None) != (self.markings >= 1):
            raise ValueError("final_option must be present exactly when markings >= 1")

    @property
    def answered(self) -> bool:
        return self.final_option is not None

    @property
    def is_correct(self) -> bool:
        return self.final_option is not None and self.final_option.is_correct

    @property
    def final_weight(self) -> int:
        """Score weight of the final pick; 0 when unanswered."""
        return self.final_option.ws_weight if self.final_option else 0


@dataclass(frozen=True)
class AnswerSequence:
    """The (question_id, option_id) pairs of all answer events, in time order."""

    entries: tuple[tuple[int, str], ...]

    def __len__(self) -> int:
        return len(self.entries)

    def question_ids(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.entries)

    def restricted_to(self, question_ids: Iterable[int]) -> "AnswerSequence":
        """Subsequence of answers to the given questions, order preserved."""
        keep = set(question_ids)
        return AnswerSequence(tuple(e for e in self.entries if e[0] in keep))


def pick_srt_mode(session: StudentSession) -> SrtMode:
    """VIEW_INTERVALS when the log carries any view event, else ANSWER_INTERVALS."""
    if any(e.kind is EventKind.VIEW for e in session.events):
        return SrtMode.VIEW_INTERVALS
    return SrtMode.ANSWER_INTERVALS


def derive_responses(
    session: StudentSession,
    spec: QuestionnaireSpec,
    srt_mode: SrtMode | None = None,
) -> dict[int, QuestionResponse]:
    """Build one QuestionResponse per question in the spec.

    Questions never touched get markings 0 and zero time. Every answer
    event counts as a marking, including re-selections of the same
    option. Accumulated time follows ``srt_mode``; ``None`` picks the
    mode from the log shape (see :func:`pick_srt_mode`).
    """
    mode = srt_mode or pick_srt_mode(session)
    markings: Counter[int] = Counter()
    final_option_id: dict[int, str] = {}
    for event in session.events:
        if event.kind is EventKind.ANSWER:
            markings[event.question_id] += 1
            final_option_id[event.question_id] = event.option_id

    srt_ms: defaultdict[int, int] = defaultdict(int)
    events = session.events
    if mode is SrtMode.VIEW_INTERVALS:
        for index, event in enumerate(events):
            until = (
                events[index + 1].timestamp_ms
                if index + 1 < len(events)
                else session.session_end_ms
            )
            srt_ms[event.question_id] += until - event.timestamp_ms
    else:
        answers = [e for e in events if e.kind is EventKind.ANSWER]
        if answers:
            srt_ms[answers[0].question_id] += answers[0].timestamp_ms - events[0].timestamp_ms
            for previous, current in zip(answers, answers[1:]):
                srt_ms[current.question_id] += current.timestamp_ms - previous.timestamp_ms

    responses = {}
    for question in spec.questions:
        qid = question.question_id
        option = question.option(final_option_id[qid]) if qid in final_option_id else None
        responses[qid] = QuestionResponse(
            question_id=qid,
            markings=markings.get(qid, 0),
            final_option=option,
            srt_s=srt_ms.get(qid, 0) / 1000.0,
        )
    return responses


def derive_answer_sequence(session: StudentSession) -> AnswerSequence:
    """Answer events only, in time order, duplicates preserved."""
    return AnswerSequence(
        tuple(
            (e.question_id, e.option_id)
            for e in session.events
            if e.kind is EventKind.ANSWER
        )
    )
