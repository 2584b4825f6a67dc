"""Builders shared by the test modules."""

from __future__ import annotations

from edumetrics import (
    AnswerOption,
    AssessmentEvent,
    EventKind,
    QuestionResponse,
    QuestionSpec,
    QuestionnaireSpec,
    StudentSession,
)

DEFAULT_DEVIATIONS = {0: 0, 1: 2, 2: 3, 3: 4, 4: 5}


def make_option(letter: str, weight: int, deviation: int | None = None) -> AnswerOption:
    if deviation is None:
        deviation = DEFAULT_DEVIATIONS[weight]
    return AnswerOption(option_id=letter, ws_weight=weight, lu_deviation=deviation)


def make_question(
    qid: int,
    subject: str = "General",
    topics: tuple[int, ...] = (),
    qdi: int = 3,
    cdi: int = 3,
    tdi: int = 3,
    expected_time_s: float = 120.0,
    weights: tuple[int, ...] = (4, 3, 2, 1, 0),
) -> QuestionSpec:
    options = tuple(make_option(l, w) for l, w in zip("abcde", weights))
    return QuestionSpec(
        question_id=qid,
        subject=subject,
        topic_ids=frozenset(topics),
        qdi=qdi,
        cdi=cdi,
        tdi=tdi,
        expected_time_s=expected_time_s,
        options=options,
    )


def make_spec(
    questions: list[QuestionSpec] | None = None,
    n: int = 6,
    subject: str = "General",
    max_total_time_s: float = 14400.0,
    questionnaire_id: str = "test-questionnaire",
) -> QuestionnaireSpec:
    if questions is None:
        questions = [make_question(i + 1, subject=subject) for i in range(n)]
    return QuestionnaireSpec(
        questionnaire_id=questionnaire_id,
        questions=tuple(questions),
        max_total_time_s=max_total_time_s,
    )


def view_event(student: str, qid: int, ts: int) -> AssessmentEvent:
    return AssessmentEvent(
        student_id=student, question_id=qid, kind=EventKind.VIEW, option_id=None, timestamp_ms=ts
    )


def answer_event(student: str, qid: int, option_id: str, ts: int) -> AssessmentEvent:
    return AssessmentEvent(
        student_id=student,
        question_id=qid,
        kind=EventKind.ANSWER,
        option_id=option_id,
        timestamp_ms=ts,
    )


def make_session(
    events: list[AssessmentEvent],
    end: int | None = None,
    student: str = "s1",
) -> StudentSession:
    if end is None:
        end = events[-1].timestamp_ms if events else 0
    return StudentSession(student_id=student, events=tuple(events), session_end_ms=end)


def responses_for(
    spec: QuestionnaireSpec,
    final_weights: list[int | None],
    markings: list[int] | None = None,
    srts: list[float] | None = None,
) -> dict[int, QuestionResponse]:
    """Responses whose final options carry the given weights; None means
    unanswered. Default markings are one per answered question."""
    out = {}
    for index, question in enumerate(spec.questions):
        weight = final_weights[index]
        if weight is None:
            option = None
            marks = 0
        else:
            option = next(o for o in question.options if o.ws_weight == weight)
            marks = markings[index] if markings is not None else 1
        out[question.question_id] = QuestionResponse(
            question_id=question.question_id,
            markings=marks,
            final_option=option,
            srt_s=srts[index] if srts is not None else 0.0,
        )
    return out


def mmss(text: str) -> int:
    minutes, seconds = text.split(":")
    return 60 * int(minutes) + int(seconds)
