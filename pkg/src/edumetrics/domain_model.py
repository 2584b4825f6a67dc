"""Domain types for questionnaires and assessment event logs.

Two interchange formats live here:

* questionnaire JSON: the authored questionnaire with per-option score
  weights, difficulty indices, expected answer times and subject/topic
  tags;
* event CSV: the captured interaction log, one row per view/answer
  event, with epoch-millisecond timestamps.

Everything parsed is immutable afterwards and safe to share between
worker processes. Invariants are enforced at construction time:
violations raise :class:`ValidationError`, syntactically malformed
input raises :class:`ParseError`.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, TextIO, Union

from .errors import ParseError, ValidationError

WS_WEIGHTS = (0, 1, 2, 3, 4)
LU_DEVIATIONS = (0, 2, 3, 4, 5)
DIFFICULTY_INDICES = (1, 3, 5)
CORRECT_WEIGHT = 4
STANDARD_OPTION_IDS = ("a", "b", "c", "d", "e")

# Deviation used when the questionnaire omits it: the order-preserving
# injection of the 0-4 answer weights into the 0-5 deviation scale.
DEFAULT_LU_DEVIATION = {0: 0, 1: 2, 2: 3, 3: 4, 4: 5}

EVENT_CSV_HEADER = ("student_id", "question_id", "event", "option_id", "timestamp_ms")

TextSource = Union[str, TextIO]


class EventKind(Enum):
    VIEW = "view"
    ANSWER = "answer"


@dataclass(frozen=True)
class AnswerOption:
    """One selectable answer with its score weight and deviation value.

    The correct answer is the option carrying weight 4; there is no
    separate flag.
    """

    option_id: str
    ws_weight: int
    lu_deviation: int

    def __post_init__(self) -> None:
        if not (len(self.option_id) == 1 and "a" <= self.option_id <= "z"):
            raise ValidationError(
                f"option_id must be a single lowercase letter, got {self.option_id!r}",
                field="option_id",
            )
        if self.ws_weight not in WS_WEIGHTS:
            raise ValidationError(
                f"ws_weight must be one of {WS_WEIGHTS}, got {self.ws_weight}",
                field="ws_weight",
            )
        if self.lu_deviation not in LU_DEVIATIONS:
            raise ValidationError(
                f"lu_deviation must be one of {LU_DEVIATIONS}, got {self.lu_deviation}",
                field="lu_deviation",
            )

    @property
    def is_correct(self) -> bool:
        return self.ws_weight == CORRECT_WEIGHT


@dataclass(frozen=True)
class QuestionSpec:
    """A question with its answer options, tags and difficulty indices."""

    question_id: int
    subject: str
    topic_ids: frozenset[int]
    qdi: int
    cdi: int
    tdi: int
    expected_time_s: float
    options: tuple[AnswerOption, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "topic_ids", frozenset(self.topic_ids))
        object.__setattr__(self, "options", tuple(self.options))
        qid = self.question_id
        if not isinstance(qid, int) or qid < 1:
            raise ValidationError("question_id must be a positive integer", field="question_id")
        for name in ("qdi", "cdi", "tdi"):
            if getattr(self, name) not in DIFFICULTY_INDICES:
                raise ValidationError(
                    f"{name} must be one of {DIFFICULTY_INDICES}, got {getattr(self, name)}",
                    field=name,
                    question_id=qid,
                )
        if not self.expected_time_s > 0:
            raise ValidationError(
                "expected_time_s must be positive", field="expected_time_s", question_id=qid
            )
        if not self.options:
            raise ValidationError("question has no options", field="options", question_id=qid)
        ids = [o.option_id for o in self.options]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate option_id", field="options", question_id=qid)
        correct = [o for o in self.options if o.is_correct]
        if len(correct) != 1:
            raise ValidationError(
                f"exactly one option must carry weight {CORRECT_WEIGHT}, found {len(correct)}",
                field="options",
                question_id=qid,
            )

    @property
    def correct_option(self) -> AnswerOption:
        return next(o for o in self.options if o.is_correct)

    def option(self, option_id: str) -> AnswerOption:
        for opt in self.options:
            if opt.option_id == option_id:
                return opt
        raise ValidationError(
            f"unknown option_id {option_id!r}", field="option_id", question_id=self.question_id
        )


@dataclass(frozen=True)
class QuestionnaireSpec:
    """An ordered questionnaire; question ids are the 1-based positions."""

    questionnaire_id: str
    questions: tuple[QuestionSpec, ...]
    max_total_time_s: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "questions", tuple(self.questions))
        if not self.questions:
            raise ValidationError("questionnaire has no questions", field="questions")
        for position, question in enumerate(self.questions, start=1):
            if question.question_id != position:
                raise ValidationError(
                    f"question ids must be contiguous from 1, found {question.question_id} "
                    f"at position {position}",
                    field="question_id",
                    question_id=question.question_id,
                )
        if not self.max_total_time_s > 0:
            raise ValidationError("max_total_time_s must be positive", field="max_total_time_s")

    @property
    def question_count(self) -> int:
        return len(self.questions)

    @property
    def max_weighted_points(self) -> int:
        """Highest reachable weight sum: question count times the top weight."""
        return self.question_count * CORRECT_WEIGHT

    def question(self, question_id: int) -> QuestionSpec:
        if not isinstance(question_id, int) or not 1 <= question_id <= len(self.questions):
            raise ValidationError(
                f"unknown question_id {question_id!r}", field="question_id",
                question_id=question_id if isinstance(question_id, int) else None,
            )
        return self.questions[question_id - 1]

    def subjects(self) -> tuple[str, ...]:
        """Distinct subjects in order of first appearance."""
        seen: dict[str, None] = {}
        for question in self.questions:
            seen.setdefault(question.subject, None)
        return tuple(seen)

    def topics(self) -> tuple[int, ...]:
        """Distinct topic ids, ascending."""
        found: set[int] = set()
        for question in self.questions:
            found.update(question.topic_ids)
        return tuple(sorted(found))


@dataclass(frozen=True)
class AssessmentEvent:
    """One logged interaction: a question view or an answer selection."""

    student_id: str
    question_id: int
    kind: EventKind
    option_id: str | None
    timestamp_ms: int

    def __post_init__(self) -> None:
        if not self.student_id:
            raise ValidationError("student_id must be non-empty", field="student_id")
        if any(c in self.student_id for c in ',"\n\r'):
            raise ValidationError(
                f"student_id {self.student_id!r} contains characters the log format reserves",
                field="student_id",
            )
        if not isinstance(self.question_id, int) or self.question_id < 1:
            raise ValidationError("question_id must be a positive integer", field="question_id")
        if not isinstance(self.timestamp_ms, int) or self.timestamp_ms < 0:
            raise ValidationError(
                "timestamp_ms must be a non-negative integer", field="timestamp_ms"
            )
        if self.kind is EventKind.ANSWER and not self.option_id:
            raise ValidationError("answer events need an option_id", field="option_id")
        if self.kind is EventKind.VIEW and self.option_id is not None:
            raise ValidationError("view events must not carry an option_id", field="option_id")


@dataclass(frozen=True)
class StudentSession:
    """All events of one student, time-ordered, plus the session end."""

    student_id: str
    events: tuple[AssessmentEvent, ...]
    session_end_ms: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        stamps = [e.timestamp_ms for e in self.events]
        if any(a > b for a, b in zip(stamps, stamps[1:])):
            raise ValidationError(
                "session events must be ordered by timestamp", field="timestamp_ms"
            )
        if any(e.student_id != self.student_id for e in self.events):
            raise ValidationError("session contains events of another student", field="student_id")
        last = stamps[-1] if stamps else 0
        if self.session_end_ms < last:
            raise ValidationError(
                "session_end_ms precedes the last event", field="session_end_ms"
            )

    @property
    def first_timestamp_ms(self) -> int | None:
        return self.events[0].timestamp_ms if self.events else None


def _get(mapping: dict, key: str, kinds, *, question_id: int | None = None):
    if key not in mapping:
        raise ValidationError(f"missing field {key!r}", field=key, question_id=question_id)
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise ValidationError(
            f"field {key!r} has the wrong type", field=key, question_id=question_id
        )
    return value


def parse_questionnaire(text: TextSource, *, allow_any_option_count: bool = False) -> QuestionnaireSpec:
    """Parse and validate the questionnaire JSON format.

    By default each question must offer exactly the five options
    ``a`` through ``e``; pass ``allow_any_option_count=True`` to accept
    any non-empty option list.
    """
    if hasattr(text, "read"):
        text = text.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(doc, dict):
        raise ValidationError("top level must be a JSON object", field="questionnaire")

    questionnaire_id = _get(doc, "questionnaire_id", str)
    max_total_time_s = float(_get(doc, "max_total_time_s", (int, float)))
    raw_questions = _get(doc, "questions", list)

    questions = []
    for raw in raw_questions:
        if not isinstance(raw, dict):
            raise ValidationError("each question must be a JSON object", field="questions")
        qid = _get(raw, "question_id", int)
        raw_options = _get(raw, "options", list, question_id=qid)
        options = []
        for raw_opt in raw_options:
            if not isinstance(raw_opt, dict):
                raise ValidationError(
                    "each option must be a JSON object", field="options", question_id=qid
                )
            weight = _get(raw_opt, "ws_weight", int, question_id=qid)
            if "lu_deviation" in raw_opt:
                deviation = _get(raw_opt, "lu_deviation", int, question_id=qid)
            else:
                deviation = DEFAULT_LU_DEVIATION.get(weight, 0)
            try:
                options.append(
                    AnswerOption(
                        option_id=_get(raw_opt, "option_id", str, question_id=qid),
                        ws_weight=weight,
                        lu_deviation=deviation,
                    )
                )
            except ValidationError as exc:
                raise exc.locate(question_id=qid) from None
        if not allow_any_option_count:
            if tuple(o.option_id for o in options) != STANDARD_OPTION_IDS:
                raise ValidationError(
                    f"questions must offer exactly the options {'/'.join(STANDARD_OPTION_IDS)}",
                    field="options",
                    question_id=qid,
                )
        topic_ids = _get(raw, "topic_ids", list, question_id=qid)
        if any(isinstance(t, bool) or not isinstance(t, int) for t in topic_ids):
            raise ValidationError("topic_ids must be integers", field="topic_ids", question_id=qid)
        questions.append(
            QuestionSpec(
                question_id=qid,
                subject=_get(raw, "subject", str, question_id=qid),
                topic_ids=frozenset(topic_ids),
                qdi=_get(raw, "qdi", int, question_id=qid),
                cdi=_get(raw, "cdi", int, question_id=qid),
                tdi=_get(raw, "tdi", int, question_id=qid),
                expected_time_s=float(_get(raw, "expected_time_s", (int, float), question_id=qid)),
                options=tuple(options),
            )
        )
    return QuestionnaireSpec(
        questionnaire_id=questionnaire_id,
        questions=tuple(questions),
        max_total_time_s=max_total_time_s,
    )


def serialize_questionnaire(spec: QuestionnaireSpec) -> str:
    """Render a spec back to its JSON form; re-parsing yields an equal spec."""
    doc = {
        "questionnaire_id": spec.questionnaire_id,
        "max_total_time_s": spec.max_total_time_s,
        "questions": [
            {
                "question_id": q.question_id,
                "subject": q.subject,
                "topic_ids": sorted(q.topic_ids),
                "qdi": q.qdi,
                "cdi": q.cdi,
                "tdi": q.tdi,
                "expected_time_s": q.expected_time_s,
                "options": [
                    {
                        "option_id": o.option_id,
                        "ws_weight": o.ws_weight,
                        "lu_deviation": o.lu_deviation,
                    }
                    for o in q.options
                ],
            }
            for q in spec.questions
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def _parse_int(raw: str, field: str, line: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"{field} must be an integer, got {raw!r}", line=line) from None


def parse_event_log(text: TextSource, spec: QuestionnaireSpec) -> list[StudentSession]:
    """Parse the event CSV into one session per student.

    Rows of different students may interleave; within a student, events
    are stably re-sorted by timestamp. The session end is the student's
    last timestamp unless an explicit ``end`` row (empty question_id and
    option_id) provides one.
    """
    if hasattr(text, "read"):
        text = text.read()
    if not text.strip():
        return []
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return []
    if tuple(header) != EVENT_CSV_HEADER:
        raise ParseError(
            f"unexpected header {','.join(header)!r}, want {','.join(EVENT_CSV_HEADER)!r}",
            line=1,
        )

    events_by_student: dict[str, list[AssessmentEvent]] = {}
    end_by_student: dict[str, int] = {}
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != len(EVENT_CSV_HEADER):
            raise ParseError(f"expected {len(EVENT_CSV_HEADER)} fields, got {len(row)}", line=line)
        student_id, raw_qid, raw_event, raw_option, raw_ts = row
        if not student_id:
            raise ValidationError("student_id must be non-empty", field="student_id", line=line)
        timestamp_ms = _parse_int(raw_ts, "timestamp_ms", line)
        if raw_event == "end":
            if raw_qid or raw_option:
                raise ValidationError(
                    "end rows must leave question_id and option_id empty",
                    field="event",
                    line=line,
                )
            if student_id in end_by_student:
                raise ValidationError(
                    f"duplicate end row for student {student_id!r}", field="event", line=line
                )
            end_by_student[student_id] = timestamp_ms
            events_by_student.setdefault(student_id, [])
            continue
        if raw_event not in (EventKind.VIEW.value, EventKind.ANSWER.value):
            raise ValidationError(
                f"unknown event kind {raw_event!r}", field="event", line=line
            )
        kind = EventKind(raw_event)
        question_id = _parse_int(raw_qid, "question_id", line)
        try:
            question = spec.question(question_id)
            if kind is EventKind.ANSWER:
                question.option(raw_option)
            elif raw_option:
                raise ValidationError(
                    "view rows must leave option_id empty", field="option_id"
                )
            event = AssessmentEvent(
                student_id=student_id,
                question_id=question_id,
                kind=kind,
                option_id=raw_option if kind is EventKind.ANSWER else None,
                timestamp_ms=timestamp_ms,
            )
        except ValidationError as exc:
            raise exc.locate(line=line) from None
        events_by_student.setdefault(student_id, []).append(event)

    sessions = []
    for student_id, events in events_by_student.items():
        events.sort(key=lambda e: e.timestamp_ms)
        last = events[-1].timestamp_ms if events else 0
        end = end_by_student.get(student_id, last)
        if end < last:
            raise ValidationError(
                f"end row for student {student_id!r} precedes their last event",
                field="timestamp_ms",
            )
        sessions.append(
            StudentSession(student_id=student_id, events=tuple(events), session_end_ms=end)
        )
    return sessions


def event_log_csv(sessions: Iterable[StudentSession]) -> str:
    """Render sessions to the event CSV format (LF endings, unquoted).

    An explicit ``end`` row is added only when the session end does not
    coincide with the last event.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(EVENT_CSV_HEADER)
    for session in sessions:
        for event in session.events:
            writer.writerow(
                [
                    event.student_id,
                    event.question_id,
                    event.kind.value,
                    event.option_id or "",
                    event.timestamp_ms,
                ]
            )
        needs_end = (not session.events) or (
            session.session_end_ms != session.events[-1].timestamp_ms
        )
        if needs_end:
            writer.writerow([session.student_id, "", "end", "", session.session_end_ms])
    return buffer.getvalue()
