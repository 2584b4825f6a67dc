"""Report assembly: per-student metric vectors, the class summary and the
plot-data tables behind them.

Serialized output is byte-stable: dictionary key order is fixed by
construction and every decimal is rendered with four fractional digits
(round-half-even), so identical inputs produce identical files.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .analytics import (
    GroupingScheme,
    QuadrantLabel,
    Scope,
    assign_group,
    classify_quadrant,
    disorder_summary,
    rank_priorities,
    srt_vs_expected,
)
from .composite_metrics import comprehension_for_response, comprehension_for_subset, priority
from .domain_model import QuestionnaireSpec, StudentSession
from .isolated_metrics import (
    QuestionSubset,
    assurance_degree,
    level_of_disorder,
    question_doubt,
    student_response_time,
    subject_subsets,
    topic_subsets,
    traditional_score,
    weighted_score,
)
from .session_derivation import (
    AnswerSequence,
    QuestionResponse,
    SrtMode,
    derive_answer_sequence,
    derive_responses,
)

METRIC_KEYS = ("ts", "ws", "ad", "qucl")

SCOPE_QUESTIONNAIRE = "questionnaire"
SCOPE_SUBJECT = "subject"
SCOPE_TOPIC = "topic"


@dataclass(frozen=True)
class QuestionRow:
    """Per-question facts and scores for one student."""

    question_id: int
    markings: int
    doubt: int
    weight: int
    srt_s: float
    qcl: float


@dataclass(frozen=True)
class SubsetRow:
    """Metric vector of one question set (whole questionnaire, subject or topic)."""

    scope: str
    element: str | int | None
    ts: float
    ws: float
    ad: float
    srt_s: float
    disorder: float
    qucl: float
    priority: float


@dataclass(frozen=True)
class StudentMetricsReport:
    """Everything reported about one student.

    ``group_indices`` is filled in a second pass once the class size,
    and with it the grouping scheme, is known.
    """

    student_id: str
    questions: tuple[QuestionRow, ...]
    subsets: tuple[SubsetRow, ...]
    quadrant: QuadrantLabel
    group_indices: Mapping[str, int] | None = None

    @property
    def overall(self) -> SubsetRow:
        return self.subsets[0]

    def normalized(self, metric: str) -> float:
        """Questionnaire-scope metric value on the [0, 1] scale."""
        row = self.overall
        if metric == "ts":
            return row.ts / 10.0
        if metric == "ws":
            return row.ws / 10.0
        if metric == "ad":
            return row.ad
        if metric == "qucl":
            return row.qucl
        raise KeyError(metric)

    def as_dict(self) -> dict:
        return {
            "student_id": self.student_id,
            "quadrant": self.quadrant.value,
            "group_indices": dict(self.group_indices) if self.group_indices else None,
            "questions": [
                {
                    "question_id": q.question_id,
                    "markings": q.markings,
                    "doubt": q.doubt,
                    "weight": q.weight,
                    "srt_s": q.srt_s,
                    "qcl": q.qcl,
                }
                for q in self.questions
            ],
            "subsets": [
                {
                    "scope": s.scope,
                    "element": s.element,
                    "ts": s.ts,
                    "ws": s.ws,
                    "ad": s.ad,
                    "srt_s": s.srt_s,
                    "disorder": s.disorder,
                    "qucl": s.qucl,
                    "priority": s.priority,
                }
                for s in self.subsets
            ],
        }


@dataclass(frozen=True)
class StudentComputation:
    """A student's report plus the derived data class-level analyses reuse."""

    report: StudentMetricsReport
    responses: dict[int, QuestionResponse]
    sequence: AnswerSequence


def _subset_row(
    scope: str,
    element: str | int | None,
    subset: QuestionSubset,
    responses: Mapping[int, QuestionResponse],
    sequence: AnswerSequence,
    spec: QuestionnaireSpec,
) -> SubsetRow:
    ts = traditional_score(responses, spec, subset)
    ws = weighted_score(responses, spec, subset)
    return SubsetRow(
        scope=scope,
        element=element,
        ts=ts,
        ws=ws,
        ad=assurance_degree(responses, spec, subset),
        srt_s=student_response_time(responses, subset),
        disorder=level_of_disorder(sequence.restricted_to(subset)),
        qucl=comprehension_for_subset(responses, spec, subset),
        priority=priority(ts, ws),
    )


def compute_student(
    session: StudentSession,
    spec: QuestionnaireSpec,
    srt_mode: SrtMode | None = None,
    threshold: float = 0.5,
) -> StudentComputation:
    """Derive one student's responses and build their full metric report."""
    responses = derive_responses(session, spec, srt_mode)
    sequence = derive_answer_sequence(session)

    question_rows = []
    for question in spec.questions:
        response = responses[question.question_id]
        question_rows.append(
            QuestionRow(
                question_id=question.question_id,
                markings=response.markings,
                doubt=question_doubt(response),
                weight=response.final_weight,
                srt_s=response.srt_s,
                qcl=comprehension_for_response(response, question),
            )
        )

    subset_rows = [
        _subset_row(
            SCOPE_QUESTIONNAIRE, None, QuestionSubset.whole(spec), responses, sequence, spec
        )
    ]
    for subject, subset in subject_subsets(spec).items():
        subset_rows.append(_subset_row(SCOPE_SUBJECT, subject, subset, responses, sequence, spec))
    for topic, subset in topic_subsets(spec).items():
        subset_rows.append(_subset_row(SCOPE_TOPIC, topic, subset, responses, sequence, spec))

    overall = subset_rows[0]
    report = StudentMetricsReport(
        student_id=session.student_id,
        questions=tuple(question_rows),
        subsets=tuple(subset_rows),
        quadrant=classify_quadrant(overall.ad, overall.qucl, threshold),
    )
    return StudentComputation(report=report, responses=responses, sequence=sequence)


def attach_group_indices(
    reports: Sequence[StudentMetricsReport], scheme: GroupingScheme
) -> list[StudentMetricsReport]:
    """Fill each report's per-metric group index from the class scheme."""
    attached = []
    for report in reports:
        indices = {
            metric: assign_group(report.normalized(metric), scheme) for metric in METRIC_KEYS
        }
        attached.append(replace(report, group_indices=indices))
    return attached


def _pairs_by_element(
    reports: Sequence[StudentMetricsReport], scope: str
) -> dict[str | int, list[tuple[float, float]]]:
    pairs: dict[str | int, list[tuple[float, float]]] = {}
    for report in reports:
        for row in report.subsets:
            if row.scope == scope:
                pairs.setdefault(row.element, []).append((row.ts, row.ws))
    return pairs


def _ranking_rows(pairs: dict, scope_label: str) -> list[dict]:
    rankings = rank_priorities(pairs, Scope.CLASS)
    return [
        {
            "rank": r.rank,
            scope_label: r.element,
            "normalized_priority": r.normalized_priority,
        }
        for r in rankings
    ]


def build_class_summary(
    reports: Sequence[StudentMetricsReport],
    computations: Sequence[StudentComputation],
    spec: QuestionnaireSpec,
    scheme: GroupingScheme | None,
    threshold: float,
    srt_mode_label: str,
) -> dict:
    """Class-level report: grouping, splits, quadrant roster, priorities,
    time-vs-expected and disorder tables."""
    count = len(reports)
    summary: dict = {
        "student_count": count,
        "no_students": count == 0,
        "srt_mode": srt_mode_label,
        "threshold": threshold,
        "notes": {
            "general_rows": "aggregated over every question, not averaged over subjects",
        },
    }
    if count == 0:
        summary.update(
            {
                "grouping": None,
                "approval_splits": [],
                "quadrants": {label.value: [] for label in QuadrantLabel},
                "subject_priorities": [],
                "topic_priorities": [],
                "srt_vs_expected": [],
                "disorder": [],
            }
        )
        return summary

    assert scheme is not None
    summary["grouping"] = {
        "k": scheme.k,
        "h": scheme.h,
        "bounds": [
            {"group": index + 1, "floor": floor, "ceiling": ceiling}
            for index, (floor, ceiling) in enumerate(scheme.bounds)
        ],
    }

    splits = []
    for metric in METRIC_KEYS:
        values = [report.normalized(metric) for report in reports]
        at_or_above = sum(1 for v in values if v >= threshold)
        splits.append(
            {"metric": metric, "at_or_above": at_or_above, "below": count - at_or_above}
        )
    summary["approval_splits"] = splits

    roster: dict[str, list[str]] = {label.value: [] for label in QuadrantLabel}
    for report in reports:
        roster[report.quadrant.value].append(report.student_id)
    summary["quadrants"] = roster

    summary["subject_priorities"] = _ranking_rows(
        _pairs_by_element(reports, SCOPE_SUBJECT), "subject"
    )
    summary["topic_priorities"] = _ranking_rows(_pairs_by_element(reports, SCOPE_TOPIC), "topic")

    comparisons = srt_vs_expected(
        [c.responses for c in computations], spec, QuestionSubset.whole(spec)
    )
    summary["srt_vs_expected"] = [
        {
            "question_id": row.question_id,
            "mean_srt_s": row.mean_srt_s,
            "expected_time_s": row.expected_time_s,
            "within_expected": row.within_expected,
        }
        for row in comparisons
    ]

    sequences = [c.sequence for c in computations]
    disorder_rows = []
    for subject, subset in subject_subsets(spec).items():
        average, positive = disorder_summary(sequences, subset)
        disorder_rows.append(
            {"subject": subject, "average": average, "percent_positive": positive}
        )
    average, positive = disorder_summary(sequences)
    disorder_rows.append(
        {"subject": "General", "average": average, "percent_positive": positive}
    )
    summary["disorder"] = disorder_rows
    return summary


def render_json(value) -> str:
    """Serialize to JSON with fixed key order and 4-digit decimals."""
    out: list[str] = []
    _render(value, 0, out)
    out.append("\n")
    return "".join(out)


def _render(value, level: int, out: list[str]) -> None:
    pad = "  " * level
    inner = "  " * (level + 1)
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, float):
        out.append(format(value, ".4f"))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for index, item in enumerate(value):
            out.append(inner)
            _render(item, level + 1, out)
            out.append(",\n" if index < len(value) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(value, Mapping):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = list(value.items())
        for index, (key, item) in enumerate(items):
            out.append(inner + json.dumps(str(key)) + ": ")
            _render(item, level + 1, out)
            out.append(",\n" if index < len(items) - 1 else "\n")
        out.append(pad + "}")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [format(v, ".4f") if isinstance(v, float) else v for v in row]
        )
    return buffer.getvalue()


def groups_histogram_csv(
    reports: Sequence[StudentMetricsReport], scheme: GroupingScheme | None
) -> str:
    """Group occupancy per metric, the data behind the grouped-bars figure."""
    rows = []
    if scheme is not None:
        for metric in METRIC_KEYS:
            counts: dict[int, int] = {}
            for report in reports:
                group = (report.group_indices or {}).get(metric)
                if group is not None:
                    counts[group] = counts.get(group, 0) + 1
            for group in range(1, scheme.k + 1):
                rows.append([metric, group, counts.get(group, 0)])
    return _csv_text(("metric", "group", "count"), rows)


def ad_vs_qucl_csv(reports: Sequence[StudentMetricsReport]) -> str:
    """Scatter data: one (assurance, comprehension) point per student."""
    rows = [
        [r.student_id, r.overall.ad, r.overall.qucl, r.quadrant.value] for r in reports
    ]
    return _csv_text(("student_id", "ad", "qucl", "quadrant"), rows)


def subject_srt_csv(
    reports: Sequence[StudentMetricsReport], spec: QuestionnaireSpec
) -> str:
    """Class mean per-question time per subject, plus a General row."""
    rows = []
    if reports:
        for subject, subset in subject_subsets(spec).items():
            per_student = [
                row.srt_s / len(subset)
                for report in reports
                for row in report.subsets
                if row.scope == SCOPE_SUBJECT and row.element == subject
            ]
            rows.append([subject, sum(per_student) / len(reports)])
        overall = [r.overall.srt_s / spec.question_count for r in reports]
        rows.append(["General", sum(overall) / len(reports)])
    return _csv_text(("subject", "mean_srt_s"), rows)


def students_csv(reports: Sequence[StudentMetricsReport]) -> str:
    """Flat form of the per-student reports, one row per subset."""
    rows = []
    for report in reports:
        indices = report.group_indices or {}
        for row in report.subsets:
            questionnaire_scope = row.scope == SCOPE_QUESTIONNAIRE
            rows.append(
                [
                    report.student_id,
                    row.scope,
                    "" if row.element is None else row.element,
                    row.ts,
                    row.ws,
                    row.ad,
                    row.srt_s,
                    row.disorder,
                    row.qucl,
                    row.priority,
                    report.quadrant.value if questionnaire_scope else "",
                    indices.get("ts", "") if questionnaire_scope else "",
                    indices.get("ws", "") if questionnaire_scope else "",
                    indices.get("ad", "") if questionnaire_scope else "",
                    indices.get("qucl", "") if questionnaire_scope else "",
                ]
            )
    return _csv_text(
        (
            "student_id",
            "scope",
            "element",
            "ts",
            "ws",
            "ad",
            "srt_s",
            "disorder",
            "qucl",
            "priority",
            "quadrant",
            "group_ts",
            "group_ws",
            "group_ad",
            "group_qucl",
        ),
        rows,
    )


def questions_csv(reports: Sequence[StudentMetricsReport]) -> str:
    """Flat form of the per-question rows."""
    rows = [
        [r.student_id, q.question_id, q.markings, q.doubt, q.weight, q.srt_s, q.qcl]
        for r in reports
        for q in r.questions
    ]
    return _csv_text(
        ("student_id", "question_id", "markings", "doubt", "weight", "srt_s", "qcl"), rows
    )
