import random

import pytest

from edumetrics import (
    ComprehensionInputs,
    DomainError,
    QuestionSubset,
    comprehension_for_response,
    comprehension_for_subset,
    effective_comprehension_level,
    max_comprehension_level,
    priority,
    question_comprehension_level,
    questionnaire_comprehension_level,
)
from helpers import make_question, make_spec, responses_for


def qcl(w, qdi, cdi, srt, t):
    return question_comprehension_level(
        ComprehensionInputs(qdi=qdi, cdi=cdi, w=w, srt_s=srt, expected_time_s=t)
    )


def test_max_comprehension_level():
    assert max_comprehension_level(5, 5) == 100
    assert max_comprehension_level(3, 3) == 36
    assert max_comprehension_level(1, 1) == 4


def test_effective_comprehension_level():
    assert effective_comprehension_level(5, 5, 3) == 75
    assert effective_comprehension_level(5, 5, 2) == 50
    assert effective_comprehension_level(3, 3, 0) == 0


def test_question_comprehension_worked_cases():
    assert qcl(4, 5, 5, srt=60, t=250) == pytest.approx(0.25, abs=1e-4)
    assert qcl(4, 3, 3, srt=70, t=250) == pytest.approx(1.0, abs=1e-4)
    assert qcl(3, 5, 5, srt=60, t=180) == pytest.approx(0.75, abs=1e-4)
    assert qcl(4, 3, 3, srt=300, t=250) == pytest.approx(0.9945, abs=1e-4)
    assert qcl(2, 5, 5, srt=650, t=300) == pytest.approx(0.4942, abs=1e-4)


def test_question_comprehension_is_continuous_at_expected_time():
    t = 250.0
    at_boundary = qcl(4, 5, 5, srt=t, t=t)
    just_over = qcl(4, 5, 5, srt=t * (1 + 1e-13), t=t)
    assert at_boundary == 1.0
    assert abs(just_over - at_boundary) <= 1e-12


def test_question_comprehension_jumps_by_factor_four_at_quarter_time():
    t = 200.0
    fast = qcl(3, 5, 3, srt=t / 4, t=t)
    normal = qcl(3, 5, 3, srt=t / 2, t=t)
    assert abs(fast - normal / 4) <= 1e-12


def test_question_comprehension_decreases_with_overtime():
    t = 100.0
    values = [qcl(4, 3, 3, srt=srt, t=t) for srt in (150, 200, 400, 1000)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_question_comprehension_stays_in_unit_interval():
    rnd = random.Random(5)
    for _ in range(500):
        value = qcl(
            rnd.choice([0, 1, 2, 3, 4]),
            rnd.choice([1, 3, 5]),
            rnd.choice([1, 3, 5]),
            srt=rnd.uniform(0, 2000),
            t=rnd.uniform(1, 600),
        )
        assert 0.0 <= value <= 1.0


def test_questionnaire_comprehension_worked_cases():
    qucl_a = questionnaire_comprehension_level([1, 0.75, 1, 0.50, 1, 1], ad=1 - 0.764, q_count=6)
    assert qucl_a == pytest.approx(0.7761, abs=1e-4)
    qucl_b = questionnaire_comprehension_level([0.75] * 5 + [1], ad=1 - 0.833, q_count=6)
    assert qucl_b == pytest.approx(0.6951, abs=1e-4)


def test_questionnaire_comprehension_perfect_student():
    assert questionnaire_comprehension_level([1.0] * 4, ad=1.0, q_count=4) == 1.0


def test_questionnaire_comprehension_rejects_bad_inputs():
    with pytest.raises(DomainError):
        questionnaire_comprehension_level([], ad=0.5, q_count=0)
    with pytest.raises(DomainError):
        questionnaire_comprehension_level([1.0, 1.0], ad=0.5, q_count=3)


def test_questionnaire_comprehension_bounded_by_plain_mean():
    rnd = random.Random(6)
    for _ in range(300):
        n = rnd.randint(1, 8)
        qcls = [rnd.uniform(0, 1) for _ in range(n)]
        ad = rnd.uniform(0, 1)
        value = questionnaire_comprehension_level(qcls, ad=ad, q_count=n)
        assert value <= sum(qcls) / n + 1e-12
    full_assurance = questionnaire_comprehension_level([0.5, 0.7], ad=1.0, q_count=2)
    assert full_assurance == pytest.approx(0.6)


def test_priority_worked_cases():
    assert priority(6.67, 8.75) == pytest.approx(2.914, abs=0.005)
    assert priority(1.67, 7.92) == pytest.approx(6.597, abs=0.005)
    assert priority(1.67, 7.92) > priority(6.67, 8.75)


def test_priority_edges():
    assert priority(10.0, 9.0) == 0.0
    assert priority(3.0, 0.0) == 0.0
    with pytest.raises(DomainError):
        priority(-1.0, 5.0)


def test_priority_monotonicity():
    assert priority(4.0, 6.0) > priority(5.0, 6.0)
    assert priority(4.0, 7.0) > priority(4.0, 6.0)


def test_comprehension_for_response_uses_weight_zero_when_unanswered():
    spec = make_spec([make_question(1, qdi=5, cdi=5, expected_time_s=100.0)])
    unanswered = responses_for(spec, [None], srts=[30.0])
    assert comprehension_for_response(unanswered[1], spec.questions[0]) == 0.0


def test_comprehension_for_subset_matches_manual_composition():
    questions = [
        make_question(1, qdi=5, cdi=5, expected_time_s=250.0),
        make_question(2, qdi=3, cdi=3, expected_time_s=250.0),
        make_question(3, qdi=5, cdi=5, expected_time_s=180.0),
    ]
    spec = make_spec(questions)
    responses = responses_for(
        spec, [4, 4, 3], markings=[2, 1, 1], srts=[100.0, 70.0, 60.0]
    )
    subset = QuestionSubset.whole(spec)
    qcls = [
        comprehension_for_response(responses[q.question_id], q) for q in spec.questions
    ]
    # Correct finals on Q1 and Q2 over 2+1+1 markings.
    ad = 2 / 4
    expected = questionnaire_comprehension_level(qcls, ad=ad, q_count=3)
    assert expected == pytest.approx(2.75 / 3.5)
    assert comprehension_for_subset(responses, spec, subset) == pytest.approx(expected)
