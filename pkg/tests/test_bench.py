from fractions import Fraction

import pytest

from solstruct import bench


def test_extract_boxed_nested_braces():
    assert bench.extract_boxed(r"the answer is \boxed{\frac{1}{2}} here") == r"\frac{1}{2}"


def test_extract_boxed_last_wins():
    assert bench.extract_boxed(r"first \boxed{1}, revised \boxed{2}.") == "2"


def test_extract_boxed_unbalanced_falls_back():
    text = r"good \boxed{7} but then \boxed{\frac{1}{2"
    assert bench.extract_boxed(text) == "7"


def test_extract_boxed_missing():
    with pytest.raises(bench.NoBoxedAnswer):
        bench.extract_boxed("no final answer given")


@pytest.mark.parametrize(
    "raw, kind, value",
    [
        ("2,400,111", bench.INT, 2400111),
        (r"\frac{1}{115}", bench.RATIONAL, Fraction(1, 115)),
        ("$18$", bench.INT, 18),
        (r"25\%", bench.INT, 25),
        ("937.60", bench.FLOAT, 937.6),
        ("-45", bench.INT, -45),
        (r"\text{east side}", bench.TEXT, "east side"),
    ],
)
def test_normalize_answer(raw, kind, value):
    canon = bench.normalize_answer(raw)
    assert canon.kind == kind
    assert canon.value == value


def test_normalize_comma_is_not_always_thousands():
    # a two-digit group after the comma is a list, not a separator
    canon = bench.normalize_answer("3,16")
    assert canon.kind == bench.TEXT


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ("937.60", "917.6", False),
        ("1764", "1764.0", True),
        ("1/2", "0.5", True),
        (r"\frac{2}{4}", "1/2", True),
        ("ten", "10", False),
        ("100.0001", "100", True),
        ("101", "100", False),
        ("east", r"\text{EAST}", True),
    ],
)
def test_answers_equal(a, b, expected):
    assert bench.answers_equal(a, b) is expected


def test_answers_equal_respects_rel_tol():
    assert bench.answers_equal("100.2", "100", rel_tol=1e-2)
    assert not bench.answers_equal("100.2", "100", rel_tol=1e-4)


def test_grade_response_statuses():
    assert bench.grade_response(None, "5") == (bench.MISSING, None)
    assert bench.grade_response("no box", "5") == (bench.UNBOXED, None)
    assert bench.grade_response(r"\boxed{5}", "5") == (bench.CORRECT, "5")
    assert bench.grade_response(r"\boxed{6}", "5") == (bench.INCORRECT, "6")


def _record(rid, rnd, steps, gold):
    return {"id": rid, "round": rnd, "step_count": steps, "answer": gold}


TWELVE = [
    _record("r01", 0, 4, "1764"),
    _record("r02", 0, 4, "18"),
    _record("r03", 0, 5, "116"),
    _record("r04", 0, 5, "36"),
    _record("r05", 1, 6, "540"),
    _record("r06", 1, 6, "1/2"),
    _record("r07", 1, 7, "0.5"),
    _record("r08", 1, 7, "917.6"),
    _record("r09", 2, 8, "2400111"),
    _record("r10", 2, 8, "25"),
    _record("r11", 2, 9, "east"),
    _record("r12", 2, 9, "10"),
]

RESPONSES = {
    "r01": r"I get \boxed{1764}.",
    "r02": r"so \boxed{17}",
    "r03": "there is no boxed answer here",
    # r04 deliberately absent
    "r05": r"\boxed{540.0}",
    "r06": r"\boxed{\frac{2}{4}}",
    "r07": r"\boxed{1/2}",
    "r08": r"final: \boxed{937.60}",
    "r09": r"\boxed{2,400,111}",
    "r10": r"\boxed{25\%}",
    "r11": r"\boxed{\text{EAST}}",
    "r12": r"\boxed{ten}",
}


def test_score_hand_computed_buckets():
    report = bench.score(TWELVE, RESPONSES)

    assert report.overall.n == 12
    assert report.overall.correct == 7
    assert report.overall.accuracy == pytest.approx(7 / 12)

    assert {r: (b.n, b.correct) for r, b in report.by_round.items()} == {
        0: (4, 1),
        1: (4, 3),
        2: (4, 3),
    }
    assert {s: (b.n, b.correct) for s, b in report.by_steps.items()} == {
        4: (2, 1),
        5: (2, 0),
        6: (2, 2),
        7: (2, 1),
        8: (2, 2),
        9: (2, 1),
    }

    by_id = {row.id: row for row in report.rows}
    assert by_id["r01"].status == bench.CORRECT
    assert by_id["r02"].status == bench.INCORRECT
    assert by_id["r03"].status == bench.UNBOXED
    assert by_id["r04"].status == bench.MISSING
    assert by_id["r08"].status == bench.INCORRECT
    assert by_id["r08"].predicted == "937.60"


def test_score_rejects_unknown_response_id():
    with pytest.raises(bench.UnknownRecordId):
        bench.score(TWELVE, {"zzz": r"\boxed{1}"})


def test_report_serialization_round_trip():
    report = bench.score(TWELVE, RESPONSES)
    blob = report.to_json_dict()
    assert blob["overall"]["n"] == 12
    assert blob["overall"]["correct"] == 7
    text = report.format_text()
    assert "overall" in text
    csv_text = report.to_csv()
    assert csv_text.splitlines()[0].startswith("id,")
    assert len(csv_text.strip().splitlines()) == 13
