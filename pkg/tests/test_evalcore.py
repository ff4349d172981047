import math
import random

import pytest
from importlib import resources

from solstruct import evalcore
from solstruct import solgrammar as sg

import progmaker

FIXTURES = resources.files("solstruct").joinpath("assets", "fixtures")

EXPECTED_CHAINS = {
    "robe.py": ([2, 1.0, 3.0, 3.0], 3.0),
    "robe_extended.py": (
        [2, 10, 9, 90, 540, 270.0, 810.0, 792.0, 954.0, 1764.0, 1764.0],
        1764.0,
    ),
    "linear_equation.py": ([12, 3, 15, 18], 18),
    "linear_equation_extended.py": (
        [12, 3, 15, 18, 12, 15, 18, 12, 6, 1640736, 2400111],
        2400111,
    ),
    "lottery.py": ([90, 24, 1, 115, 1, 115, 116], 116),
    "lottery_extended.py": ([90, 24, 1, 25, 1, 25, 26], 26),
}


def parse_fixture(name: str) -> sg.AnnotatedProgram:
    return sg.parse_program(FIXTURES.joinpath(name).read_text(encoding="utf-8"))


def run(src: str) -> evalcore.Trace:
    return evalcore.evaluate(sg.parse_program(src))


@pytest.mark.parametrize("name", sorted(EXPECTED_CHAINS))
def test_fixture_chains_exact(name):
    values, result = EXPECTED_CHAINS[name]
    trace = evalcore.evaluate(parse_fixture(name))
    got = [e.value for e in trace.entries]
    assert got == values
    # int/float kinds must match bit-for-bit, == alone is too loose
    assert [type(v) for v in got] == [type(v) for v in values]
    assert trace.result == result and type(trace.result) is type(result)


@pytest.mark.parametrize("name", sorted(EXPECTED_CHAINS))
def test_fixture_annotations_pass(name):
    p = parse_fixture(name)
    report = evalcore.check_annotations(p, evalcore.evaluate(p))
    assert report.passed, report.mismatches


def test_true_division_always_float():
    t = run("def solution():\n    a = 8\n    b = a / 2\n    return b\n")
    assert t.result == 4.0 and isinstance(t.result, float)


def test_int_ops_stay_int():
    t = run("def solution():\n    a = 7\n    b = a * 3 + 2 - 1\n    return b\n")
    assert t.result == 22 and isinstance(t.result, int)


def test_division_by_zero():
    with pytest.raises(evalcore.DivisionByZero):
        run("def solution():\n    a = 0\n    b = 5 / a\n    return b\n")


def test_domain_error_from_sqrt():
    with pytest.raises(evalcore.DomainError):
        run(
            "def solution():\n"
            "    from math import sqrt\n"
            "    a = sqrt(-1)\n"
            "    return a\n"
        )


def test_overflow_is_nonfinite():
    with pytest.raises(evalcore.NonFiniteResult):
        run("def solution():\n    a = 10.0\n    b = a**400\n    return b\n")


def test_unsupported_construct():
    with pytest.raises(evalcore.UnsupportedConstruct):
        run("def solution():\n    a = [1][0]\n    return a\n")


def test_non_whitelisted_call_rejected():
    with pytest.raises(evalcore.EvaluationError):
        run("def solution():\n    a = sin(1)\n    return a\n")


def test_non_whitelisted_import_rejected():
    with pytest.raises(evalcore.EvaluationError):
        run("def solution():\n    import os\n    a = 1\n    return a\n")


def test_whitelisted_functions_work():
    t = run(
        "def solution():\n"
        "    from math import comb, factorial, gcd\n"
        "    a = comb(6, 2)\n"
        "    b = factorial(4)\n"
        "    c = gcd(a, b)\n"
        "    d = min(a, b) + max(1, 2) + abs(-3) + round(2.6) + pow(2, 3)\n"
        "    return d\n"
    )
    assert [e.value for e in t.entries] == [15, 24, 3, 31]


def test_dotted_module_call():
    t = run(
        "def solution():\n"
        "    import math\n"
        "    a = math.floor(3.9) + math.ceil(1.1)\n"
        "    return a\n"
    )
    assert t.result == 5


def test_values_match_int_exact():
    assert evalcore.values_match(116, 116, 1e-6)
    assert not evalcore.values_match(117, 116, 1e-6)


def test_values_match_float_relative():
    third = 1 / 3
    assert evalcore.values_match(0.3333333333, third, 1e-6)
    assert not evalcore.values_match(0.3333, third, 1e-6)
    # relative, not absolute: huge values tolerate proportional drift
    assert evalcore.values_match(1e12 * (1 + 1e-7), 1e12, 1e-6)


def test_check_annotations_reports_line_and_var():
    src = (
        "def solution():\n"
        "    a = 2  # 2\n"
        "    b = a * 3  # 7\n"
        "    return b\n"
    )
    p = sg.parse_program(src)
    report = evalcore.check_annotations(p, evalcore.evaluate(p))
    assert not report.passed
    (miss,) = report.mismatches
    assert miss.var == "b" and miss.expected == 7 and miss.actual == 6
    assert miss.line == p.statements[1].line


def test_return_value_checked_against_trail():
    src = (
        "def solution():\n"
        "    a = 2  # 2\n"
        "    return a  # 3\n"
    )
    p = sg.parse_program(src)
    report = evalcore.check_annotations(p, evalcore.evaluate(p))
    assert not report.passed
    assert report.mismatches[0].var == "<return>"


def test_unknown_trails_are_not_checked():
    src = (
        "def solution():\n"
        "    a = 2  # ?\n"
        "    b = a + 1  # prose note\n"
        "    return b\n"
    )
    p = sg.parse_program(src)
    assert evalcore.check_annotations(p, evalcore.evaluate(p)).passed


def test_trace_json_shape():
    import json

    t = run("def solution():\n    a = 2\n    b = a / 4\n    return b\n")
    payload = json.loads(t.to_json())
    assert payload["entries"] == [
        {"line": 2, "var": "a", "kind": "int", "value": 2},
        {"line": 3, "var": "b", "kind": "float", "value": 0.5},
    ]
    assert payload["result"] == {"kind": "float", "value": 0.5}


def test_generated_corpus_matches_python_semantics():
    rng = random.Random(77)
    for _ in range(200):
        made = progmaker.make_program(rng, allow_calls=True)
        trace = evalcore.evaluate(sg.parse_program(made.source))
        finals = trace.final_values()
        for name, expected in made.values.items():
            assert finals[name] == expected
            assert type(finals[name]) is type(expected)
        assert trace.result == made.values[made.returned]


def test_final_values_keep_insertion_order():
    t = run("def solution():\n    b = 1\n    a = b + 1\n    return a\n")
    assert list(t.final_values()) == ["b", "a"]
