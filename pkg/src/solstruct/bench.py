"""Answer extraction, normalization, and benchmark scoring.

Model responses are graded by the last \\boxed{...} expression they
contain. Answers normalize into one of four kinds (integer, rational,
float, text) before comparison; numeric kinds coerce freely, float
comparison uses a relative tolerance, and everything else is exact.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import SolstructError

DEFAULT_REL_TOL = 1e-4

INT = "Int"
RATIONAL = "Rational"
FLOAT = "Float"
TEXT = "Text"

CORRECT = "correct"
INCORRECT = "incorrect"
UNBOXED = "unboxed"
MISSING = "missing"


class NoBoxedAnswer(SolstructError):
    pass


class UnknownRecordId(SolstructError):
    pass


def extract_boxed(text: str) -> str:
    """The content of the last balanced \\boxed{...} in the text."""
    marker = "\\boxed{"
    start = text.rfind(marker)
    while start != -1:
        depth = 1
        i = start + len(marker)
        while i < len(text) and depth:
            c = text[i]
            if c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
            i += 1
        if depth == 0:
            return text[start + len(marker) : i - 1]
        start = text.rfind(marker, 0, start)
    raise NoBoxedAnswer("no balanced \\boxed{...} found")


_FRAC_RE = re.compile(r"\\[dt]?frac\{([^{}]*)\}\{([^{}]*)\}")
_FRAC_BARE_RE = re.compile(r"\\[dt]?frac(\d)(\d)")
_DIGIT_COMMA_RE = re.compile(r"(\d),(?=\d{3}(\D|$))")
_TEXT_RE = re.compile(r"\\text\{([^{}]*)\}")
_INT_RE = re.compile(r"^[+-]?\d+$")
_RATIONAL_RE = re.compile(r"^([+-]?\d+)\s*/\s*(\d+)$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True)
class CanonicalAnswer:
    kind: str  # Int | Rational | Float | Text
    value: int | Fraction | float | str
    text: str  # the cleaned-up spelling


def _clean(text: str) -> str:
    s = text.strip()
    s = s.replace("\\left", "").replace("\\right", "")
    s = s.replace("\\!", "").replace("\\$", "").replace("$", "")
    s = s.replace("\\%", "").rstrip("%")
    s = _TEXT_RE.sub(r"\1", s)
    # \frac{a}{b} and \frac12 both read as a/b
    prev = None
    while prev != s:
        prev = s
        s = _FRAC_RE.sub(r"(\1)/(\2)", s)
    s = _FRAC_BARE_RE.sub(r"\1/\2", s)
    s = _DIGIT_COMMA_RE.sub(r"\1", s)
    s = s.strip().rstrip(".").strip()
    return s


def normalize_answer(text: str) -> CanonicalAnswer:
    """Classify an answer string into its canonical kind and value."""
    s = _clean(text)
    plain = s.replace("(", "").replace(")", "").strip()
    if _INT_RE.match(plain):
        return CanonicalAnswer(INT, int(plain), plain)
    m = _RATIONAL_RE.match(plain)
    if m and int(m.group(2)) != 0:
        frac = Fraction(int(m.group(1)), int(m.group(2)))
        return CanonicalAnswer(RATIONAL, frac, f"{frac.numerator}/{frac.denominator}")
    if _FLOAT_RE.match(plain):
        value = float(plain)
        if math.isfinite(value):
            return CanonicalAnswer(FLOAT, value, plain)
    norm = " ".join(s.split()).lower()
    return CanonicalAnswer(TEXT, norm, s)


def answers_equal(a: CanonicalAnswer | str, b: CanonicalAnswer | str,
                  rel_tol: float = DEFAULT_REL_TOL) -> bool:
    """Compare two answers, coercing across numeric kinds.

    Int and Rational compare exactly; any Float side switches the whole
    comparison to isclose with the given relative tolerance. Text only
    equals Text.
    """
    if isinstance(a, str):
        a = normalize_answer(a)
    if isinstance(b, str):
        b = normalize_answer(b)
    if a.kind == TEXT or b.kind == TEXT:
        return a.kind == b.kind and a.value == b.value
    if FLOAT in (a.kind, b.kind):
        return math.isclose(float(a.value), float(b.value), rel_tol=rel_tol, abs_tol=0.0)
    return Fraction(a.value) == Fraction(b.value)


## ---------- scoring ----------


@dataclass
class RowResult:
    id: str
    status: str  # correct | incorrect | unboxed | missing
    gold: str
    predicted: str | None
    round: int
    step_count: int

    @property
    def correct(self) -> bool:
        return self.status == CORRECT


@dataclass
class Bucket:
    n: int = 0
    correct: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.n if self.n else 0.0


@dataclass
class ScoreReport:
    overall: Bucket
    by_round: dict[int, Bucket]
    by_steps: dict[int, Bucket]
    rows: list[RowResult] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        def bucket(b: Bucket) -> dict:
            return {"n": b.n, "correct": b.correct, "accuracy": b.accuracy}

        return {
            "overall": bucket(self.overall),
            "by_round": {str(k): bucket(v) for k, v in sorted(self.by_round.items())},
            "by_steps": {str(k): bucket(v) for k, v in sorted(self.by_steps.items())},
            "rows": [
                {
                    "id": r.id,
                    "status": r.status,
                    "gold": r.gold,
                    "predicted": r.predicted,
                    "round": r.round,
                    "step_count": r.step_count,
                }
                for r in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    def format_text(self) -> str:
        lines = [
            f"overall: {self.overall.correct}/{self.overall.n} "
            f"({self.overall.accuracy:.1%})",
            "by round:",
        ]
        for k in sorted(self.by_round):
            b = self.by_round[k]
            lines.append(f"  round {k}: {b.correct}/{b.n} ({b.accuracy:.1%})")
        lines.append("by steps:")
        for k in sorted(self.by_steps):
            b = self.by_steps[k]
            lines.append(f"  {k} steps: {b.correct}/{b.n} ({b.accuracy:.1%})")
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["id", "status", "gold", "predicted", "round", "step_count"])
        for r in self.rows:
            w.writerow([r.id, r.status, r.gold, r.predicted or "", r.round, r.step_count])
        return buf.getvalue()


def grade_response(response: str | None, gold: str,
                   rel_tol: float = DEFAULT_REL_TOL) -> tuple[str, str | None]:
    """(status, predicted text) for one response against a gold answer."""
    if response is None:
        return MISSING, None
    try:
        predicted = extract_boxed(response)
    except NoBoxedAnswer:
        return UNBOXED, None
    ok = answers_equal(predicted, gold, rel_tol=rel_tol)
    return (CORRECT if ok else INCORRECT), predicted


def score(records: list[dict], responses: dict[str, str],
          rel_tol: float = DEFAULT_REL_TOL) -> ScoreReport:
    """Grade responses keyed by record id against dataset records.

    Records lacking a response count as incorrect. A response id with no
    matching record raises UnknownRecordId.
    """
    known = {str(rec["id"]) for rec in records}
    for rid in responses:
        if rid not in known:
            raise UnknownRecordId(rid)

    overall = Bucket()
    by_round: dict[int, Bucket] = {}
    by_steps: dict[int, Bucket] = {}
    rows: list[RowResult] = []
    for rec in records:
        rid = str(rec["id"])
        rnd = int(rec.get("round", 0))
        steps = int(rec.get("step_count", 0))
        status, predicted = grade_response(responses.get(rid), str(rec["answer"]), rel_tol)
        row = RowResult(rid, status, str(rec["answer"]), predicted, rnd, steps)
        rows.append(row)
        for b in (overall, by_round.setdefault(rnd, Bucket()),
                  by_steps.setdefault(steps, Bucket())):
            b.n += 1
            b.correct += row.correct
    return ScoreReport(overall, by_round, by_steps, rows)
