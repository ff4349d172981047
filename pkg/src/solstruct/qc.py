"""Quality-control gates for synthesized problems.

A candidate survives only if four independent gates all pass: the local
trace check (annotations match execution), the trace diff filter (no sign
inversion or int/float kind drift against the parent), the generating
agent's own eval tag, and an external agent's judgment. The first failing
gate is what gets recorded for the rejection ledger.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import SolstructError
from . import evalcore, intervene
from . import solgrammar as sg

GATE_ORDER = ("local_check", "diff_filter", "self_eval", "external_eval")

PASS = "pass"
SIGN_INVERSION = "sign_inversion"
TYPE_CHANGE = "type_change"
VALUE_MISSING = "value_missing"

CORRECT = "correct"
INCORRECT = "incorrect"
UNPARSEABLE = "unparseable"


@dataclass
class LocalCheckReport:
    passed: bool
    cause: str | None = None
    mismatches: list[evalcore.Mismatch] = field(default_factory=list)


def local_check(
    p: sg.AnnotatedProgram,
    tol: float = evalcore.DEFAULT_TOL,
    trace: evalcore.Trace | None = None,
    functions: dict[str, object] | None = None,
) -> LocalCheckReport:
    """Execute (or reuse a supplied trace) and check every annotation."""
    if trace is None:
        try:
            trace = evalcore.evaluate(p, functions)
        except SolstructError as exc:
            return LocalCheckReport(False, cause=f"{type(exc).__name__}: {exc}")
    report = evalcore.check_annotations(p, trace, tol)
    if not report.passed:
        first = report.mismatches[0]
        return LocalCheckReport(
            False,
            cause=f"annotation mismatch at line {first.line}: "
            f"{first.var} expected {first.expected}, got {first.actual}",
            mismatches=report.mismatches,
        )
    return LocalCheckReport(True)


@dataclass(frozen=True)
class DiffDetail:
    var: str
    mapped_to: str
    original: evalcore.Num | None
    new: evalcore.Num | None
    flag: str  # PASS | SIGN_INVERSION | TYPE_CHANGE | VALUE_MISSING


@dataclass
class DiffVerdict:
    status: str  # PASS | SIGN_INVERSION | TYPE_CHANGE | VALUE_MISSING
    var: str | None = None
    details: list[DiffDetail] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == PASS


def diff_filter(
    original: evalcore.Trace, new: evalcore.Trace, varmap: dict[str, str]
) -> DiffVerdict:
    """Flag sign inversions and int/float kind changes between two traces.

    Transitions through exactly zero are not inversions (5 -> 0 passes).
    Only variables named in varmap are compared; status reports the first
    failing variable in original trace order.
    """
    orig_final = original.final_values()
    new_final = new.final_values()
    details: list[DiffDetail] = []
    status: str | None = None
    status_var: str | None = None
    for var in orig_final:
        if var not in varmap:
            continue
        mapped = varmap[var]
        a = orig_final[var]
        if mapped not in new_final:
            details.append(DiffDetail(var, mapped, a, None, VALUE_MISSING))
            flag = VALUE_MISSING
        else:
            b = new_final[mapped]
            if (a > 0 and b < 0) or (a < 0 and b > 0):
                flag = SIGN_INVERSION
            elif type(a) is not type(b):
                flag = TYPE_CHANGE
            else:
                flag = PASS
            details.append(DiffDetail(var, mapped, a, b, flag))
        if flag != PASS and status is None:
            status, status_var = flag, var
    return DiffVerdict(status or PASS, status_var, details)


def derive_varmap(
    record: intervene.InterventionRecord, original: sg.AnnotatedProgram
) -> dict[str, str]:
    """Map each surviving original variable to its counterpart.

    Mechanical interventions never remove or rename definitions, so the map
    is the identity on the original's assigned names. Agent-designed
    extensions may drop or rename variables; only names still defined in the
    rewritten program survive.
    """
    orig_names = original.assigned_names()
    if record.kind == intervene.KIND_AGENT_EXTEND:
        new_names = set(record.rewritten.assigned_names())
        return {n: n for n in orig_names if n in new_names}
    return {n: n for n in orig_names}


_EVAL_TAG_RE = re.compile(r"<eval>(.*?)</eval>", re.DOTALL)
_EXPLAIN_RE = re.compile(r"<explain>(.*?)</explain>", re.DOTALL)


@dataclass(frozen=True)
class EvalVerdict:
    verdict: str  # CORRECT | INCORRECT | UNPARSEABLE
    explanation: str | None = None


def parse_eval(text: str) -> EvalVerdict:
    """Parse an agent's judgment; the first well-formed eval tag wins.

    The scan is case-sensitive: only CORRECT / INCORRECT count, anything
    else leaves the verdict unparseable.
    """
    verdict = UNPARSEABLE
    for m in _EVAL_TAG_RE.finditer(text):
        body = m.group(1).strip()
        if body == "CORRECT":
            verdict = CORRECT
            break
        if body == "INCORRECT":
            verdict = INCORRECT
            break
    explain = _EXPLAIN_RE.search(text)
    return EvalVerdict(verdict, explain.group(1).strip() if explain else None)


@dataclass
class EvalOutcome:
    self_eval: str  # CORRECT | INCORRECT | UNPARSEABLE
    external_eval: str
    explanations: list[str] = field(default_factory=list)


@dataclass
class RetentionDecision:
    retained: bool
    failed_gate: str | None
    gates: dict[str, bool]


def retain(
    local: LocalCheckReport | bool,
    diff: DiffVerdict | None,
    evals: EvalOutcome,
) -> RetentionDecision:
    """Conjunction of all four gates; records the first failure.

    A missing diff verdict (round 0 has no parent trace) counts as passing
    that gate.
    """
    gates = {
        "local_check": local.passed if isinstance(local, LocalCheckReport) else bool(local),
        "diff_filter": diff.passed if diff is not None else True,
        "self_eval": evals.self_eval == CORRECT,
        "external_eval": evals.external_eval == CORRECT,
    }
    failed = next((g for g in GATE_ORDER if not gates[g]), None)
    return RetentionDecision(failed is None, failed, gates)
