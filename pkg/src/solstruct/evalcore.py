"""Evaluation of solution programs with typed numeric semantics.

Values are plain Python ints and floats and behave exactly as they do in
Python source: true division always yields a float, floor division and
modulo of two ints yield an int, any float operand makes the result a
float, and ints never overflow. Non-finite floats are errors, never values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import SolstructError, UndefinedNameError
from . import solgrammar as sg

Num = int | float

# Callables usable from solution programs. Results follow the underlying
# Python functions (comb/factorial/gcd/floor/ceil produce ints, sqrt floats).
DEFAULT_FUNCTIONS: dict[str, object] = {
    "comb": math.comb,
    "factorial": math.factorial,
    "gcd": math.gcd,
    "sqrt": math.sqrt,
    "floor": math.floor,
    "ceil": math.ceil,
    "abs": abs,
    "min": min,
    "max": max,
    "round": round,
    "pow": pow,
}

DEFAULT_WHITELIST = frozenset(DEFAULT_FUNCTIONS)
DEFAULT_MODULES = frozenset({"math"})
DEFAULT_TOL = 1e-6


class EvaluationError(SolstructError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message

    @property
    def kind(self) -> str:
        return type(self).__name__


class DivisionByZero(EvaluationError):
    def __init__(self, line: int):
        super().__init__(line, "division by zero")


class DomainError(EvaluationError):
    pass


class NonFiniteResult(EvaluationError):
    def __init__(self, line: int):
        super().__init__(line, "non-finite result")


class UnsupportedConstruct(EvaluationError):
    pass


def kind_of(v: Num) -> str:
    return "float" if isinstance(v, float) else "int"


@dataclass(frozen=True)
class TraceEntry:
    index: int  # statement index within the program
    line: int  # 1-based source line of the statement
    var: str
    value: Num


@dataclass
class Trace:
    entries: list[TraceEntry]
    result: Num

    def final_values(self) -> dict[str, Num]:
        """Last value bound to each variable, in definition order."""
        out: dict[str, Num] = {}
        for e in self.entries:
            out[e.var] = e.value
        return out

    def to_json_dict(self) -> dict:
        return {
            "entries": [
                {"line": e.line, "var": e.var, "kind": kind_of(e.value), "value": e.value}
                for e in self.entries
            ],
            "result": {"kind": kind_of(self.result), "value": self.result},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def _check_value(v: object, line: int) -> Num:
    if isinstance(v, complex):
        raise DomainError(line, "complex result")
    if isinstance(v, float) and not math.isfinite(v):
        raise NonFiniteResult(line)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise DomainError(line, f"non-numeric result: {type(v).__name__}")
    return v


def _eval_expr(expr: sg.Expr, env: dict[str, Num], functions: dict[str, object], line: int) -> Num:
    match expr:
        case sg.IntLit(value=v):
            return v
        case sg.FloatLit(value=v):
            return _check_value(v, line)
        case sg.NameRef(id=name):
            if name not in env:
                raise UndefinedNameError(line, name)
            return env[name]
        case sg.Neg(operand=inner):
            return _check_value(-_eval_expr(inner, env, functions, line), line)
        case sg.BinOp(op=op, left=l, right=r):
            lv = _eval_expr(l, env, functions, line)
            rv = _eval_expr(r, env, functions, line)
            try:
                match op:
                    case "+":
                        v = lv + rv
                    case "-":
                        v = lv - rv
                    case "*":
                        v = lv * rv
                    case "/":
                        v = lv / rv
                    case "//":
                        v = lv // rv
                    case "%":
                        v = lv % rv
                    case "**":
                        v = lv**rv
                    case _:
                        raise UnsupportedConstruct(line, f"operator {op}")
            except ZeroDivisionError:
                raise DivisionByZero(line) from None
            except OverflowError:
                raise NonFiniteResult(line) from None
            return _check_value(v, line)
        case sg.CallExpr(func=fname, args=args):
            key = fname.split(".", 1)[1] if "." in fname else fname
            fn = functions.get(key)
            if fn is None:
                raise UnsupportedConstruct(line, f"call outside whitelist: {fname}")
            vals = [_eval_expr(a, env, functions, line) for a in args]
            try:
                v = fn(*vals)
            except ZeroDivisionError:
                raise DivisionByZero(line) from None
            except (ValueError, TypeError) as exc:
                raise DomainError(line, str(exc)) from None
            except OverflowError:
                raise NonFiniteResult(line) from None
            return _check_value(v, line)
        case sg.OpaqueExpr(constructs=cs):
            raise UnsupportedConstruct(line, "; ".join(cs))
    raise UnsupportedConstruct(line, f"unknown expression {expr!r}")


def evaluate(
    p: sg.AnnotatedProgram,
    functions: dict[str, object] | None = None,
    module_whitelist: frozenset[str] = DEFAULT_MODULES,
) -> Trace:
    """Execute a program, producing one trace entry per assignment."""
    functions = DEFAULT_FUNCTIONS if functions is None else functions
    env: dict[str, Num] = {}
    entries: list[TraceEntry] = []
    result: Num | None = None
    for i, st in enumerate(p.statements):
        if st.kind == "import":
            if st.module not in module_whitelist:
                raise UnsupportedConstruct(st.line, f"import outside whitelist: {st.module}")
            continue
        value = _eval_expr(st.expr, env, functions, st.line)
        if st.kind == "assign":
            entries.append(TraceEntry(i, st.line, st.target, value))
            env[st.target] = value
        else:
            result = value
    assert result is not None
    return Trace(entries, result)


@dataclass(frozen=True)
class Mismatch:
    line: int
    var: str
    expected: Num
    actual: Num


@dataclass
class AnnotationReport:
    passed: bool
    mismatches: list[Mismatch]


def values_match(expected: Num, actual: Num, tol: float = DEFAULT_TOL) -> bool:
    """Int expectations match exactly; float expectations within relative tol."""
    if isinstance(expected, int):
        return actual == expected
    return math.isclose(actual, expected, rel_tol=tol, abs_tol=0.0)


def check_annotations(
    p: sg.AnnotatedProgram, trace: Trace, tol: float = DEFAULT_TOL
) -> AnnotationReport:
    """Compare every expected-value comment against the traced value."""
    by_index = {e.index: e for e in trace.entries}
    mismatches: list[Mismatch] = []
    for i, st in enumerate(p.statements):
        if st.expected is None:
            continue
        if st.kind == "assign" and i in by_index:
            actual = by_index[i].value
            var = st.target
        elif st.kind == "return":
            actual = trace.result
            var = "<return>"
        else:
            continue
        if not values_match(st.expected, actual, tol):
            mismatches.append(Mismatch(st.line, var, st.expected, actual))
    return AnnotationReport(not mismatches, mismatches)
