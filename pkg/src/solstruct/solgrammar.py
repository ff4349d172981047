"""Parsing and rendering of annotated solution programs.

A solution program is a single ``def solution():`` function whose body is a
straight line of assignments ending in one ``return``. Comment lines of the
form ``# <reason>...</reason>`` annotate the statement block that follows,
and a trailing ``# <value>`` comment on a statement records the value that
line is expected to produce (``# ?`` marks it unknown). Example::

    def solution():
        # <reason>The robe takes 2 bolts of blue fiber.</reason>
        blue_fiber_bolts = 2 # 2
        # <reason>White fiber is half of that.</reason>
        white_fiber_bolts = blue_fiber_bolts / 2 # 1.0
        # <reason>The result is the total.</reason>
        result = blue_fiber_bolts + white_fiber_bolts # 3.0
        return result

The grammar is deliberately small: no control flow, no strings, no
collections. Expressions outside the subset are kept as opaque text so the
program can still be rendered, step-counted, and routed to an external
executor; `classify_subset` reports what made a program unsupported.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field, replace

from .errors import SolstructError

REASON_OPEN = "<reason>"
REASON_CLOSE = "</reason>"
REASON_PAD = "[REASON_PAD]"

BINARY_OPS = ("+", "-", "*", "/", "//", "%", "**")

# Operator precedence for rendering; higher binds tighter.
_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "//": 2, "%": 2, "**": 4}
_NEG_PRECEDENCE = 3


class ProgramSyntaxError(SolstructError):
    """Input does not follow the solution-program format."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class UnterminatedReasonError(ProgramSyntaxError):
    """A ``<reason>`` comment is never closed."""

    def __init__(self, line: int):
        super().__init__(line, "reason comment is never closed")


## ---------- expressions ----------


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class FloatLit:
    value: float


@dataclass(frozen=True)
class NameRef:
    id: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class CallExpr:
    func: str  # bare name ("comb") or dotted ("math.comb")
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class OpaqueExpr:
    """An expression outside the subset, kept as raw source text."""

    text: str
    constructs: tuple[str, ...]  # descriptions of the offending pieces


Expr = IntLit | FloatLit | NameRef | Neg | BinOp | CallExpr | OpaqueExpr

_AST_OPS = {
    ast.Add: "+",
    ast.Sub: "-",
    ast.Mult: "*",
    ast.Div: "/",
    ast.FloorDiv: "//",
    ast.Mod: "%",
    ast.Pow: "**",
}


def _convert(node: ast.expr, bad: list[str]) -> Expr:
    match node:
        case ast.Constant(value=bool()):
            bad.append("bool literal")
        case ast.Constant(value=int() as v):
            return IntLit(v)
        case ast.Constant(value=float() as v):
            return FloatLit(v)
        case ast.Constant(value=v):
            bad.append(f"{type(v).__name__} literal")
        case ast.Name(id=name):
            return NameRef(name)
        case ast.UnaryOp(op=ast.USub(), operand=inner):
            return Neg(_convert(inner, bad))
        case ast.UnaryOp(op=ast.UAdd(), operand=inner):
            return _convert(inner, bad)
        case ast.BinOp(left=l, op=op, right=r) if type(op) in _AST_OPS:
            return BinOp(_AST_OPS[type(op)], _convert(l, bad), _convert(r, bad))
        case ast.BinOp(op=op):
            bad.append(f"operator {type(op).__name__}")
        case ast.Call(func=f, args=args, keywords=kws):
            name = None
            match f:
                case ast.Name(id=fn):
                    name = fn
                case ast.Attribute(value=ast.Name(id=base), attr=attr):
                    name = f"{base}.{attr}"
                case _:
                    bad.append("computed call target")
            if kws:
                bad.append("keyword argument")
            if name is not None and not kws:
                return CallExpr(name, tuple(_convert(a, bad) for a in args))
        case _:
            bad.append(type(node).__name__)
    return IntLit(0)  # placeholder; caller discards when bad is non-empty


def parse_expression(text: str, line: int = 0) -> Expr:
    """Parse one expression; out-of-subset constructs yield an OpaqueExpr."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ProgramSyntaxError(line, f"bad expression: {exc.msg}") from None
    bad: list[str] = []
    expr = _convert(tree.body, bad)
    if bad:
        return OpaqueExpr(text.strip(), tuple(dict.fromkeys(bad)))
    return expr


def collect_names(expr: Expr) -> list[str]:
    """Variable names referenced by an expression, in first-use order."""
    out: dict[str, None] = {}

    def walk(e: Expr) -> None:
        match e:
            case NameRef(id=name):
                out.setdefault(name)
            case Neg(operand=inner):
                walk(inner)
            case BinOp(left=l, right=r):
                walk(l)
                walk(r)
            case CallExpr(args=args):
                for a in args:
                    walk(a)
            case OpaqueExpr(text=text):
                try:
                    tree = ast.parse(text, mode="eval")
                except SyntaxError:
                    return
                for node in ast.walk(tree):
                    if isinstance(node, ast.Name):
                        out.setdefault(node.id)

    walk(expr)
    return list(out)


def expr_source(expr: Expr) -> str:
    """Render an expression back to source with minimal parentheses."""

    def render(e: Expr, parent_prec: int, tie_parens: bool) -> str:
        match e:
            case IntLit(value=v):
                return str(v)
            case FloatLit(value=v):
                return repr(v)
            case NameRef(id=name):
                return name
            case Neg(operand=inner):
                body = f"-{render(inner, _NEG_PRECEDENCE, False)}"
                return f"({body})" if parent_prec > _NEG_PRECEDENCE else body
            case BinOp(op=op, left=l, right=r):
                prec = _PRECEDENCE[op]
                if op == "**":  # right-associative: left child needs tie parens
                    body = f"{render(l, prec, True)} {op} {render(r, prec, False)}"
                else:
                    body = f"{render(l, prec, False)} {op} {render(r, prec, True)}"
                if prec < parent_prec or (prec == parent_prec and tie_parens):
                    return f"({body})"
                return body
            case CallExpr(func=fn, args=args):
                return f"{fn}({', '.join(render(a, 0, False) for a in args)})"
            case OpaqueExpr(text=text):
                return text
        raise TypeError(f"not an expression: {e!r}")

    return render(expr, 0, False)


def rename_refs(expr: Expr, old: str, new: str) -> Expr:
    """Rewrite every reference to `old` into `new`, returning a new tree."""
    match expr:
        case NameRef(id=name) if name == old:
            return NameRef(new)
        case Neg(operand=inner):
            return Neg(rename_refs(inner, old, new))
        case BinOp(op=op, left=l, right=r):
            return BinOp(op, rename_refs(l, old, new), rename_refs(r, old, new))
        case CallExpr(func=fn, args=args):
            return CallExpr(fn, tuple(rename_refs(a, old, new) for a in args))
        case OpaqueExpr(text=text, constructs=c):
            return OpaqueExpr(re.sub(rf"\b{re.escape(old)}\b", new, text), c)
    return expr


## ---------- statements and programs ----------


@dataclass
class Statement:
    kind: str  # "assign" | "return" | "import"
    line: int = 0  # 1-based line of the code line in the rendered source
    indent: str = "    "
    code_text: str = ""  # the code part exactly as written, no comment
    target: str | None = None
    expr: Expr | None = None
    module: str | None = None
    imported: tuple[str, ...] = ()
    reason: str | None = None
    prefix_lines: tuple[str, ...] = ()  # raw comment lines preceding the code
    expected: int | float | None = None
    expected_unknown: bool = False  # trailing comment was `# ?`
    trail: str | None = None  # raw trailing comment, starting at '#'
    pad: str = "  "  # spacing between code and trailing comment

    @property
    def line_span(self) -> tuple[int, int]:
        return (self.line - len(self.prefix_lines), self.line)


@dataclass
class AnnotatedProgram:
    name: str
    statements: list[Statement]
    source_text: str = ""
    trailing: tuple[str, ...] = ()  # comment lines after the return, if any

    @property
    def return_statement(self) -> Statement:
        return self.statements[-1]

    def assigned_names(self) -> list[str]:
        seen: dict[str, None] = {}
        for st in self.statements:
            if st.kind == "assign":
                seen.setdefault(st.target)
            elif st.kind == "import":
                for name in st.imported:
                    seen.setdefault(name)
        return list(seen)


_DEF_RE = re.compile(r"^def\s+([A-Za-z_]\w*)\s*\(\s*\)\s*:\s*$")
_ASSIGN_RE = re.compile(r"^([A-Za-z_]\w*)\s*=(?!=)\s*(.+)$")
_FROM_IMPORT_RE = re.compile(
    r"^from\s+([A-Za-z_][\w.]*)\s+import\s+([A-Za-z_]\w*(?:\s*,\s*[A-Za-z_]\w*)*)$"
)
_IMPORT_RE = re.compile(r"^import\s+([A-Za-z_][\w.]*)$")
_INT_RE = re.compile(r"^[+-]?\d+$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")


def _parse_trail(trail: str | None, line: int) -> tuple[int | float | None, bool]:
    """Split a raw trailing comment into (expected value, unknown flag)."""
    if trail is None:
        return None, False
    body = trail.lstrip("#").strip()
    if body == "?":
        return None, True
    if _INT_RE.match(body):
        return int(body), False
    if _FLOAT_RE.match(body) and any(ch in body for ch in ".eE"):
        return float(body), False
    return None, False  # prose comment, kept verbatim but not checked


def _extract_reason(prefix_lines: list[str]) -> str | None:
    if not any(REASON_OPEN in ln for ln in prefix_lines):
        return None
    payloads = []
    for ln in prefix_lines:
        body = ln.strip()
        body = body[1:] if body.startswith("#") else body
        payloads.append(body[1:] if body.startswith(" ") else body)
    joined = "\n".join(payloads)
    parts = re.findall(
        re.escape(REASON_OPEN) + r"(.*?)" + re.escape(REASON_CLOSE), joined, re.DOTALL
    )
    return "\n".join(p.strip() for p in parts)


def parse_program(text: str) -> AnnotatedProgram:
    """Parse source text into an AnnotatedProgram.

    Raises ProgramSyntaxError on malformed input and UnterminatedReasonError
    when a reason comment is opened but never closed.
    """
    lines = text.splitlines()
    name: str | None = None
    statements: list[Statement] = []
    pending: list[str] = []
    in_reason = False
    reason_start = 0
    saw_return = False

    for i, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if name is None:
            if not stripped:
                continue
            m = _DEF_RE.match(stripped)
            if not m:
                raise ProgramSyntaxError(i, "expected a 'def solution():' line")
            if m.group(1) != "solution":
                raise ProgramSyntaxError(i, "function must be named 'solution'")
            name = m.group(1)
            continue
        if not stripped:
            continue
        if stripped.startswith("#"):
            pending.append(raw.rstrip())
            if in_reason:
                if REASON_CLOSE in stripped:
                    in_reason = False
            elif REASON_OPEN in stripped:
                reason_start = i
                in_reason = REASON_CLOSE not in stripped
            continue
        if in_reason:
            raise UnterminatedReasonError(reason_start)
        if saw_return:
            raise ProgramSyntaxError(i, "statement after return")

        indent = raw[: len(raw) - len(raw.lstrip())]
        if not indent:
            raise ProgramSyntaxError(i, "statement outside the function body")
        hash_pos = raw.find("#")
        if hash_pos == -1:
            code_raw, pad, trail = raw.rstrip(), "  ", None
        else:
            code_raw = raw[:hash_pos]
            trail = raw[hash_pos:].rstrip()
            pad = code_raw[len(code_raw.rstrip()) :]
            code_raw = code_raw.rstrip()
        code_text = code_raw[len(indent) :]
        expected, unknown = _parse_trail(trail, i)
        st = Statement(
            kind="",
            line=i,
            indent=indent,
            code_text=code_text,
            reason=_extract_reason(pending),
            prefix_lines=tuple(pending),
            expected=expected,
            expected_unknown=unknown,
            trail=trail,
            pad=pad,
        )
        pending = []

        if re.match(r"return\b", code_text):
            rest = code_text[len("return") :].strip()
            if not rest:
                raise ProgramSyntaxError(i, "return without a value")
            st.kind = "return"
            st.expr = parse_expression(rest, i)
            saw_return = True
        elif m := _FROM_IMPORT_RE.match(code_text):
            st.kind = "import"
            st.module = m.group(1)
            st.imported = tuple(n.strip() for n in m.group(2).split(","))
        elif m := _IMPORT_RE.match(code_text):
            st.kind = "import"
            st.module = m.group(1)
        elif m := _ASSIGN_RE.match(code_text):
            st.kind = "assign"
            st.target = m.group(1)
            st.expr = parse_expression(m.group(2), i)
        else:
            raise ProgramSyntaxError(i, f"unsupported statement: {code_text!r}")
        statements.append(st)

    if in_reason:
        raise UnterminatedReasonError(reason_start)
    if name is None:
        raise ProgramSyntaxError(1, "empty input")
    if not saw_return:
        raise ProgramSyntaxError(len(lines), "missing return")
    prog = AnnotatedProgram(
        name=name, statements=statements, source_text=text, trailing=tuple(pending)
    )
    renumber(prog)
    return prog


def render_program(p: AnnotatedProgram) -> str:
    """Render back to source. Statements keep their original spelling."""
    out = [f"def {p.name}():"]
    for st in p.statements:
        out.extend(st.prefix_lines)
        line = st.indent + st.code_text
        if st.trail is not None:
            line += st.pad + st.trail
        out.append(line)
    out.extend(p.trailing)
    return "\n".join(out) + "\n"


def renumber(p: AnnotatedProgram) -> AnnotatedProgram:
    """Recompute statement line numbers to match render_program's layout."""
    line = 1  # the def line
    for st in p.statements:
        line += len(st.prefix_lines) + 1
        st.line = line
    return p


def count_steps(p: AnnotatedProgram) -> int:
    """Number of first-level code blocks.

    A block is a maximal run of statements governed by one reason annotation;
    unannotated statements attach to the block in progress (so the final
    return counts inside the last reasoned block).
    """
    blocks = 0
    in_block = False
    for st in p.statements:
        if st.reason is not None or not in_block:
            blocks += 1
            in_block = True
    return blocks


def block_bounds(p: AnnotatedProgram, index: int) -> tuple[int, int]:
    """Half-open statement range [start, end) of the block containing index."""
    starts = []
    in_block = False
    for i, st in enumerate(p.statements):
        if st.reason is not None or not in_block:
            starts.append(i)
            in_block = True
    for j, start in enumerate(starts):
        end = starts[j + 1] if j + 1 < len(starts) else len(p.statements)
        if start <= index < end:
            return start, end
    raise IndexError(index)


## ---------- subset classification ----------


@dataclass(frozen=True)
class SubsetReport:
    supported: bool
    offending: tuple[tuple[int, str], ...]  # (line, construct description)


# the callable names programs may use; the evaluator binds them to objects
DEFAULT_FUNCTION_NAMES = frozenset(
    {"comb", "factorial", "gcd", "sqrt", "floor", "ceil", "abs", "min", "max", "round", "pow"}
)
DEFAULT_MODULE_NAMES = frozenset({"math"})


def classify_subset(
    p: AnnotatedProgram,
    whitelist: frozenset[str] | set[str] = DEFAULT_FUNCTION_NAMES,
    module_whitelist: frozenset[str] | set[str] = DEFAULT_MODULE_NAMES,
) -> SubsetReport:
    """Report whether every construct is inside the evaluable subset.

    Calls are checked against `whitelist` (bare names; dotted calls must name
    a whitelisted module and function), imports against `module_whitelist`.
    """
    offending: list[tuple[int, str]] = []

    def check_expr(e: Expr, line: int) -> None:
        match e:
            case OpaqueExpr(constructs=cs):
                offending.extend((line, c) for c in cs)
            case Neg(operand=inner):
                check_expr(inner, line)
            case BinOp(left=l, right=r):
                check_expr(l, line)
                check_expr(r, line)
            case CallExpr(func=fn, args=args):
                if "." in fn:
                    base, attr = fn.split(".", 1)
                    if base not in module_whitelist or attr not in whitelist:
                        offending.append((line, f"call: {fn}"))
                elif fn not in whitelist:
                    offending.append((line, f"call: {fn}"))
                for a in args:
                    check_expr(a, line)

    for st in p.statements:
        if st.kind == "import":
            if st.module not in module_whitelist:
                offending.append((st.line, f"import: {st.module}"))
        elif st.expr is not None:
            check_expr(st.expr, st.line)
    return SubsetReport(not offending, tuple(offending))


## ---------- construction helpers ----------


def format_value(v: int | float) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def make_assign(
    target: str,
    expr: Expr | str,
    reason: str | None = None,
    expected: int | float | None = None,
    expected_unknown: bool = False,
    indent: str = "    ",
) -> Statement:
    """Build a fresh assign statement with a synthesized source spelling."""
    tree = parse_expression(expr) if isinstance(expr, str) else expr
    trail = None
    if expected is not None:
        trail = f"# {format_value(expected)}"
    elif expected_unknown:
        trail = "# ?"
    prefix = (f"{indent}# {REASON_OPEN}{reason}{REASON_CLOSE}",) if reason else ()
    return Statement(
        kind="assign",
        indent=indent,
        code_text=f"{target} = {expr_source(tree)}",
        target=target,
        expr=tree,
        reason=reason,
        prefix_lines=prefix,
        expected=expected,
        expected_unknown=expected_unknown,
        trail=trail,
    )


def rename_statement_refs(st: Statement, old: str, new: str) -> Statement:
    """Rename variable references (not assignment targets) in one statement."""
    if st.kind == "import" or st.expr is None:
        return st
    new_expr = rename_refs(st.expr, old, new)
    if new_expr == st.expr:
        return st
    if st.kind == "assign":
        lhs, _, rhs = st.code_text.partition("=")
        new_code = lhs + "=" + re.sub(rf"\b{re.escape(old)}\b", new, rhs)
    else:
        new_code = re.sub(rf"\b{re.escape(old)}\b", new, st.code_text)
    return replace(st, expr=new_expr, code_text=new_code)


def set_expected(st: Statement, value: int | float | None, unknown: bool = False) -> Statement:
    """Return a copy of st with its trailing value comment replaced."""
    if value is not None:
        trail = f"# {format_value(value)}"
    elif unknown:
        trail = "# ?"
    else:
        trail = None
    pad = st.pad if st.trail is not None else "  "
    return replace(st, expected=value, expected_unknown=unknown, trail=trail, pad=pad)
