"""Structural interventions on solution programs.

Two mechanical operators make a problem harder while keeping executable
ground truth: `perturb_leaf` swaps one literal for a fresh value of the
same kind, and `extend_structure` reroutes a variable through an inserted
arithmetic mapping. A third operator, `splice_agent_extension`, inserts
agent-authored statements on the path where the agent designs the extra
step itself. Every operator re-executes the rewritten program; records
exist only for rewrites that evaluate.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace

from .errors import SolstructError
from . import evalcore, graphx
from . import solgrammar as sg

OP_SYMBOLS = {"add": "+", "sub": "-", "mul": "*"}

KIND_LEAF_PERTURB = "leaf_perturb"
KIND_PROXY_EXTEND = "proxy_extend"
KIND_AGENT_EXTEND = "agent_extend"


class InterventionError(SolstructError):
    pass


class NoPerturbableLeaf(InterventionError):
    pass


class EvaluationFailed(InterventionError):
    """No sampled rewrite evaluated to an effective change."""


class SpliceConflict(InterventionError):
    def __init__(self, name: str):
        super().__init__(f"spliced statement redefines existing variable '{name}'")
        self.name = name


@dataclass(frozen=True)
class MappingSpec:
    """The arithmetic mapping routed through the proxy variable.

    Division is deliberately not an option: it turns int chains into float
    chains and gets rejected downstream anyway.
    """

    op: str  # "add" | "sub" | "mul"
    operand: int
    operand_name: str = "op_var"
    proxy_name: str = "extra_var"

    def __post_init__(self):
        if self.op not in OP_SYMBOLS:
            raise ValueError(f"bad op {self.op!r}")
        if self.op == "mul" and not 2 <= self.operand <= 10:
            raise ValueError("mul operand must be in [2, 10]")
        if self.op in ("add", "sub") and self.operand < 1:
            raise ValueError("add/sub operand must be >= 1")


@dataclass
class InterventionRecord:
    kind: str
    target_id: int | None
    target_name: str | None
    mapping: MappingSpec | None
    inserted: list[sg.Statement]
    insert_at: int | None
    renames: dict[str, str]
    rewritten: sg.AnnotatedProgram
    seed: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "target": self.target_name,
            "mapping": (
                None
                if self.mapping is None
                else {
                    "op": self.mapping.op,
                    "operand": self.mapping.operand,
                    "operand_name": self.mapping.operand_name,
                    "proxy_name": self.mapping.proxy_name,
                }
            ),
            "inserted": [st.code_text for st in self.inserted],
            "insert_at": self.insert_at,
            "renames": dict(self.renames),
            "rewritten": sg.render_program(self.rewritten),
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def sample_mapping(
    rng: random.Random,
    target_value: evalcore.Num,
    operand_name: str = "op_var",
    proxy_name: str = "extra_var",
) -> MappingSpec:
    """Draw an op and operand for a target's current value.

    Mul operands are uniform on [2, 10]; add/sub operands uniform on
    [1, max(2, |target|)]. A sub that would zero out or flip the sign of a
    positive target is issued as add instead.
    """
    op = rng.choice(("add", "sub", "mul"))
    if op == "mul":
        operand = rng.randint(2, 10)
    else:
        operand = rng.randint(1, max(2, int(abs(target_value))))
    if op == "sub" and target_value > 0 and target_value - operand <= 0:
        op = "add"
    return MappingSpec(op, operand, operand_name, proxy_name)


def fresh_names(p: sg.AnnotatedProgram, bases: tuple[str, ...] = ("op_var", "extra_var")) -> tuple[str, ...]:
    """Names not yet used by the program, suffixed _2, _3, ... when taken."""
    taken = set(p.assigned_names())
    for st in p.statements:
        if st.expr is not None:
            taken.update(sg.collect_names(st.expr))
    out = []
    for base in bases:
        name, n = base, 1
        while name in taken:
            n += 1
            name = f"{base}_{n}"
        taken.add(name)
        out.append(name)
    return tuple(out)


def _value_at(trace: evalcore.Trace, stmt_index: int) -> evalcore.Num:
    for e in trace.entries:
        if e.index == stmt_index:
            return e.value
    raise KeyError(stmt_index)


def annotate_execution(
    p: sg.AnnotatedProgram, trace: evalcore.Trace, mask_result: bool = False
) -> sg.AnnotatedProgram:
    """Stamp each assignment's trailing comment with its executed value.

    Prose trailing comments are left alone. With mask_result=True the
    returned variable's defining line (and, when the return is a bare copy,
    the copied variable's defining line) is stamped `# ?` instead, which is
    the shape shown to agents so they compute the final answer themselves.
    """
    by_index = {e.index: e for e in trace.entries}
    masked: set[int] = set()
    if mask_result:
        ret = p.return_statement
        last_def: dict[str, int] = {}
        for i, st in enumerate(p.statements):
            if st.kind == "assign":
                last_def[st.target] = i
        match ret.expr:
            case sg.NameRef(id=name) if name in last_def:
                root_def = last_def[name]
                masked.add(root_def)
                match p.statements[root_def].expr:
                    case sg.NameRef(id=parent) if parent in last_def:
                        masked.add(last_def[parent])

    statements = []
    for i, st in enumerate(p.statements):
        if st.kind == "assign" and i in by_index:
            prose_trail = st.trail is not None and st.expected is None and not st.expected_unknown
            if prose_trail:
                statements.append(st)
            elif i in masked:
                statements.append(sg.set_expected(st, None, unknown=True))
            else:
                statements.append(sg.set_expected(st, by_index[i].value))
        else:
            statements.append(st)
    out = sg.AnnotatedProgram(p.name, statements, trailing=p.trailing)
    sg.renumber(out)
    out.source_text = sg.render_program(out)
    return out


def _finalize(p: sg.AnnotatedProgram) -> sg.AnnotatedProgram:
    sg.renumber(p)
    p.source_text = sg.render_program(p)
    return p


def apply_mapping(
    p: sg.AnnotatedProgram,
    target_def_index: int,
    target_name: str,
    mapping: MappingSpec,
) -> sg.AnnotatedProgram:
    """Insert the proxy mapping after the target's block and reroute readers.

    Every reference to the target name in statements strictly after the
    insertion point is renamed to the proxy; assignment targets are not
    touched. The rewrite is purely structural and does not evaluate.
    """
    _, insert_at = sg.block_bounds(p, target_def_index)
    indent = p.statements[target_def_index].indent
    sym = OP_SYMBOLS[mapping.op]
    op_stmt = sg.make_assign(
        mapping.operand_name,
        sg.IntLit(mapping.operand),
        reason=sg.REASON_PAD,
        expected=mapping.operand,
        indent=indent,
    )
    proxy_stmt = sg.make_assign(
        mapping.proxy_name,
        sg.BinOp(sym, sg.NameRef(target_name), sg.NameRef(mapping.operand_name)),
        reason=sg.REASON_PAD,
        expected_unknown=True,
        indent=indent,
    )
    statements = list(p.statements[:insert_at]) + [op_stmt, proxy_stmt]
    for st in p.statements[insert_at:]:
        statements.append(sg.rename_statement_refs(st, target_name, mapping.proxy_name))
    return _finalize(sg.AnnotatedProgram(p.name, statements, trailing=p.trailing))


def extend_structure(
    p: sg.AnnotatedProgram,
    g: graphx.ComputeGraph,
    rng: random.Random,
    functions: dict[str, object] | None = None,
    max_resamples: int = 5,
) -> InterventionRecord:
    """Pick a target node, insert a sampled proxy mapping, re-execute.

    Mappings that evaluate but change nothing downstream (arithmetically
    absorbed, e.g. multiplying a zero) are resampled at most `max_resamples`
    times before giving up with EvaluationFailed.
    """
    orig_trace = evalcore.evaluate(p, functions)
    orig_final = orig_trace.final_values()
    candidates = sorted(graphx.candidate_targets(g))
    target_id = candidates[rng.randrange(len(candidates))]
    node = g.nodes[target_id]
    target_value = _value_at(orig_trace, node.def_statement)
    operand_name, proxy_name = fresh_names(p)
    desc_names = {g.nodes[d].name for d in graphx.descendants(g, target_id)}

    last_error: Exception | None = None
    for _ in range(1 + max_resamples):
        mapping = sample_mapping(rng, target_value, operand_name, proxy_name)
        rewritten = apply_mapping(p, node.def_statement, node.name, mapping)
        try:
            new_trace = evalcore.evaluate(rewritten, functions)
        except evalcore.EvaluationError as exc:
            last_error = exc
            continue
        new_final = new_trace.final_values()
        proxy_value = new_final[proxy_name]
        changed = any(
            name in new_final
            and (type(new_final[name]) is not type(orig_final[name]) or new_final[name] != orig_final[name])
            for name in desc_names
            if name in orig_final
        )
        if proxy_value == target_value and type(proxy_value) is type(target_value):
            last_error = EvaluationFailed(f"mapping absorbed on {node.name}")
            continue
        if desc_names and not changed:
            last_error = EvaluationFailed(f"no downstream change from {node.name}")
            continue
        rewritten = annotate_execution(rewritten, new_trace)
        insert_at = sg.block_bounds(p, node.def_statement)[1]
        return InterventionRecord(
            kind=KIND_PROXY_EXTEND,
            target_id=target_id,
            target_name=node.name,
            mapping=mapping,
            inserted=[rewritten.statements[insert_at], rewritten.statements[insert_at + 1]],
            insert_at=insert_at,
            renames={node.name: proxy_name},
            rewritten=rewritten,
        )
    raise EvaluationFailed(
        f"no effective mapping for {node.name} after {1 + max_resamples} attempts"
    ) from last_error


def _literal_value(expr: sg.Expr) -> evalcore.Num | None:
    match expr:
        case sg.IntLit(value=v) | sg.FloatLit(value=v):
            return v
        case sg.Neg(operand=sg.IntLit(value=v)) | sg.Neg(operand=sg.FloatLit(value=v)):
            return -v
    return None


def _sample_literal(rng: random.Random, old: evalcore.Num) -> evalcore.Num:
    """A fresh literal of the same kind, never equal to the old one."""
    hi = max(10, 2 * int(abs(old)))
    for _ in range(64):
        base = rng.randint(1, hi)
        new = float(base) + rng.choice((0.0, 0.5)) if isinstance(old, float) else base
        if new != old:
            return new
    return old + 1 if isinstance(old, int) else float(old) + 0.5


def perturb_leaf(
    p: sg.AnnotatedProgram,
    g: graphx.ComputeGraph,
    rng: random.Random,
    functions: dict[str, object] | None = None,
    max_resamples: int = 5,
) -> InterventionRecord:
    """Replace one literal-defined leaf's value and re-execute."""
    leaves = [
        n
        for n in g.nodes
        if n.kind == graphx.LEAF
        and not n.dead
        and _literal_value(p.statements[n.def_statement].expr) is not None
    ]
    if not leaves:
        raise NoPerturbableLeaf("no literal-defined leaf to perturb")
    node = leaves[rng.randrange(len(leaves))]
    st = p.statements[node.def_statement]
    old = _literal_value(st.expr)
    old_magnitude = abs(old)  # perturb magnitude only, keeping the sign
    sign = -1 if old < 0 else 1

    last_error: Exception | None = None
    for _ in range(1 + max_resamples):
        new = _sample_literal(rng, old_magnitude)
        lit = sg.FloatLit(sign * new) if isinstance(new, float) else sg.IntLit(sign * new)
        new_st = replace(
            st,
            expr=lit,
            code_text=f"{st.target} = {sg.expr_source(lit)}",
        )
        statements = list(p.statements)
        statements[node.def_statement] = new_st
        rewritten = _finalize(sg.AnnotatedProgram(p.name, statements, trailing=p.trailing))
        try:
            new_trace = evalcore.evaluate(rewritten, functions)
        except evalcore.EvaluationError as exc:
            last_error = exc
            continue
        rewritten = annotate_execution(rewritten, new_trace)
        return InterventionRecord(
            kind=KIND_LEAF_PERTURB,
            target_id=node.id,
            target_name=node.name,
            mapping=None,
            inserted=[],
            insert_at=None,
            renames={},
            rewritten=rewritten,
        )
    raise EvaluationFailed(f"no viable perturbation for {node.name}") from last_error


def splice_agent_extension(
    p: sg.AnnotatedProgram,
    added: list[sg.Statement] | str,
    anchor: int,
    rename: tuple[str, str] | None = None,
) -> sg.AnnotatedProgram:
    """Insert agent-authored statements at a statement index.

    `added` may be raw source lines; they are parsed as body statements.
    When `rename=(old, new)` is given, references to `old` strictly after
    the spliced segment are renamed to `new` (the agent's declared proxy).
    Splicing an empty list returns the program unchanged.
    """
    if isinstance(added, str):
        added = parse_added_statements(added)
    if not added:
        return p
    if not 0 <= anchor <= len(p.statements):
        raise InterventionError(f"anchor {anchor} out of range")
    existing = set(p.assigned_names())
    for st in added:
        if st.kind == "assign" and st.target in existing:
            raise SpliceConflict(st.target)
    statements = list(p.statements[:anchor]) + list(added)
    for st in p.statements[anchor:]:
        if rename is not None:
            st = sg.rename_statement_refs(st, rename[0], rename[1])
        statements.append(st)
    return _finalize(sg.AnnotatedProgram(p.name, statements, trailing=p.trailing))


def parse_added_statements(text: str, indent: str = "    ") -> list[sg.Statement]:
    """Parse a bare statement fragment (no def line) into statements."""
    body = "\n".join(
        indent + line.strip() if line.strip() else line for line in text.splitlines()
    )
    wrapper = f"def solution():\n{body}\n{indent}return 0\n"
    prog = sg.parse_program(wrapper)
    return prog.statements[:-1]
