"""End-to-end dataset synthesis.

Round 0 turns seed word problems into annotated solution programs and
keeps only those whose execution reproduces the seed's gold answer. Each
later round applies a structural intervention to every retained parent,
asks an agent to translate the rewritten program back into a word problem,
runs the QC gates, and retains survivors as the next round's parents. A
question whose round produces nothing drops out of later rounds.

Ground truth always comes from executing the rewritten program; agent
answers are cross-checked against it, never trusted.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
from dataclasses import dataclass, field, asdict

from .errors import SolstructError, UndefinedNameError
from . import agentio, bench, evalcore, graphx, intervene, qc
from . import solgrammar as sg

GSM8K = "gsm8k"
MATH = "math"

GOLD_SEPARATOR = "####"


class SchemaError(SolstructError):
    pass


## ---------- seeds ----------


@dataclass
class SeedProblem:
    id: str
    question: str
    reasoning: str
    gold: str
    style: str  # gsm8k | math
    program: str | None = None  # canned program for offline runs


def extract_gold(text: str, style: str) -> str:
    """The gold answer embedded in a seed solution."""
    if style == GSM8K:
        if GOLD_SEPARATOR not in text:
            raise SchemaError(f"no '{GOLD_SEPARATOR}' separator in answer text")
        tail = text.rsplit(GOLD_SEPARATOR, 1)[1].strip()
        return tail.splitlines()[0].strip().replace(",", "")
    try:
        return bench.extract_boxed(text)
    except bench.NoBoxedAnswer as exc:
        raise SchemaError(f"no boxed answer in solution: {exc}") from exc


def load_dataset(path: str, style: str | None = None) -> list[SeedProblem]:
    """Read seed problems from JSONL.

    Rows carry either question/answer (gsm8k shape, gold after '####') or
    problem/solution (math shape, gold in the last \\boxed). An explicit
    "style" field on a row wins over shape detection.
    """
    seeds: list[SeedProblem] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: bad JSON: {exc}") from exc
            row_style = row.get("style") or style
            if row_style is None:
                if "question" in row and "answer" in row:
                    row_style = GSM8K
                elif "problem" in row and "solution" in row:
                    row_style = MATH
                else:
                    raise SchemaError(f"{path}:{lineno}: unrecognized row shape")
            if row_style == GSM8K:
                question, solution = row.get("question"), row.get("answer")
            elif row_style == MATH:
                question, solution = row.get("problem"), row.get("solution")
            else:
                raise SchemaError(f"{path}:{lineno}: unknown style {row_style!r}")
            if not question or not solution:
                raise SchemaError(f"{path}:{lineno}: missing question or solution")
            gold = row.get("gold") or extract_gold(solution, row_style)
            reasoning = solution.rsplit(GOLD_SEPARATOR, 1)[0].strip() if row_style == GSM8K else solution
            seeds.append(
                SeedProblem(
                    id=str(row.get("id", f"q{lineno:04d}")),
                    question=question,
                    reasoning=reasoning,
                    gold=gold,
                    style=row_style,
                    program=row.get("program"),
                )
            )
    if not seeds:
        raise SchemaError(f"{path}: no seed problems")
    return seeds


## ---------- records ----------


def record_id(parent_key: str, round_idx: int, program_source: str) -> str:
    digest = hashlib.sha1(
        f"{parent_key}|{round_idx}|{program_source}".encode("utf-8")
    ).hexdigest()
    return digest[:16]


@dataclass
class GenerationRecord:
    id: str
    question_id: str
    parent_id: str | None
    round: int
    source: str  # gsm8k | math
    question: str
    solution_text: str
    program_source: str
    answer: str
    step_count: int
    qc: dict = field(default_factory=dict)
    intervention: dict | None = None
    agent_meta: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json_dict(cls, row: dict) -> "GenerationRecord":
        known = {f: row.get(f) for f in cls.__dataclass_fields__}
        known["qc"] = known.get("qc") or {}
        known["agent_meta"] = known.get("agent_meta") or {}
        return cls(**known)


@dataclass
class Rejection:
    question_id: str
    parent_id: str | None
    round: int
    repeat: int
    attempt: int
    gate: str
    cause: str

    def to_json_dict(self) -> dict:
        return asdict(self)


## ---------- configuration ----------


def derive_seed(master: int, repeat: int, index: int) -> int:
    digest = hashlib.sha256(f"{master}:{repeat}:{index}".encode("utf-8")).hexdigest()
    return int(digest[:16], 16)


@dataclass
class RunConfig:
    dataset: str = ""
    out_dir: str = "out"
    style: str | None = None
    rounds: int = 3
    repeats: int = 1
    master_seed: int = 0
    resample_budget: int = 3
    mock: bool = True
    mock_fail_substrings: tuple[str, ...] = ()
    agent: dict = field(default_factory=dict)
    few_shot: dict = field(default_factory=dict)  # template id -> override text

    def agent_config(self) -> agentio.AgentConfig:
        return agentio.AgentConfig(**self.agent)

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d["mock_fail_substrings"] = list(self.mock_fail_substrings)
        return d

    @classmethod
    def from_json_dict(cls, row: dict) -> "RunConfig":
        known = {k: v for k, v in row.items() if k in cls.__dataclass_fields__}
        if "mock_fail_substrings" in known:
            known["mock_fail_substrings"] = tuple(known["mock_fail_substrings"])
        return cls(**known)

    @classmethod
    def from_json_file(cls, path: str) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def _few_shot(cfg: RunConfig, template_id: str) -> str:
    return cfg.few_shot.get(template_id) or agentio.default_few_shot(template_id)


def make_sender(acfg: agentio.AgentConfig, transport=None):
    def send(prompt: str) -> str:
        return agentio.complete(prompt, acfg, transport=transport)

    return send


## ---------- round 0: programs from seeds ----------


def run_codegen_stage(
    seeds: list[SeedProblem], send, cfg: RunConfig
) -> tuple[list[GenerationRecord], list[Rejection]]:
    """Generate, execute, and gold-check a solution program per seed."""
    records: list[GenerationRecord] = []
    rejections: list[Rejection] = []
    few_shot = _few_shot(cfg, agentio.CODEGEN)
    for seed in seeds:
        prompt = agentio.render_prompt(
            agentio.CODEGEN,
            {
                "few_shot_examples": few_shot,
                "question": seed.question,
                "reasoning": seed.reasoning,
            },
        )
        response = send(prompt)

        def reject(cause: str):
            rejections.append(
                Rejection(seed.id, None, 0, 0, 0, "local_check", cause)
            )

        try:
            parsed = agentio.parse_generation(response, agentio.CODEGEN)
        except agentio.MalformedResponse as exc:
            reject(f"malformed_response: {exc}")
            continue
        try:
            program = sg.parse_program(parsed.code)
        except sg.ProgramSyntaxError as exc:
            reject(f"parse_error: {exc}")
            continue
        subset = sg.classify_subset(program)
        if not subset.supported:
            line, what = subset.offending[0]
            reject(f"unsupported construct at line {line}: {what}")
            continue
        try:
            trace = evalcore.evaluate(program)
        except (evalcore.EvaluationError, UndefinedNameError) as exc:
            reject(f"execution_error: {exc}")
            continue
        program = intervene.annotate_execution(program, trace)
        local = qc.local_check(program, trace=trace)
        if not local.passed:
            reject(local.cause or "annotation mismatch")
            continue
        answer = sg.format_value(trace.result)
        if not bench.answers_equal(answer, seed.gold):
            reject(f"gold_mismatch: program gives {answer}, gold is {seed.gold}")
            continue
        source_text = sg.render_program(program)
        records.append(
            GenerationRecord(
                id=record_id(seed.id, 0, source_text),
                question_id=seed.id,
                parent_id=None,
                round=0,
                source=seed.style,
                question=seed.question,
                solution_text=seed.reasoning,
                program_source=source_text,
                answer=answer,
                qc={"local_check": True, "gold_match": True},
                step_count=sg.count_steps(program),
            )
        )
    return records, rejections


## ---------- extension rounds ----------


def _external_verdict(send, cfg: RunConfig, question: str, reasoning: str) -> qc.EvalVerdict:
    prompt = agentio.render_prompt(
        agentio.EXTERNAL_EVAL, {"question": question, "reasoning": reasoning}
    )
    return qc.parse_eval(send(prompt))


def _build_record(
    parent: GenerationRecord,
    round_idx: int,
    question: str,
    solution_text: str,
    program: sg.AnnotatedProgram,
    trace: evalcore.Trace,
    rec: intervene.InterventionRecord,
    decision: qc.RetentionDecision,
    model: str,
) -> GenerationRecord:
    source_text = sg.render_program(program)
    return GenerationRecord(
        id=record_id(parent.id, round_idx, source_text),
        question_id=parent.question_id,
        parent_id=parent.id,
        round=round_idx,
        source=parent.source,
        question=question,
        solution_text=solution_text,
        program_source=source_text,
        answer=sg.format_value(trace.result),
        step_count=sg.count_steps(program),
        qc=dict(decision.gates),
        intervention={
            "kind": rec.kind,
            "target": rec.target_name,
            "mapping": None
            if rec.mapping is None
            else {"op": rec.mapping.op, "operand": rec.mapping.operand},
            "renames": dict(rec.renames),
        },
        agent_meta={"model": model},
    )


def _extend_gsm8k_once(
    parent: GenerationRecord,
    program: sg.AnnotatedProgram,
    orig_trace: evalcore.Trace,
    rng: random.Random,
    send,
    cfg: RunConfig,
    round_idx: int,
) -> tuple[GenerationRecord | None, str, str]:
    """One attempt; returns (record or None, gate, cause)."""
    graph = graphx.build_graph(program)
    rec = intervene.extend_structure(program, graph, rng)
    new_trace = evalcore.evaluate(rec.rewritten)
    masked = intervene.annotate_execution(rec.rewritten, new_trace, mask_result=True)
    prompt = agentio.render_prompt(
        agentio.TRANSLATE_GSM8K,
        {
            "few_shot_examples": _few_shot(cfg, agentio.TRANSLATE_GSM8K),
            "question": parent.question,
            "program": parent.program_source.rstrip("\n"),
            "program_intervened": sg.render_program(masked).rstrip("\n"),
        },
    )
    response = send(prompt)
    try:
        parsed = agentio.parse_generation(response, agentio.TRANSLATE_GSM8K)
    except agentio.MalformedResponse as exc:
        return None, "self_eval", f"malformed_response: {exc}"

    executed = sg.format_value(new_trace.result)
    answer_ok = parsed.answer is not None and bench.answers_equal(parsed.answer, executed)
    self_verdict = parsed.self_eval.verdict if answer_ok else qc.INCORRECT
    local = qc.local_check(rec.rewritten, trace=new_trace)
    diff = qc.diff_filter(orig_trace, new_trace, qc.derive_varmap(rec, program))
    ext = _external_verdict(send, cfg, parsed.question, parsed.solution or "")
    evals = qc.EvalOutcome(
        self_verdict,
        ext.verdict,
        [e for e in (parsed.self_eval.explanation, ext.explanation) if e],
    )
    decision = qc.retain(local, diff, evals)
    if not decision.retained:
        if decision.failed_gate == "self_eval" and not answer_ok:
            cause = f"answer_mismatch: agent said {parsed.answer}, execution gives {executed}"
        elif decision.failed_gate == "local_check":
            cause = local.cause or "annotation mismatch"
        elif decision.failed_gate == "diff_filter":
            cause = f"{diff.status}: {diff.var}"
        else:
            cause = decision.failed_gate
        return None, decision.failed_gate, str(cause)
    record = _build_record(
        parent, round_idx, parsed.question, parsed.solution or "",
        rec.rewritten, new_trace, rec, decision, cfg.agent_config().model,
    )
    return record, "", ""


def _extend_math_once(
    parent: GenerationRecord,
    program: sg.AnnotatedProgram,
    orig_trace: evalcore.Trace,
    send,
    cfg: RunConfig,
    round_idx: int,
) -> tuple[GenerationRecord | None, str, str]:
    prompt = agentio.render_prompt(
        agentio.TRANSLATE_MATH,
        {
            "few_shot_examples": _few_shot(cfg, agentio.TRANSLATE_MATH),
            "question": parent.question,
            "program": parent.program_source.rstrip("\n"),
        },
    )
    response = send(prompt)
    try:
        parsed = agentio.parse_generation(response, agentio.TRANSLATE_MATH)
    except agentio.MalformedResponse as exc:
        return None, "self_eval", f"malformed_response: {exc}"
    try:
        new_program = sg.parse_program(parsed.code)
    except sg.ProgramSyntaxError as exc:
        return None, "local_check", f"parse_error: {exc}"
    subset = sg.classify_subset(new_program)
    if not subset.supported:
        line, what = subset.offending[0]
        return None, "local_check", f"unsupported construct at line {line}: {what}"
    try:
        new_trace = evalcore.evaluate(new_program)
    except (evalcore.EvaluationError, UndefinedNameError) as exc:
        return None, "local_check", f"execution_error: {exc}"
    new_program = intervene.annotate_execution(new_program, new_trace)
    if sg.count_steps(new_program) <= parent.step_count:
        return None, "local_check", "no_step_added"

    rec = intervene.InterventionRecord(
        kind=intervene.KIND_AGENT_EXTEND,
        target_id=None,
        target_name=None,
        mapping=None,
        inserted=parsed.added_code or [],
        insert_at=None,
        renames={},
        rewritten=new_program,
    )
    local = qc.local_check(new_program, trace=new_trace)
    diff = qc.diff_filter(orig_trace, new_trace, qc.derive_varmap(rec, program))
    reasoning = parsed.solution or parsed.added_code_text or parsed.code
    ext = _external_verdict(send, cfg, parsed.question, reasoning)
    evals = qc.EvalOutcome(
        parsed.self_eval.verdict,
        ext.verdict,
        [e for e in (parsed.self_eval.explanation, ext.explanation) if e],
    )
    decision = qc.retain(local, diff, evals)
    if not decision.retained:
        if decision.failed_gate == "local_check":
            cause = local.cause or "annotation mismatch"
        elif decision.failed_gate == "diff_filter":
            cause = f"{diff.status}: {diff.var}"
        else:
            cause = decision.failed_gate
        return None, decision.failed_gate, str(cause)
    record = _build_record(
        parent, round_idx, parsed.question, parsed.solution or "",
        new_program, new_trace, rec, decision, cfg.agent_config().model,
    )
    return record, "", ""


def run_extension_round(
    parents: list[GenerationRecord],
    send,
    cfg: RunConfig,
    rngs: dict[str, random.Random],
    round_idx: int,
    repeat: int = 0,
) -> tuple[list[GenerationRecord], list[Rejection]]:
    """Extend each parent once, spending up to the resample budget."""
    records: list[GenerationRecord] = []
    rejections: list[Rejection] = []
    for parent in sorted(parents, key=lambda r: r.id):
        program = sg.parse_program(parent.program_source)
        orig_trace = evalcore.evaluate(program)
        rng = rngs[parent.question_id]
        retained = None
        for attempt in range(cfg.resample_budget):
            try:
                if parent.source == MATH:
                    retained, gate, cause = _extend_math_once(
                        parent, program, orig_trace, send, cfg, round_idx
                    )
                else:
                    retained, gate, cause = _extend_gsm8k_once(
                        parent, program, orig_trace, rng, send, cfg, round_idx
                    )
            except (intervene.InterventionError, graphx.EmptyCandidatesError) as exc:
                retained, gate, cause = None, "local_check", f"{type(exc).__name__}: {exc}"
            if retained is not None:
                records.append(retained)
                break
            rejections.append(
                Rejection(parent.question_id, parent.id, round_idx, repeat, attempt, gate, cause)
            )
    return records, rejections


## ---------- inference over a finished dataset ----------


def collect_responses(records: list[GenerationRecord], send) -> dict[str, str]:
    """Ask the agent to solve every record's question; keyed by record id."""
    out: dict[str, str] = {}
    for rec in sorted(records, key=lambda r: r.id):
        prompt = agentio.render_prompt(agentio.INFERENCE, {"problem": rec.question})
        out[rec.id] = send(prompt)
    return out


## ---------- the full run ----------


@dataclass
class RunResult:
    records: list[GenerationRecord]
    rejections: list[Rejection]
    stats: dict
    dataset_path: str | None = None
    rejections_path: str | None = None
    stats_path: str | None = None


def emit_stats(records: list[GenerationRecord], rejections: list[Rejection]) -> dict:
    rounds: dict[int, dict] = {}
    for rec in records:
        bucket = rounds.setdefault(
            rec.round, {"records": 0, "rejections": 0, "steps": []}
        )
        bucket["records"] += 1
        bucket["steps"].append(rec.step_count)
    for rej in rejections:
        bucket = rounds.setdefault(
            rej.round, {"records": 0, "rejections": 0, "steps": []}
        )
        bucket["rejections"] += 1
    gates: dict[str, int] = {}
    for rej in rejections:
        gates[rej.gate] = gates.get(rej.gate, 0) + 1
    out_rounds = {}
    for r in sorted(rounds):
        b = rounds[r]
        steps = b.pop("steps")
        b["mean_steps"] = sum(steps) / len(steps) if steps else None
        b["min_steps"] = min(steps) if steps else None
        b["max_steps"] = max(steps) if steps else None
        attempts = b["records"] + b["rejections"]
        b["retention"] = b["records"] / attempts if attempts else None
        out_rounds[str(r)] = b
    return {
        "rounds": out_rounds,
        "total_records": len(records),
        "total_rejections": len(rejections),
        "rejections_by_gate": dict(sorted(gates.items())),
        "questions": len({r.question_id for r in records}),
    }


def _write_jsonl(path: str, rows: list[dict]):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def read_records(path: str) -> list[GenerationRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(GenerationRecord.from_json_dict(json.loads(line)))
    return out


def run_full(cfg: RunConfig, transport=None, seeds: list[SeedProblem] | None = None) -> RunResult:
    """Round 0 plus cfg.rounds extension rounds, repeated cfg.repeats times.

    Repeats reuse the same round-0 programs but draw fresh intervention
    seeds, so they explore different extension chains; identical rewrites
    collapse to one record via the content-addressed id.
    """
    if seeds is None:
        seeds = load_dataset(cfg.dataset, cfg.style)
    if transport is None and cfg.mock:
        transport = agentio.MockAgent(
            programs={s.question: s.program for s in seeds if s.program},
            fail_substrings=cfg.mock_fail_substrings,
        )
    send = make_sender(cfg.agent_config(), transport)

    base_records, base_rejections = run_codegen_stage(seeds, send, cfg)
    by_id: dict[str, GenerationRecord] = {r.id: r for r in base_records}
    rejections = list(base_rejections)
    qindex = {s.id: i for i, s in enumerate(seeds)}

    for repeat in range(cfg.repeats):
        rngs = {
            s.id: random.Random(derive_seed(cfg.master_seed, repeat, qindex[s.id]))
            for s in seeds
        }
        parents = list(base_records)
        for round_idx in range(1, cfg.rounds + 1):
            if not parents:
                break
            children, rejected = run_extension_round(
                parents, send, cfg, rngs, round_idx, repeat
            )
            rejections.extend(rejected)
            for child in children:
                by_id.setdefault(child.id, child)
            parents = children

    records = sorted(by_id.values(), key=lambda r: (r.round, r.question_id, r.id))
    stats = emit_stats(records, rejections)
    result = RunResult(records, rejections, stats)

    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
        result.dataset_path = os.path.join(cfg.out_dir, "dataset.jsonl")
        result.rejections_path = os.path.join(cfg.out_dir, "rejections.jsonl")
        result.stats_path = os.path.join(cfg.out_dir, "stats.json")
        _write_jsonl(result.dataset_path, [r.to_json_dict() for r in records])
        _write_jsonl(result.rejections_path, [r.to_json_dict() for r in rejections])
        with open(result.stats_path, "w", encoding="utf-8") as fh:
            json.dump(stats, fh, indent=2)
        with open(os.path.join(cfg.out_dir, "config.json"), "w", encoding="utf-8") as fh:
            json.dump(cfg.to_json_dict(), fh, indent=2)
    return result
