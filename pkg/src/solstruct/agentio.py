"""Prompt rendering, chat-completion transport, and response parsing.

Templates are plain text assets with {slot} tokens; few-shot blocks are
separate editable assets spliced in as a slot. Credentials come only from
environment variables, never from config files. A deterministic mock agent
is provided so the whole pipeline runs offline in tests and demos.
"""

from __future__ import annotations

import hashlib
import os
import re
import threading
import time
from dataclasses import dataclass, field
from importlib import resources

from .errors import SolstructError
from . import evalcore, intervene, qc
from . import solgrammar as sg

CODEGEN = "codegen"
TRANSLATE_GSM8K = "translate_gsm8k"
TRANSLATE_MATH = "translate_math"
EXTERNAL_EVAL = "external_eval"
INFERENCE = "inference"

TEMPLATE_SLOTS: dict[str, tuple[str, ...]] = {
    CODEGEN: ("few_shot_examples", "question", "reasoning"),
    TRANSLATE_GSM8K: ("few_shot_examples", "question", "program", "program_intervened"),
    TRANSLATE_MATH: ("few_shot_examples", "question", "program"),
    EXTERNAL_EVAL: ("question", "reasoning"),
    INFERENCE: ("problem",),
}


class MissingSlot(SolstructError):
    def __init__(self, template_id: str, slot: str):
        super().__init__(f"template {template_id!r} needs slot {slot!r}")
        self.slot = slot


class UnknownTemplate(SolstructError):
    pass


class MalformedResponse(SolstructError):
    def __init__(self, missing: list[str]):
        super().__init__(f"response is missing tags: {', '.join(missing)}")
        self.missing = missing


class AgentError(SolstructError):
    pass


class AuthError(AgentError):
    pass


class TransportError(AgentError):
    pass


class ExhaustedRetries(AgentError):
    pass


def _load_asset(*parts: str) -> str:
    return resources.files("solstruct").joinpath(*parts).read_text(encoding="utf-8")


def template_text(template_id: str) -> str:
    if template_id not in TEMPLATE_SLOTS:
        raise UnknownTemplate(template_id)
    return _load_asset("assets", "templates", f"{template_id}.txt").rstrip("\n")


def default_few_shot(template_id: str) -> str:
    """The shipped few-shot block for a template (editable config asset)."""
    return _load_asset("assets", "fewshot", f"{template_id}.txt").rstrip("\n")


def render_prompt(template_id: str, slots: dict[str, str]) -> str:
    """Substitute every declared slot; unknown templates and absent slots fail."""
    text = template_text(template_id)
    for slot in TEMPLATE_SLOTS[template_id]:
        if slot not in slots:
            raise MissingSlot(template_id, slot)
        text = text.replace("{" + slot + "}", str(slots[slot]))
    return text


## ---------- transport ----------


@dataclass
class AgentConfig:
    model: str = "mock"
    endpoint: str = "http://localhost:8000/v1/chat/completions"
    temperature: float = 0.7
    max_tokens: int = 2048
    timeout_s: float = 120.0
    retry_budget: int = 3
    backoff_s: float = 0.5
    concurrency: int = 4
    api_key_env: str = "SOLSTRUCT_API_KEY"
    _limiter: threading.BoundedSemaphore = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._limiter = threading.BoundedSemaphore(self.concurrency)


def _http_transport(prompt: str, cfg: AgentConfig) -> str:
    import requests

    api_key = os.environ.get(cfg.api_key_env)
    if not api_key:
        raise AuthError(f"environment variable {cfg.api_key_env} is not set")
    payload = {
        "model": cfg.model,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": cfg.temperature,
        "max_tokens": cfg.max_tokens,
    }
    try:
        resp = requests.post(
            cfg.endpoint,
            json=payload,
            headers={"Authorization": f"Bearer {api_key}"},
            timeout=cfg.timeout_s,
        )
    except requests.RequestException as exc:
        raise TransportError(str(exc)) from exc
    if resp.status_code in (401, 403):
        raise AuthError(f"HTTP {resp.status_code} from {cfg.endpoint}")
    if resp.status_code == 429 or resp.status_code >= 500:
        raise TransportError(f"HTTP {resp.status_code}")
    if resp.status_code != 200:
        raise AgentError(f"HTTP {resp.status_code}: {resp.text[:200]}")
    try:
        return resp.json()["choices"][0]["message"]["content"]
    except (KeyError, IndexError, ValueError) as exc:
        raise TransportError(f"unexpected response shape: {exc}") from exc


def complete(prompt: str, cfg: AgentConfig, transport=None) -> str:
    """One completion with bounded concurrency and exponential backoff.

    `transport` is a callable (prompt, cfg) -> str; the default posts to a
    chat-completions endpoint. AuthError is never retried.
    """
    send = transport or _http_transport
    last: Exception | None = None
    for attempt in range(1 + cfg.retry_budget):
        if attempt and cfg.backoff_s:
            time.sleep(cfg.backoff_s * 2 ** (attempt - 1))
        try:
            with cfg._limiter:
                return send(prompt, cfg)
        except AuthError:
            raise
        except TransportError as exc:
            last = exc
    raise ExhaustedRetries(f"gave up after {1 + cfg.retry_budget} attempts: {last}") from last


## ---------- response parsing ----------


@dataclass
class ParsedGeneration:
    question: str | None = None
    solution: str | None = None
    code: str | None = None
    answer: str | None = None
    exvar: str | None = None
    opvar: str | None = None
    added_code: list[sg.Statement] | None = None
    added_code_text: str | None = None
    self_eval: qc.EvalVerdict = field(default_factory=lambda: qc.EvalVerdict(qc.UNPARSEABLE))
    raw: str = ""


_MANDATORY_TAGS = {
    CODEGEN: ("answer",),
    TRANSLATE_GSM8K: ("question", "solution", "answer"),
    TRANSLATE_MATH: ("question", "code"),
    EXTERNAL_EVAL: (),
}

_FENCE_RE = re.compile(r"^\s*```(?:python)?\s*\n(.*?)\n\s*```\s*$", re.DOTALL)


def _tag(text: str, name: str) -> str | None:
    m = re.search(rf"<{name}>(.*?)</{name}>", text, re.DOTALL)
    return m.group(1).strip() if m else None


def _strip_fence(text: str) -> str:
    m = _FENCE_RE.match(text)
    return m.group(1) if m else text


def parse_generation(text: str, schema: str = TRANSLATE_GSM8K) -> ParsedGeneration:
    """Extract tagged fields, tolerating surrounding prose.

    Raises MalformedResponse when a schema-mandatory tag is absent. The
    first occurrence of each tag wins.
    """
    if schema not in _MANDATORY_TAGS:
        raise UnknownTemplate(schema)
    fields = {name: _tag(text, name) for name in
              ("question", "solution", "code", "answer", "exvar", "opvar", "added_code")}
    missing = [name for name in _MANDATORY_TAGS[schema] if fields[name] is None]
    if missing:
        raise MalformedResponse(missing)

    out = ParsedGeneration(self_eval=qc.parse_eval(text), raw=text)
    out.question = fields["question"]
    out.solution = fields["solution"]
    out.exvar = fields["exvar"]
    out.opvar = fields["opvar"]
    if schema == CODEGEN:
        out.code = _strip_fence(fields["answer"])
    else:
        out.answer = fields["answer"]
        if fields["code"] is not None:
            out.code = _strip_fence(fields["code"])
    if fields["added_code"] is not None:
        out.added_code_text = _strip_fence(fields["added_code"])
        try:
            out.added_code = intervene.parse_added_statements(out.added_code_text)
        except sg.ProgramSyntaxError:
            out.added_code = None  # prose crept into the tag; keep the raw text
    return out


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:16]


## ---------- deterministic mock ----------


def canonical_answer_text(value: evalcore.Num) -> str:
    return sg.format_value(value)


class MockAgent:
    """Offline stand-in for a chat model.

    Exact-match canned responses (keyed by prompt hash) win; otherwise the
    mock recognizes each template by its anchor text and produces a
    well-formed, fully deterministic response. Prompts containing any of
    `fail_substrings` get INCORRECT eval verdicts, which is how tests stage
    rejections and stopped questions.
    """

    def __init__(
        self,
        programs: dict[str, str] | None = None,
        canned: dict[str, str] | None = None,
        fail_substrings: tuple[str, ...] = (),
        inference_answers: dict[str, str] | None = None,
        inference_fallback: str | None = None,
    ):
        self.programs = programs or {}
        self.canned = canned or {}
        self.fail_substrings = fail_substrings
        self.inference_answers = inference_answers or {}
        # raw reply for unknown problems; None keeps the boxed default
        self.inference_fallback = inference_fallback
        self.calls = 0

    def __call__(self, prompt: str, cfg: AgentConfig | None = None) -> str:
        self.calls += 1
        hit = self.canned.get(prompt_hash(prompt))
        if hit is not None:
            return hit
        if "generate a code-based solution" in prompt:
            return self._codegen(prompt)
        if "If we add more steps into the code" in prompt:
            return self._translate_gsm8k(prompt)
        if "one additional reasoning step" in prompt:
            return self._translate_math(prompt)
        if prompt.startswith("Evaluate if the given question"):
            return self._external_eval(prompt)
        if prompt.rstrip().endswith("Let's think step by step:"):
            return self._inference(prompt)
        return "<eval>INCORRECT</eval>"

    def _failed(self, prompt: str) -> bool:
        return any(s in prompt for s in self.fail_substrings)

    @staticmethod
    def _last_fenced_block(prompt: str) -> str:
        blocks = re.findall(r"```(?:python)?\n(.*?)```", prompt, re.DOTALL)
        if not blocks:
            raise ValueError("no fenced code block in prompt")
        return blocks[-1].strip("\n")

    @staticmethod
    def _question_line(prompt: str, marker: str) -> str:
        matches = [m.end() for m in re.finditer(marker, prompt)]
        start = matches[-1]
        return prompt[start:].split("\n", 1)[0].strip()

    def _codegen(self, prompt: str) -> str:
        question = self._question_line(prompt, r"\nQuestion: ")
        program = self.programs.get(question)
        if program is None:
            program = "def solution():\n    result = 0\n    return result\n"
        return f"Here is the solution program.\n<answer>\n{program}</answer>"

    def _translate_gsm8k(self, prompt: str) -> str:
        question = self._question_line(prompt, r"\nQUESTION: ")
        source = self._last_fenced_block(prompt)
        program = sg.parse_program(source)
        trace = evalcore.evaluate(program)
        answer = canonical_answer_text(trace.result)
        if self._failed(prompt):
            verdict = "<eval>INCORRECT</eval>"
        else:
            verdict = "<eval>CORRECT</eval>"
        steps = "; ".join(
            f"{st.target} is {canonical_answer_text(by.value)}"
            for st, by in zip(
                [s for s in program.statements if s.kind == "assign"], trace.entries
            )
        )
        tag = prompt_hash(source)[:8]
        return (
            f"MODIFIED SOLUTION: <solution>Work through the plan {tag}: {steps}. "
            f"The final answer is {answer}.</solution>\n"
            f"MODIFIED QUESTION: <question>{question} (Revised plan {tag}: an extra "
            f"quantity now scales the original amounts; follow the updated steps.)</question>\n"
            f"ANSWER: <answer>{answer}</answer>\n"
            f"RENAME: <exvar>extra_var</exvar> <opvar>op_var</opvar>\n"
            f"EVALUATION: {verdict}"
        )

    def _translate_math(self, prompt: str) -> str:
        question = self._question_line(prompt, r"\nQUESTION: ")
        source = self._last_fenced_block(prompt)
        program = sg.parse_program(source)
        ret = program.return_statement
        returned = ret.expr.id if isinstance(ret.expr, sg.NameRef) else None
        if returned is None:
            return "<eval>INCORRECT</eval>"
        (fresh,) = intervene.fresh_names(program, ("adjusted_result",))
        indent = program.statements[0].indent
        added_line = f"{fresh} = {returned} + 7"
        body = program.statements[:-1]
        new_stmts = list(body) + [
            sg.make_assign(
                fresh,
                sg.BinOp("+", sg.NameRef(returned), sg.IntLit(7)),
                reason="The refined question shifts the target quantity up by 7.",
                indent=indent,
            ),
            sg.Statement(
                kind="return",
                indent=indent,
                code_text=f"return {fresh}",
                expr=sg.NameRef(fresh),
            ),
        ]
        new_program = sg.AnnotatedProgram(program.name, new_stmts)
        sg.renumber(new_program)
        new_source = sg.render_program(new_program)
        verdict = "INCORRECT" if self._failed(prompt) else "CORRECT"
        return (
            f"NEW QUESTION: <question>{question} Then add 7 to that value; what do you "
            f"get?</question>\n"
            f"NEW CODE: <code>\n{new_source}</code>\n"
            f"ADDED CODE: <added_code>{added_line}</added_code>\n"
            f"EVALUATION: <eval>{verdict}</eval>"
        )

    def _external_eval(self, prompt: str) -> str:
        if self._failed(prompt):
            return "<eval>INCORRECT</eval><explain>The revised scenario is inconsistent.</explain>"
        return "<eval>CORRECT</eval>"

    def _inference(self, prompt: str) -> str:
        m = re.search(r"\nProblem: (.*?)\n\nLet's think step by step:", prompt, re.DOTALL)
        problem = m.group(1).strip() if m else ""
        answer = self.inference_answers.get(problem)
        if answer is None:
            if self.inference_fallback is not None:
                return self.inference_fallback
            answer = "42"
        return f"Working through it step by step. The answer is \\boxed{{{answer}}}."
