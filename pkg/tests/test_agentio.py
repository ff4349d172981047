import threading
import time

import pytest

from solstruct import agentio, qc
from solstruct import solgrammar as sg


def test_template_anchors():
    assert "generate a code-based solution" in agentio.template_text(agentio.CODEGEN)
    assert agentio.template_text(agentio.CODEGEN).endswith("Reasoning: {reasoning}")
    assert "If we add more steps into the code" in agentio.template_text(
        agentio.TRANSLATE_GSM8K
    )
    assert "one additional reasoning step" in agentio.template_text(
        agentio.TRANSLATE_MATH
    )
    assert agentio.template_text(agentio.EXTERNAL_EVAL).startswith(
        "Evaluate if the given question"
    )
    assert agentio.template_text(agentio.INFERENCE).endswith(
        "Let's think step by step:"
    )


def test_render_prompt_replaces_all_slots():
    prompt = agentio.render_prompt(
        agentio.INFERENCE, {"problem": "What is 2 + 2?"}
    )
    assert "What is 2 + 2?" in prompt
    assert "{problem}" not in prompt
    # literal braces elsewhere in the template survive untouched
    assert "\\boxed{}" in prompt


def test_render_prompt_missing_slot():
    with pytest.raises(agentio.MissingSlot) as exc:
        agentio.render_prompt(agentio.CODEGEN, {"question": "q"})
    assert exc.value.slot == "few_shot_examples"


def test_render_prompt_unknown_template():
    with pytest.raises(agentio.UnknownTemplate):
        agentio.render_prompt("nonsense", {})


def test_default_few_shot_nonempty():
    for tid in (agentio.CODEGEN, agentio.TRANSLATE_GSM8K, agentio.TRANSLATE_MATH):
        block = agentio.default_few_shot(tid)
        assert block.strip()


def test_parse_generation_gsm8k_roundtrip():
    text = (
        "MODIFIED SOLUTION: <solution>steps here</solution>\n"
        "MODIFIED QUESTION: <question>A question?</question>\n"
        "ANSWER: <answer>42</answer>\n"
        "RENAME: <exvar>total_cost</exvar> <opvar>unit_price</opvar>\n"
        "EVALUATION: <eval>CORRECT</eval>"
    )
    out = agentio.parse_generation(text, agentio.TRANSLATE_GSM8K)
    assert out.question == "A question?"
    assert out.solution == "steps here"
    assert out.answer == "42"
    assert out.exvar == "total_cost"
    assert out.opvar == "unit_price"
    assert out.self_eval.verdict == qc.CORRECT


def test_parse_generation_missing_tags():
    with pytest.raises(agentio.MalformedResponse) as exc:
        agentio.parse_generation("<question>q</question>", agentio.TRANSLATE_GSM8K)
    assert set(exc.value.missing) == {"solution", "answer"}


def test_parse_generation_codegen_strips_fences():
    text = "<answer>\n```python\ndef solution():\n    a = 1\n    return a\n```\n</answer>"
    out = agentio.parse_generation(text, agentio.CODEGEN)
    assert out.code.startswith("def solution():")
    assert "```" not in out.code


def test_parse_generation_math_added_code():
    text = (
        "<question>q</question>\n"
        "<code>\ndef solution():\n    a = 1\n    b = a + 1\n    return b\n</code>\n"
        "<added_code>b = a + 1</added_code>\n"
        "<eval>CORRECT</eval>"
    )
    out = agentio.parse_generation(text, agentio.TRANSLATE_MATH)
    assert out.added_code is not None
    assert [st.target for st in out.added_code] == ["b"]


def test_parse_generation_added_code_prose_kept_raw():
    text = (
        "<question>q</question>\n"
        "<code>\ndef solution():\n    a = 1\n    return a\n</code>\n"
        "<added_code>then we simply add one more step</added_code>"
    )
    out = agentio.parse_generation(text, agentio.TRANSLATE_MATH)
    assert out.added_code is None
    assert "one more step" in out.added_code_text


class FlakyTransport:
    def __init__(self, fail_times: int):
        self.fail_times = fail_times
        self.calls = 0

    def __call__(self, prompt, cfg):
        self.calls += 1
        if self.calls <= self.fail_times:
            raise agentio.TransportError("boom")
        return f"echo: {prompt}"


def test_complete_retries_then_succeeds():
    cfg = agentio.AgentConfig(retry_budget=3, backoff_s=0.0)
    transport = FlakyTransport(fail_times=2)
    assert agentio.complete("hi", cfg, transport) == "echo: hi"
    assert transport.calls == 3


def test_complete_exhausts_budget():
    cfg = agentio.AgentConfig(retry_budget=2, backoff_s=0.0)
    transport = FlakyTransport(fail_times=99)
    with pytest.raises(agentio.ExhaustedRetries):
        agentio.complete("hi", cfg, transport)
    assert transport.calls == 3


def test_auth_error_is_not_retried():
    calls = []

    def transport(prompt, cfg):
        calls.append(1)
        raise agentio.AuthError("nope")

    cfg = agentio.AgentConfig(retry_budget=5, backoff_s=0.0)
    with pytest.raises(agentio.AuthError):
        agentio.complete("hi", cfg, transport)
    assert len(calls) == 1


def test_missing_api_key_env_var(monkeypatch):
    monkeypatch.delenv("SOLSTRUCT_API_KEY", raising=False)
    cfg = agentio.AgentConfig(retry_budget=0, backoff_s=0.0)
    # the default transport refuses to send anything without a credential
    with pytest.raises(agentio.AuthError):
        agentio.complete("hi", cfg)


def test_concurrency_is_bounded():
    cfg = agentio.AgentConfig(concurrency=2, retry_budget=0, backoff_s=0.0)
    active = 0
    peak = 0
    lock = threading.Lock()

    def transport(prompt, _cfg):
        nonlocal active, peak
        with lock:
            active += 1
            peak = max(peak, active)
        time.sleep(0.02)
        with lock:
            active -= 1
        return "ok"

    threads = [
        threading.Thread(target=agentio.complete, args=(f"p{i}", cfg, transport))
        for i in range(8)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert peak <= 2


def test_mock_canned_response_wins():
    prompt = "anything at all"
    mock = agentio.MockAgent(canned={agentio.prompt_hash(prompt): "custom"})
    assert mock(prompt) == "custom"


def test_mock_codegen_returns_known_program():
    program = "def solution():\n    result = 5\n    return result\n"
    mock = agentio.MockAgent(programs={"How many?": program})
    prompt = agentio.render_prompt(
        agentio.CODEGEN,
        {"few_shot_examples": "none", "question": "How many?", "reasoning": "count"},
    )
    out = agentio.parse_generation(mock(prompt), agentio.CODEGEN)
    assert out.code == program.strip()


def test_mock_translate_gsm8k_is_consistent():
    program = (
        "def solution():\n"
        "    a = 4  # 4\n"
        "    b = a * 3  # 12\n"
        "    return b\n"
    )
    prompt = agentio.render_prompt(
        agentio.TRANSLATE_GSM8K,
        {
            "few_shot_examples": "none",
            "question": "What is it?",
            "program": program,
            "program_intervened": program,
        },
    )
    mock = agentio.MockAgent()
    out = agentio.parse_generation(mock(prompt), agentio.TRANSLATE_GSM8K)
    assert out.answer == "12"
    assert out.self_eval.verdict == qc.CORRECT
    assert out.question


def test_mock_fail_substrings_flip_verdicts():
    mock = agentio.MockAgent(fail_substrings=("querulous",))
    eval_prompt = agentio.render_prompt(
        agentio.EXTERNAL_EVAL,
        {"question": "a querulous riddle", "reasoning": "because"},
    )
    assert qc.parse_eval(mock(eval_prompt)).verdict == qc.INCORRECT
    ok_prompt = agentio.render_prompt(
        agentio.EXTERNAL_EVAL, {"question": "a plain riddle", "reasoning": "because"}
    )
    assert qc.parse_eval(mock(ok_prompt)).verdict == qc.CORRECT


def test_mock_inference_boxes_answer():
    mock = agentio.MockAgent(inference_answers={"What is 6 * 7?": "42"})
    prompt = agentio.render_prompt(agentio.INFERENCE, {"problem": "What is 6 * 7?"})
    assert "\\boxed{42}" in mock(prompt)


def test_mock_inference_fallback_can_go_unboxed():
    mock = agentio.MockAgent(inference_fallback="no idea")
    prompt = agentio.render_prompt(agentio.INFERENCE, {"problem": "Hard one."})
    assert mock(prompt) == "no idea"
    boxed_default = agentio.MockAgent()
    assert "\\boxed{42}" in boxed_default(prompt)
