"""Score model responses against a generated dataset.

Grading looks only at the last well-formed \\boxed{...} in a response.
Numeric answers are normalized (commas, latex fractions, currency and
percent dress-up) before comparison, floats at 1e-4 relative tolerance.
Accuracy is bucketed by generation round and by step count, which is the
curve that shows how quickly models fall off as problems get deeper.
"""

from importlib import resources

from solstruct import RunConfig, run_full, score
from solstruct.agentio import AgentConfig, MockAgent
from solstruct.pipeline import collect_responses, make_sender

DEMO_SEEDS = str(resources.files("solstruct").joinpath("assets", "demo_seeds.jsonl"))

cfg = RunConfig(dataset=DEMO_SEEDS, out_dir="", rounds=2, master_seed=9)
result = run_full(cfg)
records = [rec.to_json_dict() for rec in result.records]

# Stage a solver that knows round-0 and round-1 answers but fumbles the
# deepest problems: wrong on half of round 2, no box on the other half.
answers = {}
for i, rec in enumerate(result.records):
    if rec.round < 2:
        answers[rec.question] = rec.answer
    elif i % 2 == 0:
        answers[rec.question] = "999999"
solver = MockAgent(
    inference_answers=answers,
    inference_fallback="I am stumped and cannot commit to a final value.",
)
send = make_sender(AgentConfig(), transport=solver)
responses = collect_responses(result.records, send)

report = score(records, responses)
print(report.format_text())

print("the accuracy curve by step count:")
for steps in sorted(report.by_steps):
    bucket = report.by_steps[steps]
    bar = "#" * round(bucket.accuracy * 40)
    print(f"  {steps:2d} steps: {bucket.accuracy:6.1%} {bar}")
