"""Walk through the solution-program format on a small worked example.

A solution program is one straight-line function. Each block opens with a
<reason> comment tying the code to a sentence of the word problem, and
every assignment carries the value it produced when the solution was
executed. Those trailing comments are the ground truth the rest of the
toolkit checks against.
"""

from importlib import resources

from solstruct import check_annotations, count_steps, evaluate, parse_program, render_program

FIXTURES = resources.files("solstruct").joinpath("assets", "fixtures")

source = FIXTURES.joinpath("robe.py").read_text(encoding="utf-8")
print("--- source ---")
print(source)

program = parse_program(source)

# One step per block at function-body level; this is the difficulty measure.
print(f"step count: {count_steps(program)}")

print("\n--- blocks ---")
for i, stmt in enumerate(program.statements):
    reason = (stmt.reason or "").replace("\n", " / ")
    print(f"[{i}] {stmt.kind:7s} {stmt.code_text.strip():32s} reason: {reason or '-'}")

# Execution replays the function one assignment at a time.
trace = evaluate(program)
print("\n--- execution trace ---")
for entry in trace.entries:
    print(f"line {entry.line:2d}  {entry.var} = {entry.value!r}")
print(f"result: {trace.result!r}")

# The trailing comments and the replay must agree, ints exactly and
# floats to relative 1e-6. A corrupted comment shows up as a mismatch.
report = check_annotations(program, trace)
print(f"\nannotations verified: {report.passed}")

# Rendering is byte-faithful, so programs survive a parse/render loop.
assert render_program(program) == source
print("render round-trip: exact")
