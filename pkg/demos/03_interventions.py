"""Synthesize a harder variant of a problem by structural intervention.

The rewrite picks a live intermediate value, feeds it through a sampled
add/sub/mul mapping into a proxy variable, and reroutes every later use
of the original through the proxy. Execution gives the new ground truth;
nothing upstream of the target is allowed to move.
"""

import random
from importlib import resources

from solstruct import build_graph, evaluate, extend_structure, parse_program, render_program
from solstruct.intervene import annotate_execution
from solstruct.qc import derive_varmap, diff_filter, local_check

FIXTURES = resources.files("solstruct").joinpath("assets", "fixtures")

parent = parse_program(FIXTURES.joinpath("robe.py").read_text(encoding="utf-8"))
graph = build_graph(parent)

rng = random.Random(20260815)
record = extend_structure(parent, graph, rng)

print(f"target:  {record.target_name}")
print(f"mapping: {record.mapping.op} by {record.mapping.operand}")
print(f"renamed downstream reads: {record.renames}")

print("\n--- rewritten program ---")
print(render_program(record.rewritten))

before = evaluate(parent)
after = evaluate(record.rewritten)
print(f"answer moved: {before.result!r} -> {after.result!r}")

# The quality gates that decide whether this child is kept:
local = local_check(record.rewritten, trace=after)
diff = diff_filter(before, after, derive_varmap(record, parent))
print(f"local check: {'pass' if local.passed else local.cause}")
print(f"diff filter: {diff.status}")

# For prompting an agent to narrate the new problem, the moved values are
# masked out so the text cannot leak the answer.
masked = annotate_execution(record.rewritten, after, mask_result=True)
print("\n--- masked for prompting (note the '# ?') ---")
print(render_program(masked))
