"""Extract the variable dependency graph from a solution program.

Every assignment becomes a node; an edge connects a value to each later
assignment that reads it. The returned variable is the root. Nodes that
cannot reach the root are dead weight, and everything else (minus the
root itself) is a legal target for a structural intervention.
"""

from importlib import resources

from solstruct import build_graph, parse_program
from solstruct.graphx import candidate_targets, descendants, format_text

FIXTURES = resources.files("solstruct").joinpath("assets", "fixtures")

program = parse_program(
    FIXTURES.joinpath("lottery.py").read_text(encoding="utf-8")
)
graph = build_graph(program)

print(format_text(graph))
print(f"intervention candidates: {[graph.nodes[i].name for i in candidate_targets(graph)]}")

# Descendants of a node are everything its value flows into. Changing a
# node may only ever move its descendants; the rest of the program must
# be untouched, which is exactly what the intervention checks enforce.
for node in graph.nodes:
    downstream = sorted(graph.nodes[d].name for d in descendants(graph, node.id))
    print(f"{node.name:>10s} feeds: {', '.join(downstream) or '(nothing)'}")

# A value that never reaches the return is flagged rather than silently kept.
dead_example = parse_program(
    "def solution():\n"
    "    kept = 3  # 3\n"
    "    unused = kept * 100  # 300\n"
    "    final = kept + 1  # 4\n"
    "    return final\n"
)
dead_graph = build_graph(dead_example)
dead = [n.name for n in dead_graph.nodes if n.dead]
print(f"\ndead variables in the toy program: {dead}")
