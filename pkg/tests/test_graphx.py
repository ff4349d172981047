import random

import pytest
from importlib import resources

from solstruct import graphx
from solstruct import solgrammar as sg
from solstruct.errors import UndefinedNameError

import progmaker

FIXTURES = resources.files("solstruct").joinpath("assets", "fixtures")


def parse_fixture(name: str) -> sg.AnnotatedProgram:
    return sg.parse_program(FIXTURES.joinpath(name).read_text(encoding="utf-8"))


def test_robe_graph_frozen():
    g = graphx.build_graph(parse_fixture("robe.py"))
    assert [n.name for n in g.nodes] == [
        "blue_fiber_bolts",
        "white_fiber_bolts",
        "total_bolts",
        "result",
    ]
    assert [n.kind for n in g.nodes] == [
        graphx.LEAF,
        graphx.INTERMEDIATE,
        graphx.INTERMEDIATE,
        graphx.ROOT,
    ]
    assert g.edges == [(0, 1), (0, 2), (1, 2), (2, 3)]
    assert g.root == 3
    assert not any(n.dead for n in g.nodes)
    assert graphx.descendants(g, 0) == {1, 2, 3}
    assert graphx.descendants(g, 2) == {3}
    assert graphx.candidate_targets(g) == [0, 1, 2]


def test_lottery_graph_calls_and_imports():
    g = graphx.build_graph(parse_fixture("lottery.py"))
    names = [n.name for n in g.nodes]
    # the imported name is not a variable node
    assert "comb" not in names
    assert names[-1] == "result"
    assert g.nodes[-1].kind == graphx.ROOT


def test_dead_node_detection():
    p = sg.parse_program(
        "def solution():\n"
        "    used = 4\n"
        "    unused = 7\n"
        "    result = used * 2\n"
        "    return result\n"
    )
    g = graphx.build_graph(p)
    by_name = {n.name: n for n in g.nodes}
    assert by_name["unused"].dead
    assert not by_name["used"].dead
    assert [g.nodes[i].name for i in graphx.candidate_targets(g)] == ["used"]


def test_synthetic_root_for_expression_return():
    p = sg.parse_program("def solution():\n    a = 2\n    b = 3\n    return a + b\n")
    g = graphx.build_graph(p)
    assert g.nodes[g.root].name == "<return>"
    assert graphx.descendants(g, 0) == {g.root}


def test_redefinition_gets_new_version():
    p = sg.parse_program(
        "def solution():\n"
        "    a = 1\n"
        "    a = a + 1\n"
        "    return a\n"
    )
    g = graphx.build_graph(p)
    versions = [(n.name, n.version) for n in g.nodes]
    assert versions == [("a", 0), ("a", 1)]
    assert g.edges == [(0, 1)]
    assert g.nodes[1].kind == graphx.ROOT


def test_undefined_name_raises():
    p = sg.parse_program("def solution():\n    a = b + 1\n    return a\n")
    with pytest.raises(UndefinedNameError) as exc:
        graphx.build_graph(p)
    assert exc.value.name == "b"


def test_empty_candidates():
    p = sg.parse_program("def solution():\n    a = 1\n    return a\n")
    g = graphx.build_graph(p)
    with pytest.raises(graphx.EmptyCandidatesError):
        graphx.candidate_targets(g)


def test_unknown_node_raises():
    g = graphx.build_graph(parse_fixture("robe.py"))
    with pytest.raises(graphx.UnknownNodeError):
        graphx.descendants(g, 99)


def test_graph_json_shape():
    import json

    g = graphx.build_graph(parse_fixture("robe.py"))
    payload = json.loads(graphx.to_json(g))
    assert set(payload) == {"nodes", "edges", "root"}
    assert payload["root"] == 3
    assert payload["nodes"][0]["name"] == "blue_fiber_bolts"


def brute_force_descendants(edges: list[tuple[int, int]], start: int, n: int) -> set[int]:
    out: set[int] = set()
    frontier = [start]
    while frontier:
        cur = frontier.pop()
        for a, b in edges:
            if a == cur and b not in out:
                out.add(b)
                frontier.append(b)
    return out


def test_properties_on_generated_corpus():
    rng = random.Random(2024)
    for _ in range(200):
        made = progmaker.make_program(rng, allow_calls=True)
        p = sg.parse_program(made.source)
        g = graphx.build_graph(p)
        # straight-line programs: every edge goes forward
        assert all(a < b for a, b in g.edges)
        # exactly one root, marked and reachable
        roots = [n for n in g.nodes if n.kind == graphx.ROOT]
        assert len(roots) == 1 and roots[0].id == g.root
        for node in g.nodes:
            assert graphx.descendants(g, node.id) == brute_force_descendants(
                g.edges, node.id, len(g.nodes)
            )
            # dead means: cannot reach the root
            reaches = g.root in brute_force_descendants(g.edges, node.id, len(g.nodes))
            if node.id != g.root:
                assert node.dead == (not reaches)
