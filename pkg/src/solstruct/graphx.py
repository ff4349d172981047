"""Variable-dependency graphs over solution programs.

Each assignment produces one node per (name, version); reassigning a name
creates a fresh version rather than mutating the old node. Edges run from a
definition to every later statement that reads it. The root is the returned
variable (or a synthetic node when the return expression is not a bare
name). Nodes that cannot reach the root are kept but flagged dead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import SolstructError, UndefinedNameError
from .solgrammar import AnnotatedProgram, NameRef, collect_names

LEAF = "leaf"
INTERMEDIATE = "intermediate"
ROOT = "root"


class UnknownNodeError(SolstructError):
    def __init__(self, node_id: int):
        super().__init__(f"no node with id {node_id}")
        self.node_id = node_id


class EmptyCandidatesError(SolstructError):
    """No node qualifies as an intervention target."""


@dataclass(frozen=True)
class VarNode:
    id: int
    name: str
    version: int
    def_statement: int  # index into program.statements
    kind: str  # LEAF | INTERMEDIATE | ROOT
    dead: bool


@dataclass
class ComputeGraph:
    nodes: list[VarNode]
    edges: list[tuple[int, int]]  # (producer, consumer), in program order
    root: int

    def out_neighbors(self, node_id: int) -> list[int]:
        self._check(node_id)
        return [b for a, b in self.edges if a == node_id]

    def in_neighbors(self, node_id: int) -> list[int]:
        self._check(node_id)
        return [a for a, b in self.edges if b == node_id]

    def node_by_name(self, name: str) -> VarNode:
        """Latest version of a name."""
        for node in reversed(self.nodes):
            if node.name == name:
                return node
        raise KeyError(name)

    def _check(self, node_id: int) -> None:
        if not 0 <= node_id < len(self.nodes):
            raise UnknownNodeError(node_id)


def build_graph(p: AnnotatedProgram) -> ComputeGraph:
    """Construct the dependency graph; raises UndefinedNameError on free names."""
    nodes: list[VarNode] = []
    edges: list[tuple[int, int]] = []
    env: dict[str, int] = {}
    versions: dict[str, int] = {}
    imported: set[str] = set()
    refs_by_node: list[list[str]] = []

    def add_node(name: str, stmt_index: int, refs: list[str], line: int) -> int:
        node_id = len(nodes)
        for ref in dict.fromkeys(refs):
            if ref in imported:
                continue
            if ref not in env:
                raise UndefinedNameError(line, ref)
            edges.append((env[ref], node_id))
        version = versions.get(name, -1) + 1
        versions[name] = version
        # kind and deadness are filled in after the walk
        nodes.append(VarNode(node_id, name, version, stmt_index, "", False))
        refs_by_node.append([r for r in refs if r not in imported])
        env[name] = node_id
        return node_id

    root_id: int | None = None
    for i, st in enumerate(p.statements):
        if st.kind == "import":
            imported.update(st.imported)
            if st.module is not None:
                imported.add(st.module)
        elif st.kind == "assign":
            add_node(st.target, i, collect_names(st.expr), st.line)
        else:  # return
            match st.expr:
                case NameRef(id=name) if name in env:
                    root_id = env[name]
                case _:
                    root_id = add_node("<return>", i, collect_names(st.expr), st.line)

    assert root_id is not None  # parse_program guarantees a return
    alive = {root_id}
    frontier = [root_id]
    incoming: dict[int, list[int]] = {}
    for a, b in edges:
        incoming.setdefault(b, []).append(a)
    while frontier:
        cur = frontier.pop()
        for parent in incoming.get(cur, ()):
            if parent not in alive:
                alive.add(parent)
                frontier.append(parent)

    final_nodes = []
    for node, refs in zip(nodes, refs_by_node):
        if node.id == root_id:
            kind = ROOT
        elif refs:
            kind = INTERMEDIATE
        else:
            kind = LEAF
        final_nodes.append(
            VarNode(node.id, node.name, node.version, node.def_statement, kind, node.id not in alive)
        )
    return ComputeGraph(final_nodes, edges, root_id)


def descendants(g: ComputeGraph, node_id: int) -> set[int]:
    """All nodes reachable from node_id via out-edges (excluding itself)."""
    g._check(node_id)
    out: dict[int, list[int]] = {}
    for a, b in g.edges:
        out.setdefault(a, []).append(b)
    seen: set[int] = set()
    frontier = [node_id]
    while frontier:
        cur = frontier.pop()
        for nxt in out.get(cur, ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    seen.discard(node_id)
    return seen


def candidate_targets(g: ComputeGraph) -> list[int]:
    """Nodes eligible for intervention: alive non-root nodes, in id order.

    Alive non-root nodes always have at least one descendant (they reach the
    root), so interventions on them are never vacuous. Raises
    EmptyCandidatesError when nothing qualifies.
    """
    out = [n.id for n in g.nodes if n.kind != ROOT and not n.dead]
    if not out:
        raise EmptyCandidatesError("no intervention candidates")
    return out


def to_json(g: ComputeGraph) -> str:
    payload = {
        "nodes": [
            {
                "id": n.id,
                "name": n.name,
                "version": n.version,
                "def_statement": n.def_statement,
                "kind": n.kind,
                "dead": n.dead,
            }
            for n in g.nodes
        ],
        "edges": [list(e) for e in g.edges],
        "root": g.root,
    }
    return json.dumps(payload, indent=2)


def format_text(g: ComputeGraph) -> str:
    """Human-readable dump for debugging."""
    lines = []
    for n in g.nodes:
        flags = [n.kind] + (["dead"] if n.dead else [])
        parents = ", ".join(g.nodes[a].name for a in g.in_neighbors(n.id))
        mark = " <- " + parents if parents else ""
        lines.append(f"[{n.id}] {n.name}.{n.version} ({'|'.join(flags)}){mark}")
    lines.append(f"root: [{g.root}] {g.nodes[g.root].name}")
    return "\n".join(lines)
