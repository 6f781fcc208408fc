"""Weighted DAGs of STL requirements.

A task is a set of named formulas, each marked hard (must hold) or soft
(graded preference), arranged in a dependency DAG: an edge a -> b says b
only makes sense once a is met.  A node's raw priority is the total node
count minus how many nodes can reach it, so roots weigh the most, and the
raw weights pass through a softmax to become mixing coefficients for
combining robustness values.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal, Mapping, Sequence

from stlfd import stl


class GraphError(Exception):
    """Raised for structurally invalid requirement graphs."""


class CycleError(GraphError):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = tuple(cycle)
        super().__init__("dependency cycle: " + " -> ".join(self.cycle))


@dataclass(frozen=True)
class SpecNode:
    name: str
    formula: stl.Formula
    kind: Literal["hard", "soft"]

    def __post_init__(self) -> None:
        if self.kind not in ("hard", "soft"):
            raise GraphError(f"spec {self.name!r}: kind must be 'hard' or 'soft', got {self.kind!r}")


@dataclass(frozen=True)
class SpecGraph:
    """An immutable, validated requirement DAG.

    `nodes` keeps the declaration order, which is also the order weights
    are reported in.  `edges` are (parent, child) dependency pairs.
    """

    nodes: tuple[SpecNode, ...]
    edges: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n.name for n in self.nodes)

    def node(self, name: str) -> SpecNode:
        for n in self.nodes:
            if n.name == name:
                return n
        raise GraphError(f"no spec named {name!r}")

    @property
    def hard(self) -> tuple[SpecNode, ...]:
        return tuple(n for n in self.nodes if n.kind == "hard")

    @property
    def soft(self) -> tuple[SpecNode, ...]:
        return tuple(n for n in self.nodes if n.kind == "soft")

    def parents(self, name: str) -> frozenset[str]:
        return frozenset(a for a, b in self.edges if b == name)

    def ancestors(self, name: str) -> frozenset[str]:
        """Every node with a directed path into `name`."""
        self.node(name)
        found: set[str] = set()
        frontier = list(self.parents(name))
        while frontier:
            a = frontier.pop()
            if a in found:
                continue
            found.add(a)
            frontier.extend(self.parents(a))
        return frozenset(found)

    def raw_weight(self, name: str) -> int:
        return len(self.nodes) - len(self.ancestors(name))

    def raw_weights(self) -> dict[str, int]:
        return {n.name: self.raw_weight(n.name) for n in self.nodes}

    def softmax_weights(self, temperature: float = 1.0) -> dict[str, float]:
        """Normalized exp(w/temperature) weights in node declaration order."""
        if temperature <= 0:
            raise GraphError(f"temperature must be positive, got {temperature}")
        raw = [self.raw_weight(n.name) / temperature for n in self.nodes]
        peak = max(raw)
        exps = [math.exp(w - peak) for w in raw]
        total = sum(exps)
        return {n.name: e / total for n, e in zip(self.nodes, exps)}

    def topological_order(self) -> tuple[str, ...]:
        """Dependency-respecting order; parents always precede children."""
        remaining = {n.name: set(self.parents(n.name)) for n in self.nodes}
        order: list[str] = []
        while remaining:
            ready = [name for name in self.names if name in remaining and not remaining[name]]
            if not ready:
                raise CycleError(_find_cycle(self.names, self.edges) or tuple(remaining))
            for name in ready:
                order.append(name)
                del remaining[name]
                for deps in remaining.values():
                    deps.discard(name)
        return tuple(order)


def build_graph(
    nodes: Iterable[SpecNode], edges: Iterable[tuple[str, str]] = ()
) -> SpecGraph:
    """Validate and assemble a requirement graph.

    Rejects duplicate names, edges to unknown nodes, cycles (reporting a
    witness), and any hard requirement that depends on a soft one: a
    constraint that must always hold cannot be downstream of a preference.
    """
    nodes = tuple(nodes)
    edges = frozenset(edges)
    names = [n.name for n in nodes]
    dupes = {x for x in names if names.count(x) > 1}
    if dupes:
        raise GraphError(f"duplicate spec names: {sorted(dupes)}")
    known = set(names)
    for a, b in edges:
        missing = {a, b} - known
        if missing:
            raise GraphError(f"edge ({a!r}, {b!r}) references unknown specs: {sorted(missing)}")
    cycle = _find_cycle(names, edges)
    if cycle:
        raise CycleError(cycle)
    graph = SpecGraph(nodes=nodes, edges=edges)
    kind = {n.name: n.kind for n in nodes}
    for n in nodes:
        if kind[n.name] == "hard":
            soft_above = [a for a in graph.ancestors(n.name) if kind[a] == "soft"]
            if soft_above:
                raise GraphError(
                    f"hard spec {n.name!r} depends on soft spec(s) {sorted(soft_above)}"
                )
    return graph


def _find_cycle(
    names: Sequence[str], edges: frozenset[tuple[str, str]]
) -> tuple[str, ...] | None:
    children: dict[str, list[str]] = {n: [] for n in names}
    for a, b in edges:
        children[a].append(b)
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in names}
    stack: list[str] = []

    def visit(n: str) -> tuple[str, ...] | None:
        color[n] = GREY
        stack.append(n)
        for c in sorted(children[n]):
            if color[c] == GREY:
                i = stack.index(c)
                return tuple(stack[i:] + [c])
            if color[c] == WHITE:
                found = visit(c)
                if found:
                    return found
        stack.pop()
        color[n] = BLACK
        return None

    for n in names:
        if color[n] == WHITE:
            found = visit(n)
            if found:
                return found
    return None


# --------------------------------------------------------------------------
# JSON spec files
# --------------------------------------------------------------------------

_PLACEHOLDER_NAMES = ("T_goal", "T")


def substitute_placeholders(formula_text: str, substitutions: Mapping[str, float]) -> str:
    """Replace whole-word placeholder tokens with numeric literals.

    Spec files may write horizons symbolically (T for the evaluation
    horizon, T_goal for the shortest-time bound); the caller supplies the
    concrete numbers once the environment is known.
    """
    out = formula_text
    for key in sorted(substitutions, key=len, reverse=True):
        value = substitutions[key]
        literal = str(int(value)) if float(value) == int(value) else repr(float(value))
        out = re.sub(rf"\b{re.escape(key)}\b", literal, out)
    for name in _PLACEHOLDER_NAMES:
        if re.search(rf"\b{name}\b", out):
            raise GraphError(
                f"formula {formula_text!r} uses placeholder {name!r} "
                "but no substitution was provided"
            )
    return out


def load_spec_json(
    source: str | Path, substitutions: Mapping[str, float] | None = None
) -> SpecGraph:
    """Load a requirement graph from a JSON spec file.

    The format is a list of objects with keys `name`, `kind` ("hard" or
    "soft"), `formula` (surface syntax), and `depends_on` (list of names).
    """
    if isinstance(source, Path):
        text = source.read_text()
    elif "\n" in source or source.lstrip().startswith(("[", "{")):
        text = source
    else:
        text = Path(source).read_text()
    try:
        entries = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"spec file is not valid JSON: {exc}") from exc
    if not isinstance(entries, list):
        raise GraphError("spec file must contain a JSON list of spec objects")
    nodes: list[SpecNode] = []
    edges: list[tuple[str, str]] = []
    for i, entry in enumerate(entries):
        try:
            name = entry["name"]
            kind = entry["kind"]
            formula_text = entry["formula"]
        except (TypeError, KeyError) as exc:
            raise GraphError(f"spec entry {i} is missing key {exc}") from exc
        formula_text = substitute_placeholders(formula_text, substitutions or {})
        try:
            formula = stl.parse_formula(formula_text)
        except stl.ParseError as exc:
            raise GraphError(f"spec {name!r}: {exc}") from exc
        nodes.append(SpecNode(name=name, formula=formula, kind=kind))
        for dep in entry.get("depends_on", ()):
            edges.append((dep, name))
    return build_graph(nodes, edges)
