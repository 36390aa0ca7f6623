"""Neuron diagrams: shaded start nodes, stimulatory and inhibitory links."""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

STIM = "stimulatory"
INHIB = "inhibitory"


class CycleError(ValueError):
    pass


@dataclass(frozen=True)
class NeuronDiagram:
    name: str = "neurons"
    nodes: tuple[str, ...] = ()
    shaded: frozenset[str] = frozenset()
    edges: tuple[tuple[str, str, str], ...] = ()  # (source, target, kind)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "shaded", frozenset(self.shaded))
        object.__setattr__(self, "edges", tuple(self.edges))
        for s, t, kind in self.edges:
            if kind not in (STIM, INHIB):
                raise ValueError(f"unknown link kind {kind!r}")
            for n in (s, t):
                if n not in self.nodes:
                    raise ValueError(f"link references undeclared node {n!r}")

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from((s, t) for s, t, _ in self.edges)
        return g

    def start_nodes(self) -> list[str]:
        targets = {t for _, t, _ in self.edges}
        return [n for n in self.nodes if n not in targets]


def neuron_evaluate(d: NeuronDiagram) -> dict[str, bool]:
    """Activation of every node.

    Start nodes fire iff shaded. Any other node fires iff at least one
    active stimulator reaches it and no active inhibitor does.
    """
    g = d.graph()
    if not nx.is_directed_acyclic_graph(g):
        raise CycleError(f"neuron diagram {d.name!r} has a cycle")
    incoming: dict[str, list[tuple[str, str]]] = {n: [] for n in d.nodes}
    for s, t, kind in d.edges:
        incoming[t].append((s, kind))
    active: dict[str, bool] = {}
    for n in nx.lexicographical_topological_sort(g, key=d.nodes.index):
        links = incoming[n]
        if not links:
            active[n] = n in d.shaded
            continue
        stimulated = any(active[s] for s, k in links if k == STIM)
        inhibited = any(active[s] for s, k in links if k == INHIB)
        active[n] = stimulated and not inhibited
    return {n: active[n] for n in d.nodes}
