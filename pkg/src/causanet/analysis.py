"""Structural state-space exploration and statistics over simulation traces."""

from __future__ import annotations

import statistics
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Sequence

from .net import Marking, NetDef, enabled_transitions, fire
from .sim import SimTrace


@dataclass(frozen=True)
class ReachabilityGraph:
    """Markings reachable from ``root`` by untimed firing.

    ``nodes`` and ``edges`` are in breadth-first discovery order.
    ``unexplored`` holds nodes whose successors were not (fully) expanded
    because a bound tripped; ``truncated`` is true iff it is non-empty or
    some successor was dropped.
    """

    net: NetDef
    root: Marking
    nodes: tuple[Marking, ...]
    edges: tuple[tuple[Marking, str, Marking], ...]
    truncated: bool = False
    unexplored: frozenset[Marking] = frozenset()

    def successors(self, m: Marking) -> list[tuple[str, Marking]]:
        return [(t, dst) for src, t, dst in self.edges if src == m]

    def has_path(self, markings: Sequence[Marking]) -> bool:
        edge_set = {(s, d) for s, _, d in self.edges}
        return all((a, b) in edge_set for a, b in zip(markings, markings[1:]))


def reachability_graph(net: NetDef, max_nodes: int = 10_000,
                       max_tokens_per_place: int = 1_000) -> ReachabilityGraph:
    if max_nodes < 1 or max_tokens_per_place < 1:
        raise ValueError("exploration bounds must be at least 1")
    root = net.initial_marking
    seen = {root}
    nodes = [root]
    edges = []
    unexplored: set[Marking] = set()
    truncated = False
    queue = deque([root])
    while queue:
        m = queue.popleft()
        for t in enabled_transitions(net, m):
            nxt = fire(net, m, t)
            if max(nxt, default=0) > max_tokens_per_place:
                truncated = True
                unexplored.add(m)
                continue
            if nxt not in seen:
                if len(nodes) >= max_nodes:
                    truncated = True
                    unexplored.add(m)
                    continue
                seen.add(nxt)
                nodes.append(nxt)
                queue.append(nxt)
            edges.append((m, t, nxt))
    return ReachabilityGraph(net, root, tuple(nodes), tuple(edges), truncated, frozenset(unexplored))


def detect_deadlocks(g: ReachabilityGraph) -> list[Marking]:
    """Fully explored markings with no outgoing edge, in discovery order."""
    has_out = {src for src, _, _ in g.edges}
    return [m for m in g.nodes if m not in has_out and m not in g.unexplored]


def is_k_bounded(g: ReachabilityGraph, k: int) -> bool:
    if g.truncated:
        raise ValueError("boundedness is undecided on a truncated graph")
    return all(n <= k for m in g.nodes for n in m)


@dataclass
class TraceStats:
    query: str
    kind: str  # "transition", "place" or "empty"
    runs: int = 0
    runs_fired: int = 0
    total_firings: int = 0
    first_times: dict = field(default_factory=dict)
    final_markings: Counter = field(default_factory=Counter)
    final_counts: Counter = field(default_factory=Counter)
    gate_attempts: int = 0
    gate_passes: int = 0

    @property
    def frequency(self) -> float:
        """Fraction of runs in which the transition fired at least once."""
        return self.runs_fired / self.runs if self.runs else 0.0

    @property
    def gate_pass_rate(self) -> float:
        return self.gate_passes / self.gate_attempts if self.gate_attempts else 0.0


def _summary(xs: list[float]) -> dict:
    if not xs:
        return {}
    return {
        "count": len(xs),
        "mean": statistics.fmean(xs),
        "min": min(xs),
        "median": statistics.median(xs),
        "max": max(xs),
    }


def trace_stats(traces: Sequence[SimTrace], query: str) -> TraceStats:
    if not traces:
        return TraceStats(query, "empty")
    places = traces[0].places
    if any(t.places != places or t.net != traces[0].net for t in traces):
        raise ValueError("traces come from different nets")
    if query in places:
        idx = places.index(query)
        stats = TraceStats(query, "place", runs=len(traces))
        first_empty = []
        for tr in traces:
            stats.final_counts[tr.final_marking[idx]] += 1
            stats.final_markings[tr.final_marking] += 1
            hit = next((e.time for e in tr.events if e.post[idx] == 0), None)
            if tr.initial_marking[idx] == 0:
                hit = 0.0
            if hit is not None:
                first_empty.append(hit)
        stats.first_times = _summary(first_empty)
        return stats

    stats = TraceStats(query, "transition", runs=len(traces))
    first = []
    for tr in traces:
        times = [e.time for e in tr.events if e.transition == query]
        if times:
            stats.runs_fired += 1
            first.append(times[0])
        stats.total_firings += len(times)
        stats.final_markings[tr.final_marking] += 1
        for d in tr.all_draws():
            if d.get("kind") == "gate" and d.get("transition") == query:
                stats.gate_attempts += 1
                stats.gate_passes += bool(d["pass"])
    stats.first_times = _summary(first)
    return stats
