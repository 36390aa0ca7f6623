"""Probabilistic causal chains whose links are qualified by adverbs.

Each adverb maps to a Gaussian over the link probability, truncated to
[0, 1]. Several adverbs on one link are fused by multiplying their
densities; a path's probability is the product of its link strengths,
taking every root cause as certain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import networkx as nx


class ChainError(ValueError):
    pass


@dataclass(frozen=True)
class AdverbDistribution:
    adverb: str
    mean: float
    stddev: float

    def __post_init__(self):
        if not 0.0 <= self.mean <= 1.0:
            raise ChainError(f"adverb {self.adverb!r}: mean {self.mean} outside [0, 1]")
        if not self.stddev > 0:
            raise ChainError(f"adverb {self.adverb!r}: stddev must be positive")

    @property
    def variance(self) -> float:
        return self.stddev ** 2


@dataclass(frozen=True)
class ChainGraph:
    name: str = "chain"
    nodes: tuple[str, ...] = ()
    edges: tuple[tuple[str, str, tuple[AdverbDistribution, ...]], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple((s, t, tuple(ds)) for s, t, ds in self.edges))
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        for s, t, ds in self.edges:
            if s == t:
                raise ChainError(f"self-loop on {s!r}: nothing causes itself")
            for n in (s, t):
                if n not in self.nodes:
                    raise ChainError(f"edge references undeclared node {n!r}")
            if not ds:
                raise ChainError(f"edge {s}->{t} carries no adverb")
            g.add_edge(s, t)
        if not nx.is_directed_acyclic_graph(g):
            raise ChainError(f"chain graph {self.name!r} contains a directed cycle")

    def link(self, cause: str, effect: str) -> tuple[AdverbDistribution, ...]:
        """All adverb distributions recorded for ``cause -> effect``."""
        found = [ds for s, t, ds in self.edges if s == cause and t == effect]
        if not found:
            raise ChainError(f"no edge {cause} -> {effect}")
        return tuple(d for ds in found for d in ds)

    def add_edge(self, cause: str, effect: str, *dists: AdverbDistribution) -> "ChainGraph":
        nodes = self.nodes + tuple(n for n in dict.fromkeys((cause, effect)) if n not in self.nodes)
        return ChainGraph(self.name, nodes, self.edges + ((cause, effect, tuple(dists)),))


def fuse_adverbs(distributions) -> AdverbDistribution:
    """Normalised product of Gaussian factors (precision-weighted)."""
    ds = list(distributions)
    if not ds:
        raise ChainError("nothing to fuse")
    if len(ds) == 1:
        return ds[0]
    precision = math.fsum(1.0 / d.variance for d in ds)
    mean = math.fsum(d.mean / d.variance for d in ds) / precision
    mean = min(1.0, max(0.0, mean))
    label = "+".join(d.adverb for d in ds)
    return AdverbDistribution(label, mean, math.sqrt(1.0 / precision))


def sample_link(dist: AdverbDistribution, rng) -> float:
    """Rejection sample from the Gaussian truncated to [0, 1]."""
    while True:
        x = rng.normal(dist.mean, dist.stddev)
        if 0.0 <= x <= 1.0:
            return float(x)


def link_strength(g: ChainGraph, cause: str, effect: str, mode: str = "fused", rng=None) -> float:
    fused = fuse_adverbs(g.link(cause, effect))
    if mode == "fused":
        return fused.mean
    if mode == "sampled":
        if rng is None:
            raise ChainError("sampled mode needs a random generator")
        return sample_link(fused, rng)
    raise ChainError(f"unknown chain mode {mode!r}")


def chain_probability(g: ChainGraph, path, mode: str = "fused", rng=None) -> float:
    """Probability of reaching ``path[-1]`` from a certain ``path[0]``."""
    path = list(path)
    if len(path) < 2:
        raise ChainError("a path needs at least two nodes")
    p = 1.0
    for cause, effect in zip(path, path[1:]):
        p *= link_strength(g, cause, effect, mode, rng)
    return p
