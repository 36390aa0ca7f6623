"""Place/transition nets: structure, enabling rule and firing rule.

Markings are dense tuples of token counts in place-declaration order, so
two markings compare (and hash) bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .timing_spec import IMMEDIATE, TimingSpec

Marking = tuple[int, ...]


class NetError(ValueError):
    """Raised for operations that violate a net's structural contract."""


class NotEnabledError(NetError):
    """Firing a transition that lacks tokens on one of its input places."""

    def __init__(self, transition: str, place: str, have: int, need: int):
        self.transition = transition
        self.place = place
        self.have = have
        self.need = need
        super().__init__(
            f"{transition} is not enabled: place {place} holds {have} token(s), needs {need}"
        )


@dataclass(frozen=True)
class NetDef:
    """Immutable net structure.

    ``input_arcs`` and ``output_arcs`` map ``(transition, place)`` to a
    positive arc weight. ``timing`` is optional per transition; missing
    entries behave as immediate transitions.
    """

    places: tuple[str, ...]
    transitions: tuple[str, ...]
    input_arcs: Mapping[tuple[str, str], int] = field(default_factory=dict)
    output_arcs: Mapping[tuple[str, str], int] = field(default_factory=dict)
    initial_marking: Marking = ()
    timing: Mapping[str, TimingSpec] = field(default_factory=dict)
    name: str = "net"

    def __post_init__(self):
        object.__setattr__(self, "places", tuple(self.places))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        object.__setattr__(self, "initial_marking", tuple(self.initial_marking))
        object.__setattr__(self, "_arcs", _index_arcs(self))

    def place_index(self, place: str) -> int:
        try:
            return self.places.index(place)
        except ValueError:
            raise NetError(f"unknown place {place!r}") from None

    def timing_of(self, t: str) -> TimingSpec:
        return self.timing.get(t, IMMEDIATE)

    def inputs(self, t: str) -> list[tuple[int, int]]:
        """(place index, weight) pairs for the input arcs of ``t``."""
        return self._arcs[0][t]

    def outputs(self, t: str) -> list[tuple[int, int]]:
        return self._arcs[1][t]

    def __hash__(self):
        return hash((self.name, self.places, self.transitions, self.initial_marking))


def _index_arcs(net: NetDef):
    pos = {p: i for i, p in enumerate(net.places)}
    ins: dict[str, list[tuple[int, int]]] = {t: [] for t in net.transitions}
    outs: dict[str, list[tuple[int, int]]] = {t: [] for t in net.transitions}
    # dangling arcs are skipped here and reported by validate()
    for arcs, table in ((net.input_arcs, ins), (net.output_arcs, outs)):
        for (t, p), w in arcs.items():
            if t in table and p in pos:
                table[t].append((pos[p], w))
        for lst in table.values():
            lst.sort()
    return ins, outs


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    message: str


def validate(net: NetDef) -> list[Violation]:
    """Return every structural violation; an empty list means well-formed."""
    report: list[Violation] = []
    seen: set[str] = set()
    for ident in (*net.places, *net.transitions):
        if ident in seen:
            report.append(Violation("duplicate", ident, f"identifier {ident!r} declared twice"))
        seen.add(ident)
    places, transitions = set(net.places), set(net.transitions)
    for kind, arcs in (("input", net.input_arcs), ("output", net.output_arcs)):
        for (t, p), w in arcs.items():
            if t not in transitions:
                report.append(Violation("undefined", t, f"{kind} arc references undeclared transition {t!r}"))
            if p not in places:
                report.append(Violation("undefined", p, f"{kind} arc references undeclared place {p!r}"))
            if not isinstance(w, int) or w < 1:
                report.append(Violation("weight", f"{t}:{p}", f"{kind} arc {t}:{p} has weight {w!r} < 1"))
    if len(net.initial_marking) != len(net.places):
        report.append(Violation(
            "marking", net.name,
            f"initial marking has {len(net.initial_marking)} entries for {len(net.places)} places",
        ))
    for p, n in zip(net.places, net.initial_marking):
        if n < 0:
            report.append(Violation("marking", p, f"place {p!r} starts with {n} tokens"))
    for t in net.timing:
        if t not in transitions:
            report.append(Violation("undefined", t, f"timing given for undeclared transition {t!r}"))
    return report


def _check_dims(net: NetDef, m: Marking) -> None:
    if len(m) != len(net.places):
        raise NetError(f"marking has {len(m)} entries, net {net.name!r} has {len(net.places)} places")


def is_enabled(net: NetDef, m: Marking, t: str) -> bool:
    return all(m[i] >= w for i, w in net.inputs(t))


def enabled_transitions(net: NetDef, m: Marking) -> list[str]:
    """Transitions enabled at ``m``, in declaration order.

    Source transitions (no input arcs) are always enabled.
    """
    _check_dims(net, m)
    return [t for t in net.transitions if is_enabled(net, m, t)]


def fire(net: NetDef, m: Marking, t: str) -> Marking:
    _check_dims(net, m)
    if t not in net.transitions:
        raise NetError(f"unknown transition {t!r}")
    counts = list(m)
    for i, w in net.inputs(t):
        if counts[i] < w:
            raise NotEnabledError(t, net.places[i], counts[i], w)
        counts[i] -= w
    for i, w in net.outputs(t):
        counts[i] += w
    return tuple(counts)


def classify_transition(net: NetDef, t: str) -> str:
    """``"source"``, ``"sink"`` or ``"internal"``.

    A transition with no arcs at all is reported as a source: it is
    unconditionally enabled, which matters more than producing nothing.
    """
    if t not in net.transitions:
        raise NetError(f"unknown transition {t!r}")
    if not net.inputs(t):
        return "source"
    if not net.outputs(t):
        return "sink"
    return "internal"


def format_marking(m: Marking) -> str:
    return "(" + ",".join(str(n) for n in m) + ")"
