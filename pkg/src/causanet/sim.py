"""Discrete-event simulation of timed, stochastic and fuzzy-gated nets.

Firing follows the firing-duration reading: when a transition starts, its
input tokens are reserved at once and its output tokens appear only when
its delay has elapsed. Time belongs to transitions, each transition is a
single server, and enabling memory is used (a lost race or a failed fuzzy
gate discards the attempt).

Markings recorded in traces are *logical* markings: available tokens plus
tokens reserved by firings still in progress. A completion therefore reads
as an ordinary untimed firing, ``post = pre - in(t) + out(t)``.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .fuzzy import FuzzyError, FuzzyLabel, defuzzify_centroid, sample_membership
from .net import Marking, NetDef
from .timing_spec import TimingError, TimingSpec

RNG_ALGORITHM = "PCG64"
TRACE_FORMAT = "causanet-trace/1"
POLICIES = ("centroid", "sampled")


class SimulationError(ValueError):
    pass


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def sample_delay(spec: TimingSpec, rng: np.random.Generator) -> float:
    """Duration of one firing; only ``exp`` and ``unif`` consume draws."""
    k, p = spec.kind, spec.params
    if k == "imm":
        return 0.0
    if k == "det":
        return p[0]
    if k == "exp":
        if p[0] <= 0:
            raise TimingError(f"exponential rate {p[0]} must be positive")
        return float(rng.exponential(1.0 / p[0]))
    if k == "unif":
        return float(rng.uniform(p[0], p[1]))
    raise TimingError(f"unknown delay kind {k!r}")


def resolve_conflict(candidates: Sequence[str], weights, rng: np.random.Generator) -> str:
    """Pick one candidate with probability proportional to its weight.

    A single candidate is returned without touching the generator.
    """
    if not candidates:
        raise SimulationError("conflict resolution needs at least one candidate")
    ws = [float(weights[c]) for c in candidates]
    if any(not w > 0 for w in ws):
        raise SimulationError(f"conflict weights must be positive, got {ws}")
    if len(candidates) == 1:
        return candidates[0]
    target = rng.random() * math.fsum(ws)
    acc = 0.0
    for c, w in zip(candidates, ws):
        acc += w
        if target < acc:
            return c
    return candidates[-1]


def resolve_fuzzy_gate(label: FuzzyLabel, rng: np.random.Generator, policy: str = "centroid") -> bool:
    return _gate(label, rng, policy)[0]


def _gate(label: FuzzyLabel, rng, policy: str) -> tuple[bool, float, float]:
    if policy == "centroid":
        threshold = defuzzify_centroid(label)
    elif policy == "sampled":
        threshold = sample_membership(label, rng)
    else:
        raise SimulationError(f"unknown defuzzification policy {policy!r}")
    u = float(rng.random())
    return u < threshold, u, threshold


@dataclass(frozen=True)
class Pending:
    transition: str
    due: float
    seq: int
    reserved: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class SimState:
    clock: float
    marking: Marking  # available tokens only
    pending: tuple[Pending, ...] = ()
    rng: np.random.Generator | None = None
    blocked: frozenset[str] = frozenset()
    seq: int = 0

    def __post_init__(self):
        if any(p.due < self.clock for p in self.pending):
            raise SimulationError("pending firing due before the current clock")

    @property
    def reserved(self) -> Marking:
        counts = [0] * len(self.marking)
        for p in self.pending:
            for i, w in p.reserved:
                counts[i] += w
        return tuple(counts)

    @property
    def logical_marking(self) -> Marking:
        return tuple(a + r for a, r in zip(self.marking, self.reserved))


def initial_state(net: NetDef, seed: int) -> SimState:
    return SimState(0.0, net.initial_marking, rng=make_rng(seed))


@dataclass(frozen=True)
class Event:
    time: float
    transition: str
    pre: Marking
    post: Marking
    draws: tuple[dict, ...] = ()


DEADLOCK = None


def _enabled(net: NetDef, avail: list[int], t: str) -> bool:
    return all(avail[i] >= w for i, w in net.inputs(t))


def _tie_order(net: NetDef, group: list[str], rng, draws: list) -> list[str]:
    # Weighted random permutation, candidates listed in declaration order.
    remaining = list(group)
    weights = {t: net.timing_of(t).weight for t in group}
    order = []
    while len(remaining) > 1:
        pick = resolve_conflict(remaining, weights, rng)
        order.append(pick)
        remaining.remove(pick)
    order.extend(remaining)
    draws.append({"kind": "tie", "order": order})
    return order


def _advance(net: NetDef, state: SimState, rng, policy: str):
    """One scheduling phase plus one completion. Mutates ``rng`` only.

    Returns ``(event, state, draws)``; ``draws`` matters on deadlock, where
    no event exists to carry them.
    """
    draws: list[dict] = []
    avail = list(state.marking)
    pending = list(state.pending)
    busy = {p.transition for p in pending}
    blocked = set(state.blocked)
    seq = state.seq
    clock = state.clock

    candidates = [
        t for t in net.transitions
        if t not in busy and t not in blocked and _enabled(net, avail, t)
    ]
    if candidates:
        trying = []
        for t in candidates:
            label = net.timing_of(t).fuzzy
            if label is None:
                trying.append(t)
                continue
            ok, u, threshold = _gate(label, rng, policy)
            draws.append({"kind": "gate", "transition": t, "u": u, "threshold": threshold, "pass": ok})
            if ok:
                trying.append(t)
            else:
                blocked.add(t)
        due = {}
        for t in trying:
            spec = net.timing_of(t)
            d = sample_delay(spec, rng)
            if spec.kind in ("exp", "unif"):
                draws.append({"kind": "delay", "transition": t, "value": d})
            due[t] = clock + d
        # race: earliest due first; equal due times tie-broken by weight
        by_due: dict[float, list[str]] = {}
        for t in trying:
            by_due.setdefault(due[t], []).append(t)
        for when in sorted(by_due):
            group = by_due[when]
            if len(group) > 1:
                group = _tie_order(net, group, rng, draws)
            for t in group:
                if _enabled(net, avail, t):
                    reserved = tuple(net.inputs(t))
                    for i, w in reserved:
                        avail[i] -= w
                    pending.append(Pending(t, when, seq, reserved))
                    seq += 1
                else:
                    draws.append({"kind": "lost", "transition": t})
        # a failed gate stays failed until its transition is disabled again
        blocked = {t for t in blocked if _enabled(net, avail, t)}

    if not pending:
        new_state = replace(state, blocked=frozenset(blocked), marking=tuple(avail), seq=seq)
        return DEADLOCK, new_state, tuple(draws)

    done = min(pending, key=lambda p: (p.due, p.seq))
    pending.remove(done)
    logical_pre = [a for a in avail]
    for p in pending + [done]:
        for i, w in p.reserved:
            logical_pre[i] += w
    post = list(logical_pre)
    for i, w in done.reserved:
        post[i] -= w
    for i, w in net.outputs(done.transition):
        avail[i] += w
        post[i] += w
    event = Event(done.due, done.transition, tuple(logical_pre), tuple(post), tuple(draws))
    new_state = SimState(done.due, tuple(avail), tuple(pending), state.rng,
                         frozenset(blocked), seq)
    return event, new_state, event.draws


def step(net: NetDef, state: SimState, policy: str = "centroid"):
    """Advance to the next completed firing.

    Returns ``(event, new_state)``, or ``(DEADLOCK, state')`` when nothing
    is enabled and nothing is in progress. ``state`` itself is untouched;
    the returned state carries its own advanced generator.
    """
    if state.rng is None:
        raise SimulationError("state has no random generator")
    if len(state.marking) != len(net.places):
        raise SimulationError("state marking does not match the net")
    rng = copy.deepcopy(state.rng)
    event, new_state, _ = _advance(net, state, rng, policy)
    if event is DEADLOCK and new_state == replace(state, rng=state.rng):
        return DEADLOCK, state
    return event, replace(new_state, rng=rng)


@dataclass
class SimTrace:
    net: str
    places: tuple[str, ...]
    seed: int
    policy: str
    horizon: float
    max_steps: int
    initial_marking: Marking
    events: list[Event] = field(default_factory=list)
    terminated_reason: str = "horizon"
    rng_algorithm: str = RNG_ALGORITHM
    # draws of the final scheduling phase, which produced no recorded event
    final_draws: tuple[dict, ...] = ()

    def all_draws(self) -> list[dict]:
        return [d for e in self.events for d in e.draws] + list(self.final_draws)

    @property
    def final_marking(self) -> Marking:
        return self.events[-1].post if self.events else self.initial_marking

    def fired(self, transition: str) -> bool:
        return any(e.transition == transition for e in self.events)

    def markings(self) -> list[Marking]:
        return [self.initial_marking] + [e.post for e in self.events]


def run(net: NetDef, horizon: float = math.inf, max_steps: int = 10_000,
        seed: int = 0, policy: str = "centroid") -> SimTrace:
    if horizon < 0 or max_steps < 0:
        raise SimulationError("horizon and max_steps must be non-negative")
    if policy not in POLICIES:
        raise SimulationError(f"unknown defuzzification policy {policy!r}")
    rng = make_rng(seed)
    state = SimState(0.0, net.initial_marking, rng=rng)
    trace = SimTrace(net.name, net.places, seed, policy, horizon, max_steps, net.initial_marking)
    while True:
        if len(trace.events) >= max_steps:
            trace.terminated_reason = "step limit"
            break
        event, state, draws = _advance(net, state, rng, policy)
        if event is DEADLOCK or event.time > horizon:
            trace.terminated_reason = "deadlock" if event is DEADLOCK else "horizon"
            trace.final_draws = draws
            break
        trace.events.append(event)
    return trace


def run_batch(net: NetDef, seeds: Iterable[int], horizon: float = math.inf,
              max_steps: int = 10_000, policy: str = "centroid") -> list[SimTrace]:
    return [run(net, horizon, max_steps, s, policy) for s in seeds]


# -- trace export -----------------------------------------------------------

def _json_num(x: float):
    return x if math.isfinite(x) else str(x)


def trace_lines(trace: SimTrace) -> list[str]:
    header = {
        "record": "header",
        "format": TRACE_FORMAT,
        "net": trace.net,
        "seed": trace.seed,
        "rng": trace.rng_algorithm,
        "policy": trace.policy,
        "horizon": _json_num(trace.horizon),
        "max_steps": trace.max_steps,
        "places": list(trace.places),
        "initial": list(trace.initial_marking),
    }
    lines = [json.dumps(header, separators=(",", ":"))]
    for e in trace.events:
        rec = {
            "record": "event",
            "time": e.time,
            "transition": e.transition,
            "pre": list(e.pre),
            "post": list(e.post),
            "draws": list(e.draws),
        }
        lines.append(json.dumps(rec, separators=(",", ":")))
    lines.append(json.dumps({"record": "end", "reason": trace.terminated_reason,
                             "events": len(trace.events), "draws": list(trace.final_draws)},
                            separators=(",", ":")))
    return lines


def dumps_trace(trace: SimTrace) -> str:
    return "\n".join(trace_lines(trace)) + "\n"


def loads_trace(text: str) -> SimTrace:
    records = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not records or records[0].get("record") != "header":
        raise SimulationError("trace does not start with a header record")
    h = records[0]
    if h.get("format") != TRACE_FORMAT:
        raise SimulationError(f"unsupported trace format {h.get('format')!r}")
    horizon = h["horizon"]
    trace = SimTrace(h["net"], tuple(h["places"]), h["seed"], h["policy"],
                     float(horizon), h["max_steps"], tuple(h["initial"]),
                     rng_algorithm=h["rng"])
    for r in records[1:]:
        if r["record"] == "event":
            trace.events.append(Event(r["time"], r["transition"], tuple(r["pre"]),
                                      tuple(r["post"]), tuple(r["draws"])))
        elif r["record"] == "end":
            trace.terminated_reason = r["reason"]
            trace.final_draws = tuple(r.get("draws", ()))
    return trace


__all__ = [
    "DEADLOCK", "Event", "FuzzyError", "Pending", "SimState", "SimTrace", "SimulationError",
    "dumps_trace", "initial_state", "loads_trace", "make_rng", "resolve_conflict",
    "resolve_fuzzy_gate", "run", "run_batch", "sample_delay", "step", "trace_lines",
]
