"""Fuzzy cognitive maps with delayed edges.

Update rule, for every concept with incoming edges::

    A_i(k+1) = clamp(A_i(k) + sum_j w_ji * A_j(k - d_ji), -1, 1)

Concepts without incoming edges keep their activation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..fuzzy import TNorm, tconorm, tnorm


class FcmError(ValueError):
    pass


@dataclass(frozen=True)
class FuzzyCognitiveMap:
    name: str = "fcm"
    concepts: tuple[str, ...] = ()
    initial: tuple[float, ...] = ()
    edges: tuple[tuple[str, str, float, int], ...] = ()  # (source, target, weight, delay)
    conorm: TNorm = TNorm.GODEL
    conjunction: TNorm = TNorm.GODEL

    def __post_init__(self):
        object.__setattr__(self, "concepts", tuple(self.concepts))
        object.__setattr__(self, "initial", tuple(float(x) for x in self.initial))
        object.__setattr__(self, "edges", tuple((s, t, float(w), int(d)) for s, t, w, d in self.edges))
        if len(self.initial) != len(self.concepts):
            raise FcmError("one initial activation per concept is required")
        if any(not -1.0 <= a <= 1.0 for a in self.initial):
            raise FcmError("activations must lie in [-1, 1]")
        for s, t, w, d in self.edges:
            if s not in self.concepts or t not in self.concepts:
                raise FcmError(f"edge {s}->{t} references an undeclared concept")
            if not -1.0 <= w <= 1.0:
                raise FcmError(f"edge {s}->{t}: weight {w} outside [-1, 1]")
            if d < 0:
                raise FcmError(f"edge {s}->{t}: negative delay")

    @property
    def max_delay(self) -> int:
        return max((d for *_, d in self.edges), default=0)


def fcm_step(fcm: FuzzyCognitiveMap, history: Sequence[Sequence[float]]) -> tuple[float, ...]:
    """Next state from ``history`` (oldest first, current state last).

    Needs ``max_delay + 1`` states so every delayed source is available.
    """
    depth = fcm.max_delay + 1
    if len(history) < depth:
        raise FcmError(f"history holds {len(history)} state(s), {depth} needed")
    idx = {c: i for i, c in enumerate(fcm.concepts)}
    current = np.asarray(history[-1], dtype=float)
    nxt = current.copy()
    has_input = np.zeros(len(current), dtype=bool)
    for s, t, w, d in fcm.edges:
        nxt[idx[t]] += w * history[-1 - d][idx[s]]
        has_input[idx[t]] = True
    nxt = np.where(has_input, np.clip(nxt, -1.0, 1.0), current)
    return tuple(float(x) for x in nxt)


@dataclass(frozen=True)
class FcmRun:
    trajectory: tuple[tuple[float, ...], ...]
    fixed_point: bool
    fixed_at: int | None


def fcm_run(fcm: FuzzyCognitiveMap, initial: Sequence[float] | None = None,
            iterations: int = 100, tol: float = 1e-9) -> FcmRun:
    """Iterate :func:`fcm_step`; the state before step 0 is taken as steady."""
    if iterations < 0:
        raise FcmError("iterations must be non-negative")
    state = tuple(float(x) for x in (fcm.initial if initial is None else initial))
    history = [state] * (fcm.max_delay + 1)
    trajectory = [state]
    fixed_at = None
    for k in range(iterations):
        nxt = fcm_step(fcm, history)
        if fixed_at is None and max(abs(a - b) for a, b in zip(nxt, trajectory[-1])) < tol:
            fixed_at = k
        trajectory.append(nxt)
        history = history[1:] + [nxt]
    return FcmRun(tuple(trajectory), fixed_at is not None, fixed_at)


def trivalent_influence(fcm: FuzzyCognitiveMap, state: Mapping[str, float] | Sequence[float],
                        target: str) -> int:
    """Net sign (+1, 0, -1) of the immediate influences reaching ``target``.

    Each link counts as +, - or neutral (sign of weight times source
    activation); the verdict is whichever sign has more votes.
    """
    if not isinstance(state, Mapping):
        state = dict(zip(fcm.concepts, state))
    votes = 0
    for s, t, w, _ in fcm.edges:
        if t == target:
            votes += int(np.sign(w) * np.sign(state[s]))
    return int(np.sign(votes))


def aggregate(values: Sequence[float], kind: TNorm, conjunctive: bool = False) -> float:
    """Fold positive influences with a t-conorm, or a t-norm when conjunctive."""
    op = tnorm if conjunctive else tconorm
    acc = 1.0 if conjunctive else 0.0
    for v in values:
        acc = op(kind, acc, v)
    return acc
