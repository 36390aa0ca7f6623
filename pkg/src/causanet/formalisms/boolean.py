"""Boolean causal models and two-level minimisation by Quine-McCluskey.

An implicant is a pair ``(value, mask)`` over ``n`` variables where set
bits of ``mask`` are don't-cares. Variable 0 is the most significant bit,
so minterm ``0b0111`` over (A, B, C, D) means ``!A & B & C & D``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

MAX_VARIABLES = 16

Implicant = tuple[int, int]


class BooleanModelError(ValueError):
    pass


# -- formulas ---------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Const:
    value: bool


Formula = Union[Var, Not, And, Or, Const]

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[!~&|()01]))")


def parse_formula(text: str) -> Formula:
    """Parse ``!``/``~`` (not), ``&`` (and), ``|`` (or), parentheses, 0 and 1."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise BooleanModelError(f"unexpected character {text[pos]!r} at column {pos + 1}")
        tokens.append(m.group("name") or m.group("op"))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    tokens.append(None)
    i = 0

    def peek():
        return tokens[i]

    def take(expected=None):
        nonlocal i
        tok = tokens[i]
        if expected is not None and tok != expected:
            raise BooleanModelError(f"expected {expected!r}, got {tok!r}")
        i += 1
        return tok

    def disjunction():
        parts = [conjunction()]
        while peek() == "|":
            take()
            parts.append(conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction():
        parts = [negation()]
        while peek() == "&":
            take()
            parts.append(negation())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def negation():
        if peek() in ("!", "~"):
            take()
            return Not(negation())
        return atom()

    def atom():
        tok = take()
        if tok == "(":
            f = disjunction()
            take(")")
            return f
        if tok in ("0", "1"):
            return Const(tok == "1")
        if tok is None or tok in "&|)":
            raise BooleanModelError(f"unexpected {tok!r} in formula")
        return Var(tok)

    f = disjunction()
    if peek() is not None:
        raise BooleanModelError(f"trailing input at {peek()!r}")
    return f


def formula_variables(f: Formula) -> set[str]:
    if isinstance(f, Var):
        return {f.name}
    if isinstance(f, Not):
        return formula_variables(f.arg)
    if isinstance(f, (And, Or)):
        return set().union(*(formula_variables(a) for a in f.args))
    return set()


def eval_formula(f: Formula, assignment: Mapping[str, int]) -> bool:
    if isinstance(f, Var):
        try:
            return bool(assignment[f.name])
        except KeyError:
            raise BooleanModelError(f"no value for variable {f.name!r}") from None
    if isinstance(f, Not):
        return not eval_formula(f.arg, assignment)
    if isinstance(f, And):
        return all(eval_formula(a, assignment) for a in f.args)
    if isinstance(f, Or):
        return any(eval_formula(a, assignment) for a in f.args)
    return f.value


# -- causal models ----------------------------------------------------------

Literal = tuple[str, bool]  # (variable, positive)


@dataclass(frozen=True)
class BooleanCausalModel:
    """Effect defined by a formula or by INUS clusters.

    ``clusters`` is a disjunction of conjunctive clusters; each cluster is
    a frozenset of ``(variable, positive)`` literals.
    """

    variables: tuple[str, ...]
    formula: Formula | None = None
    clusters: tuple[frozenset[Literal], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if (self.formula is None) == (self.clusters is None):
            raise BooleanModelError("give exactly one of formula or clusters")
        if self.clusters is not None:
            clusters = tuple(frozenset(c) for c in self.clusters)
            object.__setattr__(self, "clusters", clusters)
            if not clusters or any(not c for c in clusters):
                raise BooleanModelError("cluster list and every cluster must be non-empty")
            used = {v for c in clusters for v, _ in c}
        else:
            used = formula_variables(self.formula)
        unknown = used - set(self.variables)
        if unknown:
            raise BooleanModelError(f"undeclared variables: {sorted(unknown)}")

    def on_set(self) -> set[int]:
        n = len(self.variables)
        out = set()
        for m in range(2 ** n):
            bits = {v: (m >> (n - 1 - i)) & 1 for i, v in enumerate(self.variables)}
            if bool_evaluate(self, bits):
                out.add(m)
        return out


def bool_evaluate(model: BooleanCausalModel, assignment: Mapping[str, int]) -> int:
    missing = [v for v in model.variables if v not in assignment]
    if missing:
        raise BooleanModelError(f"assignment lacks {missing}")
    if model.formula is not None:
        return int(eval_formula(model.formula, assignment))
    return int(any(all(bool(assignment[v]) == pos for v, pos in c) for c in model.clusters))


def surgery_model() -> BooleanCausalModel:
    """Four-person surgical team; the chief (A) has a double vote on ties.

    Surgery is approved when ``2A + B + C + D >= 3``; the on-set is listed
    minterm by minterm.
    """
    names = ("A", "B", "C", "D")
    clusters = []
    for bits in itertools.product((0, 1), repeat=4):
        a, b, c, d = bits
        if 2 * a + b + c + d >= 3:
            clusters.append(frozenset(zip(names, map(bool, bits))))
    return BooleanCausalModel(names, clusters=tuple(clusters))


# -- Quine-McCluskey --------------------------------------------------------

def _covers(imp: Implicant, minterm: int) -> bool:
    value, mask = imp
    return (minterm & ~mask) == value


def prime_implicants(on_set: Iterable[int], n: int) -> set[Implicant]:
    current = {(m, 0) for m in on_set}
    primes: set[Implicant] = set()
    while current:
        merged_from: set[Implicant] = set()
        nxt: set[Implicant] = set()
        by_mask: dict[int, list[Implicant]] = {}
        for imp in current:
            by_mask.setdefault(imp[1], []).append(imp)
        for mask, group in by_mask.items():
            by_ones: dict[int, list[int]] = {}
            for value, _ in group:
                by_ones.setdefault(bin(value).count("1"), []).append(value)
            for ones, values in by_ones.items():
                for v1 in values:
                    for v2 in by_ones.get(ones + 1, ()):
                        diff = v1 ^ v2
                        if diff & (diff - 1) == 0:
                            nxt.add((v1 & ~diff, mask | diff))
                            merged_from.add((v1, mask))
                            merged_from.add((v2, mask))
        primes |= current - merged_from
        current = nxt
    return primes


def literal_key(imp: Implicant, n: int) -> tuple[tuple[int, int], ...]:
    """Literals as (variable index, 0 for positive / 1 for negated)."""
    value, mask = imp
    key = []
    for i in range(n):
        bit = 1 << (n - 1 - i)
        if not mask & bit:
            key.append((i, 0 if value & bit else 1))
    return tuple(key)


def qm_minimize(on_set: Iterable[int], n: int) -> list[Implicant]:
    """Minimum sum-of-products cover of ``on_set`` over ``n`` variables.

    Fewest implicants first, then fewest literals, then the lexicographic
    order of the implicants' literal keys. Returns implicants sorted by
    :func:`literal_key`. An empty on-set gives ``[]`` (constant false).
    """
    if n < 1:
        raise BooleanModelError("need at least one variable")
    if n > MAX_VARIABLES:
        raise BooleanModelError(f"at most {MAX_VARIABLES} variables are supported")
    on = set(on_set)
    if any(not 0 <= m < 2 ** n for m in on):
        raise BooleanModelError(f"minterm out of range for {n} variables")
    if not on:
        return []
    primes = sorted(prime_implicants(on, n), key=lambda p: literal_key(p, n))
    order = {p: (len(literal_key(p, n)), literal_key(p, n)) for p in primes}
    chosen, core = _reduce_table(on, primes, order)
    return sorted(chosen | _exact_cover(core, order), key=lambda p: literal_key(p, n))


def _reduce_table(on: set[int], primes: list[Implicant], order: dict) -> tuple[set, dict]:
    """Strip essentials and dominated rows/columns until the table is cyclic.

    A prime is dropped only when another covers a superset of what remains
    and ranks strictly lower by (literals, literal key); swapping it in never
    worsens a cover under the tie-break, so the optimum is preserved.
    """
    rows = {p: frozenset(m for m in on if _covers(p, m)) for p in primes}
    chosen: set[Implicant] = set()
    uncovered = set(on)
    changed = True
    while changed and uncovered:
        changed = False
        cols = {m: frozenset(p for p, ms in rows.items() if m in ms) for m in uncovered}
        for m, ps in cols.items():
            if len(ps) == 1:
                (p,) = ps
                chosen.add(p)
                uncovered -= rows[p]
                changed = True
        if changed:
            rows = {p: ms & uncovered for p, ms in rows.items() if p not in chosen and ms & uncovered}
            continue
        for p in sorted(rows, key=order.get, reverse=True):
            if any(q != p and q in rows and rows[p] <= rows[q] and order[q] < order[p] for q in rows):
                del rows[p]
                changed = True
        cols = {m: frozenset(p for p, ms in rows.items() if m in ms) for m in uncovered}
        for m in sorted(cols):
            if m in uncovered and any(m2 != m and m2 in uncovered and cols[m2] <= cols[m] and
                                      (cols[m2] != cols[m] or m2 < m) for m2 in cols):
                uncovered.discard(m)
                changed = True
        rows = {p: ms & uncovered for p, ms in rows.items() if ms & uncovered}
    return chosen, rows


def _exact_cover(rows: dict, order: dict) -> set[Implicant]:
    """Branch and bound over a reduced table, ranking as in :func:`qm_minimize`."""
    universe = frozenset().union(*rows.values()) if rows else frozenset()
    if not universe:
        return set()
    cands = {m: [p for p in sorted(rows, key=order.get) if m in rows[p]] for m in universe}

    def lower_bound(uncovered: frozenset, banned: frozenset) -> tuple[int, int]:
        # minterms with pairwise disjoint candidate sets each need their own prime
        seen: set[Implicant] = set()
        count = lits = 0
        for m in sorted(uncovered, key=lambda x: len(cands[x])):
            cs = [p for p in cands[m] if p not in banned]
            if not cs:
                return -1, -1
            if seen.isdisjoint(cs):
                count += 1
                lits += min(order[p][0] for p in cs)
                seen.update(cs)
        return count, lits

    best: list = [None, None]  # rank, selection

    def rank(sel) -> tuple:
        keys = sorted(order[p][1] for p in sel)
        return (len(keys), sum(len(k) for k in keys), tuple(keys))

    def search(chosen: tuple, uncovered: frozenset, banned: frozenset) -> None:
        if not uncovered:
            r = rank(chosen)
            if best[0] is None or r < best[0]:
                best[0], best[1] = r, chosen
            return
        lb, lits = lower_bound(uncovered, banned)
        if lb < 0:
            return
        if best[0] is not None:
            bound = (len(chosen) + lb, sum(order[p][0] for p in chosen) + lits)
            if bound > best[0][:2]:
                return
        m = min(uncovered, key=lambda x: (sum(p not in banned for p in cands[x]), x))
        excluded = set(banned)
        for p in cands[m]:
            if p in excluded:
                continue
            # later siblings never reuse p, so each selection is visited once
            search(chosen + (p,), uncovered - rows[p], frozenset(excluded))
            excluded.add(p)

    search((), universe, frozenset())
    return set(best[1])


def implicant_str(imp: Implicant, names: Sequence[str]) -> str:
    lits = [("" if pos == 0 else "!") + names[i] for i, pos in literal_key(imp, len(names))]
    return "&".join(lits) if lits else "1"


def dnf_str(implicants: Sequence[Implicant], names: Sequence[str]) -> str:
    if not implicants:
        return "0"
    return " | ".join(implicant_str(p, names) for p in implicants)


def implicant_clusters(implicants: Sequence[Implicant], names: Sequence[str]) -> list[frozenset[Literal]]:
    return [frozenset((names[i], pos == 0) for i, pos in literal_key(p, len(names)))
            for p in implicants]


def evaluate_dnf(implicants: Sequence[Implicant], minterm: int) -> bool:
    return any(_covers(p, minterm) for p in implicants)


# -- truth-table text format -----------------------------------------------

def parse_truth_table(text: str) -> tuple[tuple[str, ...], set[int]]:
    """Header line of variable names, then one on-set minterm per line.

    Minterm lines are bit strings in header order; spaces between bits are
    allowed and ``#`` starts a comment.
    """
    names: tuple[str, ...] | None = None
    on: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if names is None:
            names = tuple(line.replace(",", " ").split())
            if not names or len(set(names)) != len(names):
                raise BooleanModelError(f"line {lineno}: bad variable header")
            continue
        bits = line.replace(" ", "")
        if len(bits) != len(names) or set(bits) - {"0", "1"}:
            raise BooleanModelError(f"line {lineno}: expected {len(names)} bits, got {line!r}")
        on.add(int(bits, 2))
    if names is None:
        raise BooleanModelError("truth table has no header")
    return names, on


def format_truth_table(names: Sequence[str], on_set: Iterable[int]) -> str:
    n = len(names)
    lines = [" ".join(names)] + [format(m, f"0{n}b") for m in sorted(on_set)]
    return "\n".join(lines) + "\n"
