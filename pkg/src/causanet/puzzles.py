"""Causal puzzles as runnable scenarios with machine-checkable expectations.

Every scenario net is built in code and also shipped as a ``.causanet``
fixture; the two must agree (see ``tests/test_puzzles.py``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Callable

from .analysis import detect_deadlocks, reachability_graph, trace_stats
from .dsl import parse
from .formalisms.boolean import bool_evaluate, dnf_str, qm_minimize, surgery_model
from .fuzzy import LEXICON, crisp
from .net import NetDef, enabled_transitions
from .sim import run, run_batch
from .timing_spec import deterministic

SEED_BASE = 20_240_601


@dataclass(frozen=True)
class Outcome:
    expectation: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class Expectation:
    name: str
    description: str
    check: Callable[[NetDef], tuple[bool, str]]
    references: tuple[str, ...] = ()


@dataclass(frozen=True)
class Scenario:
    name: str
    model: NetDef
    expectations: tuple[Expectation, ...] = field(default_factory=tuple)

    def check(self) -> list[Outcome]:
        out = []
        for e in self.expectations:
            ok, detail = e.check(self.model)
            out.append(Outcome(e.name, bool(ok), detail))
        return out


def _net(name, places, transitions, inputs, outputs, timing=None) -> NetDef:
    return NetDef(
        tuple(p for p, _ in places), tuple(transitions),
        {(t, p): w for t, arcs in inputs.items() for p, w in arcs},
        {(t, p): w for t, arcs in outputs.items() for p, w in arcs},
        tuple(n for _, n in places), timing or {}, name,
    )


# -- nets -------------------------------------------------------------------

def two_stage_net() -> NetDef:
    return _net(
        "two_stage",
        [("p1", 2), ("p2", 2), ("p3", 0), ("p4", 0), ("p5", 0)],
        ["t1", "t2", "t3"],
        {"t1": [("p1", 2), ("p2", 1)], "t2": [("p3", 1)], "t3": [("p3", 1)]},
        {"t1": [("p3", 1)], "t2": [("p4", 1)], "t3": [("p5", 1)]},
    )


def job_market_net() -> NetDef:
    return _net(
        "job_market",
        [("demands", 3), ("offer", 1), ("interview", 0), ("hired", 0)],
        ["t1", "t2"],
        {"t1": [("demands", 1), ("offer", 1)], "t2": [("interview", 1)]},
        {"t1": [("interview", 1)], "t2": [("offer", 1), ("hired", 1)]},
    )


def symmetric_net() -> NetDef:
    return _net(
        "symmetric_overdetermination",
        [("clarithromycin", 1), ("amoxicillin", 1), ("cured", 0)],
        ["cure"],
        {"cure": [("clarithromycin", 1), ("amoxicillin", 1)]},
        {"cure": [("cured", 1)]},
    )


def asymmetric_net() -> NetDef:
    return _net(
        "asymmetric_overdetermination",
        [("medicine_a", 1), ("medicine_b", 1), ("patient", 1), ("relieved", 0)],
        ["take_a", "take_b"],
        {"take_a": [("medicine_a", 1), ("patient", 1)], "take_b": [("medicine_b", 1), ("patient", 1)]},
        {"take_a": [("relieved", 1)], "take_b": [("relieved", 1)]},
    )


SURGERY_CLUSTERS = (("A", "B"), ("A", "C"), ("A", "D"), ("B", "C", "D"))


def alternative_causes_net(votes=(1, 1, 1, 1)) -> NetDef:
    return _net(
        "alternative_causes",
        [("A", votes[0]), ("B", votes[1]), ("C", votes[2]), ("D", votes[3]), ("surgery", 0)],
        ["".join(c) for c in SURGERY_CLUSTERS],
        {"".join(c): [(v, 1) for v in c] for c in SURGERY_CLUSTERS},
        {"".join(c): [("surgery", 1)] for c in SURGERY_CLUSTERS},
    )


def sales_orders_net(restock_delay: float = 4.0) -> NetDef:
    return _net(
        "sales_orders_delay",
        [("sales", 3), ("orders", 0)],
        ["sell", "restock"],
        {"sell": [("sales", 1)], "restock": [("orders", 1)]},
        {"sell": [("orders", 1)], "restock": [("sales", 1)]},
        {"restock": deterministic(restock_delay)} if restock_delay else {},
    )


def trumping_net() -> NetDef:
    return _net(
        "trumping",
        [("merlin", 1), ("morgana", 1), ("prince", 1), ("frog", 0)],
        ["spell_merlin", "spell_morgana"],
        {"spell_merlin": [("merlin", 1), ("prince", 1)], "spell_morgana": [("morgana", 1), ("prince", 1)]},
        {"spell_merlin": [("frog", 1)], "spell_morgana": [("frog", 1)]},
        {"spell_merlin": deterministic(1), "spell_morgana": deterministic(2)},
    )


def fizzling_net() -> NetDef:
    return _net(
        "fizzling",
        [("thrower_a", 1), ("vandal_b", 1), ("lamppost", 1), ("broken", 0)],
        ["throw_a", "throw_b"],
        {"throw_a": [("thrower_a", 1), ("lamppost", 1)], "throw_b": [("vandal_b", 1), ("lamppost", 1)]},
        {"throw_a": [("broken", 1)], "throw_b": [("broken", 1)]},
        {
            "throw_a": deterministic(1, fuzzy=crisp(1.0, name="rage")),
            "throw_b": deterministic(2, fuzzy=LEXICON["highly_probable"]),
        },
    )


def yale_shooting_net() -> NetDef:
    return _net(
        "yale_shooting",
        [("s0", 1), ("s1", 0), ("s2", 0), ("loaded", 1), ("alive", 1), ("dead", 0)],
        ["wait", "shoot"],
        {"wait": [("s0", 1)], "shoot": [("s1", 1), ("loaded", 1), ("alive", 1)]},
        {"wait": [("s1", 1)], "shoot": [("s2", 1), ("dead", 1)]},
    )


# -- expectations -----------------------------------------------------------

def _with_marking(net: NetDef, **counts) -> NetDef:
    m = list(net.initial_marking)
    for p, n in counts.items():
        m[net.place_index(p)] = n
    return replace(net, initial_marking=tuple(m))


def _symmetric_expectations():
    def sync(net):
        bad = []
        for a, b in itertools.product((0, 1, 2), repeat=2):
            m = (a, b, 0)
            enabled = "cure" in enabled_transitions(net, m)
            if enabled != (a >= 1 and b >= 1):
                bad.append(m)
        return not bad, f"mismatched markings: {bad}" if bad else "cure enabled iff both drugs present"

    def missing(net):
        for drug in ("clarithromycin", "amoxicillin"):
            g = reachability_graph(_with_marking(net, **{drug: 0}))
            if any(t == "cure" for _, t, _ in g.edges):
                return False, f"cure fired without {drug}"
        return True, "no cure when either drug is withheld"

    def once(net):
        g = reachability_graph(net)
        dead = detect_deadlocks(g)
        return dead == [(0, 0, 1)], f"dead markings {dead}"

    return (
        Expectation("synchronised", "cure fires only when both drug places hold tokens", sync, ("cure",)),
        Expectation("one_drug_missing", "withholding either drug leaves cure never enabled", missing,
                    ("clarithromycin", "amoxicillin", "cure")),
        Expectation("cured_once", "with both drugs the net ends cured, drugs used up", once, ("cured",)),
    )


def _asymmetric_expectations():
    def exclusive(net):
        g = reachability_graph(net)
        first = {t for s, t, _ in g.edges if s == g.root}
        later = [e for e in g.edges if e[0] != g.root]
        dead = detect_deadlocks(g)
        ok = first == {"take_a", "take_b"} and not later and all(m[3] == 1 for m in dead)
        return ok, f"initially enabled {sorted(first)}, dead markings {dead}"

    def simulated(net):
        traces = run_batch(net, range(SEED_BASE, SEED_BASE + 1000))
        both = sum(tr.fired("take_a") and tr.fired("take_b") for tr in traces)
        neither = sum(not tr.fired("take_a") and not tr.fired("take_b") for tr in traces)
        freq_a = trace_stats(traces, "take_a").frequency
        ok = both == 0 and neither == 0 and abs(freq_a - 0.5) <= 0.05
        return ok, f"both={both} neither={neither} take_a frequency={freq_a:.3f}"

    return (
        Expectation("conflict", "exactly one medicine transition fires per patient token", exclusive,
                    ("take_a", "take_b", "relieved")),
        Expectation("fair_choice", "1000 runs: one medicine each time, equal weights give ~50/50", simulated,
                    ("take_a", "take_b")),
    )


def _alternative_expectations():
    model = surgery_model()

    def decision_matches(net):
        bad = []
        for votes in itertools.product((0, 1), repeat=4):
            g = reachability_graph(alternative_causes_net(votes))
            reached = any(m[4] > 0 for m in g.nodes)
            wanted = bool_evaluate(model, dict(zip("ABCD", votes)))
            if reached != bool(wanted):
                bad.append(votes)
        return not bad, f"disagreeing vote patterns: {bad}" if bad else "net agrees with 2A+B+C+D>=3"

    def minimal(net):
        dnf = dnf_str(qm_minimize(model.on_set(), 4), model.variables)
        clusters = " | ".join("&".join(c) for c in SURGERY_CLUSTERS)
        return dnf == clusters and list(net.transitions) == ["".join(c) for c in SURGERY_CLUSTERS], dnf

    def redundancy(net):
        g = reachability_graph(net)
        first = [t for s, t, _ in g.edges if s == g.root]
        dead = detect_deadlocks(g)
        ok = len(first) >= 2 and all(m[4] == 1 for m in dead)
        return ok, f"{len(first)} clusters enabled at once with all votes; surgery counts at the end {sorted(m[4] for m in dead)}"

    return (
        Expectation("decision", "surgery reachable exactly for approving vote patterns", decision_matches,
                    ("A", "B", "C", "D", "surgery")),
        Expectation("minimal_dnf", "transitions are the minimised clusters AB, AC, AD, BCD", minimal,
                    ("AB", "AC", "AD", "BCD")),
        Expectation("all_four_redundancy", "with all four votes several clusters compete; one surgery results",
                    redundancy, ("surgery",)),
    )


def first_zero_time(trace, place_index: int):
    for e in trace.events:
        if e.post[place_index] == 0:
            return e.time
    return None


def _sales_expectations():
    def runs_dry(net):
        tr = run(net, horizon=12, max_steps=1000, seed=SEED_BASE)
        zero = first_zero_time(tr, net.place_index("sales"))
        restock = next((e.time for e in tr.events if e.transition == "restock"), None)
        ok = zero is not None and restock is not None and zero < restock
        return ok, f"sales empty at t={zero}, first restock at t={restock}"

    def no_delay(net):
        instant = sales_orders_net(restock_delay=0)
        worst = None
        for seed in range(SEED_BASE, SEED_BASE + 20):
            tr = run(instant, horizon=12, max_steps=300, seed=seed)
            low = min(m[0] for m in tr.markings())
            worst = low if worst is None else min(worst, low)
        return worst is not None and worst > 0, f"lowest sales count with zero restock delay: {worst}"

    return (
        Expectation("delay_breaks_balance", "sales run out before the 4-day restock completes", runs_dry,
                    ("sales", "restock")),
        Expectation("instant_restock", "with zero restock delay sales never run out", no_delay, ("sales",)),
    )


def _trumping_expectations():
    def merlin_always(net):
        traces = run_batch(net, range(SEED_BASE, SEED_BASE + 1000))
        me = trace_stats(traces, "spell_merlin")
        mo = trace_stats(traces, "spell_morgana")
        return me.runs_fired == 1000 and mo.runs_fired == 0, \
            f"merlin {me.runs_fired}/1000, morgana {mo.runs_fired}/1000"

    return (
        Expectation("first_spell_wins", "1000 runs: Merlin's spell is the cause every time", merlin_always,
                    ("spell_merlin", "spell_morgana")),
    )


FIZZLING_TRIALS = 10_000


def _fizzling_expectations():
    def a_preempts(net):
        traces = run_batch(net, range(SEED_BASE, SEED_BASE + FIZZLING_TRIALS))
        bad = 0
        for tr in traces:
            a_gate = [d for d in tr.all_draws()
                      if d["kind"] == "gate" and d["transition"] == "throw_a"]
            if a_gate and a_gate[0]["pass"] and not (tr.fired("throw_a") and not tr.fired("throw_b")):
                bad += 1
        return bad == 0, f"{bad} runs where a's passed gate did not preempt b"

    def b_disposition(net):
        traces = run_batch(net, range(SEED_BASE, SEED_BASE + FIZZLING_TRIALS))
        s = trace_stats(traces, "throw_b")
        return abs(s.gate_pass_rate - 0.8) <= 0.03, \
            f"b's gate passed {s.gate_passes}/{s.gate_attempts} = {s.gate_pass_rate:.4f}"

    return (
        Expectation("anticipation", "whenever a's gate passes, a breaks the lamp and b never throws",
                    a_preempts, ("throw_a", "throw_b")),
        Expectation("highly_probable", "b's gate passes at rate 0.8 +/- 0.03 over 10^4 trials", b_disposition,
                    ("throw_b",)),
    )


def _yale_expectations():
    def only_shoot_kills(net):
        g = reachability_graph(net)
        alive = net.place_index("alive")
        killers = {t for s, t, d in g.edges if d[alive] < s[alive]}
        return killers == {"shoot"}, f"transitions removing the alive token: {sorted(killers)}"

    def inertia(net):
        g = reachability_graph(net)
        idx = [net.place_index("alive"), net.place_index("loaded")]
        ok = all(s[i] == d[i] for s, t, d in g.edges if t == "wait" for i in idx)
        return ok, "wait leaves loaded and alive unchanged" if ok else "wait changed a property"

    def sequence(net):
        tr = run(net, seed=SEED_BASE)
        names = [e.transition for e in tr.events]
        dead = tr.final_marking[net.place_index("dead")]
        return names == ["wait", "shoot"] and dead == 1, f"fired {names}, dead={dead}"

    return (
        Expectation("only_shoot_kills", "the alive token is removed only by shoot", only_shoot_kills,
                    ("alive", "shoot")),
        Expectation("inertia", "waiting changes neither loaded nor alive", inertia, ("wait", "loaded", "alive")),
        Expectation("wait_then_shoot", "wait precedes shoot and the victim ends dead", sequence,
                    ("wait", "shoot", "dead")),
    )


JOB_MARKET_MARKINGS = ((3, 1, 0, 0), (2, 0, 1, 0), (2, 1, 0, 1))


def _job_expectations():
    def marking_trace(net):
        tr = run(net, horizon=10, seed=1)
        got = tuple(tr.markings()[:3])
        return got == JOB_MARKET_MARKINGS, f"first markings {got}"

    def permanent_offer(net):
        g = reachability_graph(net)
        offer, demands = net.place_index("offer"), net.place_index("demands")
        dead = detect_deadlocks(g)
        ok = g.has_path(JOB_MARKET_MARKINGS) and all(m[demands] == 0 and m[offer] == 1 for m in dead)
        return ok, f"dead markings {dead}: every demand served and the offer is back"

    return (
        Expectation("marking_sequence", "simulation passes through (3,1,0,0), (2,0,1,0), (2,1,0,1)",
                    marking_trace, ("t1", "t2")),
        Expectation("permanent_offer", "the net only stops once every demand is served, offer intact",
                    permanent_offer, ("offer", "demands")),
    )


_REGISTRY = {
    "symmetric_overdetermination": (symmetric_net, _symmetric_expectations),
    "asymmetric_overdetermination": (asymmetric_net, _asymmetric_expectations),
    "alternative_causes": (alternative_causes_net, _alternative_expectations),
    "sales_orders_delay": (sales_orders_net, _sales_expectations),
    "trumping": (trumping_net, _trumping_expectations),
    "fizzling": (fizzling_net, _fizzling_expectations),
    "yale_shooting": (yale_shooting_net, _yale_expectations),
    "job_market": (job_market_net, _job_expectations),
}

SCENARIOS = tuple(_REGISTRY)


class UnknownScenario(KeyError):
    pass


def build(name: str) -> Scenario:
    try:
        make_net, make_exp = _REGISTRY[name]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {name!r}; known: {', '.join(SCENARIOS)}") from None
    return Scenario(name, make_net(), make_exp())


def check_all() -> dict[str, list[Outcome]]:
    return {name: build(name).check() for name in SCENARIOS}


def fixture_text(filename: str) -> str:
    return resources.files("causanet").joinpath("scenarios", filename).read_text(encoding="utf-8")


def fixture_net(name: str) -> NetDef:
    return parse(fixture_text(f"{name}.causanet"), f"{name}.causanet").get("net", name)
