import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causanet import puzzles
from causanet.fuzzy import crisp, triangular
from causanet.net import NetDef, fire
from causanet.sim import (DEADLOCK, RNG_ALGORITHM, SimState, SimulationError, dumps_trace, initial_state,
                          loads_trace, make_rng, resolve_conflict, resolve_fuzzy_gate, run, sample_delay,
                          step)
from causanet.timing_spec import (IMMEDIATE, TimingError, TimingSpec, deterministic, exponential,
                                  immediate, uniform)


def test_sample_delay_fixed_kinds():
    rng = make_rng(0)
    assert sample_delay(deterministic(4), rng) == 4
    assert sample_delay(IMMEDIATE, rng) == 0
    # neither consumed a draw
    assert rng.random() == make_rng(0).random()


def test_sample_delay_exponential_mean():
    rng = make_rng(1)
    xs = [sample_delay(exponential(2.0), rng) for _ in range(100_000)]
    assert abs(np.mean(xs) - 0.5) <= 0.01


def test_sample_delay_uniform_bounds():
    rng = make_rng(2)
    xs = [sample_delay(uniform(1.0, 3.0), rng) for _ in range(1000)]
    assert min(xs) >= 1.0 and max(xs) <= 3.0


def test_timing_spec_validation():
    for bad in (lambda: TimingSpec("exp", (0,)), lambda: TimingSpec("det", (-1,)),
                lambda: TimingSpec("unif", (2, 1)), lambda: TimingSpec("gamma", (1,)),
                lambda: immediate(weight=0)):
        with pytest.raises(TimingError):
            bad()


def test_resolve_conflict_single_candidate_uses_no_draw():
    rng = make_rng(3)
    assert resolve_conflict(["a"], {"a": 1}, rng) == "a"
    assert rng.random() == make_rng(3).random()


def test_resolve_conflict_weights():
    rng = make_rng(4)
    n = 100_000
    wins = sum(resolve_conflict(["a", "b"], {"a": 0.7, "b": 0.3}, rng) == "a" for _ in range(n))
    assert abs(wins / n - 0.7) <= 0.01
    wins = sum(resolve_conflict(["a", "b"], {"a": 1, "b": 1}, rng) == "a" for _ in range(n))
    assert abs(wins / n - 0.5) <= 0.01


def test_resolve_conflict_errors():
    with pytest.raises(SimulationError):
        resolve_conflict([], {}, make_rng(0))
    with pytest.raises(SimulationError):
        resolve_conflict(["a", "b"], {"a": 1, "b": 0}, make_rng(0))


def test_fuzzy_gate():
    rng = make_rng(5)
    assert all(resolve_fuzzy_gate(crisp(1.0), rng) for _ in range(1000))
    assert not any(resolve_fuzzy_gate(crisp(0.0), rng) for _ in range(1000))
    n = 10_000
    rate = sum(resolve_fuzzy_gate(triangular(0.6, 0.8, 1.0), rng) for _ in range(n)) / n
    assert abs(rate - 0.8) <= 0.03
    rate = sum(resolve_fuzzy_gate(triangular(0.6, 0.8, 1.0), rng, "sampled") for _ in range(n)) / n
    assert abs(rate - 0.8) <= 0.03
    with pytest.raises(SimulationError):
        resolve_fuzzy_gate(crisp(1.0), rng, "median")


def test_step_trumping():
    net = puzzles.trumping_net()
    state = initial_state(net, 0)
    event, state = step(net, state)
    assert event.transition == "spell_merlin" and event.time == 1
    assert any(d == {"kind": "lost", "transition": "spell_morgana"} for d in event.draws)
    event, _ = step(net, state)
    assert event is DEADLOCK


def test_step_deadlock_leaves_state():
    net = NetDef(("p",), ("t",), {("t", "p"): 1}, {}, (0,))
    state = initial_state(net, 0)
    event, after = step(net, state)
    assert event is DEADLOCK and after is state


def test_step_does_not_touch_input_state():
    net = puzzles.asymmetric_net()
    state = initial_state(net, 9)
    first = step(net, state)[0]
    again = step(net, state)[0]
    assert first == again


def test_step_sales_orders():
    # three sells at t=0 empty the stock; the first restock completes at t=4
    net = puzzles.sales_orders_net(restock_delay=4)
    state = initial_state(net, 0)
    events = []
    for _ in range(4):
        event, state = step(net, state)
        events.append(event)
    assert [(e.transition, e.time) for e in events[:3]] == [("sell", 0.0)] * 3
    assert events[2].post[0] == 0
    assert (events[3].transition, events[3].time) == ("restock", 4.0)


def test_run_horizon_zero():
    net = NetDef(("p", "q"), ("t",), {("t", "p"): 1}, {("t", "q"): 1}, (1, 0), {"t": deterministic(1)})
    tr = run(net, horizon=0)
    assert tr.events == [] and tr.terminated_reason == "horizon"


def test_run_job_market(job_market):
    tr = run(job_market, horizon=10, seed=1)
    assert tr.markings()[:3] == [(3, 1, 0, 0), (2, 0, 1, 0), (2, 1, 0, 1)]
    assert tr.terminated_reason == "deadlock"


def test_run_step_limit():
    net = NetDef(("p",), ("src",), {}, {("src", "p"): 1}, (0,))
    tr = run(net, max_steps=25)
    assert len(tr.events) == 25 and tr.terminated_reason == "step limit"


def test_run_rejects_bad_arguments(two_stage):
    with pytest.raises(SimulationError):
        run(two_stage, horizon=-1)
    with pytest.raises(SimulationError):
        run(two_stage, policy="mean")


def test_race_follows_rates():
    net = NetDef(("s", "a", "b"), ("ta", "tb"), {("ta", "s"): 1, ("tb", "s"): 1},
                 {("ta", "a"): 1, ("tb", "b"): 1}, (1, 0, 0), {"ta": exponential(3), "tb": exponential(1)})
    n = 20_000
    wins = sum(run(net, seed=s).events[0].transition == "ta" for s in range(n))
    sd = math.sqrt(0.75 * 0.25 / n)
    assert abs(wins / n - 0.75) <= 4 * sd


def test_simultaneous_tie_uses_weights():
    net = NetDef(("s", "a", "b"), ("ta", "tb"), {("ta", "s"): 1, ("tb", "s"): 1},
                 {("ta", "a"): 1, ("tb", "b"): 1}, (1, 0, 0),
                 {"ta": deterministic(1, weight=3), "tb": deterministic(1, weight=1)})
    n = 20_000
    wins = sum(run(net, seed=s).events[0].transition == "ta" for s in range(n))
    assert abs(wins / n - 0.75) <= 0.015


def test_failed_gate_blocks_until_disabled():
    # the gate never passes, so the transition never fires and the run deadlocks
    net = NetDef(("p", "q"), ("t",), {("t", "p"): 1}, {("t", "q"): 1}, (1, 0),
                 {"t": immediate(fuzzy=crisp(0.0))})
    tr = run(net, seed=0)
    assert tr.events == [] and tr.terminated_reason == "deadlock"
    # the failed draw still reaches the trace, on the end record
    (gate,) = tr.final_draws
    assert gate["kind"] == "gate" and gate["pass"] is False
    assert loads_trace(dumps_trace(tr)).final_draws == tr.final_draws


def test_same_seed_same_trace():
    net = puzzles.fizzling_net()
    assert dumps_trace(run(net, seed=42, policy="sampled")) == dumps_trace(run(net, seed=42, policy="sampled"))


def test_trace_round_trip():
    tr = run(puzzles.fizzling_net(), seed=3)
    text = dumps_trace(tr)
    back = loads_trace(text)
    assert dumps_trace(back) == text
    assert back.rng_algorithm == RNG_ALGORITHM == "PCG64"
    assert text.splitlines()[0].startswith('{"record":"header","format":"causanet-trace/1"')


def test_loads_trace_rejects_garbage():
    with pytest.raises(SimulationError):
        loads_trace('{"record":"event"}\n')


@st.composite
def timed_nets(draw):
    n_p, n_t = draw(st.integers(1, 3)), draw(st.integers(1, 3))
    places = tuple(f"p{i}" for i in range(n_p))
    trans = tuple(f"t{i}" for i in range(n_t))
    arc = st.dictionaries(st.tuples(st.sampled_from(trans), st.sampled_from(places)), st.integers(1, 2),
                          max_size=5)
    ins, outs = draw(arc), draw(arc)
    # keep every transition consuming, so runs stay finite
    for t in trans:
        ins.setdefault((t, places[0]), 1)
    timing_kind = st.sampled_from([IMMEDIATE, deterministic(1.0), exponential(1.5), uniform(0.5, 2.0)])
    timing = {t: draw(timing_kind) for t in trans}
    m0 = tuple(draw(st.lists(st.integers(0, 3), min_size=n_p, max_size=n_p)))
    return NetDef(places, trans, ins, outs, m0, timing)


@settings(max_examples=80, deadline=None)
@given(timed_nets(), st.integers(0, 2 ** 32))
def test_events_are_untimed_firings_with_monotone_clock(net, seed):
    tr = run(net, horizon=20, max_steps=200, seed=seed)
    prev_time, marking = 0.0, net.initial_marking
    for e in tr.events:
        assert e.time >= prev_time
        assert e.pre == marking
        assert e.post == fire(net, e.pre, e.transition)
        prev_time, marking = e.time, e.post


@settings(max_examples=80, deadline=None)
@given(timed_nets(), st.integers(0, 2 ** 32))
def test_reservations_never_go_negative(net, seed):
    state = initial_state(net, seed)
    for _ in range(50):
        event, state = step(net, state)
        assert all(x >= 0 for x in state.marking)
        assert all(x >= 0 for x in state.logical_marking)
        if event is DEADLOCK:
            break


def test_state_rejects_pending_in_the_past():
    from causanet.sim import Pending
    with pytest.raises(SimulationError):
        SimState(5.0, (0,), (Pending("t", 4.0, 0, ()),), make_rng(0))
