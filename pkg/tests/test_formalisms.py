import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causanet.formalisms.boolean import (BooleanCausalModel, BooleanModelError, bool_evaluate, dnf_str,
                                         evaluate_dnf, format_truth_table, parse_formula, parse_truth_table,
                                         prime_implicants, qm_minimize, surgery_model)
from causanet.formalisms.chain import (AdverbDistribution, ChainError, ChainGraph, chain_probability,
                                       fuse_adverbs, link_strength, sample_link)
from causanet.formalisms.fcm import FcmError, FuzzyCognitiveMap, aggregate, fcm_run, fcm_step, trivalent_influence
from causanet.formalisms.neuron import INHIB, STIM, CycleError, NeuronDiagram, neuron_evaluate
from causanet.fuzzy import TNorm
from causanet.sim import make_rng

# -- neuron diagrams --------------------------------------------------------


def test_stimulation_chain():
    d = NeuronDiagram("n", ("a", "b", "c"), {"a"}, [("a", "b", STIM), ("b", "c", STIM)])
    assert neuron_evaluate(d) == {"a": True, "b": True, "c": True}


def test_inhibition_cancels_stimulation():
    d = NeuronDiagram("n", ("a", "b", "c"), {"a", "b"}, [("a", "c", STIM), ("b", "c", INHIB)])
    assert neuron_evaluate(d)["c"] is False


def test_unshaded_start_passes_nothing():
    d = NeuronDiagram("n", ("a", "b"), set(), [("a", "b", STIM)])
    assert neuron_evaluate(d) == {"a": False, "b": False}


def test_neuron_cycle_rejected():
    d = NeuronDiagram("n", ("a", "b"), {"a"}, [("a", "b", STIM), ("b", "a", STIM)])
    with pytest.raises(CycleError):
        neuron_evaluate(d)


@st.composite
def diagrams(draw):
    n = draw(st.integers(2, 6))
    nodes = tuple(f"n{i}" for i in range(n))
    edges = []
    for j in range(1, n):
        for i in range(j):
            kind = draw(st.sampled_from([None, None, STIM, INHIB]))
            if kind:
                edges.append((nodes[i], nodes[j], kind))
    shaded = draw(st.sets(st.sampled_from(nodes)))
    return NeuronDiagram("d", nodes, shaded, edges)


@settings(max_examples=150, deadline=None)
@given(diagrams(), st.data())
def test_adding_active_inhibitor_never_activates(d, data):
    target = data.draw(st.sampled_from(d.nodes[1:]))
    before = neuron_evaluate(d)
    # a fresh shaded start node inhibiting the target
    extra = NeuronDiagram("d", d.nodes + ("zap",), d.shaded | {"zap"}, d.edges + (("zap", target, INHIB),))
    after = neuron_evaluate(extra)
    assert after[target] is False
    assert not (after[target] and not before[target])


@settings(max_examples=150, deadline=None)
@given(diagrams(), st.data())
def test_removing_inhibitors_frees_stimulated_node(d, data):
    target = data.draw(st.sampled_from(d.nodes[1:]))
    kept = tuple(e for e in d.edges if not (e[1] == target and e[2] == INHIB))
    d2 = NeuronDiagram("d", d.nodes, d.shaded, kept)
    act = neuron_evaluate(d2)
    if any(act[s] for s, t, k in kept if t == target and k == STIM):
        assert act[target]


# -- Boolean models and Quine-McCluskey -------------------------------------


def test_surgery_evaluation():
    m = surgery_model()
    assert bool_evaluate(m, dict(A=0, B=1, C=1, D=1)) == 1
    assert bool_evaluate(m, dict(A=1, B=0, C=0, D=0)) == 0
    assert len(m.on_set()) == 8


def test_positive_dnf_false_on_all_zero():
    m = BooleanCausalModel(("A", "B", "C"), formula=parse_formula("A&B | C"))
    assert bool_evaluate(m, dict(A=0, B=0, C=0)) == 0


def test_formula_parser():
    f = parse_formula("!(A | B) & ~C | 1 & 0")
    for a, b, c in itertools.product((0, 1), repeat=3):
        m = BooleanCausalModel(("A", "B", "C"), formula=f)
        assert bool_evaluate(m, dict(A=a, B=b, C=c)) == int((not (a or b)) and not c)
    for bad in ("A &", "(A", "A B", "A $ B"):
        with pytest.raises(BooleanModelError):
            parse_formula(bad)


def test_model_validation():
    with pytest.raises(BooleanModelError):
        BooleanCausalModel(("A",), formula=parse_formula("B"))
    with pytest.raises(BooleanModelError):
        BooleanCausalModel(("A",))
    with pytest.raises(BooleanModelError):
        bool_evaluate(surgery_model(), dict(A=1))


def test_surgery_minimisation():
    m = surgery_model()
    assert dnf_str(qm_minimize(m.on_set(), 4), m.variables) == "A&B | A&C | A&D | B&C&D"


def test_constants():
    assert qm_minimize(set(range(8)), 3) == [(0, 7)]
    assert dnf_str(qm_minimize(set(range(8)), 3), "ABC") == "1"
    assert dnf_str(qm_minimize(set(), 3), "ABC") == "0"


def test_qm_input_errors():
    with pytest.raises(BooleanModelError):
        qm_minimize({16}, 4)
    with pytest.raises(BooleanModelError):
        qm_minimize({1}, 0)


def brute_primes(on, n):
    # every cube over n variables (value, mask) that lies inside the on-set and is maximal
    cubes = []
    for mask in range(2 ** n):
        for value in range(2 ** n):
            if value & mask:
                continue
            members = {value | sub for sub in range(2 ** n) if sub & ~mask == 0}
            if members <= on:
                cubes.append((value, mask, frozenset(members)))
    return {(v, m) for v, m, mem in cubes
            if not any(mem < other for _, _, other in cubes)}


def oracle_key(imp, n):
    value, mask = imp
    return tuple((i, 0 if value >> (n - 1 - i) & 1 else 1) for i in range(n) if not mask >> (n - 1 - i) & 1)


def brute_minimum(on, n):
    primes = sorted(brute_primes(on, n))
    best = None
    for k in range(len(primes) + 1):
        for combo in itertools.combinations(primes, k):
            if all(any((m & ~mask) == v for v, mask in combo) for m in on):
                keys = sorted(oracle_key(p, n) for p in combo)
                rank = (k, sum(map(len, keys)), tuple(keys))
                if best is None or rank < best[0]:
                    best = (rank, set(combo))
        if best is not None:
            return best[1]
    return set()


@pytest.mark.parametrize("seed", range(40))
def test_qm_is_minimum_against_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = 3 if seed % 2 else 4
    on = {m for m in range(2 ** n) if rng.random() < 0.5}
    assert set(prime_implicants(on, n)) == brute_primes(on, n)
    assert set(qm_minimize(on, n)) == brute_minimum(on, n)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.integers(0, 2 ** n - 1)))))
def test_qm_equivalence_exhaustive(case):
    n, on = case
    result = qm_minimize(on, n)
    assert all(evaluate_dnf(result, m) == (m in on) for m in range(2 ** n))


def test_truth_table_format():
    names, on = parse_truth_table("# surgery\nA B C D\n0111\n1 1 0 0  # spaced\n")
    assert names == ("A", "B", "C", "D") and on == {0b0111, 0b1100}
    assert parse_truth_table(format_truth_table(names, on)) == (names, on)
    for bad in ("", "A B\n011\n", "A A\n01\n", "A B\n0x\n"):
        with pytest.raises(BooleanModelError):
            parse_truth_table(bad)


# -- causal chains ----------------------------------------------------------


def dist(mean, std=0.1, name="a"):
    return AdverbDistribution(name, mean, std)


def line_graph(strengths):
    nodes = tuple(f"v{i}" for i in range(len(strengths) + 1))
    return ChainGraph("g", nodes, [(nodes[i], nodes[i + 1], (dist(p),)) for i, p in enumerate(strengths)]), nodes


def test_chain_examples():
    g, nodes = line_graph([0.4])
    assert chain_probability(g, nodes) == 0.4
    g, nodes = line_graph([0.5, 0.4])
    assert chain_probability(g, nodes) == pytest.approx(0.2, abs=1e-12)
    g, nodes = line_graph([0.9, 0.8, 0.5])
    assert chain_probability(g, nodes) == pytest.approx(0.36, abs=1e-12)


def test_chain_rejects_bad_graphs():
    with pytest.raises(ChainError):
        ChainGraph("g", ("a",), [("a", "a", (dist(0.5),))])
    with pytest.raises(ChainError):
        ChainGraph("g", ("a", "b"), [("a", "b", (dist(0.5),)), ("b", "a", (dist(0.5),))])
    g, nodes = line_graph([0.5, 0.5])
    with pytest.raises(ChainError):
        g.add_edge(nodes[2], nodes[0], dist(0.5))
    with pytest.raises(ChainError):
        chain_probability(g, [nodes[0], nodes[2]])
    with pytest.raises(ChainError):
        chain_probability(g, [nodes[0]])


def gaussian_product_oracle(params):
    # normalise the pointwise product of densities on a wide grid
    xs = np.linspace(-3, 4, 700_001)
    logp = sum(-((xs - m) ** 2) / (2 * s * s) for m, s in params)
    w = np.exp(logp - logp.max())
    w /= w.sum()
    mean = float((xs * w).sum())
    return mean, float(((xs - mean) ** 2 * w).sum())


def test_fuse_examples():
    a = dist(0.8, name="often")
    assert fuse_adverbs([a]) == a
    fused = fuse_adverbs([dist(0.8), dist(0.6)])
    assert fused.mean == pytest.approx(0.7, abs=1e-12)
    assert fused.variance == pytest.approx(0.005, abs=1e-12)
    mean, var = gaussian_product_oracle([(0.8, 0.1), (0.6, 0.1)])
    assert fused.mean == pytest.approx(mean, abs=1e-6) and fused.variance == pytest.approx(var, abs=1e-6)
    for n in (2, 3, 5):
        f = fuse_adverbs([dist(0.3, 0.2)] * n)
        assert f.mean == pytest.approx(0.3, abs=1e-12) and f.variance == pytest.approx(0.04 / n, abs=1e-12)
    with pytest.raises(ChainError):
        fuse_adverbs([])


@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0.01, 0.5)), min_size=1, max_size=5))
def test_fuse_invariants(params):
    ds = [dist(m, s) for m, s in params]
    f = fuse_adverbs(ds)
    assert f.variance <= min(d.variance for d in ds) + 1e-12
    assert min(d.mean for d in ds) - 1e-12 <= f.mean <= max(d.mean for d in ds) + 1e-12


@given(st.lists(st.floats(0, 1), min_size=1, max_size=6))
def test_chain_monotone_in_length(strengths):
    g, nodes = line_graph(strengths)
    probs = [chain_probability(g, nodes[: k + 1]) for k in range(1, len(nodes))]
    assert all(b <= a for a, b in zip(probs, probs[1:]))
    if probs[-1] == 1.0:
        assert all(s == 1.0 for s in strengths)


def test_sample_link():
    rng = make_rng(0)
    assert abs(sample_link(AdverbDistribution("x", 0.5, 1e-9), rng) - 0.5) <= 1e-3
    xs = np.array([sample_link(dist(0.7, 0.05), rng) for _ in range(100_000)])
    assert abs(xs.mean() - 0.7) <= 0.002
    wide = [sample_link(dist(0.95, 0.5), rng) for _ in range(2000)]
    assert all(0.0 <= x <= 1.0 for x in wide)


def test_link_strength_modes():
    g, nodes = line_graph([0.5])
    assert link_strength(g, *nodes) == 0.5
    assert 0.0 <= link_strength(g, *nodes, mode="sampled", rng=make_rng(1)) <= 1.0
    with pytest.raises(ChainError):
        link_strength(g, *nodes, mode="sampled")
    with pytest.raises(ChainError):
        link_strength(g, *nodes, mode="mixture")


# -- fuzzy cognitive maps ---------------------------------------------------

POSITIVE = FuzzyCognitiveMap("pos", ("x", "y"), (0.2, 0.2), [("x", "y", 0.5, 0), ("y", "x", 0.5, 0)])
MIXED = FuzzyCognitiveMap("mix", ("x", "y"), (0.05, 0.05), [("x", "y", 0.5, 0), ("y", "x", -0.5, 0)])


def iterate_oracle(w, a, steps):
    # plain-python reference for the additive-with-clamp update, no delays
    out = [tuple(a)]
    for _ in range(steps):
        a = [min(1.0, max(-1.0, a[i] + sum(w[j][i] * a[j] for j in range(len(a))))) for i in range(len(a))]
        out.append(tuple(a))
    return out


def test_positive_loop_increases_to_clamp():
    run = fcm_run(POSITIVE, iterations=10)
    assert list(run.trajectory) == pytest.approx(iterate_oracle([[0, 0.5], [0.5, 0]], (0.2, 0.2), 10))
    for prev, nxt in zip(run.trajectory, run.trajectory[1:]):
        assert all(b > a or a == b == 1.0 for a, b in zip(prev, nxt))
    assert run.fixed_point and run.trajectory[-1] == (1.0, 1.0)


def test_mixed_loop_bounded_and_centred():
    run = fcm_run(MIXED, iterations=200)
    assert list(run.trajectory) == pytest.approx(iterate_oracle([[0, 0.5], [-0.5, 0]], (0.05, 0.05), 200))
    assert all(-1 <= x <= 1 for s in run.trajectory for x in s)
    # the loop oscillates about the origin whatever the start
    for start in (0.05, 0.3, -0.6):
        traj = fcm_run(MIXED, initial=(start, start), iterations=200).trajectory
        for i in range(2):
            assert abs(np.mean([s[i] for s in traj[100:201]])) < 0.1


def test_fcm_run_edge_cases():
    assert fcm_run(POSITIVE, iterations=0).trajectory == ((0.2, 0.2),)
    iso = FuzzyCognitiveMap("iso", ("a", "b"), (0.3, -0.4))
    r = fcm_run(iso, iterations=5)
    assert r.fixed_point and r.fixed_at == 0 and set(r.trajectory) == {(0.3, -0.4)}
    with pytest.raises(FcmError):
        fcm_run(iso, iterations=-1)


def test_fcm_delay_uses_history():
    m = FuzzyCognitiveMap("d", ("a", "b"), (0.0, 0.0), [("a", "b", 1.0, 2)])
    with pytest.raises(FcmError):
        fcm_step(m, [(0.0, 0.0)])
    # b sees a's value from two steps back
    assert fcm_step(m, [(0.5, 0.0), (0.1, 0.0), (0.2, 0.0)]) == (0.2, 0.5)


def test_fcm_validation():
    with pytest.raises(FcmError):
        FuzzyCognitiveMap("b", ("a",), (1.5,))
    with pytest.raises(FcmError):
        FuzzyCognitiveMap("b", ("a",), (0.1,), [("a", "z", 0.5, 0)])
    with pytest.raises(FcmError):
        FuzzyCognitiveMap("b", ("a",), (0.1,), [("a", "a", 2.0, 0)])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from([-1.0, 0.0, 1.0]), min_size=3, max_size=3),
       st.lists(st.sampled_from([-1.0, -0.5, 0.0, 0.5, 1.0]), min_size=3, max_size=3))
def test_trivalent_sign_matches_incoming_sum(weights, acts):
    concepts = ("s0", "s1", "s2", "t")
    m = FuzzyCognitiveMap("tri", concepts, (*acts, 0.0),
                          [(f"s{i}", "t", w, 0) for i, w in enumerate(weights)])
    incoming = sum(w * a for w, a in zip(weights, acts))
    vote = trivalent_influence(m, (*acts, 0.0), "t")
    if all(abs(a) in (0.0, 1.0) for a in acts):
        assert vote == int(np.sign(incoming))
    # one step from zero: the new activation carries the incoming sign
    nxt = fcm_step(m, [(*acts, 0.0)])[3]
    assert np.sign(nxt) == np.sign(incoming)


def test_aggregate():
    assert aggregate([0.3, 0.6], TNorm.GODEL) == 0.6
    assert aggregate([0.5, 0.5], TNorm.PRODUCT) == pytest.approx(0.75)
    assert aggregate([0.7, 0.6], TNorm.LUKASIEWICZ, conjunctive=True) == pytest.approx(0.3)
    assert math.isclose(aggregate([], TNorm.PRODUCT), 0.0)
