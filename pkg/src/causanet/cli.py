"""Command-line entry point.

Exit codes: 0 success, 1 expectation failure, 2 parse error (including an
unreadable file), 3 reference error (unknown net, scenario, node, ...).
Machine-readable output goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import puzzles
from .analysis import detect_deadlocks, is_k_bounded, reachability_graph, trace_stats
from .dsl import Document, DslError, export_dot, parse
from .formalisms.boolean import BooleanModelError, dnf_str, parse_truth_table, qm_minimize
from .formalisms.chain import ChainError, chain_probability
from .formalisms.fcm import fcm_run
from .net import NotEnabledError, enabled_transitions, fire, format_marking, validate
from .sim import dumps_trace, make_rng, resolve_conflict, run

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_REF = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _load(path: str) -> Document:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(EXIT_PARSE, f"{path}: cannot read: {e.strerror}") from None
    try:
        return parse(text, path)
    except DslError as e:
        raise CliError(EXIT_PARSE, str(e)) from None


def _item(doc: Document, kind: str, name: str | None):
    try:
        return doc.get(kind, name)
    except KeyError as e:
        raise CliError(EXIT_REF, e.args[0]) from None


def cmd_simulate(args) -> int:
    net = _item(_load(args.file), "net", args.net)
    seeds = range(args.seed, args.seed + args.runs)
    traces = [run(net, args.horizon, args.max_steps, s, args.policy) for s in seeds]
    if args.trace_out:
        out = Path(args.trace_out)
        out.mkdir(parents=True, exist_ok=True)
        for tr in traces:
            (out / f"{net.name}_seed{tr.seed}.trace").write_text(dumps_trace(tr), encoding="utf-8")
    print(f"net {net.name}: {len(traces)} run(s), seeds {args.seed}..{args.seed + args.runs - 1}, policy {args.policy}")
    for t in net.transitions:
        s = trace_stats(traces, t)
        line = f"  {t:<20} frequency {s.frequency:.3f}  firings {s.total_firings}"
        if s.first_times:
            line += f"  first time mean {s.first_times['mean']:.6g}"
        if s.gate_attempts:
            line += f"  gate pass {s.gate_pass_rate:.3f} ({s.gate_passes}/{s.gate_attempts})"
        print(line)
    if traces:
        hist = trace_stats(traces, net.transitions[0]).final_markings if net.transitions else {}
        for m, n in sorted(hist.items(), key=lambda kv: (-kv[1], kv[0])):
            print(f"  final {format_marking(m)} x{n}")
    if args.runs == 1:
        for e in traces[0].events:
            print(f"  t={e.time:g} {e.transition}: {format_marking(e.pre)} -> {format_marking(e.post)}")
        print(f"  stopped: {traces[0].terminated_reason}")
    return EXIT_OK


def cmd_step(args, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    net = _item(_load(args.file), "net", args.net)
    rng = make_rng(args.seed)
    history = [net.initial_marking]

    def show():
        m = history[-1]
        enabled = enabled_transitions(net, m)
        print(f"marking {format_marking(m)}", file=stdout)
        print(f"enabled {' '.join(enabled) if enabled else '(none)'}", file=stdout)

    show()
    for raw in stdin:
        words = raw.split()
        if not words:
            continue
        cmd = words[0]
        if cmd == "quit":
            break
        if cmd == "fire" and len(words) == 2:
            t = words[1]
            if t not in net.transitions:
                print(f"unknown transition {t}", file=stdout)
                continue
            try:
                history.append(fire(net, history[-1], t))
            except NotEnabledError as e:
                print(f"cannot fire {t}: place {e.place} holds {e.have}, needs {e.need}", file=stdout)
                continue
        elif cmd == "auto":
            enabled = enabled_transitions(net, history[-1])
            if not enabled:
                print("deadlock: nothing enabled", file=stdout)
                continue
            t = resolve_conflict(enabled, {x: net.timing_of(x).weight for x in enabled}, rng)
            print(f"fired {t}", file=stdout)
            history.append(fire(net, history[-1], t))
        elif cmd == "undo":
            if len(history) == 1:
                print("nothing to undo", file=stdout)
                continue
            history.pop()
        else:
            print("commands: fire <t>, auto, undo, quit", file=stdout)
            continue
        show()
    return EXIT_OK


def cmd_reach(args) -> int:
    net = _item(_load(args.file), "net", args.net)
    g = reachability_graph(net, args.max_nodes, args.max_tokens)
    print(f"nodes {len(g.nodes)}  edges {len(g.edges)}  truncated {str(g.truncated).lower()}")
    for m in g.nodes:
        print(f"  {format_marking(m)}")
    for s, t, d in g.edges:
        print(f"  {format_marking(s)} --{t}--> {format_marking(d)}")
    dead = detect_deadlocks(g)
    print("deadlocks " + (" ".join(format_marking(m) for m in dead) if dead else "(none)"))
    if not g.truncated:
        bound = max((n for m in g.nodes for n in m), default=0)
        print(f"bounded {bound}" + (f"  {args.k}-bounded {str(is_k_bounded(g, args.k)).lower()}" if args.k is not None else ""))
    return EXIT_OK


def cmd_puzzle(args) -> int:
    if args.all:
        names = list(puzzles.SCENARIOS)
    elif args.name:
        names = [args.name]
    else:
        raise CliError(EXIT_REF, "give a scenario name or --all")
    failed = 0
    for name in names:
        try:
            scenario = puzzles.build(name)
        except puzzles.UnknownScenario as e:
            raise CliError(EXIT_REF, e.args[0]) from None
        for o in scenario.check():
            print(f"{'PASS' if o.passed else 'FAIL'} {name}.{o.expectation}: {o.detail}")
            failed += not o.passed
    return EXIT_FAIL if failed else EXIT_OK


def cmd_minimize(args) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(EXIT_PARSE, f"{args.file}: cannot read: {e.strerror}") from None
    try:
        names, on = parse_truth_table(text)
        print(dnf_str(qm_minimize(on, len(names)), names))
    except BooleanModelError as e:
        raise CliError(EXIT_PARSE, f"{args.file}: {e}") from None
    return EXIT_OK


def cmd_chain(args) -> int:
    g = _item(_load(args.file), "chain", args.chain)
    path = [p for p in args.path.split(",") if p]
    try:
        rng = make_rng(args.seed) if args.mode == "sampled" else None
        p = chain_probability(g, path, args.mode, rng)
    except ChainError as e:
        raise CliError(EXIT_REF, str(e)) from None
    print(format(p, ".12g"))
    return EXIT_OK


def cmd_fcm(args) -> int:
    m = _item(_load(args.file), "fcm", args.fcm)
    result = fcm_run(m, iterations=args.iterations)
    print(" ".join(["step", *m.concepts]))
    for k, state in enumerate(result.trajectory):
        print(" ".join([str(k), *(format(x, ".6g") for x in state)]))
    print(f"fixed point {'yes at step ' + str(result.fixed_at) if result.fixed_point else 'no'}")
    return EXIT_OK


def cmd_export_dot(args) -> int:
    doc = _load(args.file)
    if args.reach:
        item = reachability_graph(_item(doc, "net", args.item), args.max_nodes, args.max_tokens)
    elif args.kind:
        item = _item(doc, args.kind, args.item)
    else:
        candidates = [it for it in doc.items
                      if getattr(it, "name", None) == args.item or args.item is None]
        candidates = [it for it in candidates if type(it).__name__ != "FuzzyLabel"
                      and type(it).__name__ != "TruthTableRef"]
        if not candidates:
            raise CliError(EXIT_REF, f"nothing to export named {args.item!r}")
        item = candidates[0]
    sys.stdout.write(export_dot(item))
    return EXIT_OK


def cmd_validate(args) -> int:
    doc = _load(args.file)
    problems = 0
    for net in doc.nets:
        for v in validate(net):
            print(f"{net.name}: {v.kind}: {v.message}", file=sys.stderr)
            problems += 1
    if problems:
        return EXIT_REF
    print(f"ok: {len(doc.items)} item(s)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="causanet", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("simulate", help="run seeded simulations of a net")
    p.add_argument("file")
    p.add_argument("--net")
    p.add_argument("--horizon", type=float, default=math.inf)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=("centroid", "sampled"), default="centroid")
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--trace-out", metavar="DIR")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("step", help="interactive token game")
    p.add_argument("file")
    p.add_argument("--net")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_step)

    p = sub.add_parser("reach", help="reachability graph, deadlocks, boundedness")
    p.add_argument("file")
    p.add_argument("--net")
    p.add_argument("--max-nodes", type=int, default=10_000)
    p.add_argument("--max-tokens", type=int, default=1_000)
    p.add_argument("-k", type=int)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("puzzle", help="check built-in causal scenarios")
    p.add_argument("name", nargs="?")
    p.add_argument("--all", action="store_true")
    p.set_defaults(func=cmd_puzzle)

    p = sub.add_parser("minimize", help="Quine-McCluskey on a truth-table file")
    p.add_argument("file")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("chain", help="probability along a causal chain")
    p.add_argument("file")
    p.add_argument("--chain")
    p.add_argument("--path", required=True)
    p.add_argument("--mode", choices=("fused", "sampled"), default="fused")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("fcm", help="iterate a fuzzy cognitive map")
    p.add_argument("file")
    p.add_argument("--fcm")
    p.add_argument("--iterations", type=int, default=20)
    p.set_defaults(func=cmd_fcm)

    p = sub.add_parser("export-dot", help="render an item as Graphviz DOT")
    p.add_argument("file")
    p.add_argument("--item")
    p.add_argument("--kind", choices=("net", "chain", "neuron", "fcm"))
    p.add_argument("--reach", action="store_true", help="export the net's reachability graph")
    p.add_argument("--max-nodes", type=int, default=10_000)
    p.add_argument("--max-tokens", type=int, default=1_000)
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("validate", help="parse a file and check net invariants")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(str(e), file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
