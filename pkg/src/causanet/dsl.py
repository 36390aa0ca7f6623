"""The ``.causanet`` description language.

Line oriented; ``#`` starts a comment. Top-level items::

    net NAME ... end
        place NAME [tokens=N]
        trans NAME [in P[:W],...] [out P[:W],...] [delay=imm|det(x)|exp(r)|unif(a,b)]
              [fuzzy=LABEL] [weight=w]
    label NAME tri(a,b,c) | trap(a,b,c,d) | crisp(v)
    chain NAME ... end
        node NAME
        edge X -> Y adverb "text" mean=m std=s
    fcm NAME [conorm=K] [tnorm=K] ... end
        concept NAME init=v
        edge X -> Y w=v [delay=d]
    neuron NAME ... end
        node NAME [shaded]
        stim X -> Y
        inhib X -> Y
    truthtable NAME "path"

Defaults: ``tokens=0``, ``delay=imm``, arc and conflict weights 1. Fuzzy
labels not defined in the document come from the built-in lexicon.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .analysis import ReachabilityGraph, detect_deadlocks
from .formalisms.chain import AdverbDistribution, ChainError, ChainGraph, fuse_adverbs
from .formalisms.fcm import FcmError, FuzzyCognitiveMap
from .formalisms.neuron import INHIB, STIM, NeuronDiagram
from .fuzzy import LEXICON, FuzzyError, FuzzyLabel, TNorm
from .net import NetDef, format_marking
from .timing_spec import TimingError, TimingSpec


@dataclass(frozen=True)
class TruthTableRef:
    name: str
    path: str


Item = Union[NetDef, FuzzyLabel, ChainGraph, FuzzyCognitiveMap, NeuronDiagram, TruthTableRef]

_KINDS = {
    NetDef: "net",
    FuzzyLabel: "label",
    ChainGraph: "chain",
    FuzzyCognitiveMap: "fcm",
    NeuronDiagram: "neuron",
    TruthTableRef: "truthtable",
}


def item_kind(item) -> str:
    return _KINDS[type(item)]


@dataclass
class Document:
    items: list = field(default_factory=list)
    positions: dict = field(default_factory=dict, compare=False, repr=False)

    def of_kind(self, kind: str) -> list:
        return [it for it in self.items if item_kind(it) == kind]

    def get(self, kind: str, name: str | None = None):
        """The item of ``kind`` called ``name``; the first one if no name."""
        items = self.of_kind(kind)
        if name is None:
            if not items:
                raise KeyError(f"document has no {kind}")
            return items[0]
        for it in items:
            if it.name == name:
                return it
        raise KeyError(f"no {kind} named {name!r}")

    @property
    def nets(self) -> list[NetDef]:
        return self.of_kind("net")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    code: str
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.code}: {self.message}"


class DslError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic], source: str = "<text>"):
        self.diagnostics = diagnostics
        self.source = source
        super().__init__("\n".join(f"{source}:{d}" for d in diagnostics))


# -- lexing ---------------------------------------------------------------

_TOKEN = re.compile(r'"(?:[^"\\]|\\.)*"|->|[^\s"]+')
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*$")
_CALL = re.compile(r"([a-z]+)\((.*)\)$")


@dataclass(frozen=True)
class Tok:
    text: str
    col: int


def _tokenize(line: str, lineno: int, diags: list) -> list[Tok]:
    body = line
    # strip comments outside quotes
    in_q = False
    for i, ch in enumerate(line):
        if ch == '"' and (i == 0 or line[i - 1] != "\\"):
            in_q = not in_q
        elif ch == "#" and not in_q:
            body = line[:i]
            break
    if in_q:
        diags.append(Diagnostic(lineno, line.index('"') + 1, "lexical", "unterminated string"))
        return []
    toks = []
    pos = 0
    while pos < len(body):
        if body[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(body, pos)
        if not m:  # pragma: no cover - the pattern accepts any non-space run
            diags.append(Diagnostic(lineno, pos + 1, "lexical", f"unexpected {body[pos]!r}"))
            return []
        toks.append(Tok(m.group(0), m.start() + 1))
        pos = m.end()
    for t in toks:
        if any(not (ch.isprintable()) for ch in t.text):
            diags.append(Diagnostic(lineno, t.col, "lexical", f"unprintable character in {t.text!r}"))
            return []
    return toks


class _Fail(Exception):
    def __init__(self, col: int, code: str, message: str):
        self.col, self.code, self.message = col, code, message


def _ident(tok: Tok, what: str) -> str:
    if not _IDENT.match(tok.text):
        raise _Fail(tok.col, "syntax", f"bad {what} name {tok.text!r}")
    return tok.text


def _number(text: str, col: int, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise _Fail(col, "syntax", f"{what}: {text!r} is not a number") from None


def _integer(text: str, col: int, what: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise _Fail(col, "syntax", f"{what}: {text!r} is not an integer") from None
    return v


def _call(tok: Tok, text: str, what: str) -> tuple[str, list[float]]:
    m = _CALL.match(text)
    if not m:
        if re.fullmatch(r"[a-z]+", text):
            return text, []
        raise _Fail(tok.col, "syntax", f"malformed {what} {text!r}")
    args = [a.strip() for a in m.group(2).split(",")] if m.group(2).strip() else []
    return m.group(1), [_number(a, tok.col, what) for a in args]


def _options(toks: list[Tok], allowed: set[str]) -> dict[str, Tok]:
    opts: dict[str, Tok] = {}
    for t in toks:
        if "=" not in t.text:
            raise _Fail(t.col, "syntax", f"expected key=value, got {t.text!r}")
        key, value = t.text.split("=", 1)
        if key not in allowed:
            raise _Fail(t.col, "unknown-keyword", f"unknown option {key!r}")
        if key in opts:
            raise _Fail(t.col, "duplicate", f"option {key!r} given twice")
        opts[key] = Tok(value, t.col + len(key) + 1)
    return opts


def _arrow(toks: list[Tok], start: int) -> tuple[str, str, int]:
    if len(toks) < start + 3 or toks[start + 1].text != "->":
        col = toks[min(start, len(toks) - 1)].col
        raise _Fail(col, "syntax", "expected X -> Y")
    return _ident(toks[start], "node"), _ident(toks[start + 2], "node"), start + 3


# -- parsing ----------------------------------------------------------------

@dataclass
class _NetBuilder:
    name: str
    line: int
    places: list = field(default_factory=list)
    tokens: list = field(default_factory=list)
    transitions: list = field(default_factory=list)
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    delays: dict = field(default_factory=dict)
    weights: dict = field(default_factory=dict)
    fuzzy: dict = field(default_factory=dict)  # transition -> (label name, line, col)
    refs: list = field(default_factory=list)  # (place, line, col)
    idents: dict = field(default_factory=dict)


@dataclass
class _Block:
    kind: str
    name: str
    line: int
    data: dict = field(default_factory=dict)


def parse(text: str, source: str = "<text>") -> Document:
    """Parse a document; raise :class:`DslError` listing every problem found."""
    diags: list[Diagnostic] = []
    doc = Document()
    block = None
    names: dict[str, dict[str, int]] = {k: {} for k in _KINDS.values()}
    pending_nets: list[tuple[_NetBuilder, int]] = []

    def declare(kind: str, name: str, lineno: int, col: int):
        if name in names[kind]:
            raise _Fail(col, "duplicate", f"{kind} {name!r} already declared on line {names[kind][name]}")
        names[kind][name] = lineno
        doc.positions[(kind, name)] = (lineno, col)

    for lineno, line in enumerate(text.splitlines(), 1):
        toks = _tokenize(line, lineno, diags)
        if not toks:
            continue
        head = toks[0]
        try:
            if block is None:
                if head.text in ("net", "chain", "fcm", "neuron"):
                    if len(toks) < 2:
                        raise _Fail(head.col, "syntax", f"{head.text} needs a name")
                    name = _ident(toks[1], head.text)
                    declare(head.text, name, lineno, toks[1].col)
                    if head.text == "net":
                        block = _Block("net", name, lineno, {"b": _NetBuilder(name, lineno)})
                        doc.items.append(None)
                        block.data["slot"] = len(doc.items) - 1
                        if len(toks) > 2:
                            raise _Fail(toks[2].col, "syntax", "unexpected text after net name")
                    else:
                        block = _Block(head.text, name, lineno, {"nodes": [], "edges": [], "slot": len(doc.items)})
                        doc.items.append(None)
                        if head.text == "fcm":
                            opts = _options(toks[2:], {"conorm", "tnorm"})
                            for key, tok in opts.items():
                                try:
                                    block.data[key] = TNorm(tok.text)
                                except ValueError:
                                    raise _Fail(tok.col, "syntax", f"unknown operator family {tok.text!r}") from None
                        elif len(toks) > 2:
                            raise _Fail(toks[2].col, "syntax", f"unexpected text after {head.text} name")
                elif head.text == "label":
                    if len(toks) != 3:
                        raise _Fail(head.col, "syntax", "expected: label NAME shape(args)")
                    name = _ident(toks[1], "label")
                    shape, args = _call(toks[2], toks[2].text, "label shape")
                    if shape not in ("tri", "trap", "crisp"):
                        raise _Fail(toks[2].col, "unknown-keyword", f"unknown label shape {shape!r}")
                    try:
                        label = FuzzyLabel(name, shape, tuple(args))
                    except FuzzyError as e:
                        raise _Fail(toks[2].col, "syntax", str(e)) from None
                    declare("label", name, lineno, toks[1].col)
                    doc.items.append(label)
                elif head.text == "truthtable":
                    if len(toks) != 3 or not toks[2].text.startswith('"'):
                        raise _Fail(head.col, "syntax", 'expected: truthtable NAME "path"')
                    name = _ident(toks[1], "truthtable")
                    declare("truthtable", name, lineno, toks[1].col)
                    doc.items.append(TruthTableRef(name, _unquote(toks[2].text)))
                elif head.text == "end":
                    raise _Fail(head.col, "syntax", "'end' outside of a block")
                else:
                    raise _Fail(head.col, "unknown-keyword", f"unknown keyword {head.text!r}")
            elif head.text == "end":
                if len(toks) > 1:
                    raise _Fail(toks[1].col, "syntax", "unexpected text after 'end'")
                finished, block = block, None
                _close_block(finished, doc, diags, pending_nets)
            elif block.kind == "net":
                _net_line(block.data["b"], toks, lineno)
            elif block.kind == "chain":
                _chain_line(block, toks, lineno)
            elif block.kind == "fcm":
                _fcm_line(block, toks, lineno)
            else:
                _neuron_line(block, toks, lineno)
        except _Fail as f:
            diags.append(Diagnostic(lineno, f.col, f.code, f.message))

    if block is not None:
        diags.append(Diagnostic(block.line, 1, "syntax", f"{block.kind} {block.name!r} is missing 'end'"))

    labels = {it.name: it for it in doc.items if isinstance(it, FuzzyLabel)}
    for b, slot in pending_nets:
        timing = {}
        for t in b.transitions:
            label = None
            if t in b.fuzzy:
                lname, lline, lcol = b.fuzzy[t]
                label = labels.get(lname, LEXICON.get(lname))
                if label is None:
                    diags.append(Diagnostic(lline, lcol, "dangling-reference", f"unknown label {lname!r}"))
                    continue
            kind, params, dline, dcol = b.delays.get(t, ("imm", (), 0, 0))
            try:
                spec = TimingSpec(kind, params, label, b.weights.get(t, 1.0))
            except TimingError as e:
                diags.append(Diagnostic(dline or b.line, dcol or 1, "syntax", str(e)))
                continue
            if spec != TimingSpec():
                timing[t] = spec
        doc.items[slot] = NetDef(tuple(b.places), tuple(b.transitions), b.inputs, b.outputs,
                                 tuple(b.tokens), timing, b.name)

    if diags:
        diags.sort(key=lambda d: (d.line, d.column))
        raise DslError(diags, source)
    doc.items = [it for it in doc.items if it is not None]
    return doc


def _unquote(s: str) -> str:
    return s[1:-1].replace('\\"', '"').replace("\\\\", "\\")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _net_line(b: _NetBuilder, toks: list[Tok], lineno: int) -> None:
    head = toks[0]
    if head.text == "place":
        if len(toks) < 2:
            raise _Fail(head.col, "syntax", "place needs a name")
        name = _ident(toks[1], "place")
        opts = _options(toks[2:], {"tokens"})
        n = _integer(opts["tokens"].text, opts["tokens"].col, "tokens") if "tokens" in opts else 0
        if n < 0:
            raise _Fail(opts["tokens"].col, "syntax", "token count must be non-negative")
        _claim(b, name, lineno, toks[1].col)
        b.places.append(name)
        b.tokens.append(n)
    elif head.text == "trans":
        if len(toks) < 2:
            raise _Fail(head.col, "syntax", "trans needs a name")
        name = _ident(toks[1], "transition")
        rest = toks[2:]
        arcs = {"in": {}, "out": {}}
        i = 0
        while i < len(rest) and rest[i].text in ("in", "out"):
            which = rest[i].text
            if i + 1 >= len(rest) or "=" in rest[i + 1].text:
                raise _Fail(rest[i].col, "syntax", f"'{which}' needs a place list")
            if arcs[which]:
                raise _Fail(rest[i].col, "duplicate", f"'{which}' given twice")
            arcs[which] = _arc_list(rest[i + 1], lineno, b)
            i += 2
        opts = _options(rest[i:], {"delay", "fuzzy", "weight"})
        _claim(b, name, lineno, toks[1].col)
        b.transitions.append(name)
        for p, w in arcs["in"].items():
            b.inputs[(name, p)] = w
        for p, w in arcs["out"].items():
            b.outputs[(name, p)] = w
        if "delay" in opts:
            tok = opts["delay"]
            kind, args = _call(tok, tok.text, "delay")
            if kind not in ("imm", "det", "exp", "unif"):
                raise _Fail(tok.col, "unknown-keyword", f"unknown delay kind {kind!r}")
            b.delays[name] = (kind, tuple(args), lineno, tok.col)
        if "weight" in opts:
            b.weights[name] = _number(opts["weight"].text, opts["weight"].col, "weight")
        if "fuzzy" in opts:
            tok = opts["fuzzy"]
            b.fuzzy[name] = (_ident(tok, "label"), lineno, tok.col)
    else:
        raise _Fail(head.col, "unknown-keyword", f"unknown net statement {head.text!r}")


def _claim(b: _NetBuilder, name: str, lineno: int, col: int) -> None:
    if name in b.idents:
        raise _Fail(col, "duplicate", f"{name!r} already declared in net {b.name!r} on line {b.idents[name]}")
    b.idents[name] = lineno


def _arc_list(tok: Tok, lineno: int, b: _NetBuilder) -> dict[str, int]:
    out: dict[str, int] = {}
    col = tok.col
    for part in tok.text.split(","):
        if ":" in part:
            p, w = part.split(":", 1)
            weight = _integer(w, col, "arc weight")
        else:
            p, weight = part, 1
        if not _IDENT.match(p):
            raise _Fail(col, "syntax", f"bad place name {p!r}")
        if weight < 1:
            raise _Fail(col, "syntax", f"arc weight {weight} must be at least 1")
        if p in out:
            raise _Fail(col, "duplicate", f"place {p!r} listed twice")
        out[p] = weight
        b.refs.append((p, lineno, col))
        col += len(part) + 1
    return out


def _chain_line(block: _Block, toks: list[Tok], lineno: int) -> None:
    head = toks[0]
    nodes, edges = block.data["nodes"], block.data["edges"]
    if head.text == "node":
        if len(toks) != 2:
            raise _Fail(head.col, "syntax", "expected: node NAME")
        name = _ident(toks[1], "node")
        if name in nodes:
            raise _Fail(toks[1].col, "duplicate", f"node {name!r} declared twice")
        nodes.append(name)
    elif head.text == "edge":
        src, dst, i = _arrow(toks, 1)
        if i >= len(toks) or toks[i].text != "adverb" or i + 1 >= len(toks) or not toks[i + 1].text.startswith('"'):
            raise _Fail(head.col, "syntax", 'expected: edge X -> Y adverb "text" mean=m std=s')
        adverb = _unquote(toks[i + 1].text)
        opts = _options(toks[i + 2:], {"mean", "std"})
        for key in ("mean", "std"):
            if key not in opts:
                raise _Fail(head.col, "syntax", f"edge lacks {key}=")
        try:
            dist = AdverbDistribution(adverb, _number(opts["mean"].text, opts["mean"].col, "mean"),
                                      _number(opts["std"].text, opts["std"].col, "std"))
        except ChainError as e:
            raise _Fail(head.col, "syntax", str(e)) from None
        for n in (src, dst):
            if n not in nodes:
                nodes.append(n)
        for k, (s, t, ds) in enumerate(edges):
            if (s, t) == (src, dst):
                edges[k] = (s, t, ds + (dist,))
                break
        else:
            edges.append((src, dst, (dist,)))
    else:
        raise _Fail(head.col, "unknown-keyword", f"unknown chain statement {head.text!r}")


def _fcm_line(block: _Block, toks: list[Tok], lineno: int) -> None:
    head = toks[0]
    nodes, edges = block.data["nodes"], block.data["edges"]
    if head.text == "concept":
        if len(toks) < 2:
            raise _Fail(head.col, "syntax", "concept needs a name")
        name = _ident(toks[1], "concept")
        opts = _options(toks[2:], {"init"})
        init = _number(opts["init"].text, opts["init"].col, "init") if "init" in opts else 0.0
        if any(n == name for n, _ in nodes):
            raise _Fail(toks[1].col, "duplicate", f"concept {name!r} declared twice")
        nodes.append((name, init))
    elif head.text == "edge":
        src, dst, i = _arrow(toks, 1)
        opts = _options(toks[i:], {"w", "delay"})
        if "w" not in opts:
            raise _Fail(head.col, "syntax", "edge lacks w=")
        w = _number(opts["w"].text, opts["w"].col, "w")
        d = _integer(opts["delay"].text, opts["delay"].col, "delay") if "delay" in opts else 0
        known = {n for n, _ in nodes}
        for n, col in ((src, toks[1].col), (dst, toks[3].col)):
            if n not in known:
                raise _Fail(col, "dangling-reference", f"unknown concept {n!r}")
        edges.append((src, dst, w, d))
    else:
        raise _Fail(head.col, "unknown-keyword", f"unknown fcm statement {head.text!r}")


def _neuron_line(block: _Block, toks: list[Tok], lineno: int) -> None:
    head = toks[0]
    nodes, edges = block.data["nodes"], block.data["edges"]
    shaded = block.data.setdefault("shaded", [])
    if head.text == "node":
        if len(toks) not in (2, 3) or (len(toks) == 3 and toks[2].text != "shaded"):
            raise _Fail(head.col, "syntax", "expected: node NAME [shaded]")
        name = _ident(toks[1], "node")
        if name in nodes:
            raise _Fail(toks[1].col, "duplicate", f"node {name!r} declared twice")
        nodes.append(name)
        if len(toks) == 3:
            shaded.append(name)
    elif head.text in ("stim", "inhib"):
        src, dst, i = _arrow(toks, 1)
        if i != len(toks):
            raise _Fail(toks[i].col, "syntax", "unexpected text after link")
        for n, col in ((src, toks[1].col), (dst, toks[3].col)):
            if n not in nodes:
                raise _Fail(col, "dangling-reference", f"unknown node {n!r}")
        edges.append((src, dst, STIM if head.text == "stim" else INHIB))
    else:
        raise _Fail(head.col, "unknown-keyword", f"unknown neuron statement {head.text!r}")


def _close_block(block: _Block, doc: Document, diags, pending_nets) -> None:
    slot = block.data["slot"]
    if block.kind == "net":
        b = block.data["b"]
        declared = set(b.places)
        for p, line, col in b.refs:
            if p not in declared:
                code = "dangling-reference"
                msg = f"undeclared place {p!r}"
                if p in b.transitions:
                    code, msg = "syntax", f"{p!r} is a transition, not a place"
                diags.append(Diagnostic(line, col, code, msg))
        pending_nets.append((b, slot))
    elif block.kind == "chain":
        try:
            doc.items[slot] = ChainGraph(block.name, tuple(block.data["nodes"]), tuple(block.data["edges"]))
        except ChainError as e:
            diags.append(Diagnostic(block.line, 1, "syntax", str(e)))
    elif block.kind == "fcm":
        nodes = block.data["nodes"]
        try:
            doc.items[slot] = FuzzyCognitiveMap(
                block.name, tuple(n for n, _ in nodes), tuple(v for _, v in nodes),
                tuple(block.data["edges"]),
                block.data.get("conorm", TNorm.GODEL), block.data.get("tnorm", TNorm.GODEL),
            )
        except FcmError as e:
            diags.append(Diagnostic(block.line, 1, "syntax", str(e)))
    else:
        try:
            doc.items[slot] = NeuronDiagram(block.name, tuple(block.data["nodes"]),
                                            frozenset(block.data.get("shaded", ())),
                                            tuple(block.data["edges"]))
        except ValueError as e:
            diags.append(Diagnostic(block.line, 1, "syntax", str(e)))


def parse_file(path) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), str(path))


# -- serialisation ----------------------------------------------------------

def _num(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _arcs(net: NetDef, t: str, arcs) -> str:
    parts = []
    for (tt, p), w in arcs.items():
        if tt == t:
            parts.append(p if w == 1 else f"{p}:{w}")
    return ",".join(parts)


def _serialize_net(net: NetDef) -> list[str]:
    lines = [f"net {net.name}"]
    for p, n in zip(net.places, net.initial_marking):
        lines.append(f"  place {p}" + (f" tokens={n}" if n else ""))
    for t in net.transitions:
        parts = [f"  trans {t}"]
        ins, outs = _arcs(net, t, net.input_arcs), _arcs(net, t, net.output_arcs)
        if ins:
            parts.append(f"in {ins}")
        if outs:
            parts.append(f"out {outs}")
        spec = net.timing_of(t)
        if spec.kind != "imm":
            parts.append(f"delay={spec.kind}({','.join(_num(x) for x in spec.params)})")
        if spec.fuzzy is not None:
            parts.append(f"fuzzy={spec.fuzzy.name}")
        if spec.weight != 1.0:
            parts.append(f"weight={_num(spec.weight)}")
        lines.append(" ".join(parts))
    lines.append("end")
    return lines


def _serialize_label(label: FuzzyLabel) -> str:
    return f"label {label.name} {label.shape}({','.join(_num(x) for x in label.params)})"


def serialize(doc: Document) -> str:
    """Canonical text: declaration order, one statement per line.

    Labels that a net uses but the document does not define (lexicon
    labels) are left implicit, so they resolve the same way on re-parse.
    """
    out: list[str] = []
    for item in doc.items:
        kind = item_kind(item)
        if kind == "net":
            out.extend(_serialize_net(item))
        elif kind == "label":
            out.append(_serialize_label(item))
        elif kind == "chain":
            out.append(f"chain {item.name}")
            out.extend(f"  node {n}" for n in item.nodes)
            for s, t, ds in item.edges:
                for d in ds:
                    out.append(f"  edge {s} -> {t} adverb {_quote(d.adverb)} mean={_num(d.mean)} std={_num(d.stddev)}")
            out.append("end")
        elif kind == "fcm":
            head = f"fcm {item.name}"
            if item.conorm is not TNorm.GODEL:
                head += f" conorm={item.conorm.value}"
            if item.conjunction is not TNorm.GODEL:
                head += f" tnorm={item.conjunction.value}"
            out.append(head)
            for c, v in zip(item.concepts, item.initial):
                out.append(f"  concept {c} init={_num(v)}")
            for s, t, w, d in item.edges:
                out.append(f"  edge {s} -> {t} w={_num(w)}" + (f" delay={d}" if d else ""))
            out.append("end")
        elif kind == "neuron":
            out.append(f"neuron {item.name}")
            for n in item.nodes:
                out.append(f"  node {n}" + (" shaded" if n in item.shaded else ""))
            for s, t, k in item.edges:
                out.append(f"  {'stim' if k == STIM else 'inhib'} {s} -> {t}")
            out.append("end")
        else:
            out.append(f"truthtable {item.name} {_quote(item.path)}")
    return "\n".join(out) + ("\n" if out else "")


# -- DOT export -------------------------------------------------------------

# Neuron link styles: stimulatory links end in an arrow, inhibitory links
# end in an open circle and are dashed.
NEURON_EDGE_STYLE = {
    STIM: 'arrowhead=normal',
    INHIB: 'arrowhead=odot, style=dashed',
}


def _q(s: str) -> str:
    # backslash escapes such as \n are left for DOT to interpret
    return '"' + str(s).replace('"', '\\"') + '"'


def export_dot(item) -> str:
    if isinstance(item, NetDef):
        return _dot_net(item)
    if isinstance(item, ReachabilityGraph):
        return _dot_reach(item)
    if isinstance(item, ChainGraph):
        return _dot_chain(item)
    if isinstance(item, NeuronDiagram):
        return _dot_neuron(item)
    if isinstance(item, FuzzyCognitiveMap):
        return _dot_fcm(item)
    raise TypeError(f"cannot export {type(item).__name__} to DOT")


def _dot_net(net: NetDef) -> str:
    lines = [f"digraph {_q(net.name)} {{", "  rankdir=LR;"]
    for p, n in zip(net.places, net.initial_marking):
        label = p + "\\n" + str(n)
        lines.append(f"  {_q(p)} [shape=circle, label={_q(label)}];")
    for t in net.transitions:
        spec = net.timing_of(t)
        label = t
        if spec.kind != "imm":
            label += f"\\n{spec.kind}({','.join(_num(x) for x in spec.params)})"
        if spec.fuzzy is not None:
            label += f"\\n{spec.fuzzy.name}"
        lines.append(f"  {_q(t)} [shape=box, label={_q(label)}];")
    for t in net.transitions:
        for (tt, p), w in net.input_arcs.items():
            if tt == t:
                lines.append(f"  {_q(p)} -> {_q(t)}" + (f" [label={_q(w)}]" if w > 1 else "") + ";")
        for (tt, p), w in net.output_arcs.items():
            if tt == t:
                lines.append(f"  {_q(t)} -> {_q(p)}" + (f" [label={_q(w)}]" if w > 1 else "") + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_reach(g: ReachabilityGraph) -> str:
    ids = {m: f"m{i}" for i, m in enumerate(g.nodes)}
    dead = set(detect_deadlocks(g))
    lines = [f"digraph {_q(g.net.name + '_reachability')} {{"]
    for m in g.nodes:
        extra = ", peripheries=2" if m in dead else ""
        extra += ", style=dashed" if m in g.unexplored else ""
        lines.append(f"  {ids[m]} [shape=ellipse, label={_q(format_marking(m))}{extra}];")
    for s, t, d in g.edges:
        lines.append(f"  {ids[s]} -> {ids[d]} [label={_q(t)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_chain(g: ChainGraph) -> str:
    lines = [f"digraph {_q(g.name)} {{"]
    for n in g.nodes:
        lines.append(f"  {_q(n)} [shape=ellipse];")
    for s, t, ds in g.edges:
        fused = fuse_adverbs(ds)
        adverbs = ", ".join(d.adverb for d in ds)
        label = f"{adverbs} ({fused.mean:.3g})"
        lines.append(f"  {_q(s)} -> {_q(t)} [label={_q(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_neuron(d: NeuronDiagram) -> str:
    lines = [f"digraph {_q(d.name)} {{"]
    for n in d.nodes:
        fill = ", style=filled, fillcolor=gray" if n in d.shaded else ""
        lines.append(f"  {_q(n)} [shape=circle{fill}];")
    for s, t, k in d.edges:
        lines.append(f"  {_q(s)} -> {_q(t)} [{NEURON_EDGE_STYLE[k]}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_fcm(m: FuzzyCognitiveMap) -> str:
    lines = [f"digraph {_q(m.name)} {{"]
    for c, v in zip(m.concepts, m.initial):
        label = c + "\\n" + _num(v)
        lines.append(f"  {_q(c)} [shape=ellipse, label={_q(label)}];")
    for s, t, w, d in m.edges:
        label = _num(w) + (f" @{d}" if d else "")
        lines.append(f"  {_q(s)} -> {_q(t)} [label={_q(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
