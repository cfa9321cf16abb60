"""Concrete syntax: program text, network JSON and timeline CSV/JSON.

Program grammar (whitespace-insensitive, ``//`` line comments)::

    program    := (directive | fact | rule | ic)*
    directive  := "#tmax" NAT ";" | "#fluent" ident+ ";" | "#nonfluent" ident+ ";"
    fact       := "fact" atom "@" comp "in" "[" NAT "," NAT "]" ";"
    atom       := ident ":" bound
    bound      := ("["|"(") DEC "," DEC ("]"|")") | "empty" | "true"
    comp       := "node" ID | "edge" ID "->" ID
    rule       := "rule" ident "<-" NAT ":" formula ","
                  "(" formula "," formula "," formula ")" ":" infl ";"
    ic         := "constraint" atom "<~" conj ";"
    formula    := atom | "true" | "!" formula | formula "&" formula
                | formula "|" formula | "(" formula ")"
    conj       := atom ("&" atom)* | "true"
    infl       := ident ("(" param ("," param)* ")")?
    param      := DEC | bound

``!`` binds tighter than ``&``, which binds tighter than ``|``; both binary
operators associate to the left.  DEC literals may also be written ``n/d``.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .bounds import EMPTY, FULL, Bound, format_number, to_fraction
from .diagnostics import Diagnostic, DiagnosticError, SourceSpan
from .influence import BUILTIN_NAMES, InfluenceSpec, builtin_influence, is_default
from .model import (
    TRUE,
    And,
    Atom,
    Component,
    Fact,
    Formula,
    IntegrityConstraint,
    LabelRegistry,
    NeighborCriterion,
    Network,
    Not,
    Or,
    Program,
    Rule,
    Top,
    component_sort_key,
    format_component,
    parse_component,
    validate,
)
from .semantics import Interpretation

# --------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<directive>\#[A-Za-z_]+)
  | (?P<number>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><-|<~|->|[\[\]\(\),;:@&|!])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # directive, number, ident, op, eof
    text: str
    span: SourceSpan


def tokenize(text: str, filename: Optional[str] = None) -> Tuple[List[Token], List[Diagnostic]]:
    tokens: List[Token] = []
    diags: List[Diagnostic] = []
    line, line_start, pos = 1, 0, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = SourceSpan(filename, line, pos - line_start + 1)
            diags.append(Diagnostic("lex", f"unexpected character {text[pos]!r}", span))
            pos += 1
            continue
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, SourceSpan(filename, line, pos - line_start + 1, len(value))))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(filename, line, pos - line_start + 1, 0)))
    return tokens, diags


# --------------------------------------------------------------------------
# Parser


class _SyntaxError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.diagnostic = Diagnostic("syntax", message, span)


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def error(self, message: str) -> _SyntaxError:
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        return _SyntaxError(f"{message}, found {found}", t.span)

    def ident(self, what: str = "identifier") -> str:
        if self.tok.kind != "ident":
            raise self.error(f"expected {what}")
        return self.advance().text

    def nat(self, what: str = "natural number") -> int:
        t = self.tok
        if t.kind != "number" or not t.text.isdigit():
            raise self.error(f"expected {what}")
        self.advance()
        return int(t.text)

    def number(self) -> Fraction:
        t = self.tok
        if t.kind != "number":
            raise self.error("expected a number")
        self.advance()
        try:
            return to_fraction(t.text)
        except (ValueError, ZeroDivisionError) as exc:
            raise _SyntaxError(f"bad number {t.text!r}: {exc}", t.span) from None

    def node_id(self) -> str:
        t = self.tok
        if t.kind == "ident" or (t.kind == "number" and t.text.isdigit()):
            self.advance()
            return t.text
        raise self.error("expected a node id")

    # -- values --------------------------------------------------------

    def at_bound(self) -> bool:
        return self.at("[") or self.at("(") or self.at("empty") or self.at("true")

    def bound(self) -> Bound:
        start = self.tok
        if self.at("empty"):
            self.advance()
            return EMPTY
        if self.at("true"):
            self.advance()
            return FULL
        if not (self.at("[") or self.at("(")):
            raise self.error("expected a bound")
        lower_open = self.advance().text == "("
        lo = self.number()
        self.expect(",")
        hi = self.number()
        if not (self.at("]") or self.at(")")):
            raise self.error("expected ']' or ')'")
        upper_open = self.advance().text == ")"
        try:
            return Bound(lo, hi, lower_open, upper_open)
        except ValueError as exc:
            raise _SyntaxError(str(exc), start.span) from None

    def atom(self) -> Atom:
        label = self.ident("label")
        self.expect(":")
        return Atom(label, self.bound())

    def component(self) -> Component:
        if self.at("node"):
            self.advance()
            return self.node_id()
        if self.at("edge"):
            self.advance()
            u = self.node_id()
            self.expect("->")
            return (u, self.node_id())
        raise self.error("expected 'node' or 'edge'")

    # -- formulas ------------------------------------------------------

    def formula(self) -> Formula:
        left = self.conjunct()
        while self.at("|"):
            self.advance()
            left = Or(left, self.conjunct())
        return left

    def conjunct(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.at("!"):
            self.advance()
            return Not(self.unary())
        if self.at("("):
            self.advance()
            inner = self.formula()
            self.expect(")")
            return inner
        if self.at("true") and not (self.peek().kind == "op" and self.peek().text == ":"):
            self.advance()
            return TRUE
        return self.atom()

    def conj(self) -> Tuple[Atom, ...]:
        if self.at("true") and not (self.peek().kind == "op" and self.peek().text == ":"):
            self.advance()
            return ()
        atoms = [self.atom()]
        while self.at("&"):
            self.advance()
            atoms.append(self.atom())
        return tuple(atoms)

    def influence(self) -> InfluenceSpec:
        name_tok = self.tok
        name = self.ident("influence function name")
        params: List[Any] = []
        if self.at("("):
            self.advance()
            while True:
                if self.tok.kind == "number":
                    params.append(self.number())
                elif self.at_bound():
                    params.append(self.bound())
                else:
                    raise self.error("expected a number or bound parameter")
                if self.at(","):
                    self.advance()
                    continue
                self.expect(")")
                break
        try:
            return builtin_influence(name, params)
        except (ValueError, TypeError) as exc:
            raise _SyntaxError(str(exc), name_tok.span) from None


@dataclass
class _Draft:
    t_max: Optional[int] = None
    fluent: Tuple[str, ...] = ()
    nonfluent: Tuple[str, ...] = ()


def _parse_statements(tokens: List[Token]) -> Tuple[_Draft, list, list, list, List[Diagnostic]]:
    p = _Parser(tokens)
    draft = _Draft()
    facts: List[Fact] = []
    rules: List[Rule] = []
    ics: List[IntegrityConstraint] = []
    diags: List[Diagnostic] = []
    while p.tok.kind != "eof":
        start = p.tok
        try:
            if start.kind == "directive":
                p.advance()
                if start.text == "#tmax":
                    value = p.nat("horizon")
                    if draft.t_max is not None and draft.t_max != value:
                        diags.append(Diagnostic("tmax-conflict", "repeated #tmax with a different value", start.span))
                    draft.t_max = value
                elif start.text in ("#fluent", "#nonfluent"):
                    names = [p.ident("label")]
                    while p.tok.kind == "ident":
                        names.append(p.advance().text)
                    if start.text == "#fluent":
                        draft.fluent += tuple(names)
                    else:
                        draft.nonfluent += tuple(names)
                else:
                    raise _SyntaxError(f"unknown directive {start.text!r}", start.span)
                p.expect(";")
            elif p.at("fact"):
                p.advance()
                atom = p.atom()
                p.expect("@")
                comp = p.component()
                p.expect("in")
                p.expect("[")
                t1 = p.nat("window start")
                p.expect(",")
                t2 = p.nat("window end")
                p.expect("]")
                p.expect(";")
                facts.append(Fact(atom, comp, t1, t2, span=start.span))
            elif p.at("rule"):
                p.advance()
                head = p.ident("head label")
                p.expect("<-")
                delta = p.nat("delta t")
                p.expect(":")
                target = p.formula()
                p.expect(",")
                p.expect("(")
                g_edge = p.formula()
                p.expect(",")
                g_node = p.formula()
                p.expect(",")
                trigger = p.formula()
                p.expect(")")
                p.expect(":")
                infl = p.influence()
                p.expect(";")
                rules.append(Rule(head, delta, target, NeighborCriterion(g_edge, g_node, trigger, infl), span=start.span))
            elif p.at("constraint"):
                p.advance()
                head_atom = p.atom()
                p.expect("<~")
                body = p.conj()
                p.expect(";")
                ics.append(IntegrityConstraint(head_atom, body, span=start.span))
            else:
                raise p.error("expected 'fact', 'rule', 'constraint' or a directive")
        except _SyntaxError as exc:
            diags.append(exc.diagnostic)
            # recover at the next statement boundary
            while p.tok.kind != "eof" and not p.at(";"):
                p.advance()
            p.advance()
    return draft, facts, rules, ics, diags


def parse_program(
    text: str,
    network: Network,
    registry: Optional[LabelRegistry] = None,
    t_max: Optional[int] = None,
    *,
    filename: Optional[str] = None,
    check: bool = True,
) -> Program:
    """Parse program text against a loaded network.

    Label declarations and the horizon may come from the network file
    (``registry`` / ``t_max``), from directives, or both; they are merged.
    Raises :class:`DiagnosticError` listing every problem found.
    """
    tokens, diags = tokenize(text, filename)
    draft, facts, rules, ics, syntax = _parse_statements(tokens)
    diags += syntax
    origin = SourceSpan(filename, 1, 1, 0)

    horizon = t_max
    if draft.t_max is not None:
        if horizon is not None and horizon != draft.t_max:
            diags.append(
                Diagnostic("tmax-conflict", f"#tmax {draft.t_max} disagrees with network t_max {horizon}", origin)
            )
        horizon = draft.t_max
    if horizon is None:
        diags.append(Diagnostic("missing-tmax", "no t_max given in the network file or by #tmax", origin))
        horizon = 0

    fluent = set(draft.fluent) | set(registry.fluent if registry else ())
    nonfluent = set(draft.nonfluent) | set(registry.nonfluent if registry else ())
    both = fluent & nonfluent
    if both:
        diags.append(Diagnostic("label-conflict", f"labels declared fluent and non-fluent: {sorted(both)}", origin))
        fluent -= both
    program = Program(LabelRegistry(frozenset(fluent), frozenset(nonfluent)), network, horizon, facts, rules, ics)
    if check and not diags:
        diags += validate(program)
    if diags:
        raise DiagnosticError(diags)
    return program


def parse_fact(text: str, *, filename: Optional[str] = None) -> Fact:
    """Parse a single fact such as ``watchesA:[0.8,1] @ node 1 in [0,0]``.

    The leading ``fact`` keyword and trailing ``;`` are optional.
    """
    tokens, diags = tokenize(text, filename)
    if diags:
        raise DiagnosticError(diags)
    p = _Parser(tokens)
    try:
        start = p.tok
        if p.at("fact"):
            p.advance()
        atom = p.atom()
        p.expect("@")
        comp = p.component()
        p.expect("in")
        p.expect("[")
        t1 = p.nat("window start")
        p.expect(",")
        t2 = p.nat("window end")
        p.expect("]")
        if p.at(";"):
            p.advance()
        if p.tok.kind != "eof":
            raise p.error("unexpected trailing input")
    except _SyntaxError as exc:
        raise DiagnosticError([exc.diagnostic]) from None
    return Fact(atom, comp, t1, t2, span=start.span)


# --------------------------------------------------------------------------
# Printer


def format_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"{f.label}:{f.bound}"
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Not):
        inner = format_formula(f.operand)
        return f"!({inner})" if isinstance(f.operand, (And, Or)) else f"!{inner}"
    if isinstance(f, And):
        left = format_formula(f.left)
        right = format_formula(f.right)
        if isinstance(f.left, Or):
            left = f"({left})"
        if isinstance(f.right, (And, Or)):
            right = f"({right})"
        return f"{left} & {right}"
    if isinstance(f, Or):
        left = format_formula(f.left)
        right = format_formula(f.right)
        if isinstance(f.right, Or):
            right = f"({right})"
        return f"{left} | {right}"
    raise TypeError(f"not a formula: {f!r}")


def format_influence(spec: InfluenceSpec) -> str:
    if is_default(spec):
        return spec.name
    parts = [str(p) if isinstance(p, Bound) else format_number(p) for p in spec.params]
    return f"{spec.name}({', '.join(parts)})"


def _format_comp(c: Component) -> str:
    return f"edge {c[0]}->{c[1]}" if isinstance(c, tuple) else f"node {c}"


def format_fact(fact: Fact) -> str:
    return f"fact {fact.atom} @ {_format_comp(fact.component)} in [{fact.start}, {fact.end}];"


def format_program(program: Program) -> str:
    """Canonical program text; parsing it back yields an equal program."""
    lines = [f"#tmax {program.t_max};"]
    reg = program.registry
    if reg.fluent:
        lines.append("#fluent " + " ".join(sorted(reg.fluent)) + ";")
    if reg.nonfluent:
        lines.append("#nonfluent " + " ".join(sorted(reg.nonfluent)) + ";")
    lines.extend(format_fact(f) for f in program.facts)
    for r in program.rules:
        nc = r.neighbor
        lines.append(
            f"rule {r.head} <- {r.delta_t} : {format_formula(r.target)}, "
            f"({format_formula(nc.edge_formula)}, {format_formula(nc.node_formula)}, "
            f"{format_formula(nc.trigger)}) : {format_influence(nc.influence)};"
        )
    for ic in program.constraints:
        body = " & ".join(str(a) for a in ic.body) if ic.body else "true"
        lines.append(f"constraint {ic.head} <~ {body};")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Network JSON


def load_network(text: str) -> Tuple[Network, LabelRegistry, Optional[int]]:
    """Parse ``{"t_max", "fluent", "nonfluent", "nodes", "edges"}``.

    Raises :class:`DiagnosticError` whose diagnostics carry JSON paths.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagnosticError([Diagnostic("json", exc.msg, path=f"line {exc.lineno} column {exc.colno}")]) from None
    diags: List[Diagnostic] = []
    if not isinstance(doc, dict):
        raise DiagnosticError([Diagnostic("schema", "top level must be an object", path="$")])

    for key in sorted(set(doc) - {"t_max", "fluent", "nonfluent", "nodes", "edges"}):
        diags.append(Diagnostic("schema", f"unknown key {key!r}", path=f"$.{key}"))

    t_max = doc.get("t_max")
    if t_max is not None and (not isinstance(t_max, int) or isinstance(t_max, bool) or t_max < 0):
        diags.append(Diagnostic("schema", "t_max must be a natural number", path="$.t_max"))
        t_max = None

    def names(key: str) -> List[str]:
        value = doc.get(key, [])
        if not isinstance(value, list):
            diags.append(Diagnostic("schema", f"{key} must be a list", path=f"$.{key}"))
            return []
        out = []
        for k, item in enumerate(value):
            if isinstance(item, str) and item:
                out.append(item)
            elif isinstance(item, int) and not isinstance(item, bool) and key == "nodes":
                out.append(str(item))
            else:
                diags.append(Diagnostic("schema", f"bad entry {item!r}", path=f"$.{key}[{k}]"))
        return out

    fluent = names("fluent")
    nonfluent = names("nonfluent")
    for k, label in enumerate(nonfluent):
        if label in fluent:
            diags.append(Diagnostic("label-conflict", f"{label!r} is also fluent", path=f"$.nonfluent[{k}]"))

    nodes: List[str] = []
    seen = set()
    raw_nodes = names("nodes")
    for k, v in enumerate(raw_nodes):
        if v in seen:
            diags.append(Diagnostic("duplicate-node", f"node {v!r} listed twice", path=f"$.nodes[{k}]"))
        else:
            seen.add(v)
            nodes.append(v)

    edges: List[Tuple[str, str]] = []
    seen_edges = set()
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_edges, list):
        diags.append(Diagnostic("schema", "edges must be a list", path="$.edges"))
        raw_edges = []
    for k, item in enumerate(raw_edges):
        path = f"$.edges[{k}]"
        if not (isinstance(item, list) and len(item) == 2 and all(isinstance(x, (str, int)) and not isinstance(x, bool) for x in item)):
            diags.append(Diagnostic("schema", "an edge is a pair [u, v]", path=path))
            continue
        u, v = str(item[0]), str(item[1])
        if u not in seen or v not in seen:
            missing = u if u not in seen else v
            diags.append(Diagnostic("dangling-endpoint", f"edge endpoint {missing!r} is not a node", path=path))
            continue
        if (u, v) in seen_edges:
            diags.append(Diagnostic("duplicate-edge", f"edge {u}->{v} listed twice", path=path))
            continue
        seen_edges.add((u, v))
        edges.append((u, v))

    if diags:
        raise DiagnosticError(diags)
    registry = LabelRegistry(frozenset(fluent), frozenset(nonfluent) - frozenset(fluent))
    return Network(tuple(nodes), tuple(edges)), registry, t_max


def dump_network(network: Network, registry: LabelRegistry, t_max: Optional[int]) -> str:
    doc: Dict[str, Any] = {}
    if t_max is not None:
        doc["t_max"] = t_max
    doc["fluent"] = sorted(registry.fluent)
    doc["nonfluent"] = sorted(registry.nonfluent)
    doc["nodes"] = list(network.nodes)
    doc["edges"] = [list(e) for e in network.edges]
    return json.dumps(doc, indent=1) + "\n"


def load_program_files(network_path: str, program_path: str) -> Program:
    with open(network_path, encoding="utf-8") as fh:
        network, registry, t_max = load_network(fh.read())
    with open(program_path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_program(text, network, registry, t_max, filename=program_path)


# --------------------------------------------------------------------------
# Timelines

TIMELINE_HEADER = ("t", "component", "label", "bound")


def timeline_rows(
    i: Interpretation,
    sparse: bool = True,
    network: Optional[Network] = None,
    labels: Optional[Sequence[str]] = None,
) -> List[Tuple[int, str, str, str]]:
    """Rows sorted by (t, component, label).  Dense output needs the network and labels."""
    if sparse:
        return [(t, format_component(c), label, str(b)) for t, c, label, b in i.cells()]
    if network is None or labels is None:
        raise ValueError("dense timelines need the network and the label list")
    comps = sorted(network.components, key=component_sort_key)
    labels = sorted(labels)
    return [
        (t, format_component(c), label, str(i.get(t, c, label)))
        for t in range(i.t_max + 1)
        for c in comps
        for label in labels
    ]


def export_timeline(
    i: Interpretation,
    fmt: str = "csv",
    sparse: bool = True,
    network: Optional[Network] = None,
    labels: Optional[Sequence[str]] = None,
) -> str:
    rows = timeline_rows(i, sparse, network, labels)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TIMELINE_HEADER)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "json":
        doc = {"t_max": i.t_max, "rows": [dict(zip(TIMELINE_HEADER, r)) for r in rows]}
        return json.dumps(doc, indent=1) + "\n"
    raise ValueError(f"unknown timeline format {fmt!r}")


def import_timeline(text: str, fmt: str = "csv", t_max: Optional[int] = None) -> Interpretation:
    """Inverse of :func:`export_timeline`.

    CSV carries no horizon; without ``t_max`` the largest time seen is used.
    """
    if fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if tuple(header or ()) != TIMELINE_HEADER:
            raise ValueError(f"expected header {','.join(TIMELINE_HEADER)}")
        raw = [r for r in reader if r]
    elif fmt == "json":
        doc = json.loads(text)
        if t_max is None:
            t_max = doc["t_max"]
        raw = [[r[k] for k in TIMELINE_HEADER] for r in doc["rows"]]
    else:
        raise ValueError(f"unknown timeline format {fmt!r}")
    cells = []
    for row in raw:
        if len(row) != 4:
            raise ValueError(f"timeline row needs 4 fields: {row!r}")
        t, comp, label, bound = row
        cells.append((int(t), parse_component(comp), label, Bound.parse(bound)))
    if t_max is None:
        t_max = max((c[0] for c in cells), default=0)
    return Interpretation.from_cells(t_max, cells)


__all__ = [
    "BUILTIN_NAMES",
    "Token",
    "dump_network",
    "export_timeline",
    "format_fact",
    "format_formula",
    "format_influence",
    "format_program",
    "import_timeline",
    "load_network",
    "load_program_files",
    "parse_fact",
    "parse_program",
    "timeline_rows",
    "tokenize",
]
