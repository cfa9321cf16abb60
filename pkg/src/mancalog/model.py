"""Static program model: labels, network, formulas, facts, constraints, rules."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from .bounds import EMPTY, FULL, Bound, is_subset
from .diagnostics import Diagnostic, SourceSpan
from .influence import InfluenceSpec, antitone_violations

Node = str
Edge = Tuple[str, str]
Component = Union[Node, Edge]


def is_edge(c: Component) -> bool:
    return isinstance(c, tuple)


def _id_key(ident: str):
    return (0, int(ident), "") if ident.isdigit() else (1, 0, ident)


def component_sort_key(c: Component):
    """Nodes before edges; numeric ids in numeric order."""
    if isinstance(c, tuple):
        return (1, _id_key(c[0]), _id_key(c[1]))
    return (0, _id_key(c), ())


def format_component(c: Component) -> str:
    if isinstance(c, tuple):
        return f"edge:{c[0]}->{c[1]}"
    return f"node:{c}"


def parse_component(text: str) -> Component:
    kind, _, rest = text.partition(":")
    if kind == "node" and rest:
        return rest
    if kind == "edge" and "->" in rest:
        u, _, v = rest.partition("->")
        if u and v:
            return (u, v)
    raise ValueError(f"malformed component {text!r}")


# --------------------------------------------------------------------------
# Labels and network


@dataclass(frozen=True)
class LabelRegistry:
    fluent: FrozenSet[str] = frozenset()
    nonfluent: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "fluent", frozenset(self.fluent))
        object.__setattr__(self, "nonfluent", frozenset(self.nonfluent))
        both = self.fluent & self.nonfluent
        if both:
            raise ValueError(f"labels both fluent and non-fluent: {sorted(both)}")

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(sorted(self.fluent | self.nonfluent))

    def is_fluent(self, label: str) -> bool:
        return label in self.fluent

    def __contains__(self, label: object) -> bool:
        return label in self.fluent or label in self.nonfluent


@dataclass(frozen=True)
class Network:
    """A directed graph G = (V, E); at most one edge per ordered pair."""

    nodes: Tuple[Node, ...]
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        nodes = tuple(str(v) for v in self.nodes)
        edges = tuple((str(u), str(v)) for u, v in self.edges)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        if len(set(nodes)) != len(nodes):
            raise ValueError("duplicate node")
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edge")
        known = set(nodes)
        for u, v in edges:
            if u not in known or v not in known:
                raise ValueError(f"edge ({u},{v}) has an endpoint outside the node set")

    @cached_property
    def node_set(self) -> FrozenSet[Node]:
        return frozenset(self.nodes)

    @cached_property
    def edge_set(self) -> FrozenSet[Edge]:
        return frozenset(self.edges)

    @property
    def components(self) -> Tuple[Component, ...]:
        return self.nodes + self.edges

    def __contains__(self, c: object) -> bool:
        if isinstance(c, tuple):
            return c in self.edge_set
        return c in self.node_set

    @cached_property
    def in_neighbors(self) -> Dict[Node, Tuple[Node, ...]]:
        acc: Dict[Node, List[Node]] = {v: [] for v in self.nodes}
        for u, v in self.edges:
            acc[v].append(u)
        return {v: tuple(us) for v, us in acc.items()}

    @cached_property
    def out_neighbors(self) -> Dict[Node, Tuple[Node, ...]]:
        acc: Dict[Node, List[Node]] = {v: [] for v in self.nodes}
        for u, v in self.edges:
            acc[u].append(v)
        return {v: tuple(ws) for v, ws in acc.items()}

    @cached_property
    def max_in_degree(self) -> int:
        return max((len(us) for us in self.in_neighbors.values()), default=0)


# --------------------------------------------------------------------------
# Formulas


class Formula:
    """Boolean combination of network atoms, evaluated against a world.

    A world is any mapping ``label -> Bound``; missing labels mean ``FULL``.
    """

    __slots__ = ()

    def holds(self, world: Mapping[str, Bound]) -> bool:
        raise NotImplementedError

    def labels(self) -> FrozenSet[str]:
        raise NotImplementedError

    def atoms(self) -> Iterator["Atom"]:
        raise NotImplementedError

    @property
    def has_negation(self) -> bool:
        return False

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)


@dataclass(frozen=True)
class Atom(Formula):
    label: str
    bound: Bound

    def holds(self, world):
        b = self.bound
        if b is FULL:
            return True
        if b is EMPTY:
            return False
        return is_subset(world.get(self.label, FULL), b)

    def labels(self):
        return frozenset((self.label,))

    def atoms(self):
        yield self

    def __str__(self):
        return f"{self.label}:{self.bound}"


@dataclass(frozen=True)
class Top(Formula):
    """The tautology, written ``true``."""

    def holds(self, world):
        return True

    def labels(self):
        return frozenset()

    def atoms(self):
        return iter(())

    def __str__(self):
        return "true"


TRUE = Top()


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula

    def holds(self, world):
        return not self.operand.holds(world)

    def labels(self):
        return self.operand.labels()

    def atoms(self):
        return self.operand.atoms()

    @property
    def has_negation(self):
        return True


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def holds(self, world):
        return self.left.holds(world) and self.right.holds(world)

    def labels(self):
        return self.left.labels() | self.right.labels()

    def atoms(self):
        yield from self.left.atoms()
        yield from self.right.atoms()

    @property
    def has_negation(self):
        return self.left.has_negation or self.right.has_negation


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def holds(self, world):
        return self.left.holds(world) or self.right.holds(world)

    def labels(self):
        return self.left.labels() | self.right.labels()

    def atoms(self):
        yield from self.left.atoms()
        yield from self.right.atoms()

    @property
    def has_negation(self):
        return self.left.has_negation or self.right.has_negation


def conjunction(atoms: Iterable[Atom]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``TRUE``."""
    result: Optional[Formula] = None
    for a in atoms:
        result = a if result is None else And(result, a)
    return TRUE if result is None else result


# --------------------------------------------------------------------------
# Program elements


@dataclass(frozen=True)
class Fact:
    atom: Atom
    component: Component
    start: int
    end: int
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    @property
    def label(self) -> str:
        return self.atom.label

    def covers(self, t: int) -> bool:
        return self.start <= t <= self.end


@dataclass(frozen=True)
class IntegrityConstraint:
    """``head <~ body``: wherever the body holds, the head bound applies."""

    head: Atom
    body: Tuple[Atom, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def triggered(self, world: Mapping[str, Bound]) -> bool:
        return all(a.holds(world) for a in self.body)


@dataclass(frozen=True)
class NeighborCriterion:
    edge_formula: Formula
    node_formula: Formula
    trigger: Formula
    influence: InfluenceSpec


@dataclass(frozen=True)
class Rule:
    head: str
    delta_t: int
    target: Formula
    neighbor: NeighborCriterion
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Program:
    registry: LabelRegistry
    network: Network
    t_max: int
    facts: Tuple[Fact, ...] = ()
    rules: Tuple[Rule, ...] = ()
    constraints: Tuple[IntegrityConstraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "facts", tuple(self.facts))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def size(self) -> int:
        """|P|: facts + rules + integrity constraints."""
        return len(self.facts) + len(self.rules) + len(self.constraints)

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.registry.labels

    @property
    def times(self) -> range:
        return range(self.t_max + 1)

    @cached_property
    def facts_by_cell(self) -> Dict[Tuple[Component, str], Tuple[Fact, ...]]:
        acc = defaultdict(list)
        for f in self.facts:
            acc[(f.component, f.label)].append(f)
        return {k: tuple(v) for k, v in acc.items()}

    @cached_property
    def constraints_by_head(self) -> Dict[str, Tuple[IntegrityConstraint, ...]]:
        acc = defaultdict(list)
        for ic in self.constraints:
            acc[ic.head.label].append(ic)
        return {k: tuple(v) for k, v in acc.items()}

    @cached_property
    def rules_by_head(self) -> Dict[str, Tuple[Rule, ...]]:
        acc = defaultdict(list)
        for r in self.rules:
            acc[r.head].append(r)
        return {k: tuple(v) for k, v in acc.items()}

    def replace(self, **changes) -> "Program":
        fields = dict(
            registry=self.registry,
            network=self.network,
            t_max=self.t_max,
            facts=self.facts,
            rules=self.rules,
            constraints=self.constraints,
        )
        fields.update(changes)
        return Program(**fields)


# --------------------------------------------------------------------------
# Validation


def _formula_label_problems(
    f: Formula, registry: LabelRegistry, where: str, span, require_nonfluent: bool
) -> List[Diagnostic]:
    out = []
    for label in sorted(f.labels()):
        if label not in registry:
            out.append(Diagnostic("unregistered-label", f"{where}: unknown label {label!r}", span))
        elif require_nonfluent and registry.is_fluent(label):
            out.append(
                Diagnostic("fluent-in-nonfluent-formula", f"{where}: fluent label {label!r} not allowed", span)
            )
    return out


def validate(program: Program) -> List[Diagnostic]:
    """Every invariant violation in ``program``; an empty list means valid."""
    reg = program.registry
    net = program.network
    t_max = program.t_max
    out: List[Diagnostic] = []

    if t_max < 0:
        out.append(Diagnostic("bad-tmax", f"t_max must be a natural number, got {t_max}"))

    seen_nonfluent: Dict[Tuple[Component, str], Fact] = {}
    for fact in program.facts:
        span = fact.span
        label = fact.label
        where = f"fact {label} @ {format_component(fact.component)}"
        if label not in reg:
            out.append(Diagnostic("unregistered-label", f"{where}: unknown label {label!r}", span))
        if fact.component not in net:
            out.append(Diagnostic("dangling-component", f"{where}: component not in network", span))
        if not (0 <= fact.start <= fact.end <= t_max):
            out.append(
                Diagnostic(
                    "bad-window",
                    f"{where}: window [{fact.start},{fact.end}] not within [0,{t_max}]",
                    span,
                )
            )
        if label in reg and not reg.is_fluent(label):
            if (fact.start, fact.end) != (0, t_max):
                out.append(
                    Diagnostic(
                        "nonfluent-window",
                        f"{where}: non-fluent facts must cover [0,{t_max}]",
                        span,
                    )
                )
            key = (fact.component, label)
            if key in seen_nonfluent:
                out.append(
                    Diagnostic(
                        "duplicate-nonfluent-fact",
                        f"{where}: second non-fluent fact for this label and component",
                        span,
                    )
                )
            else:
                seen_nonfluent[key] = fact

    for ic in program.constraints:
        span = ic.span
        head = ic.head.label
        if head not in reg:
            out.append(Diagnostic("unregistered-label", f"constraint head: unknown label {head!r}", span))
        elif not reg.is_fluent(head):
            out.append(Diagnostic("nonfluent-head", f"constraint head {head!r} must be fluent", span))
        for a in ic.body:
            if a.label not in reg:
                out.append(Diagnostic("unregistered-label", f"constraint body: unknown label {a.label!r}", span))

    max_y = net.max_in_degree
    for rule in program.rules:
        span = rule.span
        where = f"rule {rule.head}"
        if rule.head not in reg:
            out.append(Diagnostic("unregistered-label", f"{where}: unknown head label", span))
        elif not reg.is_fluent(rule.head):
            out.append(Diagnostic("nonfluent-head", f"{where}: head must be a fluent label", span))
        if rule.delta_t < 1:
            out.append(Diagnostic("bad-delta", f"{where}: delta t must be at least 1", span))
        nc = rule.neighbor
        out += _formula_label_problems(rule.target, reg, f"{where} target criteria", span, True)
        out += _formula_label_problems(nc.edge_formula, reg, f"{where} edge criteria", span, True)
        out += _formula_label_problems(nc.node_formula, reg, f"{where} node criteria", span, True)
        out += _formula_label_problems(nc.trigger, reg, f"{where} trigger", span, False)
        bad = antitone_violations(nc.influence, max_y)
        if bad:
            out.append(
                Diagnostic(
                    "influence-not-antitone",
                    f"{where}: influence {nc.influence.name} grows with x at (x, y) = {bad[0]}",
                    span,
                )
            )
    return out
