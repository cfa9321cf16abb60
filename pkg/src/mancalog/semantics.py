"""Interpretations and the satisfaction relations over them.

Everything here follows the definitions directly and favours clarity over
speed; the fixpoint engine is checked against these functions.
"""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from .bounds import EMPTY, FULL, Bound, is_subset
from .model import (
    Atom,
    Component,
    Fact,
    Formula,
    IntegrityConstraint,
    Network,
    NeighborCriterion,
    Node,
    Program,
    Rule,
    component_sort_key,
    format_component,
    is_edge,
)

World = Mapping[str, Bound]
EMPTY_WORLD: World = {}
Cell = Tuple[int, Component, str]


class WorldView(Mapping):
    """Read-only world of one component at one time inside an interpretation."""

    __slots__ = ("_series", "_t")

    def __init__(self, series: Mapping[str, Sequence[Bound]], t: int):
        self._series = series
        self._t = t

    def get(self, label, default=None):
        s = self._series.get(label)
        if s is None:
            return default
        b = s[self._t]
        return default if b is FULL and default is FULL else b

    def __getitem__(self, label):
        s = self._series.get(label)
        if s is None or s[self._t] is FULL:
            raise KeyError(label)
        return s[self._t]

    def __iter__(self):
        t = self._t
        return (L for L, s in self._series.items() if s[t] is not FULL)

    def __len__(self):
        return sum(1 for _ in self)


class NetworkInterpretation:
    """An interpretation frozen at one time point: component -> world."""

    __slots__ = ("_cells", "_t")

    def __init__(self, cells: Mapping[Component, Mapping[str, Sequence[Bound]]], t: int):
        self._cells = cells
        self._t = t

    def get(self, c: Component, default: World = EMPTY_WORLD) -> World:
        series = self._cells.get(c)
        return default if series is None else WorldView(series, self._t)

    def __getitem__(self, c: Component) -> World:
        return self.get(c)


class Interpretation:
    """Time-indexed map (t, component, label) -> Bound over [0, t_max].

    Only cells that differ from ``FULL`` are stored; two interpretations are
    equal iff they agree on every cell.
    """

    __slots__ = ("t_max", "_cells")

    def __init__(
        self,
        t_max: int,
        cells: Optional[Mapping[Tuple[Component, str], Sequence[Bound]]] = None,
    ):
        self.t_max = t_max
        store: Dict[Component, Dict[str, Tuple[Bound, ...]]] = {}
        for (c, label), series in (cells or {}).items():
            series = tuple(series)
            if len(series) != t_max + 1:
                raise ValueError(f"series for {c}/{label} has {len(series)} points, expected {t_max + 1}")
            if any(b is not FULL for b in series):
                store.setdefault(c, {})[label] = series
        self._cells = store

    @classmethod
    def bottom(cls, t_max: int) -> "Interpretation":
        return cls(t_max)

    @classmethod
    def top(cls, t_max: int, components: Iterable[Component], labels: Iterable[str]) -> "Interpretation":
        labels = list(labels)
        empty = (EMPTY,) * (t_max + 1)
        return cls(t_max, {(c, L): empty for c in components for L in labels})

    @classmethod
    def from_cells(cls, t_max: int, cells: Iterable[Tuple[int, Component, str, Bound]]) -> "Interpretation":
        acc: Dict[Tuple[Component, str], List[Bound]] = {}
        for t, c, label, b in cells:
            if not 0 <= t <= t_max:
                raise ValueError(f"time {t} outside [0,{t_max}]")
            acc.setdefault((c, label), [FULL] * (t_max + 1))[t] = b
        return cls(t_max, acc)

    @classmethod
    def constant(cls, t_max: int, ni: Mapping[Component, World]) -> "Interpretation":
        """The interpretation equal to network interpretation ``ni`` at every time."""
        return cls(
            t_max,
            {(c, L): (b,) * (t_max + 1) for c, w in ni.items() for L, b in w.items()},
        )

    def get(self, t: int, c: Component, label: str) -> Bound:
        comp = self._cells.get(c)
        if comp is None:
            return FULL
        s = comp.get(label)
        return FULL if s is None else s[t]

    def series(self, c: Component, label: str) -> Tuple[Bound, ...]:
        comp = self._cells.get(c)
        s = comp.get(label) if comp else None
        return s if s is not None else (FULL,) * (self.t_max + 1)

    def world(self, t: int, c: Component) -> World:
        comp = self._cells.get(c)
        return EMPTY_WORLD if comp is None else WorldView(comp, t)

    def at(self, t: int) -> NetworkInterpretation:
        return NetworkInterpretation(self._cells, t)

    def keys(self) -> Iterator[Tuple[Component, str]]:
        for c, comp in self._cells.items():
            for label in comp:
                yield c, label

    def items(self) -> Iterator[Tuple[Tuple[Component, str], Tuple[Bound, ...]]]:
        for c, comp in self._cells.items():
            for label, s in comp.items():
                yield (c, label), s

    def cells(self) -> List[Tuple[int, Component, str, Bound]]:
        """Every non-FULL cell, sorted by (t, component, label)."""
        out = [
            (t, c, label, b)
            for (c, label), s in self.items()
            for t, b in enumerate(s)
            if b is not FULL
        ]
        out.sort(key=lambda r: (r[0], component_sort_key(r[1]), r[2]))
        return out

    def empty_cells(self) -> List[Cell]:
        return [(t, c, label) for t, c, label, b in self.cells() if b is EMPTY]

    def replace(self, t: int, c: Component, label: str, bound: Bound) -> "Interpretation":
        data = {k: list(s) for k, s in self.items()}
        data.setdefault((c, label), [FULL] * (self.t_max + 1))[t] = bound
        return Interpretation(self.t_max, data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Interpretation):
            return NotImplemented
        return self.t_max == other.t_max and self._cells == other._cells

    __hash__ = None

    def __repr__(self) -> str:
        n = sum(1 for _ in self.keys())
        return f"<Interpretation t_max={self.t_max} series={n}>"


# --------------------------------------------------------------------------
# World and fact satisfaction


def world_satisfies(w: World, f: Formula) -> bool:
    return f.holds(w)


def satisfies_fact(i: Interpretation, fact: Fact) -> bool:
    return all(fact.atom.holds(i.world(t, fact.component)) for t in range(fact.start, fact.end + 1))


def strictly_satisfies_fact(i: Interpretation, fact: Fact) -> bool:
    """The stored bound equals the fact's bound at every time of the window."""
    return all(
        i.get(t, fact.component, fact.label) == fact.atom.bound
        for t in range(fact.start, fact.end + 1)
    )


def satisfies_ic(i: Interpretation, ic: IntegrityConstraint, network: Network) -> bool:
    for t in range(i.t_max + 1):
        for c in network.components:
            w = i.world(t, c)
            if ic.triggered(w) and not ic.head.holds(w):
                return False
    return True


# --------------------------------------------------------------------------
# Neighbour influence


def _world(ni, c: Component) -> World:
    return ni.get(c, EMPTY_WORLD) or EMPTY_WORLD


def eligible(v: Node, nc: NeighborCriterion, ni, network: Network) -> Set[Node]:
    """In-neighbours v' of v with ni(v') |= g_node and ni((v', v)) |= g_edge."""
    return {
        u
        for u in network.in_neighbors.get(v, ())
        if nc.node_formula.holds(_world(ni, u)) and nc.edge_formula.holds(_world(ni, (u, v)))
    }


def qualifying(v: Node, nc: NeighborCriterion, ni, network: Network) -> Set[Node]:
    return {u for u in eligible(v, nc, ni, network) if nc.trigger.holds(_world(ni, u))}


def bound_of(rule: Rule, v: Node, ni, network: Network) -> Bound:
    nc = rule.neighbor
    elig = eligible(v, nc, ni, network)
    qual = {u for u in elig if nc.trigger.holds(_world(ni, u))}
    return nc.influence(len(qual), len(elig))


# --------------------------------------------------------------------------
# Target time sets


def rule_tts(i: Interpretation, v: Node, r: Rule) -> Set[int]:
    """Times t with t - Δt in range and I(t - Δt)(v) |= f."""
    return {
        t
        for t in range(r.delta_t, i.t_max + 1)
        if t - r.delta_t >= 0 and r.target.holds(i.world(t - r.delta_t, v))
    }


def program_tts(i: Interpretation, c: Component, label: str, p: Program) -> Set[int]:
    out: Set[int] = set()
    if not is_edge(c):
        for r in p.rules_by_head.get(label, ()):
            out |= rule_tts(i, c, r)
    for fact in p.facts_by_cell.get((c, label), ()):
        out.update(range(fact.start, fact.end + 1))
    for ic in p.constraints_by_head.get(label, ()):
        out.update(t for t in range(i.t_max + 1) if ic.triggered(i.world(t, c)))
    return out


def satisfies_rule(i: Interpretation, r: Rule, network: Network) -> bool:
    for v in network.nodes:
        for t in sorted(rule_tts(i, v, r)):
            required = Atom(r.head, bound_of(r, v, i.at(t - r.delta_t), network))
            if not required.holds(i.world(t, v)):
                return False
    return True


# --------------------------------------------------------------------------
# Models


def model_violations(i: Interpretation, p: Program, canonical: bool = False) -> List[str]:
    """Human-readable reasons ``i`` is not a (canonical) model of ``p``."""
    net = p.network
    reg = p.registry
    out: List[str] = []
    for fact in p.facts:
        where = f"fact {fact.atom} @ {format_component(fact.component)} in [{fact.start},{fact.end}]"
        if reg.is_fluent(fact.label):
            if not satisfies_fact(i, fact):
                out.append(f"{where} not satisfied")
        elif not strictly_satisfies_fact(i, fact):
            out.append(f"{where} not strictly satisfied")
    for ic in p.constraints:
        if not satisfies_ic(i, ic, net):
            out.append(f"constraint on {ic.head.label} violated")
    for k, r in enumerate(p.rules):
        if not satisfies_rule(i, r, net):
            out.append(f"rule #{k} ({r.head}) violated")

    # Cells that are not stored are FULL at every time, which satisfies both
    # frame conditions, so only stored series need inspection.
    for (c, label), s in sorted(i.items(), key=lambda kv: (component_sort_key(kv[0][0]), kv[0][1])):
        tts = None
        for t, b in enumerate(s):
            if canonical and t > 0:
                frame_ok = b is s[t - 1]
            else:
                frame_ok = b is FULL
            if frame_ok:
                continue
            if tts is None:
                tts = program_tts(i, c, label, p)
            if t not in tts:
                kind = "canonical frame" if canonical and t > 0 else "frame"
                out.append(f"{kind} violated at t={t} {format_component(c)} {label}")
    return out


def is_model(i: Interpretation, p: Program) -> bool:
    return not model_violations(i, p, canonical=False)


def is_canonical_model(i: Interpretation, p: Program) -> bool:
    return not model_violations(i, p, canonical=True)


def leq(i1: Interpretation, i2: Interpretation) -> bool:
    """``i1 ⊑ i2``: every bound of ``i2`` is contained in the matching bound of ``i1``."""
    if i1.t_max != i2.t_max:
        raise ValueError("interpretations over different horizons")
    keys = set(i1.keys()) | set(i2.keys())
    for c, label in keys:
        s1 = i1.series(c, label)
        s2 = i2.series(c, label)
        for b1, b2 in zip(s1, s2):
            if not is_subset(b2, b1):
                return False
    return True


def equivalent(i1: Interpretation, i2: Interpretation) -> bool:
    """Equality of normalized bound tables (stand-in for ~)."""
    return i1 == i2
