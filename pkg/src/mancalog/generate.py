"""Random instances: desk-scale benchmark networks and small property-test programs."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Set, Tuple

from .bounds import FULL, Bound
from .influence import InfluenceSpec, const, negtip, softtip, threshold_influence, tip
from .model import (
    TRUE,
    And,
    Atom,
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
)

SOCIAL_FLUENT = ("watchesA", "watchesB")
SOCIAL_NONFLUENT = ("female", "male", "strongTie", "weakTie")
ONE = Bound(1, 1)
ZERO = Bound(0, 0)


# --------------------------------------------------------------------------
# Benchmark instances


def _erdos_edges(rng: random.Random, n: int, m: int) -> List[Tuple[int, int]]:
    seen: Set[Tuple[int, int]] = set()
    edges = []
    while len(edges) < m:
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u != v and (u, v) not in seen:
            seen.add((u, v))
            edges.append((u, v))
    return edges


def _preferential_edges(rng: random.Random, n: int, m: int, d: int) -> List[Tuple[int, int]]:
    """Each new node points at up to ``d`` earlier nodes chosen by in-degree + 1."""
    seen: Set[Tuple[int, int]] = set()
    edges: List[Tuple[int, int]] = []
    pool: List[int] = [0]  # node k appears in_degree(k) + 1 times
    for k in range(1, n):
        for _ in range(min(d, k)):
            if len(edges) >= m:
                break
            for _attempt in range(8):
                v = rng.choice(pool)
                if (k, v) not in seen:
                    seen.add((k, v))
                    edges.append((k, v))
                    pool.append(v)
                    break
        pool.append(k)
    while len(edges) < m:
        u = rng.randrange(n)
        v = rng.choice(pool)
        if u != v and (u, v) not in seen:
            seen.add((u, v))
            edges.append((u, v))
            pool.append(v)
    return edges


def _threshold(rng: random.Random) -> Fraction:
    return Fraction(rng.choice((1, 2, 3, 4, 5)), 10) + Fraction(1, 10) * rng.choice((0, 1, 2, 3, 4))


def _template_rule(rng: random.Random) -> Rule:
    head = rng.choice(SOCIAL_FLUENT)
    trigger_label = rng.choice(SOCIAL_FLUENT)
    target = rng.choice([Atom("male", ONE), Atom("female", ONE), TRUE])
    g_edge = rng.choice([TRUE, Atom("strongTie", Bound("0.9", 1)), Atom("weakTie", ONE)])
    g_node = rng.choice([TRUE, Atom("male", ONE), Atom("female", ONE)])
    trigger = Atom(trigger_label, Bound(Fraction(rng.choice((5, 6, 7, 8))) / 10, 1))
    # every output bound contains 1, so instances are always consistent
    if rng.random() < 0.5:
        infl = tip(_threshold(rng))
    else:
        infl = softtip(_threshold(rng), Bound(Fraction(rng.choice((6, 7, 8))) / 10, 1))
    return Rule(head, rng.choice((1, 1, 2, 3)), target, NeighborCriterion(g_edge, g_node, trigger, infl))


def generate_instance(
    seed: int,
    n_nodes: int,
    avg_degree: int,
    t_max: int,
    n_rules: int,
    model: str = "erdos",
    seed_fraction: float = 0.05,
) -> Program:
    """A random program over the two-class / two-tie social schema.

    The network has ``n_nodes * avg_degree`` edges.  Identical arguments give
    identical programs.
    """
    if n_nodes < 1 or avg_degree < 0 or t_max < 0 or n_rules < 0:
        raise ValueError("n_nodes must be positive and the other parameters non-negative")
    if avg_degree >= n_nodes:
        raise ValueError(f"average degree {avg_degree} must be below the node count {n_nodes}")
    if model not in ("erdos", "preferential"):
        raise ValueError(f"unknown graph model {model!r}")
    rng = random.Random(seed)
    m = n_nodes * avg_degree
    pairs = _erdos_edges(rng, n_nodes, m) if model == "erdos" else _preferential_edges(rng, n_nodes, m, avg_degree)
    nodes = tuple(str(k) for k in range(n_nodes))
    edges = tuple((str(u), str(v)) for u, v in pairs)
    network = Network(nodes, edges)

    facts: List[Fact] = []
    for v in nodes:
        male = rng.random() < 0.5
        facts.append(Fact(Atom("male", ONE if male else ZERO), v, 0, t_max))
        facts.append(Fact(Atom("female", ZERO if male else ONE), v, 0, t_max))
    for e in edges:
        strong = rng.random() < 0.5
        facts.append(Fact(Atom("strongTie", ONE if strong else ZERO), e, 0, t_max))
        facts.append(Fact(Atom("weakTie", ZERO if strong else ONE), e, 0, t_max))
    for v in nodes:
        if rng.random() < seed_fraction:
            label = rng.choice(SOCIAL_FLUENT)
            facts.append(Fact(Atom(label, Bound(Fraction(rng.choice((8, 9))) / 10, 1)), v, 0, 0))

    rules = [_template_rule(rng) for _ in range(n_rules)]
    registry = LabelRegistry(frozenset(SOCIAL_FLUENT), frozenset(SOCIAL_NONFLUENT))
    return Program(registry, network, t_max, facts, rules, ())


# --------------------------------------------------------------------------
# Property-test programs

_GRID = tuple(Fraction(k, 10) for k in range(11))


def random_bound(rng: random.Random, allow_full: bool = True) -> Bound:
    while True:
        lo, hi = sorted(rng.sample(_GRID, 2)) if rng.random() < 0.85 else (rng.choice(_GRID),) * 2
        b = Bound(lo, hi, rng.random() < 0.2, rng.random() < 0.2)
        if b.is_empty:
            continue
        if b is FULL and not allow_full:
            continue
        return b


def _random_formula(rng: random.Random, labels, depth: int, negation: bool) -> Formula:
    roll = rng.random()
    if depth <= 0 or roll < 0.45:
        if rng.random() < 0.15:
            return TRUE
        return Atom(rng.choice(labels), random_bound(rng))
    if negation and roll < 0.55:
        return Not(_random_formula(rng, labels, depth - 1, negation))
    left = _random_formula(rng, labels, depth - 1, negation)
    right = _random_formula(rng, labels, depth - 1, negation)
    return And(left, right) if roll < 0.8 else Or(left, right)


def _random_influence(rng: random.Random) -> InfluenceSpec:
    roll = rng.random()
    if roll < 0.3:
        return tip(_threshold(rng))
    if roll < 0.6:
        return softtip(_threshold(rng), random_bound(rng))
    if roll < 0.75:
        return negtip(random_bound(rng))
    if roll < 0.85:
        return const(random_bound(rng))
    steps = sorted(_threshold(rng) for _ in range(rng.randint(1, 3)))
    return threshold_influence("steps", [(th, random_bound(rng)) for th in steps])


def random_program(
    rng: random.Random,
    max_nodes: int = 30,
    max_edges: int = 60,
    max_t: int = 10,
    max_rules: int = 8,
    monotone: bool = True,
    constraints: bool = True,
) -> Program:
    """A small valid program with random labels, facts, constraints and rules.

    ``monotone`` keeps every formula free of negation.  The network always
    has at least one edge, the horizon is at least 1 and the program has at
    least one fact.
    """
    n = rng.randint(2, max_nodes)
    m_cap = min(max_edges, n * (n - 1))
    m = rng.randint(1, m_cap)
    all_pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    pairs = rng.sample(all_pairs, m)
    nodes = tuple(str(k) for k in range(n))
    edges = tuple((str(u), str(v)) for u, v in pairs)
    network = Network(nodes, edges)
    t_max = rng.randint(1, max_t)

    fluent = tuple(f"f{k}" for k in range(rng.randint(1, 3)))
    nonfluent = tuple(f"n{k}" for k in range(rng.randint(1, 3)))
    registry = LabelRegistry(frozenset(fluent), frozenset(nonfluent))
    comps = network.components

    facts: List[Fact] = []
    for c in comps:
        for label in nonfluent:
            if rng.random() < 0.4:
                facts.append(Fact(Atom(label, random_bound(rng, allow_full=False)), c, 0, t_max))
    for _ in range(rng.randint(1, max(1, len(comps) // 2))):
        c = rng.choice(comps) if rng.random() < 0.3 else rng.choice(nodes)
        t1 = rng.randint(0, t_max)
        t2 = rng.randint(t1, t_max)
        facts.append(Fact(Atom(rng.choice(fluent), random_bound(rng)), c, t1, t2))

    ics: List[IntegrityConstraint] = []
    if constraints:
        for _ in range(rng.randint(0, 2)):
            body = tuple(
                Atom(rng.choice(fluent + nonfluent), random_bound(rng)) for _ in range(rng.randint(0, 2))
            )
            ics.append(IntegrityConstraint(Atom(rng.choice(fluent), random_bound(rng)), body))

    rules: List[Rule] = []
    for _ in range(rng.randint(0, max_rules)):
        nc = NeighborCriterion(
            _random_formula(rng, nonfluent, 1, not monotone),
            _random_formula(rng, nonfluent, 1, not monotone),
            _random_formula(rng, fluent + nonfluent, 2, not monotone),
            _random_influence(rng),
        )
        rules.append(
            Rule(
                rng.choice(fluent),
                rng.randint(1, min(3, t_max)),
                _random_formula(rng, nonfluent, 1, not monotone),
                nc,
            )
        )
    return Program(registry, network, t_max, facts, rules, ics)


def random_fact(rng: random.Random, p: Program) -> Fact:
    """A random query fact over ``p``'s labels, components and horizon."""
    c = rng.choice(p.network.components)
    t1 = rng.randint(0, p.t_max)
    t2 = rng.randint(t1, p.t_max)
    return Fact(Atom(rng.choice(p.labels), random_bound(rng)), c, t1, t2)
