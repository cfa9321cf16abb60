"""Fixed-point evaluation: the Γ operator, its iteration, and the canonical sweep.

Two evaluators live here.  :func:`gamma` / :func:`gamma_star_naive` apply the
operator to every cell that any fact, constraint or rule can touch, reading
through the definition-literal helpers in :mod:`mancalog.semantics`.
:func:`gamma_star` is the production evaluator: it re-evaluates only cells
whose inputs changed in the previous round, but keeps the same synchronous
round structure so its result and its round count match the naive one.
"""

from __future__ import annotations

import gc
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .bounds import EMPTY, FULL, Bound, intersect, intersect_all
from .model import TRUE, Component, Fact, Formula, Program, Rule, format_component, is_edge
from .semantics import (
    Interpretation,
    bound_of,
    model_violations,
    satisfies_fact,
)

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"

# Rounds with fewer dirty cells than this never fan out to worker threads.
PARALLEL_MIN_CELLS = 2048


@dataclass
class EngineStats:
    iterations: int = 0
    """k with Γ^k(I) = Γ^(k+1)(I): rounds that changed something, at least 1."""
    applications: int = 0
    """Γ applications performed, including the final one that confirms the fixpoint."""
    tightenings: int = 0
    cell_evaluations: int = 0
    gamma_star_runs: int = 0
    wall_time: float = 0.0

    def absorb(self, other: "EngineStats") -> None:
        self.iterations += other.iterations
        self.applications += other.applications
        self.tightenings += other.tightenings
        self.cell_evaluations += other.cell_evaluations
        self.gamma_star_runs += other.gamma_star_runs

    def as_dict(self) -> Dict[str, object]:
        return {
            "iterations": self.iterations,
            "applications": self.applications,
            "tightenings": self.tightenings,
            "cell_evaluations": self.cell_evaluations,
            "gamma_star_runs": self.gamma_star_runs,
            "wall_time": round(self.wall_time, 6),
        }


@dataclass
class EngineResult:
    status: str
    model: Interpretation
    stats: EngineStats
    witnesses: List[Tuple[int, Component, str]] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.status == CONSISTENT


class InconsistentProgramError(Exception):
    """Raised by :func:`entails` when the program has no model."""

    def __init__(self, result: EngineResult):
        self.result = result
        detail = result.violations[:1] or [
            f"empty bound at t={t} {format_component(c)} {L}" for t, c, L in result.witnesses[:1]
        ]
        super().__init__("program is inconsistent" + (f": {detail[0]}" if detail else ""))


def iteration_bound(p: Program) -> int:
    """|P| * (d_in_max + 1) * t_max * |E|: a concrete instance of the iteration bound."""
    net = p.network
    return p.size * (net.max_in_degree + 1) * p.t_max * len(net.edges)


def canonical_run_bound(p: Program) -> int:
    """1 + t_max * min(|labels|, |P|) * |V|: limit on Γ* runs inside the canonical sweep."""
    return 1 + p.t_max * min(len(p.labels), p.size) * len(p.network.nodes)


# --------------------------------------------------------------------------
# Definition-literal operator


def fb(p: Program, c: Component, t: int, label: str) -> Bound:
    """Intersection of the bounds of facts on (c, label) whose window covers t."""
    return intersect_all(f.atom.bound for f in p.facts_by_cell.get((c, label), ()) if f.covers(t))


def ib(p: Program, i: Interpretation, c: Component, t: int, label: str) -> Bound:
    """Intersection of constraint heads for ``label`` whose body holds in I(t)(c)."""
    w = i.world(t, c)
    return intersect_all(
        ic.head.bound for ic in p.constraints_by_head.get(label, ()) if ic.triggered(w)
    )


def rb(p: Program, i: Interpretation, v: Component, t: int, label: str) -> Bound:
    """Intersection of BOUND(r, v, I(t - Δt)) over rules headed by ``label`` that target t."""
    if is_edge(v):
        return FULL
    out = FULL
    for r in p.rules_by_head.get(label, ()):
        s = t - r.delta_t
        if s < 0 or not r.target.holds(i.world(s, v)):
            continue
        out = intersect(out, bound_of(r, v, i.at(s), p.network))
    return out


def _touched_series(p: Program) -> List[Tuple[Component, str]]:
    """(component, label) pairs that some fact, constraint or rule can tighten.

    Every other cell has FB = IB = RB = [0,1], so Γ leaves it unchanged.
    """
    keys = set(p.facts_by_cell)
    comps = p.network.components
    for label in p.constraints_by_head:
        keys.update((c, label) for c in comps)
    for label in p.rules_by_head:
        keys.update((v, label) for v in p.network.nodes)
    return sorted(keys, key=lambda k: (0 if not is_edge(k[0]) else 1, k[0], k[1]))


def gamma(p: Program, i: Interpretation) -> Interpretation:
    """One synchronous application of Γ; every read comes from ``i``."""
    data = {key: list(s) for key, s in i.items()}
    for c, label in _touched_series(p):
        row = data.get((c, label))
        for t in range(p.t_max + 1):
            prev = i.get(t, c, label)
            new = intersect(
                intersect(prev, fb(p, c, t, label)),
                intersect(ib(p, i, c, t, label), rb(p, i, c, t, label)),
            )
            if new is not prev:
                if row is None:
                    row = data[(c, label)] = [FULL] * (p.t_max + 1)
                row[t] = new
    return Interpretation(p.t_max, data)


def gamma_star_naive(p: Program, start: Optional[Interpretation] = None) -> Tuple[Interpretation, EngineStats]:
    """Apply :func:`gamma` until nothing changes."""
    cur = start if start is not None else Interpretation.bottom(p.t_max)
    stats = EngineStats(gamma_star_runs=1)
    t0 = time.perf_counter()
    changed_rounds = 0
    while True:
        nxt = gamma(p, cur)
        stats.applications += 1
        if nxt == cur:
            break
        changed_rounds += 1
        cur = nxt
    stats.iterations = max(1, changed_rounds)
    stats.wall_time = time.perf_counter() - t0
    return cur, stats


# --------------------------------------------------------------------------
# Change-tracking evaluator

Cell = Tuple[int, int, str]


class _TableWorld:
    """World of one component at one time, read straight from the table."""

    __slots__ = ("table", "ci", "t")

    def __init__(self, table, ci: int, t: int):
        self.table = table
        self.ci = ci
        self.t = t

    def get(self, label, default=None):
        s = self.table.get((self.ci, label))
        return default if s is None else s[self.t]


class _Evaluator:
    """Mutable bound table over component indices plus dependency indexes.

    Nodes occupy indices ``0..n-1`` and edges ``n..n+m-1``.
    """

    def __init__(self, p: Program, start: Interpretation, workers: int = 1):
        net = p.network
        self.p = p
        self.T = p.t_max
        self.workers = max(1, workers)
        self.comps: List[Component] = list(net.nodes) + list(net.edges)
        self.index: Dict[Component, int] = {c: k for k, c in enumerate(self.comps)}
        n = self.n = len(net.nodes)
        self.in_edges: List[List[Tuple[int, int]]] = [[] for _ in range(n)]
        self.out_nodes: List[List[int]] = [[] for _ in range(n)]
        self.edge_target: List[int] = []
        for k, (u, v) in enumerate(net.edges):
            ui, vi = self.index[u], self.index[v]
            self.in_edges[vi].append((ui, n + k))
            self.out_nodes[ui].append(vi)
            self.edge_target.append(vi)

        self.table: Dict[Tuple[int, str], List[Bound]] = {}
        for (c, label), s in start.items():
            self.table[(self.index[c], label)] = list(s)

        self.fb: Dict[Tuple[int, str], List[Bound]] = {}
        self.fact_times: Dict[Tuple[int, str], Set[int]] = {}
        for (c, label), facts in p.facts_by_cell.items():
            row = [FULL] * (self.T + 1)
            times = set()
            for f in facts:
                for t in range(max(f.start, 0), min(f.end, self.T) + 1):
                    row[t] = intersect(row[t], f.atom.bound)
                    times.add(t)
            key = (self.index[c], label)
            self.fb[key] = row
            self.fact_times[key] = times

        self.ics_by_head = p.constraints_by_head
        self.rules_by_head = p.rules_by_head
        self.ic_heads_by_body: Dict[str, Set[str]] = {}
        for ic in p.constraints:
            for a in ic.body:
                self.ic_heads_by_body.setdefault(a.label, set()).add(ic.head.label)
        # rules whose evaluation at v reads a label of v itself, of v's
        # in-neighbours, or of v's in-edges
        self.dep_self: Dict[str, List[Rule]] = {}
        self.dep_in_node: Dict[str, List[Rule]] = {}
        self.dep_in_edge: Dict[str, List[Rule]] = {}
        for r in p.rules:
            nc = r.neighbor
            for label in r.target.labels():
                self.dep_self.setdefault(label, []).append(r)
            for label in nc.node_formula.labels() | nc.trigger.labels():
                self.dep_in_node.setdefault(label, []).append(r)
            for label in nc.edge_formula.labels():
                self.dep_in_edge.setdefault(label, []).append(r)

        # Formula truth memos keyed by t * |components| + c.  A write to
        # (t, c, L) drops the (t, c) entry of every formula mentioning L.
        self.ncomp = len(self.comps)
        self.memos_by_label: Dict[str, List[dict]] = {}
        self._slots: Dict[Formula, Tuple[dict, Formula]] = {}
        self.rule_plan = {
            label: [
                (
                    r.delta_t,
                    self._slot(r.target),
                    self._slot(r.neighbor.node_formula),
                    self._slot(r.neighbor.edge_formula),
                    self._slot(r.neighbor.trigger),
                    r.neighbor.influence,
                )
                for r in rules
            ]
            for label, rules in self.rules_by_head.items()
        }
        self.stats = EngineStats()

    def _slot(self, f: Formula) -> Optional[Tuple[dict, Formula]]:
        if f is TRUE:
            return None
        slot = self._slots.get(f)
        if slot is None:
            memo: dict = {}
            for label in f.labels():
                self.memos_by_label.setdefault(label, []).append(memo)
            slot = self._slots[f] = (memo, f)
        return slot

    # -- reads ---------------------------------------------------------

    def _miss(self, slot: Tuple[dict, Formula], key: int, ci: int, t: int) -> bool:
        value = slot[0][key] = slot[1].holds(_TableWorld(self.table, ci, t))
        return value

    def holds(self, f: Formula, t: int, ci: int) -> bool:
        slot = self._slot(f)
        if slot is None:
            return True
        key = t * self.ncomp + ci
        hit = slot[0].get(key)
        return self._miss(slot, key, ci, t) if hit is None else hit

    def influence_bound(self, plan, v: int, s: int) -> Bound:
        _, _, node_slot, edge_slot, trig_slot, influence = plan
        base = s * self.ncomp
        miss = self._miss
        x = y = 0
        for u, e in self.in_edges[v]:
            if node_slot is not None:
                ok = node_slot[0].get(base + u)
                if ok is None:
                    ok = miss(node_slot, base + u, u, s)
                if not ok:
                    continue
            if edge_slot is not None:
                ok = edge_slot[0].get(base + e)
                if ok is None:
                    ok = miss(edge_slot, base + e, e, s)
                if not ok:
                    continue
            y += 1
            if trig_slot is not None:
                ok = trig_slot[0].get(base + u)
                if ok is None:
                    ok = miss(trig_slot, base + u, u, s)
                if not ok:
                    continue
            x += 1
        return influence(x, y)

    def evaluate(self, cell: Cell) -> Bound:
        t, ci, label = cell
        s = self.table.get((ci, label))
        b = FULL if s is None else s[t]
        row = self.fb.get((ci, label))
        if row is not None and row[t] is not FULL:
            b = intersect(b, row[t])
        ics = self.ics_by_head.get(label)
        if ics:
            w = _TableWorld(self.table, ci, t)
            for ic in ics:
                if ic.triggered(w):
                    b = intersect(b, ic.head.bound)
        if ci < self.n:
            for plan in self.rule_plan.get(label, ()):
                src = t - plan[0]
                if src < 0:
                    continue
                target = plan[1]
                if target is not None:
                    key = src * self.ncomp + ci
                    ok = target[0].get(key)
                    if ok is None:
                        ok = self._miss(target, key, ci, src)
                    if not ok:
                        continue
                bound = self.influence_bound(plan, ci, src)
                if bound is not FULL:
                    b = intersect(b, bound)
        return b

    def set_cell(self, t: int, ci: int, label: str, b: Bound) -> None:
        row = self.table.get((ci, label))
        if row is None:
            row = self.table[(ci, label)] = [FULL] * (self.T + 1)
        row[t] = b
        key = t * self.ncomp + ci
        for memo in self.memos_by_label.get(label, ()):
            memo.pop(key, None)

    # -- dirty sets ----------------------------------------------------

    def all_candidates(self) -> Set[Cell]:
        T = self.T
        cells: Set[Cell] = set()
        for (ci, label), row in self.fb.items():
            cells.update((t, ci, label) for t in range(T + 1) if row[t] is not FULL)
        ncomp = len(self.comps)
        for label in self.ics_by_head:
            cells.update((t, ci, label) for t in range(T + 1) for ci in range(ncomp))
        for label, rules in self.rules_by_head.items():
            lo = min(r.delta_t for r in rules)
            cells.update((t, v, label) for t in range(lo, T + 1) for v in range(self.n))
        return cells

    def dependents(self, cells: Iterable[Cell]) -> Set[Cell]:
        T = self.T
        out: Set[Cell] = set()
        for t, ci, label in cells:
            for head in self.ic_heads_by_body.get(label, ()):
                out.add((t, ci, head))
            if ci < self.n:
                for r in self.dep_self.get(label, ()):
                    t2 = t + r.delta_t
                    if t2 <= T:
                        out.add((t2, ci, r.head))
                for r in self.dep_in_node.get(label, ()):
                    t2 = t + r.delta_t
                    if t2 <= T:
                        out.update((t2, w, r.head) for w in self.out_nodes[ci])
            else:
                for r in self.dep_in_edge.get(label, ()):
                    t2 = t + r.delta_t
                    if t2 <= T:
                        out.add((t2, self.edge_target[ci - self.n], r.head))
        return out

    # -- rounds --------------------------------------------------------

    def _evaluate_chunk(self, cells: List[Cell]) -> List[Tuple[Cell, Bound]]:
        table = self.table
        out = []
        for cell in cells:
            new = self.evaluate(cell)
            s = table.get((cell[1], cell[2]))
            old = FULL if s is None else s[cell[0]]
            if new is not old:
                out.append((cell, new))
        return out

    def _round(self, dirty: List[Cell]) -> List[Tuple[Cell, Bound]]:
        if self.workers == 1 or len(dirty) < PARALLEL_MIN_CELLS:
            return self._evaluate_chunk(dirty)
        size = -(-len(dirty) // self.workers)
        chunks = [dirty[k : k + size] for k in range(0, len(dirty), size)]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            parts = list(pool.map(self._evaluate_chunk, chunks))
        return [change for part in parts for change in part]

    def run(self, seeds: Optional[Iterable[Cell]] = None) -> EngineStats:
        """Iterate Γ to a fixpoint from the current table.

        With ``seeds`` the table must be a fixpoint except at those cells, so
        only they and their dependents need a first evaluation.
        """
        t0 = time.perf_counter()
        # the loop allocates many short-lived tuples and no cycles
        gc_was_enabled = gc.isenabled()
        gc.disable()
        try:
            stats = self._run(seeds)
        finally:
            if gc_was_enabled:
                gc.enable()
        stats.wall_time = time.perf_counter() - t0
        self.stats.absorb(stats)
        self.stats.wall_time += stats.wall_time
        return stats

    def _run(self, seeds: Optional[Iterable[Cell]]) -> EngineStats:
        stats = EngineStats(gamma_star_runs=1)
        if seeds is None:
            dirty = self.all_candidates()
        else:
            seeds = set(seeds)
            dirty = seeds | self.dependents(seeds)
        rounds = 0
        while True:
            stats.cell_evaluations += len(dirty)
            changes = self._round(sorted(dirty))
            stats.applications += 1
            if not changes:
                break
            rounds += 1
            stats.tightenings += len(changes)
            for (t, ci, label), b in changes:
                self.set_cell(t, ci, label, b)
            dirty = self.dependents(cell for cell, _ in changes)
        stats.iterations = max(1, rounds)
        return stats

    # -- canonical sweep support ---------------------------------------

    def is_target(self, t: int, ci: int, label: str) -> bool:
        if t in self.fact_times.get((ci, label), ()):
            return True
        ics = self.ics_by_head.get(label)
        if ics:
            w = _TableWorld(self.table, ci, t)
            if any(ic.triggered(w) for ic in ics):
                return True
        if ci < self.n:
            for r in self.rules_by_head.get(label, ()):
                s = t - r.delta_t
                if s >= 0 and r.target.holds(_TableWorld(self.table, ci, s)):
                    return True
        return False

    def interpretation(self) -> Interpretation:
        return Interpretation(
            self.T, {(self.comps[ci], label): row for (ci, label), row in self.table.items()}
        )

    def empty_cells(self) -> List[Tuple[int, Component, str]]:
        return sorted(
            (
                (t, self.comps[ci], label)
                for (ci, label), row in self.table.items()
                for t, b in enumerate(row)
                if b is EMPTY
            ),
            key=lambda cell: (cell[0], self.index[cell[1]], cell[2]),
        )


def _default_workers(workers: Optional[int]) -> int:
    return 1 if workers is None else max(1, int(workers))


def gamma_star(
    p: Program, start: Optional[Interpretation] = None, workers: Optional[int] = None
) -> Tuple[Interpretation, EngineStats]:
    """Least fixpoint of Γ above ``start`` (default ⊥) with change tracking."""
    ev = _Evaluator(p, start if start is not None else Interpretation.bottom(p.t_max), _default_workers(workers))
    stats = ev.run()
    return ev.interpretation(), stats


# --------------------------------------------------------------------------
# Queries


def _finish(
    p: Program, ev: _Evaluator, canonical: bool, verify: bool, t0: float
) -> EngineResult:
    model = ev.interpretation()
    witnesses = ev.empty_cells()
    violations: List[str] = []
    if verify and not witnesses:
        violations = model_violations(model, p, canonical=canonical)
    ev.stats.wall_time = time.perf_counter() - t0
    status = INCONSISTENT if witnesses or violations else CONSISTENT
    return EngineResult(status, model, ev.stats, witnesses, violations)


def minimal_model(p: Program, workers: Optional[int] = None, verify: bool = True) -> EngineResult:
    """Γ* from ⊥, checked against the model definition when ``verify`` is set.

    Any empty bound makes the program inconsistent, since no valid
    interpretation can be tighter than it.
    """
    t0 = time.perf_counter()
    ev = _Evaluator(p, Interpretation.bottom(p.t_max), _default_workers(workers))
    ev.run()
    return _finish(p, ev, False, verify, t0)


def canon_proc(p: Program, workers: Optional[int] = None, verify: bool = True) -> EngineResult:
    """Minimal canonical model by sweeping t = 1..t_max.

    At each t, every (component, label) whose t is outside its target time
    set takes the bound it had at t - 1; Γ* is then re-run from the current
    table.  A sweep step that copies nothing new skips the re-run.
    """
    t0 = time.perf_counter()
    ev = _Evaluator(p, Interpretation.bottom(p.t_max), _default_workers(workers))
    ev.run()
    if not ev.empty_cells():
        for t in range(1, p.t_max + 1):
            copied = []
            for (ci, label), row in sorted(ev.table.items()):
                if row[t] is row[t - 1] or ev.is_target(t, ci, label):
                    continue
                copied.append((t, ci, label, row[t - 1]))
            if not copied:
                continue
            for t_, ci, label, b in copied:
                ev.set_cell(t_, ci, label, b)
            ev.run(seeds=[(t_, ci, label) for t_, ci, label, _ in copied])
            if ev.empty_cells():
                break
    return _finish(p, ev, True, verify, t0)


def check_consistency(p: Program, canonical: bool = False, workers: Optional[int] = None) -> bool:
    run = canon_proc if canonical else minimal_model
    return run(p, workers=workers).consistent


def _check_query(p: Program, fact: Fact) -> None:
    if fact.label not in p.registry:
        raise ValueError(f"unknown label {fact.label!r}")
    if fact.component not in p.network:
        raise ValueError(f"{format_component(fact.component)} is not in the network")
    if not 0 <= fact.start <= fact.end <= p.t_max:
        raise ValueError(f"window [{fact.start},{fact.end}] not within [0,{p.t_max}]")


def entails(
    p: Program,
    fact: Fact,
    canonical: bool = False,
    workers: Optional[int] = None,
    result: Optional[EngineResult] = None,
) -> bool:
    """Whether every (canonical) model of ``p`` satisfies ``fact``.

    Decided on the (canonical) minimal model.  Raises
    :class:`InconsistentProgramError` when ``p`` has no model, rather than
    returning the vacuous ``True``.  A precomputed ``result`` may be passed
    to answer many queries against one model.
    """
    _check_query(p, fact)
    if result is None:
        result = (canon_proc if canonical else minimal_model)(p, workers=workers)
    if not result.consistent:
        raise InconsistentProgramError(result)
    return satisfies_fact(result.model, fact)
