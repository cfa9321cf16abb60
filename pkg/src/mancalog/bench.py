"""Scaling harness: iteration counts against the convergence bound, and wall time."""

from __future__ import annotations

import statistics
import time
from typing import Dict, List, Optional, Sequence

from .engine import minimal_model, iteration_bound
from .generate import generate_instance

DEFAULT_SIZES = (1250, 2500, 5000, 10000)


def bench(
    sizes: Sequence[int] = DEFAULT_SIZES,
    repetitions: int = 1,
    avg_degree: int = 5,
    t_max: int = 20,
    n_rules: int = 10,
    seed: int = 0,
    model: str = "erdos",
    workers: Optional[int] = None,
) -> Dict[str, object]:
    """Run the engine on generated instances of each size.

    Repetition ``r`` of every size uses seed ``seed + r``, so the report is
    reproducible apart from timings.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    rows: List[Dict[str, object]] = []
    prev_median = None
    prev_edges = None
    for n in sizes:
        runs = []
        for rep in range(repetitions):
            p = generate_instance(seed + rep, n, avg_degree, t_max, n_rules, model)
            t0 = time.perf_counter()
            result = minimal_model(p, workers=workers, verify=False)
            wall = time.perf_counter() - t0
            bound = iteration_bound(p)
            runs.append(
                {
                    "seed": seed + rep,
                    "status": result.status,
                    "iterations": result.stats.iterations,
                    "tightenings": result.stats.tightenings,
                    "program_size": p.size,
                    "max_in_degree": p.network.max_in_degree,
                    "edges": len(p.network.edges),
                    "bound": bound,
                    "within_bound": result.stats.iterations <= bound,
                    "wall_time": round(wall, 4),
                }
            )
        times = [r["wall_time"] for r in runs]
        median = statistics.median(times)
        edges = runs[0]["edges"]
        row = {
            "nodes": n,
            "edges": edges,
            "runs": runs,
            "wall_time": {"min": min(times), "median": median, "max": max(times)},
            "growth_factor": None if prev_median in (None, 0) else round(median / prev_median, 3),
            "edge_factor": None if prev_edges in (None, 0) else round(edges / prev_edges, 3),
        }
        rows.append(row)
        prev_median, prev_edges = median, edges
    return {
        "parameters": {
            "avg_degree": avg_degree,
            "t_max": t_max,
            "n_rules": n_rules,
            "seed": seed,
            "model": model,
            "repetitions": repetitions,
        },
        "sizes": rows,
        "all_within_bound": all(r["within_bound"] for row in rows for r in row["runs"]),
    }
