"""Pareto comparison of aggregated strategy outcomes for a measure pair.

Both measures are treated as minimized. The implementation partitions by a
sort-and-scan; tests cross-check it against an exhaustive pairwise domination
oracle.
"""

from dataclasses import dataclass

import numpy as np

from .errors import MissingMeasure


@dataclass
class StrategyOutcome:
    """Mean measure values for one strategy in one scenario family."""

    strategy_id: str
    measures: dict


@dataclass
class ParetoResult:
    optimal: list
    dominated: list
    frontier: np.ndarray  # staircase polyline through the optimal points


def pareto_front(outcomes, m1, m2):
    """Split outcomes into Pareto-optimal and dominated sets for (m1, m2).

    An outcome is dominated iff some other outcome is no worse in both
    measures and strictly better in at least one; exactly equal pairs are all
    optimal. The frontier polyline is sorted by m1 with staircase corners so
    the dominated half-plane is exact.
    """
    if not outcomes:
        raise ValueError("need at least one outcome")
    vals = np.empty((len(outcomes), 2))
    for i, o in enumerate(outcomes):
        for k, name in enumerate((m1, m2)):
            if name not in o.measures or o.measures[name] is None or not np.isfinite(
                o.measures[name]
            ):
                raise MissingMeasure(f"outcome {o.strategy_id!r} lacks measure {name!r}")
            vals[i, k] = o.measures[name]
    order = np.lexsort((vals[:, 1], vals[:, 0]))
    optimal_mask = np.zeros(len(outcomes), dtype=bool)
    best_before = np.inf  # min m2 among strictly smaller m1
    i = 0
    while i < len(order):
        j = i
        while j < len(order) and vals[order[j], 0] == vals[order[i], 0]:
            j += 1
        group = order[i:j]
        group_min = vals[group, 1].min()
        if group_min < best_before:
            for g in group:
                if vals[g, 1] == group_min:
                    optimal_mask[g] = True
        best_before = min(best_before, group_min)
        i = j
    optimal = [o for o, m in zip(outcomes, optimal_mask) if m]
    dominated = [o for o, m in zip(outcomes, optimal_mask) if not m]
    frontier = _staircase(vals[optimal_mask])
    return ParetoResult(optimal=optimal, dominated=dominated, frontier=frontier)


def _staircase(points):
    if points.shape[0] == 0:
        return points.copy()
    pts = np.unique(points, axis=0)  # sorted by (m1, m2)
    out = [pts[0]]
    for p in pts[1:]:
        prev = out[-1]
        if p[0] != prev[0]:
            out.append(np.array([p[0], prev[1]]))
        out.append(p)
    return np.asarray(out)


def write_frontier_csv(path, outcomes, m1, m2, result):
    optimal_ids = {id(o) for o in result.optimal}
    with open(path, "w") as fh:
        fh.write(f"strategy_id,{m1},{m2},optimal\n")
        for o in outcomes:
            flag = 1 if id(o) in optimal_ids else 0
            fh.write(
                f"{o.strategy_id},{format(o.measures[m1], '.10g')},"
                f"{format(o.measures[m2], '.10g')},{flag}\n"
            )
