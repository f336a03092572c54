"""LH: greedy labeling construction, one route at a time."""
from __future__ import annotations

import time
from typing import Optional

from .compartment import find_loading
from .config import SolverConfig
from .model import Instance, Route, Solution, validate_route
from .pricing import Label, _Context, route_from_visits


def _can_close(ctx: _Context, inst: Instance, lab: Label) -> bool:
    i, sink = lab.node, inst.sink
    return bool(ctx.timing(lab, sink, inst.time[i][sink], inst.distance[i][sink]))


def _grow_route(inst: Instance, ctx: _Context, unassigned: set[int]) -> list[int]:
    """Extend from the origin by cheapest arc until nothing fits."""
    lab = ctx.initial_label(0)
    visits: list[int] = []
    while True:
        best = None
        for j in sorted(unassigned):
            if lab.visited >> j & 1:
                continue
            if lab.loads[0] + ctx.demand[j] > ctx.L:
                continue
            i = lab.node
            for tm in ctx.timing(lab, j, inst.time[i][j], inst.distance[i][j]):
                child = ctx.make(lab, j, 0, tm, -1)
                if not _can_close(ctx, inst, child):
                    continue
                key = (inst.cost[i][j], child.time, j)
                if best is None or key < best[0]:
                    best = (key, child)
                break
        if best is None:
            return visits
        child = best[1]
        # loading is checked exactly on the whole client set
        if find_loading(inst, [*visits, child.node]) is None:
            unassigned = unassigned - {child.node}
            continue
        visits.append(child.node)
        lab = child


def solve_lh(inst: Instance, config: Optional[SolverConfig] = None) -> Solution:
    """Greedy construction: minimal arc cost first, ties by earliest service start."""
    t0 = time.perf_counter()
    ctx = _Context(inst, relaxed=True)
    for c in range(1, inst.n + 1):
        if route_from_visits(inst, [c]) is None:
            return Solution([], 0, float("inf"), "infeasible", time.perf_counter() - t0,
                            {"client": c}, message=f"client {c} admits no feasible route")
    unassigned = set(range(1, inst.n + 1))
    routes: list[Route] = []
    while unassigned:
        visits = _grow_route(inst, ctx, unassigned)
        route = route_from_visits(inst, visits) if visits else None
        if route is None:
            # cannot happen with a consistent scheduler; fall back to a singleton
            c = min(unassigned)
            route = route_from_visits(inst, [c])
        routes.append(route)
        unassigned -= set(route.visits)
    for r in routes:
        v = validate_route(inst, r)
        if v is not None:
            raise RuntimeError(f"LH produced an invalid route {r.visits}: {v}")
    obj = sum(r.cost for r in routes)
    return Solution(routes, obj, float("-inf"), "feasible", time.perf_counter() - t0,
                    {"routes": len(routes)})
