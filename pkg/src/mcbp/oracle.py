"""Brute-force ground truth for tiny instances."""
from __future__ import annotations

import itertools
import time
from typing import Optional, Sequence

from .compartment import AssignmentProblem
from .model import Instance, Route, Solution, route_cost, validate_route

MAX_CLIENTS = 10
MAX_NODES = 10**7


class OracleLimitError(RuntimeError):
    pass


def brute_force_assignment(p: AssignmentProblem) -> Optional[tuple[int, ...]]:
    """Try every compartment vector in lexicographic order."""
    k, n_comp = len(p.clients), len(p.capacities)
    for assign in itertools.product(range(n_comp), repeat=k):
        if _assignment_ok(p, assign):
            return assign
    return None


def _assignment_ok(p: AssignmentProblem, assign) -> bool:
    n_comp = len(p.capacities)
    load = [0] * n_comp
    count = [0] * n_comp
    for i, m in enumerate(assign):
        if not p.allowed[i][m]:
            return False
        load[m] += p.clients[i][1]
        count[m] += 1
    if sum(load) > p.total_capacity:
        return False
    for m in range(n_comp):
        if load[m] > p.capacities[m]:
            return False
        if p.client_caps[m] is not None and count[m] > p.client_caps[m]:
            return False
    for a in range(len(assign)):
        for b in range(a + 1, len(assign)):
            if assign[a] == assign[b] and not p.compatible[a][b]:
                return False
    return True


def _schedules(inst: Instance, states, prev: int, nxt: int, all_windows: bool):
    """Every way to drive prev -> nxt from each partial schedule in ``states``.

    A state is (service start, day, daily work, daily drive, total work,
    window choices, break flags).
    """
    r = inst.rules
    svc = inst.clients[prev - 1].service_time if prev else 0
    leg_t, leg_d = inst.time[prev][nxt], inst.distance[prev][nxt]
    out = []
    for (t, day, work, drive, total, wins, brks) in states:
        for brk in (0, 1):
            nday = day + brk
            if nday > r.horizon_days - 1:
                continue
            arrive = t + svc + leg_t + r.break_length * brk
            if brk:
                nwork, ndrive = (leg_t, leg_d) if r.count_postbreak_leg else (0, 0)
            else:
                nwork, ndrive = work + leg_t + svc, drive + leg_d
            ntotal = total + leg_t + svc
            if nwork > r.max_daily_work or ndrive > r.max_daily_distance:
                continue
            if r.max_total_work is not None and ntotal > r.max_total_work:
                continue
            if nxt == inst.sink:
                out.append((arrive, nday, nwork, ndrive, ntotal, wins, brks + (brk,)))
                continue
            for p, w in enumerate(inst.clients[nxt - 1].windows):
                if arrive <= w.end:
                    out.append((max(arrive, w.start), nday, nwork, ndrive, ntotal, wins + (p,), brks + (brk,)))
                    if not all_windows:
                        break
    return out


def enumerate_routes(inst: Instance, max_len: Optional[int] = None, all_windows: bool = False) -> list[Route]:
    """Every feasible elementary route (one schedule each), up to ``max_len`` clients.

    Visit sequences are grown depth first; a prefix is abandoned once it has
    no feasible schedule or no feasible loading, both of which are monotone
    along a sequence.  Only the earliest reachable window is tried unless
    ``all_windows`` is set (later windows only delay service).
    """
    n = inst.n
    if n > MAX_CLIENTS:
        raise OracleLimitError(f"oracle limited to {MAX_CLIENTS} clients, got {n}")
    max_len = n if max_len is None else max_len
    comps = inst.vehicle.compartments
    n_comp = len(comps)
    routes: list[Route] = []
    nodes = 0
    root = [(0, 0, 0, 0, 0, (), ())]

    def loadings(assigns, seq, c):
        out = []
        q = inst.clients[c - 1].demand
        for loads, members, assign in assigns:
            if sum(loads) + q > inst.vehicle.total_capacity:
                continue
            for m in range(n_comp):
                if not inst.vehicle.item_compartment[c - 1][m] or loads[m] + q > comps[m].capacity:
                    continue
                if comps[m].client_cap is not None and len(members[m]) >= comps[m].client_cap:
                    continue
                if any(not inst.item_item[c - 1][o - 1] for o in members[m]):
                    continue
                nl = loads[:m] + (loads[m] + q,) + loads[m + 1:]
                nm = members[:m] + (members[m] + (c,),) + members[m + 1:]
                out.append((nl, nm, assign + (m,)))
        return out

    def dfs(seq, states, assigns):
        nonlocal nodes
        nodes += 1
        if nodes > MAX_NODES:
            raise OracleLimitError("route enumeration exceeded the node budget")
        last = seq[-1] if seq else 0
        if seq:
            closing = _schedules(inst, states, last, inst.sink, False)
            if closing:
                t, day, work, drive, total, wins, brks = closing[0]
                arrivals = _replay_arrivals(inst, seq, wins, brks)
                route = Route(tuple(seq), arrivals, wins, brks, assigns[0][2], route_cost(inst, seq))
                if validate_route(inst, route) is None:
                    routes.append(route)
        if len(seq) >= max_len:
            return
        for c in range(1, n + 1):
            if c in seq:
                continue
            nstates = _schedules(inst, states, last, c, all_windows)
            if not nstates:
                continue
            nassign = loadings(assigns, seq, c)
            if not nassign:
                continue
            dfs(seq + (c,), nstates, nassign)

    dfs((), root, [((0,) * n_comp, ((),) * n_comp, ())])
    return routes


def _replay_arrivals(inst: Instance, seq, wins, brks) -> tuple[int, ...]:
    r = inst.rules
    t, prev, out = 0, 0, []
    for idx, c in enumerate(seq):
        svc = inst.clients[prev - 1].service_time if prev else 0
        arrive = t + svc + inst.time[prev][c] + r.break_length * brks[idx]
        t = max(arrive, inst.clients[c - 1].windows[wins[idx]].start)
        out.append(t)
        prev = c
    return tuple(out)


def optimal_partition(routes: Sequence[Route], n_clients: int) -> tuple[Optional[int], list[Route]]:
    """Exact minimum-cost partition of clients ``1..n`` by dynamic programming.

    ``best[S]`` is the cheapest way to cover exactly the client set ``S``;
    each step covers the lowest-numbered uncovered client.  Returns
    ``(None, [])`` if some client cannot be covered.
    """
    if n_clients > MAX_CLIENTS + 10:
        raise OracleLimitError("too many clients for the bitmask DP")
    full = (1 << n_clients) - 1
    cheapest: dict[int, Route] = {}
    for r in routes:
        mask = r.incidence >> 1
        if r.visits and (mask not in cheapest or r.cost < cheapest[mask].cost):
            cheapest[mask] = r
    by_low: dict[int, list[tuple[int, Route]]] = {}
    for mask, r in cheapest.items():
        low = (mask & -mask).bit_length() - 1
        by_low.setdefault(low, []).append((mask, r))
    INF = float("inf")
    best = [INF] * (full + 1)
    choice: list[Optional[tuple[int, Route]]] = [None] * (full + 1)
    best[0] = 0
    for S in range(1, full + 1):
        low = (S & -S).bit_length() - 1
        for mask, r in by_low.get(low, ()):
            if mask & ~S:
                continue
            v = best[S & ~mask] + r.cost
            if v < best[S]:
                best[S] = v
                choice[S] = (mask, r)
    if best[full] == INF:
        return None, []
    picked, S = [], full
    while S:
        mask, r = choice[S]
        picked.append(r)
        S &= ~mask
    return int(best[full]), picked


def oracle_solve(inst: Instance) -> Solution:
    t0 = time.perf_counter()
    routes = enumerate_routes(inst)
    obj, picked = optimal_partition(routes, inst.n)
    wall = time.perf_counter() - t0
    if obj is None:
        return Solution([], 0, float("inf"), "infeasible", wall, {"routes": len(routes)})
    return Solution(sorted(picked, key=lambda r: r.visits), obj, obj, "optimal", wall, {"routes": len(routes)})
