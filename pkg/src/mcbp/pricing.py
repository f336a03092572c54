"""Label-setting pricing for elementary routes with daily driver limits.

Labels carry node, service start time, reduced cost, day, visited set,
per-compartment loads and member sets, and the daily work and driving
totals.  Extensions pick the earliest reachable window, a compartment and a
break flag; labels are pruned with same-day, inter-day or epsilon-relaxed
dominance.
"""
from __future__ import annotations

import heapq
from bisect import bisect_left, bisect_right
import time
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .compartment import find_loading
from .lp import BranchState, DualVector
from .model import Instance, Route, route_cost

RC_EPS = 1e-6


class ExtensionChoice(NamedTuple):
    take_break: int
    window_index: int
    compartment: int  # -1 when compartments are not tracked (or at the sink)


class Infeasible(NamedTuple):
    reason: str


class Label:
    __slots__ = ("node", "time", "cost", "day", "visited", "loads", "members",
                 "work", "drive", "total", "parent", "choice", "alive", "unreach")

    def __init__(self, node, time, cost, day, visited, loads, members, work, drive,
                 total=0, parent=None, choice=None):
        self.node = node
        self.time = time
        self.cost = cost
        self.day = day
        self.visited = visited
        self.loads = loads
        self.members = members
        self.work = work
        self.drive = drive
        self.total = total
        self.parent = parent
        self.choice = choice
        self.alive = True
        # visited clients plus clients no extension can reach any more
        self.unreach = visited

    def __repr__(self):
        return (f"Label(node={self.node}, t={self.time}, c={self.cost}, d={self.day}, "
                f"S={bin(self.visited)}, l={self.loads}, g={self.work}, o={self.drive})")

    def path(self) -> list["Label"]:
        out, lab = [], self
        while lab is not None:
            out.append(lab)
            lab = lab.parent
        return out[::-1]


@dataclass(frozen=True)
class Epsilons:
    time: float = 0.0
    cost: float = 0.0
    work: float = 0.0
    drive: float = 0.0

    @classmethod
    def default_for(cls, inst: Instance, frac: float = 0.01) -> "Epsilons":
        size = inst.n + 2
        arcs = [inst.cost[i][j] for i in range(size) for j in range(size) if i != j]
        mean = sum(arcs) / len(arcs) if arcs else 0.0
        r = inst.rules
        return cls(frac * r.max_daily_work, frac * mean, frac * r.max_daily_work, frac * r.max_daily_distance)


class PricingGraph:
    """Reduced arc costs plus the set of usable arcs."""

    def __init__(self, inst: Instance, duals: DualVector, enabled: set, infeasible: bool = False):
        self.inst = inst
        self.duals = duals
        self.enabled = enabled
        self.infeasible = infeasible
        pad = duals.padded()
        self.rcost = {(i, j): inst.cost[i][j] - pad[i] for (i, j) in enabled}

    def successors(self, i: int) -> list[int]:
        return sorted(j for (a, j) in self.enabled if a == i)

    def copy_with(self, enabled: set) -> "PricingGraph":
        return PricingGraph(self.inst, self.duals, enabled, self.infeasible)


def build_pricing_graph(inst: Instance, duals: DualVector, branching: Optional[BranchState] = None,
                        active: Optional[int] = None) -> PricingGraph:
    """Arc set after branching decisions, restricted to ``active`` clients.

    A forced client arc (i, j) removes every other arc out of i and every
    other arc into j.  Depot endpoints are not restricted: forcing (0, j)
    only means j is visited first on its route.
    """
    if duals.n != inst.n:
        raise ValueError("dual vector dimension does not match the instance")
    n, sink = inst.n, inst.sink
    branching = branching or BranchState()
    nodes = [c for c in range(1, n + 1) if active is None or active >> c & 1]
    sources = [0, *nodes]
    targets = [*nodes, sink]
    enabled = {(i, j) for i in sources for j in targets if i != j}
    enabled.discard((0, sink))
    enabled.add((0, sink))
    enabled -= set(branching.forbidden_arcs)
    succ, pred = {}, {}
    infeasible = False
    live = set(nodes) | {0, sink}
    forced = [(i, j) for (i, j) in branching.forced_arcs if i in live and j in live]
    for i, j in forced:
        if 1 <= i <= n:
            if succ.setdefault(i, j) != j:
                infeasible = True
        if 1 <= j <= n:
            if pred.setdefault(j, i) != i:
                infeasible = True
    for i, j in succ.items():
        enabled = {(a, b) for (a, b) in enabled if a != i or b == j}
    for j, i in pred.items():
        enabled = {(a, b) for (a, b) in enabled if b != j or a == i}
    # cycles among forced client arcs
    for start in succ:
        seen, cur = {start}, start
        while cur in succ and 1 <= succ[cur] <= n:
            cur = succ[cur]
            if cur in seen:
                infeasible = True
                break
            seen.add(cur)
    for i, j in forced:
        if (i, j) not in enabled:
            infeasible = True
    return PricingGraph(inst, duals, enabled, infeasible)


def arc_filter(inst: Instance, graph: PricingGraph) -> PricingGraph:
    """Drop client-to-client arcs that no feasible route can use."""
    L = inst.vehicle.total_capacity
    keep = set()
    pair_ok: dict = {}
    for (i, j) in graph.enabled:
        if 1 <= i <= inst.n and 1 <= j <= inst.n:
            ci, cj = inst.clients[i - 1], inst.clients[j - 1]
            if ci.demand + cj.demand > L:
                continue
            key = (min(i, j), max(i, j))
            if key not in pair_ok:
                pair_ok[key] = find_loading(inst, key) is not None
            if not pair_ok[key]:
                continue
            if ci.windows[0].start + ci.service_time + inst.time[i][j] > cj.windows[-1].end:
                continue
        keep.add((i, j))
    return graph.copy_with(keep)


class _Context:
    """Per-instance arrays used in the inner loop."""

    def __init__(self, inst: Instance, relaxed: bool, by_set: bool = False, cache: Optional[dict] = None):
        self.inst = inst
        n = inst.n
        self.n = n
        self.sink = inst.sink
        self.relaxed = relaxed
        # by_set: one total load, members[0] is the visited set, and loading
        # is decided exactly per client set (feasibility is closed under subsets)
        self.by_set = by_set and not relaxed
        self.loadable = {} if cache is None else cache
        self.demand = [inst.demand(i) for i in range(n + 2)]
        self.service = [inst.service(i) for i in range(n + 2)]
        self.win_start = [[]] + [[w.start for w in c.windows] for c in inst.clients] + [[]]
        self.win_end = [[]] + [[w.end for w in c.windows] for c in inst.clients] + [[]]
        r = inst.rules
        self.T, self.DIST, self.B = r.max_daily_work, r.max_daily_distance, r.break_length
        self.max_day = r.horizon_days - 1
        self.max_total = r.max_total_work
        self.postbreak = r.count_postbreak_leg
        self.L = inst.vehicle.total_capacity
        comps = inst.vehicle.compartments
        self.M = len(comps)
        self.cap = [c.capacity for c in comps]
        self.client_cap = [c.client_cap for c in comps]
        self.incompat = [0] * (n + 2)
        for i in range(1, n + 1):
            row = inst.item_item[i - 1]
            self.incompat[i] = sum(1 << j for j in range(1, n + 1) if not row[j - 1])
        self.allowed = [()] + [
            tuple(m for m in range(self.M) if inst.vehicle.item_compartment[i - 1][m]) for i in range(1, n + 1)
        ] + [()]
        b_cols = [tuple(inst.vehicle.item_compartment[i][m] for i in range(n)) for m in range(self.M)]
        sig = [(self.cap[m], self.client_cap[m], b_cols[m]) for m in range(self.M)]
        # earlier compartments interchangeable with m (same capacity, cap and compatibility)
        self.twins_before = [tuple(k for k in range(m) if sig[k] == sig[m]) for m in range(self.M)]

    def initial_label(self, fixed_cost: float) -> Label:
        if self.relaxed:
            return Label(0, 0, fixed_cost, 0, 0, (0,), (), 0, 0)
        if self.by_set:
            return Label(0, 0, fixed_cost, 0, 0, (0,), (0,), 0, 0)
        return Label(0, 0, fixed_cost, 0, 0, (0,) * self.M, (0,) * self.M, 0, 0)

    def timing(self, lab: Label, j: int, tij: int, dij: int):
        """Yield (break, window, time, work, drive, total) for feasible timings."""
        i = lab.node
        base = lab.time + self.service[i] + tij
        svc_leg = tij + self.service[i]
        total = lab.total + svc_leg
        if self.max_total is not None and total > self.max_total:
            return []
        out = []
        for brk in (0, 1):
            if brk:
                day = lab.day + 1
                if day > self.max_day:
                    break
                arrive = base + self.B
                if self.postbreak:
                    work, drive = tij, dij
                else:
                    work = drive = 0
            else:
                arrive = base
                work = lab.work + svc_leg
                drive = lab.drive + dij
            if work > self.T or drive > self.DIST:
                continue
            if j == self.sink:
                p, t = -1, arrive
            else:
                ends = self.win_end[j]
                p = 0
                while p < len(ends) and ends[p] < arrive:
                    p += 1
                if p == len(ends):
                    continue
                t = max(arrive, self.win_start[j][p])
            if brk and out and out[0][2] <= t - self.B:
                # the no-break extension dominates this one across days
                continue
            out.append((brk, p, t, work, drive, total))
        return out

    def compartments(self, lab: Label, j: int) -> list[int]:
        q = self.demand[j]
        if self.relaxed:
            return [-1] if lab.loads[0] + q <= self.L else []
        if self.by_set:
            if lab.loads[0] + q > self.L:
                return []
            key = lab.visited | 1 << j
            if key not in self.loadable:
                self.loadable[key] = find_loading(self.inst, _members(key))
            return [-1] if self.loadable[key] is not None else []
        if sum(lab.loads) + q > self.L:
            return []
        out = []
        bad = self.incompat[j]
        for m in self.allowed[j]:
            if lab.loads[m] + q > self.cap[m]:
                continue
            mem = lab.members[m]
            if mem & bad:
                continue
            if mem == 0 and any(lab.members[k] == 0 for k in self.twins_before[m]):
                continue
            cc = self.client_cap[m]
            if cc is not None and bin(mem).count("1") >= cc:
                continue
            out.append(m)
        return out

    def make(self, lab: Label, j: int, rc: float, timing, m: int) -> Label:
        brk, p, t, work, drive, total = timing
        if j == self.sink:
            return Label(j, t, lab.cost + rc, lab.day + brk, lab.visited, lab.loads, lab.members,
                         work, drive, total, lab, ExtensionChoice(brk, p, -1))
        q = self.demand[j]
        if self.relaxed:
            loads, members = (lab.loads[0] + q,), ()
        elif self.by_set:
            loads, members = (lab.loads[0] + q,), (lab.members[0] | 1 << j,)
        else:
            loads = lab.loads[:m] + (lab.loads[m] + q,) + lab.loads[m + 1:]
            members = lab.members[:m] + (lab.members[m] | 1 << j,) + lab.members[m + 1:]
        return Label(j, t, lab.cost + rc, lab.day + brk, lab.visited | 1 << j, loads, members,
                     work, drive, total, lab, ExtensionChoice(brk, p, m))


def _members(mask: int) -> list[int]:
    out, k = [], 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


def _context(inst: Instance, relaxed: bool) -> _Context:
    return _Context(inst, relaxed)


def initial_label(inst: Instance, relaxed: bool = False, fixed_cost: Optional[float] = None) -> Label:
    ctx = _context(inst, relaxed)
    return ctx.initial_label(inst.vehicle.fixed_cost if fixed_cost is None else fixed_cost)


def enumerate_extensions(inst: Instance, label: Label, j: int, relaxed: bool = False) -> list[ExtensionChoice]:
    """All non-redundant (break, window, compartment) choices for arc (label.node, j)."""
    ctx = _context(inst, relaxed)
    i = label.node
    if j != inst.sink and label.visited >> j & 1:
        return []
    timings = ctx.timing(label, j, inst.time[i][j], inst.distance[i][j])
    if j == inst.sink:
        return [ExtensionChoice(tm[0], -1, -1) for tm in timings]
    comps = ctx.compartments(label, j)
    return [ExtensionChoice(tm[0], tm[1], m) for tm in timings for m in comps]


def extend(inst: Instance, label: Label, j: int, choice: ExtensionChoice, rcost: Optional[float] = None,
           relaxed: bool = False) -> Label | Infeasible:
    """Apply the resource extension along (label.node, j) for one choice.

    ``choice.window_index`` is ignored in favour of the earliest reachable
    window.  ``rcost`` is the arc's reduced cost (defaults to its cost).
    """
    ctx = _context(inst, relaxed)
    i = label.node
    if j != inst.sink and label.visited >> j & 1:
        return Infeasible("elementarity")
    tij, dij = inst.time[i][j], inst.distance[i][j]
    brk = choice.take_break
    if brk and label.day + 1 > ctx.max_day:
        return Infeasible("horizon")
    base = label.time + ctx.service[i] + tij
    arrive = base + ctx.B * brk
    leg = tij + ctx.service[i]
    if brk:
        work, drive = (tij, dij) if ctx.postbreak else (0, 0)
    else:
        work, drive = label.work + leg, label.drive + dij
    if work > ctx.T:
        return Infeasible("daily working time")
    if drive > ctx.DIST:
        return Infeasible("daily driving distance")
    total = label.total + leg
    if ctx.max_total is not None and total > ctx.max_total:
        return Infeasible("total working time")
    if j == inst.sink:
        p, t = -1, arrive
    else:
        ends = ctx.win_end[j]
        p = next((k for k, e in enumerate(ends) if e >= arrive), None)
        if p is None:
            return Infeasible("time window")
        t = max(arrive, ctx.win_start[j][p])
        m = choice.compartment
        q = ctx.demand[j]
        if relaxed:
            if label.loads[0] + q > ctx.L:
                return Infeasible("vehicle capacity")
        else:
            if not 0 <= m < ctx.M or not inst.vehicle.item_compartment[j - 1][m]:
                return Infeasible("item-to-compartment")
            if label.loads[m] + q > ctx.cap[m]:
                return Infeasible("compartment capacity")
            if sum(label.loads) + q > ctx.L:
                return Infeasible("vehicle capacity")
            if label.members[m] & ctx.incompat[j]:
                return Infeasible("item-to-item")
            cc = ctx.client_cap[m]
            if cc is not None and bin(label.members[m]).count("1") >= cc:
                return Infeasible("compartment client cap")
    rc = inst.cost[i][j] if rcost is None else rcost
    return ctx.make(label, j, rc, (brk, p, t, work, drive, total), choice.compartment)


def _subset_members(a: tuple, b: tuple) -> bool:
    for x, y in zip(a, b):
        if x & ~y:
            return False
    return True


def _le_loads(a: tuple, b: tuple) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def dominates_same_day(l1: Label, l2: Label) -> bool:
    return (l1.node == l2.node and l1.time <= l2.time and l1.cost <= l2.cost and l1.day == l2.day
            and not l1.visited & ~l2.visited and _le_loads(l1.loads, l2.loads)
            and _subset_members(l1.members, l2.members) and l1.work <= l2.work
            and l1.drive <= l2.drive and l1.total <= l2.total)


def dominates_inter_day(l1: Label, l2: Label, break_length: int) -> bool:
    return (l1.node == l2.node and l1.time <= l2.time - break_length and l1.cost <= l2.cost
            and l1.day < l2.day and not l1.visited & ~l2.visited and _le_loads(l1.loads, l2.loads)
            and _subset_members(l1.members, l2.members) and l1.total <= l2.total)


def dominates_aggressive(l1: Label, l2: Label, eps: Epsilons) -> bool:
    return (l1.node == l2.node and l1.time <= l2.time + eps.time and l1.cost <= l2.cost + eps.cost
            and l1.day == l2.day and not l1.visited & ~l2.visited and _le_loads(l1.loads, l2.loads)
            and _subset_members(l1.members, l2.members) and l1.work <= l2.work + eps.work
            and l1.drive <= l2.drive + eps.drive and l1.total <= l2.total)


def dominates_aggressive_inter_day(l1: Label, l2: Label, break_length: int, eps: Epsilons) -> bool:
    return (l1.node == l2.node and l1.time <= l2.time - break_length + eps.time
            and l1.cost <= l2.cost + eps.cost and l1.day < l2.day and not l1.visited & ~l2.visited
            and _le_loads(l1.loads, l2.loads) and _subset_members(l1.members, l2.members)
            and l1.total <= l2.total)


def label_to_route(inst: Instance, sink_label: Label) -> Route:
    labels = sink_label.path()
    visits, arrivals, windows, breaks, loading = [], [], [], [], []
    for lab in labels[1:]:
        breaks.append(lab.choice.take_break)
        if lab.node != inst.sink:
            visits.append(lab.node)
            arrivals.append(lab.time)
            windows.append(lab.choice.window_index)
            loading.append(lab.choice.compartment)
    tracked = all(m >= 0 for m in loading)
    return Route(tuple(visits), tuple(arrivals), tuple(windows), tuple(breaks),
                 tuple(loading) if tracked else None, route_cost(inst, visits), float(sink_label.cost))


class _Bucket:
    """Labels of one node and day, sorted by reduced cost; removal is lazy."""

    __slots__ = ("costs", "labels", "dead")

    def __init__(self):
        self.costs: list = []
        self.labels: list = []
        self.dead = 0

    def add(self, lab: Label) -> None:
        k = bisect_right(self.costs, lab.cost)
        self.costs.insert(k, lab.cost)
        self.labels.insert(k, lab)

    def compact(self) -> None:
        if self.dead > 16 and 2 * self.dead > len(self.labels):
            keep = [lab for lab in self.labels if lab.alive]
            self.labels = keep
            self.costs = [lab.cost for lab in keep]
            self.dead = 0


def _completion_items(graph: PricingGraph, ctx: _Context, duals) -> list[tuple[int, int, float]]:
    """(client, demand, value) sorted by value per unit of demand, value > 0.

    A client entered by any arc costs at least its cheapest enabled incoming
    arc, so ``dual - cheapest_in`` bounds what visiting it can save.
    """
    inst = ctx.inst
    cheapest: dict[int, int] = {}
    for (i, j) in graph.enabled:
        c = inst.cost[i][j]
        if j not in cheapest or c < cheapest[j]:
            cheapest[j] = c
    items = []
    for j in range(1, ctx.n + 1):
        if j in cheapest:
            v = duals.node(j) - cheapest[j]
            if v > 0:
                items.append((j, ctx.demand[j], v))
    items.sort(key=lambda t: (-t[2] / max(t[1], 1), t[0]))
    return items


def solve_pricing(
    graph: PricingGraph,
    inst: Instance,
    mode: str = "exact",
    limit: int = 200,
    *,
    relaxed: bool = False,
    same_day: bool = True,
    inter_day: bool = True,
    eps: Optional[Epsilons] = None,
    stats: Optional[dict] = None,
    threshold: float = -RC_EPS,
    max_labels: Optional[int] = None,
    deadline: Optional[float] = None,
    bucket_cap: Optional[int] = None,
    bound_pruning: bool = True,
    loading: str = "track",
    loading_cache: Optional[dict] = None,
) -> list[Route]:
    """Return up to ``limit`` routes with reduced cost below ``threshold``.

    ``mode`` is ``exact``, ``aggressive`` or ``relaxed_compartments`` (exact
    dominance, compartments ignored apart from the vehicle total).  In
    exact mode an empty result proves that no feasible route has negative
    reduced cost.  Routes are sorted by reduced cost, one per client set.

    Labels whose completion bound (a fractional knapsack over the remaining
    capacity) cannot reach ``threshold`` are dropped; ``stats["min_rcost"]``
    is then exact when below ``threshold`` and reported as ``threshold``
    otherwise, which is still a valid lower bound.  ``bucket_cap`` keeps only
    the cheapest labels per node and day (heuristic, aggressive mode only).
    ``deadline`` is a ``time.monotonic()`` value; the search stops early
    (and ``stats["truncated"]`` is set) once it passes.

    ``loading="track"`` carries per-compartment loads and members in the
    labels; ``loading="set"`` carries only the total and asks the exact
    checker whether each client set can be loaded (memoized in
    ``loading_cache``).  Both are exact; ``set`` avoids one label per
    compartment choice and returns routes without a loading.
    """
    if loading not in ("track", "set"):
        raise ValueError(f"unknown loading mode {loading!r}")
    if mode == "relaxed_compartments":
        relaxed, mode = True, "exact"
    if mode not in ("exact", "aggressive"):
        raise ValueError(f"unknown pricing mode {mode!r}")
    if graph.infeasible:
        if stats is not None:
            stats.update(labels=0, kept=0, min_rcost=None, truncated=False)
        return []
    ctx = _Context(inst, relaxed, loading == "set", loading_cache)
    aggressive = mode == "aggressive"
    if aggressive and eps is None:
        eps = Epsilons.default_for(inst)
    if not aggressive:
        bucket_cap = None
    B = ctx.B
    sink = ctx.sink
    succ: dict[int, list] = {}
    for (i, j), rc in graph.rcost.items():
        succ.setdefault(i, []).append((j, rc, inst.time[i][j], inst.distance[i][j]))
    for lst in succ.values():
        lst.sort()

    if aggressive:
        e_t, e_c, e_g, e_o = eps.time, eps.cost, eps.work, eps.drive
    else:
        e_t = e_c = e_g = e_o = 0

    prune = bound_pruning and threshold <= 0 and threshold != float("-inf")
    if prune:
        items = _completion_items(graph, ctx, graph.duals)
        last_end = [ends[-1] if ends else 0 for ends in ctx.win_end]
        svc, tm_mat, L = ctx.service, inst.time, ctx.L
        pad = graph.duals.padded()

        def hopeless(lab: Label) -> bool:
            room = L - sum(lab.loads)
            i = lab.node
            # the dual of the current node is collected on its outgoing arc
            gain = max(pad[i], 0.0)
            ready = lab.time + svc[i]
            row = tm_mat[i]
            visited = lab.unreach
            for j, q, v in items:
                if visited >> j & 1 or ready + row[j] > last_end[j]:
                    continue
                if q <= room:
                    gain += v
                    room -= q
                else:
                    gain += v * room / q
                    break
            return lab.cost - gain >= threshold

    targets = sorted({j for (_, j) in graph.enabled if j != sink})
    reach_end = [ends[-1] if ends else 0 for ends in ctx.win_end]
    demand, service, L_tot = ctx.demand, ctx.service, ctx.L
    # clients that no arc enters are unreachable from the start
    blocked = 0
    for j in range(1, ctx.n + 1):
        if j not in targets:
            blocked |= 1 << j

    def mark_unreachable(lab: Label) -> None:
        u = lab.unreach | blocked
        room = L_tot - sum(lab.loads)
        ready = lab.time + service[lab.node]
        row = inst.time[lab.node]
        for k in targets:
            if not u >> k & 1 and (demand[k] > room or ready + row[k] > reach_end[k]):
                u |= 1 << k
        lab.unreach = u

    buckets: dict[int, dict[int, _Bucket]] = {}
    heap: list = []
    counter = 0
    start = ctx.initial_label(inst.vehicle.fixed_cost)
    mark_unreachable(start)
    heapq.heappush(heap, (0, 0, counter, start))
    done: dict[int, Label] = {}
    generated = kept = pruned = 0

    def insert(lab: Label) -> bool:
        per_node = buckets.get(lab.node)
        if per_node is None:
            per_node = buckets[lab.node] = {}
        d, c, lu, lt = lab.day, lab.cost, lab.unreach, lab.time
        lw, ldr, ltot, lloads, lmem = lab.work, lab.drive, lab.total, lab.loads, lab.members
        bk = per_node.get(d)
        # buckets are sorted by cost, so the cost test is the bisect bound;
        # the remaining tests are the same-day and inter-day rules inlined
        if same_day and bk is not None:
            labs = bk.labels
            for k in range(bisect_right(bk.costs, c + e_c)):
                o = labs[k]
                if (o.alive and not o.unreach & ~lu and o.time <= lt + e_t and o.work <= lw + e_g
                        and o.drive <= ldr + e_o and o.total <= ltot and _le_loads(o.loads, lloads)
                        and _subset_members(o.members, lmem)):
                    return False
        if inter_day:
            for dd, b2 in per_node.items():
                if dd < d:
                    labs = b2.labels
                    for k in range(bisect_right(b2.costs, c + e_c)):
                        o = labs[k]
                        if (o.alive and not o.unreach & ~lu and o.time <= lt - B + e_t and o.total <= ltot
                                and _le_loads(o.loads, lloads) and _subset_members(o.members, lmem)):
                            return False
        if same_day and bk is not None:
            labs = bk.labels
            for k in range(bisect_left(bk.costs, c - e_c), len(labs)):
                o = labs[k]
                if (o.alive and not lu & ~o.unreach and lt <= o.time + e_t and lw <= o.work + e_g
                        and ldr <= o.drive + e_o and ltot <= o.total and _le_loads(lloads, o.loads)
                        and _subset_members(lmem, o.members)):
                    o.alive = False
                    bk.dead += 1
        if inter_day:
            for dd, b2 in per_node.items():
                if dd > d:
                    labs = b2.labels
                    for k in range(bisect_left(b2.costs, c - e_c), len(labs)):
                        o = labs[k]
                        if (o.alive and not lu & ~o.unreach and lt <= o.time - B + e_t and ltot <= o.total
                                and _le_loads(lloads, o.loads) and _subset_members(lmem, o.members)):
                            o.alive = False
                            b2.dead += 1
                    b2.compact()
        if bk is None:
            bk = per_node[d] = _Bucket()
        if bucket_cap is not None and len(bk.labels) - bk.dead >= bucket_cap:
            k = len(bk.labels) - 1
            while not bk.labels[k].alive:
                k -= 1
            if bk.costs[k] <= c:
                return False
            bk.labels[k].alive = False
            bk.dead += 1
        bk.add(lab)
        bk.compact()
        return True

    truncated = False
    pops = 0
    while heap:
        _, _, _, lab = heapq.heappop(heap)
        if not lab.alive:
            continue
        pops += 1
        if max_labels is not None and generated > max_labels:
            truncated = True
            break
        if deadline is not None and pops % 64 == 0 and time.monotonic() > deadline:
            truncated = True
            break
        for (j, rc, tij, dij) in succ.get(lab.node, ()):
            if j != sink and lab.unreach >> j & 1:
                continue
            timings = ctx.timing(lab, j, tij, dij)
            if not timings:
                continue
            if j == sink:
                # any feasible closing leg will do; the first is the earliest
                end = ctx.make(lab, j, rc, timings[0], -1)
                generated += 1
                prev = done.get(end.visited)
                if prev is None or end.cost < prev.cost:
                    done[end.visited] = end
                continue
            comps = ctx.compartments(lab, j)
            for tm in timings:
                for m in comps:
                    child = ctx.make(lab, j, rc, tm, m)
                    child.unreach = lab.unreach | child.visited
                    mark_unreachable(child)
                    generated += 1
                    if prune and hopeless(child):
                        pruned += 1
                        continue
                    if insert(child):
                        kept += 1
                        counter += 1
                        heapq.heappush(heap, (child.day, child.time, counter, child))

    found = sorted((lab for lab in done.values() if lab.cost < threshold), key=lambda l: (l.cost, l.visited))
    if stats is not None:
        best = min((l.cost for l in done.values()), default=None)
        if prune and (best is None or best >= threshold):
            best = threshold
        stats.update(labels=generated, kept=kept, pruned=pruned, min_rcost=best, truncated=truncated)
    routes = [label_to_route(inst, lab) for lab in found[:limit]]
    if ctx.by_set:
        routes = [_attach_loading(ctx, r) for r in routes]
    return routes


def _attach_loading(ctx: _Context, route: Route) -> Route:
    key = 0
    for v in route.visits:
        key |= 1 << v
    # cached loadings are indexed by the sorted client list
    if key not in ctx.loadable:
        ctx.loadable[key] = find_loading(ctx.inst, _members(key))
    comp = dict(zip(_members(key), ctx.loadable[key]))
    return route.with_loading(tuple(comp[v] for v in route.visits))


def route_from_visits(inst: Instance, visits: Sequence[int], relaxed: bool = False) -> Optional[Route]:
    """Schedule a fixed visit sequence, or None if no feasible schedule exists.

    Runs the same extensions along the fixed path, keeping non-dominated
    partial schedules; the loading is solved separately with the exact
    compartment checker.
    """
    ctx = _context(inst, True)
    frontier = [ctx.initial_label(inst.vehicle.fixed_cost)]
    path = [*visits, inst.sink]
    for j in path:
        nxt = []
        for lab in frontier:
            i = lab.node
            if j != inst.sink and lab.visited >> j & 1:
                return None
            for tm in ctx.timing(lab, j, inst.time[i][j], inst.distance[i][j]):
                comps = [-1] if j == inst.sink else ctx.compartments(lab, j)
                for m in comps[:1]:
                    nxt.append(ctx.make(lab, j, inst.cost[i][j], tm, m))
        # same-day pruning keeps this small
        pruned = []
        for lab in sorted(nxt, key=lambda l: (l.day, l.time)):
            if not any(dominates_same_day(o, lab) or dominates_inter_day(o, lab, ctx.B) for o in pruned):
                pruned.append(lab)
        frontier = pruned
        if not frontier:
            return None
    route = label_to_route(inst, frontier[0])
    if relaxed:
        return route
    loading = find_loading(inst, visits)
    if loading is None:
        return None
    return route.with_loading(loading)
