"""Branch-and-price: column generation, vehicle-count and arc branching, best-bound search and diving."""
from __future__ import annotations

import heapq
import itertools
import logging
import math
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import csc_matrix

from .compartment import find_loading
from .config import SolverConfig
from .heuristic import solve_lh
from .lp import BranchState, ColumnPool, DualVector, RmpSolution, artificial_cost, solve_rmp
from .model import SCALE, Instance, Route, Solution, validate_instance, validate_route
from .pricing import Epsilons, arc_filter, build_pricing_graph, route_from_visits, solve_pricing

log = logging.getLogger(__name__)

INT_TOL = 1e-6
VEH_TOL = 1e-4  # interior-point values are only accurate to solver tolerance
RC_THRESHOLD = -1e-2  # milli-units; route costs are integral in fixed point


@dataclass
class PricingResult:
    routes: list[Route]
    min_rcost: Optional[float]  # exact minimum over the priced space, None if unknown
    complete: bool  # an empty ``routes`` proves there is no negative column
    labels: int = 0


class Pricer:
    """Exact-compartment pricing over the full client set."""

    relaxed = False

    def __init__(self, inst: Instance, config: SolverConfig):
        self.inst = inst
        self.config = config
        self.eps = Epsilons.default_for(inst, config.eps_frac)
        overrides = {k: getattr(config, f"eps_{k}") for k in ("time", "cost", "work", "drive")}
        if any(v is not None for v in overrides.values()):
            self.eps = Epsilons(**{k: (getattr(self.eps, k) if v is None else v) for k, v in overrides.items()})
        self._filtered: Optional[set] = None
        self._loadable: dict = {}
        self.calls = 0
        self.labels = 0
        self._count_lock = threading.Lock()

    def usable_arcs(self) -> Optional[set]:
        if not self.config.arc_filtering:
            return None
        if self._filtered is None:
            base = build_pricing_graph(self.inst, DualVector.zeros(self.inst.n))
            self._filtered = arc_filter(self.inst, base).enabled
        return self._filtered

    def price_graph(self, duals: DualVector, branch: BranchState, active: Optional[int], mode: str,
                    deadline: Optional[float], relaxed: bool) -> tuple[list[Route], dict]:
        graph = build_pricing_graph(self.inst, duals, branch, active)
        usable = self.usable_arcs()
        if usable is not None:
            graph = graph.copy_with(graph.enabled & usable)
        stats: dict = {}
        # heuristic levels are written "aggressive:<labels per bucket>"
        base, _, cap = mode.partition(":")
        routes = solve_pricing(
            graph, self.inst, base, self.config.pricing_limit, relaxed=relaxed,
            same_day=self.config.same_day, inter_day=self.config.inter_day, eps=self.eps,
            stats=stats, threshold=RC_THRESHOLD, deadline=deadline,
            bucket_cap=int(cap) if cap else None, bound_pruning=self.config.bound_pruning,
            loading=self.config.pricing_loading, loading_cache=self._loadable,
        )
        with self._count_lock:
            self.calls += 1
            self.labels += stats.get("labels", 0)
        return routes, stats

    def __call__(self, duals: DualVector, branch: BranchState, mode: str, deadline: Optional[float] = None,
                 active: Optional[int] = None) -> PricingResult:
        routes, stats = self.price_graph(duals, branch, active, mode, deadline, False)
        complete = mode == "exact" and not stats.get("truncated", False)
        min_rc = stats.get("min_rcost") if complete else None
        return PricingResult(routes, min_rc, complete, stats.get("labels", 0))


@dataclass
class CGResult:
    lp_bound: float
    rmp: Optional[RmpSolution]
    duals: Optional[DualVector]
    proven: bool  # lp_bound is the converged LP value
    infeasible: bool = False
    iterations: int = 0
    columns_added: int = 0


@dataclass
class BnbNode:
    id: int
    branch: BranchState
    lp_bound: float
    depth: int
    status: str = "open"  # open | fathomed | infeasible | branched | integral
    partition: bool = False


def column_select_topk(candidates: Sequence[Route], k) -> list[Route]:
    """The ``k`` most negative columns (``k`` may be a fraction in (0, 1))."""
    if isinstance(k, float) and 0 < k < 1:
        k = max(1, math.ceil(k * len(candidates)))
    ordered = sorted(candidates, key=lambda r: (r.rcost, r.visits))
    return ordered[: int(k)]


def column_select_disjoint(candidates: Sequence[Route], k: int) -> list[Route]:
    """Greedy in ascending reduced cost, keeping mutually client-disjoint routes."""
    out, used = [], 0
    for r in sorted(candidates, key=lambda r: (r.rcost, r.visits)):
        if len(out) >= k:
            break
        if r.incidence & used:
            continue
        out.append(r)
        used |= r.incidence
    return out


def select_columns(candidates: Sequence[Route], config: SolverConfig) -> list[Route]:
    if not config.column_selection:
        return list(candidates)
    chosen: dict[tuple, Route] = {}
    for r in column_select_topk(candidates, config.topk) + column_select_disjoint(candidates, config.disjoint_k):
        chosen.setdefault(r.visits, r)
    return list(chosen.values())


def lagrangian_bound(duals: DualVector, min_rcost: float, n_active: int,
                     branch: Optional[BranchState] = None) -> float:
    """Lower bound from any dual vector: sum of duals plus at most one route per client at min rcost.

    With a vehicle-count row the dual of the binding side is added and the
    route count is capped by its upper bound.
    """
    lo = hi = None
    if branch is not None:
        lo, hi = branch.min_vehicles, branch.max_vehicles
    mu = duals.vehicle
    if mu > 0:
        if lo is None:
            return -math.inf
        extra = mu * lo
    elif mu < 0:
        if hi is None:
            return -math.inf
        extra = mu * hi
    else:
        extra = 0.0
    count = n_active if hi is None else min(n_active, hi)
    return sum(duals.pi) + extra + count * min(0.0, min_rcost)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def column_generation(
    inst: Instance,
    branch: BranchState,
    pool: ColumnPool,
    pricer: Callable[..., PricingResult],
    config: SolverConfig,
    *,
    covering: Optional[bool] = None,
    active: Optional[int] = None,
    deadline: Optional[float] = None,
    max_iterations: Optional[int] = None,
    art_cost: Optional[float] = None,
    stats: Optional[dict] = None,
) -> CGResult:
    """Solve the node LP to optimality by alternating RMP solves and pricing.

    Pricing climbs a ladder of heuristic levels (epsilon dominance with a
    per-bucket label cap) and moves up when a level stalls or finds
    nothing; exact pricing is the top level, and after it finds columns the
    search drops back one level.  With stabilization on, exact pricing uses duals
    smoothed towards the best Lagrangian point; a smoothed round that finds
    no column with negative true reduced cost is repeated with the true duals.
    """
    covering = config.covering if covering is None else covering
    n = inst.n
    if active is None:
        active = sum(1 << c for c in range(1, n + 1))
    n_active = _popcount(active)
    art = artificial_cost(inst) if art_cost is None else art_cost
    max_it = config.max_cg_iterations if max_iterations is None else max_iterations
    levels = [f"aggressive:{c}" if c else "aggressive" for c in config.heuristic_caps] if config.aggressive else []
    levels.append("exact")
    exact_level = len(levels) - 1
    level = 0
    stall, prev_obj = 0, None
    best_lb, centre = -math.inf, None
    added_total = 0
    rmp = None
    it = 0
    probe = build_pricing_graph(inst, DualVector.zeros(n), branch, active)
    lo, hi = branch.min_vehicles, branch.max_vehicles
    if probe.infeasible or (hi is not None and (hi < 1 or (lo is not None and lo > hi))):
        return CGResult(math.inf, None, None, True, infeasible=True)
    for it in range(1, max_it + 1):
        cols = pool.filtered(branch, active)
        rmp = solve_rmp(cols, n, covering, art, active, config.lp_method,
                        (branch.min_vehicles, branch.max_vehicles))
        obj = rmp.objective
        if prev_obj is not None and level < exact_level:
            rel = (prev_obj - obj) / max(abs(prev_obj), 1.0)
            stall = stall + 1 if rel < config.aggressive_tol else 0
            if stall >= config.aggressive_patience:
                level, stall = level + 1, 0
        prev_obj = obj
        if deadline is not None and time.monotonic() > deadline:
            break
        mode = levels[level]
        duals = rmp.duals
        smoothed = config.stabilization and mode == "exact" and centre is not None
        use = centre.blend(duals, 1 - config.smoothing) if smoothed else duals
        res = pricer(use, branch, mode, deadline, active)
        if res.complete and res.min_rcost is not None:
            lb = lagrangian_bound(use, res.min_rcost, n_active, branch)
            if lb > best_lb:
                best_lb, centre = lb, use
        new = [r for r in res.routes if r.visits not in pool]
        if smoothed and not any(_true_rc(r, duals) < RC_THRESHOLD for r in new):
            # mispricing: retry with the RMP duals
            res = pricer(duals, branch, mode, deadline, active)
            if res.complete and res.min_rcost is not None:
                lb = lagrangian_bound(duals, res.min_rcost, n_active, branch)
                if lb > best_lb:
                    best_lb, centre = lb, duals
            new = [r for r in res.routes if r.visits not in pool]
        if not new:
            if level < exact_level:
                level, stall = level + 1, 0
                continue
            if res.complete:
                if config.lp_method != "simplex":
                    # polish: an exact vertex for the bound and for branching
                    rmp = solve_rmp(cols, n, covering, art, active, "simplex",
                                    (branch.min_vehicles, branch.max_vehicles))
                return _finish(rmp, best_lb, True, it, added_total, stats)
            break
        if level == exact_level and exact_level > 0:
            # exact pricing found columns: hand back to the cheapest heuristic that may still work
            level, stall = exact_level - 1, 0
        picked = select_columns(new, config)
        log.debug("cg it=%d level=%s obj=%.0f new=%d picked=%d lb=%.0f", it, mode, obj, len(new), len(picked), best_lb)
        for r in picked:
            if pool.add(r):
                added_total += 1
    return _finish(rmp, best_lb, False, it, added_total, stats)


def _true_rc(route: Route, duals: DualVector) -> float:
    return route.cost - sum(duals.pi[v - 1] for v in route.visits) - duals.vehicle


def _finish(rmp: Optional[RmpSolution], best_lb: float, converged: bool, it: int, added: int,
            stats: Optional[dict]) -> CGResult:
    if stats is not None:
        stats["cg_iterations"] = stats.get("cg_iterations", 0) + it
        stats["columns_added"] = stats.get("columns_added", 0) + added
    if rmp is None:
        return CGResult(best_lb, None, None, False, iterations=it, columns_added=added)
    if converged:
        if rmp.artificial_level > 1e-6:
            return CGResult(math.inf, rmp, rmp.duals, True, infeasible=True, iterations=it, columns_added=added)
        return CGResult(rmp.objective, rmp, rmp.duals, True, iterations=it, columns_added=added)
    return CGResult(best_lb, rmp, rmp.duals, False, iterations=it, columns_added=added)


def arc_flows(rmp: RmpSolution) -> dict[tuple[int, int], float]:
    flows: dict[tuple[int, int], float] = {}
    for col, y in zip(rmp.columns, rmp.values):
        if y <= INT_TOL:
            continue
        for a in col.arcs:
            flows[a] = flows.get(a, 0.0) + float(y)
    return flows


def select_branching_arc(rmp: RmpSolution, cost=None) -> Optional[tuple[int, int]]:
    """Fractional arc with flow nearest 0.5; ties by larger cost, then smaller arc."""
    best, best_key = None, None
    for a, x in arc_flows(rmp).items():
        frac = x - math.floor(x)
        if frac <= INT_TOL or frac >= 1 - INT_TOL:
            continue
        c = cost[a[0]][a[1]] if cost is not None else 0
        key = (round(abs(frac - 0.5), 9), -c, a)
        if best_key is None or key < best_key:
            best, best_key = a, key
    return best


def fractional_vehicles(rmp: RmpSolution) -> Optional[float]:
    """Total route count when it is fractional, else None."""
    k = rmp.vehicles
    frac = k - math.floor(k)
    return k if VEH_TOL < frac < 1 - VEH_TOL else None


def _is_integral(rmp: RmpSolution) -> bool:
    return all(y <= INT_TOL or y >= 1 - INT_TOL for y in rmp.values)


def _integral_routes(rmp: RmpSolution) -> list[Route]:
    return [col.route for col, y in zip(rmp.columns, rmp.values) if y >= 1 - INT_TOL]


def repair_cover(inst: Instance, routes: Sequence[Route]) -> Optional[list[Route]]:
    """Turn an over-covering route set into a partition by dropping repeated visits.

    Under the triangle inequality dropping a visit never increases cost and
    keeps the schedule feasible; every result is rescheduled and reloaded.
    """
    seen: set[int] = set()
    out = []
    for r in sorted(routes, key=lambda r: (-len(r.visits), r.visits)):
        visits = [v for v in r.visits if v not in seen]
        seen.update(visits)
        if not visits:
            continue
        if tuple(visits) == r.visits and r.loading is not None:
            out.append(r)
            continue
        nr = route_from_visits(inst, visits)
        if nr is None:
            return None
        out.append(nr)
    if seen != set(range(1, inst.n + 1)):
        return None
    return out


def finalize_routes(inst: Instance, routes: Sequence[Route]) -> Optional[list[Route]]:
    """Attach loadings where missing and run the independent validator."""
    out = []
    for r in routes:
        if r.loading is None:
            loading = find_loading(inst, r.visits)
            if loading is None:
                return None
            r = r.with_loading(loading)
        if validate_route(inst, r) is not None:
            r2 = route_from_visits(inst, r.visits)
            if r2 is None or validate_route(inst, r2) is not None:
                return None
            r = r2
        out.append(r)
    return out


def primal_dive(
    inst: Instance,
    rmp: RmpSolution,
    pool: ColumnPool,
    pricer: Optional[Callable[..., PricingResult]],
    config: SolverConfig,
    deadline: Optional[float] = None,
    art_cost: Optional[float] = None,
) -> Optional[list[Route]]:
    """Fix the column closest to 1, re-solve the residual problem, repeat.

    Returns a validated route set covering every client exactly once, or
    None on a dead end.
    """
    n = inst.n
    full = sum(1 << c for c in range(1, n + 1))
    art = artificial_cost(inst) if art_cost is None else art_cost
    fixed: list[Route] = []
    covered = 0
    cur = rmp
    free = BranchState()
    while True:
        if cur is None:
            return None
        if _is_integral(cur) and cur.artificial_level <= INT_TOL:
            fixed.extend(_integral_routes(cur))
            break
        order = sorted(zip(cur.values, cur.columns), key=lambda t: (-t[0], t[1].key))
        pick = next((c for y, c in order if y > INT_TOL and not c.incidence & covered), None)
        if pick is None:
            return None
        fixed.append(pick.route)
        covered |= pick.incidence
        residual = full & ~covered
        if not residual:
            break
        if deadline is not None and time.monotonic() > deadline:
            return None
        if pricer is not None and config.dive_pricing:
            res = column_generation(inst, free, pool, pricer, config, covering=True, active=residual,
                                    deadline=deadline, max_iterations=config.dive_cg_iterations, art_cost=art)
            cur = res.rmp
        else:
            cur = solve_rmp(pool.filtered(free, residual), n, True, art, residual, config.lp_method)
        if cur is None or cur.artificial_level > INT_TOL:
            return None
    routes = repair_cover(inst, fixed)
    if routes is None:
        return None
    return finalize_routes(inst, routes)


def master_mip(inst: Instance, pool: ColumnPool, node_limit: int) -> Optional[list[Route]]:
    """Integer covering over the whole pool (HiGHS branch-and-cut, node-capped).

    Any pool column is a feasible route, so the result is a valid
    incumbent regardless of the branch the search is in.
    """
    cols = list(pool)
    if not cols:
        return None
    data, ri, ci = [], [], []
    for j, col in enumerate(cols):
        for v in col.route.visits:
            ri.append(v - 1)
            ci.append(j)
            data.append(1.0)
    A = csc_matrix((data, (ri, ci)), shape=(inst.n, len(cols)))
    c = np.array([col.cost for col in cols], dtype=float) / SCALE
    res = milp(c, constraints=LinearConstraint(A, 1, np.inf), integrality=np.ones(len(cols)),
               bounds=Bounds(0, 1), options={"node_limit": node_limit})
    if res.x is None:
        return None
    routes = repair_cover(inst, [col.route for col, x in zip(cols, res.x) if x > 0.5])
    return finalize_routes(inst, routes) if routes is not None else None


def _improve(inst: Instance, rmp: RmpSolution, pool: ColumnPool, pricer, config: SolverConfig,
             deadline: Optional[float], art: float) -> list[tuple[str, Optional[list[Route]]]]:
    out = []
    if config.diving:
        out.append(("dive", primal_dive(inst, rmp, pool, pricer, config, deadline, art)))
    if config.master_mip:
        out.append(("master mip", master_mip(inst, pool, config.master_mip_nodes)))
    return out


class _SearchLog:
    def __init__(self, path: Optional[str]):
        self.fh = open(path, "w", encoding="utf-8") if path else None
        if self.fh:
            self.fh.write("node\tdepth\tbound\tincumbent\tcolumns\twall\n")

    def write(self, node: BnbNode, incumbent: float, columns: int, wall: float):
        if self.fh:
            inc = "inf" if incumbent == math.inf else f"{incumbent:.0f}"
            self.fh.write(f"{node.id}\t{node.depth}\t{node.lp_bound:.3f}\t{inc}\t{columns}\t{wall:.3f}\n")
            self.fh.flush()

    def close(self):
        if self.fh:
            self.fh.close()


def _ceil_bound(b: float) -> float:
    # route costs are integers in fixed point, so bounds may be rounded up
    return b if b in (math.inf, -math.inf) else float(math.ceil(b - 1e-3))


def branch_and_price(
    inst: Instance,
    config: SolverConfig,
    pricer: Callable[..., PricingResult],
    pool: ColumnPool,
    *,
    incumbent: Optional[list[Route]] = None,
    t_start: Optional[float] = None,
    bound_kind: str = "global",
) -> Solution:
    """Best-bound tree search shared by the exact and rolling-space drivers."""
    t0 = time.perf_counter() if t_start is None else t_start
    mono0 = time.monotonic()
    deadline = None if config.time_limit is None else mono0 + config.time_limit - (time.perf_counter() - t0)
    art = artificial_cost(inst)
    best_routes = list(incumbent) if incumbent else None
    best = sum(r.cost for r in best_routes) if best_routes else math.inf
    stats = {"nodes": 0, "dives": 0, "incumbent_updates": 0, "trace": []}
    slog = _SearchLog(config.log_path)
    ids = itertools.count()
    root = BnbNode(next(ids), BranchState(), -math.inf, 0)
    heap = [(root.lp_bound, 0, root.id, root)]
    leaf_bounds: list[float] = []
    timed_out = False
    root_bound = None
    infeasible_root = False

    def update(routes: Optional[list[Route]], source: str):
        nonlocal best, best_routes
        if routes is None:
            return
        obj = sum(r.cost for r in routes)
        if obj < best:
            best, best_routes = obj, routes
            stats["incumbent_updates"] += 1
            log.debug("incumbent %s from %s", obj, source)

    while heap:
        if deadline is not None and time.monotonic() > deadline:
            timed_out = True
            break
        if config.node_limit is not None and stats["nodes"] >= config.node_limit:
            timed_out = True
            break
        bound, _, _, node = heapq.heappop(heap)
        if _ceil_bound(bound) >= best:
            node.status = "fathomed"
            leaf_bounds.append(bound)
            continue
        stats["nodes"] += 1
        res = column_generation(inst, node.branch, pool, pricer, config, covering=config.covering and not node.partition,
                                deadline=deadline, art_cost=art, stats=stats)
        if res.infeasible:
            node.status = "infeasible"
            if node.id == root.id:
                infeasible_root = True
            slog.write(node, best, len(pool), time.perf_counter() - t0)
            continue
        if not res.proven:
            # time or iteration cap: keep the best valid bound and stop the search,
            # after one pricing-free dive on the partial LP
            if res.rmp is not None:
                stats["dives"] += 1
                for source, routes in _improve(inst, res.rmp, pool, None, config, None, art):
                    update(routes, source)
            node.lp_bound = max(node.lp_bound, res.lp_bound)
            heapq.heappush(heap, (node.lp_bound, -node.depth, node.id, node))
            stats["nodes"] -= 1
            timed_out = True
            break
        node.lp_bound = max(node.lp_bound, res.lp_bound)
        if root_bound is None:
            root_bound = node.lp_bound
        rmp = res.rmp
        # (node, depth, node bound, incumbent, global bound); a pruned subtree is bounded by the incumbent
        glob = min([node.lp_bound, best, *(b for b, *_ in heap)])
        stats["trace"].append((node.id, node.depth, node.lp_bound, best, glob))
        if _is_integral(rmp):
            routes = _integral_routes(rmp)
            fixed = repair_cover(inst, routes)
            fixed = finalize_routes(inst, fixed) if fixed is not None else None
            if fixed is not None and sum(r.cost for r in fixed) <= node.lp_bound + 1e-3:
                update(fixed, "lp")
                node.status = "integral"
                leaf_bounds.append(node.lp_bound)
                slog.write(node, best, len(pool), time.perf_counter() - t0)
                continue
        if _ceil_bound(node.lp_bound) >= best:
            node.status = "fathomed"
            leaf_bounds.append(node.lp_bound)
            slog.write(node, best, len(pool), time.perf_counter() - t0)
            continue
        if node.id == root.id or stats["nodes"] % config.dive_every == 0:
            stats["dives"] += 1
            for source, routes in _improve(inst, rmp, pool, pricer, config, deadline, art):
                update(routes, source)
            if _ceil_bound(node.lp_bound) >= best:
                node.status = "fathomed"
                leaf_bounds.append(node.lp_bound)
                slog.write(node, best, len(pool), time.perf_counter() - t0)
                continue
        k = fractional_vehicles(rmp)
        if k is not None:
            # the fixed cost dominates, so fix the route count first
            node.status = "branched"
            slog.write(node, best, len(pool), time.perf_counter() - t0)
            for child_branch in (node.branch.vehicles_at_most(math.floor(k)),
                                 node.branch.vehicles_at_least(math.ceil(k))):
                child = BnbNode(next(ids), child_branch, node.lp_bound, node.depth + 1, partition=node.partition)
                heapq.heappush(heap, (child.lp_bound, -child.depth, child.id, child))
            continue
        arc = select_branching_arc(rmp, inst.cost)
        if arc is None:
            # integral arc flows but fractional columns: only possible with
            # over-covering, so re-solve this node as a partitioning LP
            if not node.partition:
                node.partition = True
                heapq.heappush(heap, (node.lp_bound, -node.depth, node.id, node))
                stats["nodes"] -= 1
                continue
            raise RuntimeError("fractional partitioning LP with integral arc flows")
        node.status = "branched"
        slog.write(node, best, len(pool), time.perf_counter() - t0)
        for child_branch in (node.branch.forbid(arc), node.branch.force(arc)):
            child = BnbNode(next(ids), child_branch, node.lp_bound, node.depth + 1, partition=node.partition)
            heapq.heappush(heap, (child.lp_bound, -child.depth, child.id, child))
    slog.close()

    wall = time.perf_counter() - t0
    open_bounds = [b for b, *_ in heap]
    stats["columns"] = len(pool)
    stats["pricing_calls"] = getattr(pricer, "calls", 0)
    stats["labels"] = getattr(pricer, "labels", 0)
    stats["root_bound"] = root_bound
    stats["bound_kind"] = bound_kind
    if infeasible_root and best_routes is None:
        return Solution([], 0, math.inf, "infeasible", wall, stats, "no feasible solution")
    if not heap:
        lower = best
    else:
        lower = min(_ceil_bound(b) for b in open_bounds)
        if best < math.inf:
            lower = min(lower, best)
    if best_routes is None:
        status = "time_limit" if timed_out else "infeasible"
        return Solution([], 0, lower if heap else math.inf, status, wall, stats,
                        "no incumbent found" if timed_out else "no feasible solution")
    routes = sorted(best_routes, key=lambda r: r.visits)
    if timed_out:
        status = "feasible"
    else:
        status = "optimal" if bound_kind == "global" else "feasible"
    return Solution(routes, int(best), float(lower), status, wall, stats)


def seed_pool(inst: Instance, pool: ColumnPool, config: SolverConfig) -> Optional[list[Route]]:
    """Singleton routes plus the LH routes; returns the LH solution if one exists."""
    for c in range(1, inst.n + 1):
        r = route_from_visits(inst, [c])
        if r is not None:
            pool.add(r)
    if not config.warm_start:
        return None
    lh = solve_lh(inst, config)
    if lh.status != "feasible":
        return None
    for r in lh.routes:
        pool.add(r)
    return lh.routes


def _precheck(inst: Instance) -> Optional[Solution]:
    problems = validate_instance(inst)
    if problems:
        from .model import InvalidInstanceError
        raise InvalidInstanceError("; ".join(problems))
    for c in range(1, inst.n + 1):
        if route_from_visits(inst, [c]) is None:
            return Solution([], 0, math.inf, "infeasible", 0.0, {"client": c},
                            f"client {c} admits no feasible route")
    return None


def solve_bnp(inst: Instance, config: Optional[SolverConfig] = None) -> Solution:
    """Exact branch-and-price."""
    config = config or SolverConfig()
    t0 = time.perf_counter()
    early = _precheck(inst)
    if early is not None:
        early.wall_seconds = time.perf_counter() - t0
        return early
    pool = ColumnPool(inst.sink)
    lh = seed_pool(inst, pool, config)
    return branch_and_price(inst, config, Pricer(inst, config), pool, incumbent=lh, t_start=t0)
