"""Rolling-space branch-and-price: sweep clusters priced independently per round."""
from __future__ import annotations

import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .bnb import Pricer, PricingResult, RC_THRESHOLD, _precheck, branch_and_price, seed_pool
from .compartment import find_loading, needs_check
from .config import SolverConfig
from .lp import BranchState, ColumnPool, DualVector
from .model import Instance, Route, Solution


@dataclass(frozen=True)
class Cluster:
    clients: tuple[int, ...]
    angle_from: float
    angle_to: float

    @property
    def mask(self) -> int:
        m = 0
        for c in self.clients:
            m |= 1 << c
        return m


def _angles(inst: Instance) -> list[tuple[float, int]]:
    if inst.coords is None:
        raise ValueError("rolling-space clustering needs client coordinates")
    x0, y0 = inst.coords[0]
    out = []
    for c in range(1, inst.n + 1):
        x, y = inst.coords[c]
        # clockwise from the positive x axis
        out.append(((-math.atan2(y - y0, x - x0)) % (2 * math.pi), c))
    return sorted(out)


def build_clusters(inst: Instance, min_size: int, max_size: int, step_fraction: float = 0.5) -> list[Cluster]:
    """Slide a window of ``max_size`` clients around the depot in angular order.

    The window advances by ``ceil(step_fraction * max_size)`` positions and
    wraps around past the last client, so every window is full and no
    padding is needed.  With ``n <= max_size`` there is one cluster.
    """
    if not 1 <= min_size <= max_size:
        raise ValueError("need 1 <= min_size <= max_size")
    if not 0 < step_fraction <= 1:
        raise ValueError("step_fraction must be in (0, 1]")
    order = _angles(inst)
    n = len(order)
    if n <= max_size:
        return [Cluster(tuple(sorted(c for _, c in order)), order[0][0] if order else 0.0,
                        order[-1][0] if order else 0.0)]
    step = math.ceil(step_fraction * max_size)
    clusters = []
    for start in range(0, n, step):
        idx = [(start + k) % n for k in range(max_size)]
        members = tuple(sorted(order[i][1] for i in idx))
        clusters.append(Cluster(members, order[idx[0]][0], order[idx[-1]][0]))
    return clusters


class ClusterPricer(Pricer):
    """Prices each cluster against one dual snapshot, then joins in cluster order."""

    def __init__(self, inst: Instance, config: SolverConfig, clusters: list[Cluster]):
        super().__init__(inst, config)
        self.clusters = clusters
        self.kappa = int(round(config.kappa_frac * inst.vehicle.total_capacity))
        self.checks = 0
        self.skipped = 0
        self.rejected = 0
        self.fallbacks = 0
        self._executor = ThreadPoolExecutor(config.threads) if config.threads > 1 else None
        self._lock = threading.Lock()
        self.usable_arcs()

    def close(self):
        if self._executor is not None:
            self._executor.shutdown()

    def _load(self, route: Route) -> Optional[Route]:
        if route.loading is not None:
            return route
        if not needs_check(self.inst, route.visits, self.kappa):
            with self._lock:
                self.skipped += 1
            return route
        loading = find_loading(self.inst, route.visits)
        with self._lock:
            self.checks += 1
            self.rejected += loading is None
        if loading is None:
            return None
        return route.with_loading(loading)

    def _one(self, cluster: Cluster, duals: DualVector, branch: BranchState, mode: str,
             deadline: Optional[float], active: Optional[int]):
        mask = cluster.mask if active is None else cluster.mask & active
        if not mask:
            return [], True, None, 0
        relaxed = self.config.relaxed_pricing
        routes, stats = self.price_graph(duals, branch, mask, mode, deadline, relaxed)
        labels = stats.get("labels", 0)
        complete = mode == "exact" and not stats.get("truncated", False)
        min_rc = stats.get("min_rcost") if complete else None
        if relaxed:
            kept = [r for r in (self._load(r) for r in routes) if r is not None]
            if routes and not kept:
                # every relaxed candidate failed the loading check, so the
                # relaxation says nothing about feasible routes here
                if self.config.exact_fallback:
                    with self._lock:
                        self.fallbacks += 1
                    kept, stats = self.price_graph(duals, branch, mask, mode, deadline, False)
                    labels += stats.get("labels", 0)
                    complete = mode == "exact" and not stats.get("truncated", False)
                    min_rc = stats.get("min_rcost") if complete else None
                else:
                    complete = False
                    min_rc = None
            routes = kept
        return routes, complete, min_rc, labels

    def __call__(self, duals: DualVector, branch: BranchState, mode: str, deadline: Optional[float] = None,
                 active: Optional[int] = None) -> PricingResult:
        args = [(c, duals, branch, mode, deadline, active) for c in self.clusters]
        if self._executor is not None:
            results = list(self._executor.map(lambda a: self._one(*a), args))
        else:
            results = [self._one(*a) for a in args]
        # join in cluster order so the merged list does not depend on timing
        best: dict[tuple, Route] = {}
        complete = True
        mins = []
        labels = 0
        for routes, comp, min_rc, lab in results:
            labels += lab
            complete = complete and comp
            if min_rc is not None:
                mins.append(min_rc)
            for r in routes:
                old = best.get(r.visits)
                if old is None or r.rcost < old.rcost:
                    best[r.visits] = r
        merged = sorted(best.values(), key=lambda r: (r.rcost, r.visits))
        merged = [r for r in merged if r.rcost < RC_THRESHOLD]
        # the cluster minimum is only a bound on the clustered route space
        return PricingResult(merged, min(mins) if complete and mins else None, complete, labels)


def solve_rs_bnp(inst: Instance, config: Optional[SolverConfig] = None) -> Solution:
    """Heuristic B&P over routes that stay inside one sweep cluster.

    The reported lower bound is the LP bound of the restricted route space,
    so the status is ``feasible`` even when the search finishes.
    """
    config = config or SolverConfig()
    t0 = time.perf_counter()
    early = _precheck(inst)
    if early is not None:
        early.wall_seconds = time.perf_counter() - t0
        return early
    clusters = build_clusters(inst, config.cluster_min, config.cluster_max, config.cluster_step)
    pool = ColumnPool(inst.sink)
    lh = seed_pool(inst, pool, config)
    pricer = ClusterPricer(inst, config, clusters)
    try:
        sol = branch_and_price(inst, config, pricer, pool, incumbent=lh, t_start=t0, bound_kind="pool_restricted")
    finally:
        pricer.close()
    sol.stats.update(clusters=len(clusters), loading_checks=pricer.checks, loading_skipped=pricer.skipped,
                     loading_rejected=pricer.rejected, exact_fallbacks=pricer.fallbacks)
    return sol
