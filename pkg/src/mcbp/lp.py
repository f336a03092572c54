"""Restricted master problem over a column pool."""
from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csc_matrix

from .model import SCALE, Instance, Route


@dataclass(frozen=True)
class BranchState:
    forced_arcs: frozenset = frozenset()
    forbidden_arcs: frozenset = frozenset()
    # bounds on the number of routes (vehicles) in the node LP
    min_vehicles: Optional[int] = None
    max_vehicles: Optional[int] = None

    def forbid(self, arc) -> "BranchState":
        return replace(self, forbidden_arcs=self.forbidden_arcs | {arc})

    def force(self, arc) -> "BranchState":
        return replace(self, forced_arcs=self.forced_arcs | {arc})

    def vehicles_at_most(self, k: int) -> "BranchState":
        hi = k if self.max_vehicles is None else min(k, self.max_vehicles)
        return replace(self, max_vehicles=hi)

    def vehicles_at_least(self, k: int) -> "BranchState":
        lo = k if self.min_vehicles is None else max(k, self.min_vehicles)
        return replace(self, min_vehicles=lo)

    @property
    def vehicle_row(self) -> bool:
        return self.min_vehicles is not None or self.max_vehicles is not None


@dataclass(frozen=True)
class RmpColumn:
    route: Route
    cost: int
    incidence: int
    arcs: frozenset
    # client id -> (predecessor, successor)
    neighbours: dict = field(compare=False, hash=False, repr=False)

    @classmethod
    def from_route(cls, route: Route, sink: int) -> "RmpColumn":
        path = (0, *route.visits, sink)
        nb = {path[k]: (path[k - 1], path[k + 1]) for k in range(1, len(path) - 1)}
        return cls(route, route.cost, route.incidence, frozenset(zip(path[:-1], path[1:])), nb)

    @property
    def key(self) -> tuple[int, ...]:
        return self.route.visits

    def respects(self, branch: BranchState) -> bool:
        if self.arcs & branch.forbidden_arcs:
            return False
        for i, j in branch.forced_arcs:
            if i in self.neighbours and self.neighbours[i][1] != j:
                return False
            if j in self.neighbours and self.neighbours[j][0] != i:
                return False
        return True


class ColumnPool:
    """Deduplicated, append-only set of columns keyed by visit sequence."""

    def __init__(self, sink: int, columns: Iterable[RmpColumn] = ()):
        self.sink = sink
        self._cols: dict[tuple, RmpColumn] = {}
        self._order: list[RmpColumn] = []
        self._lock = threading.Lock()
        self.generation = 0
        for c in columns:
            self.add(c)

    def add(self, col: RmpColumn | Route) -> bool:
        if isinstance(col, Route):
            col = RmpColumn.from_route(col, self.sink)
        with self._lock:
            old = self._cols.get(col.key)
            if old is not None:
                # keep a column that already carries a loading
                if old.route.loading is None and col.route.loading is not None:
                    self._cols[col.key] = col
                    self._order[self._order.index(old)] = col
                return False
            self._cols[col.key] = col
            self._order.append(col)
            self.generation += 1
            return True

    def __len__(self) -> int:
        return len(self._order)

    def __iter__(self):
        return iter(list(self._order))

    def __contains__(self, key) -> bool:
        return key in self._cols

    def get(self, key) -> Optional[RmpColumn]:
        return self._cols.get(key)

    def filtered(self, branch: BranchState, active: Optional[int] = None) -> list[RmpColumn]:
        out = []
        for c in self._order:
            if active is not None and c.incidence & ~active:
                continue
            if c.respects(branch):
                out.append(c)
        return out


@dataclass(frozen=True)
class DualVector:
    """One dual price per client plus the dual of the vehicle-count row.

    The vehicle dual is charged on the arcs leaving the origin; it is zero
    unless the node bounds the number of routes.
    """

    pi: tuple[float, ...]
    vehicle: float = 0.0

    @property
    def n(self) -> int:
        return len(self.pi)

    def node(self, i: int) -> float:
        return self.pi[i - 1] if 1 <= i <= len(self.pi) else 0.0

    def padded(self) -> list[float]:
        return [self.vehicle, *self.pi, 0.0]

    @classmethod
    def zeros(cls, n: int) -> "DualVector":
        return cls(tuple(0.0 for _ in range(n)))

    def blend(self, other: "DualVector", weight_other: float) -> "DualVector":
        w = weight_other
        return DualVector(tuple((1 - w) * a + w * b for a, b in zip(self.pi, other.pi)),
                          (1 - w) * self.vehicle + w * other.vehicle)


def reduced_cost(col: RmpColumn | Route, duals: DualVector) -> float:
    route = col.route if isinstance(col, RmpColumn) else col
    if any(not 1 <= v <= duals.n for v in route.visits):
        raise ValueError("dual vector dimension does not match the column")
    return route.cost - sum(duals.pi[v - 1] for v in route.visits) - duals.vehicle


def artificial_cost(inst: Instance) -> int:
    max_arc = max(max(row) for row in inst.cost)
    return 10 * (inst.vehicle.fixed_cost + max_arc * inst.n)


@dataclass
class RmpSolution:
    columns: list[RmpColumn]
    values: np.ndarray
    duals: DualVector
    objective: float
    artificial: np.ndarray  # value of each client's artificial column (0 for inactive rows)
    vehicle_artificial: float = 0.0  # slack bought on a lower vehicle bound

    @property
    def artificial_level(self) -> float:
        return float(self.artificial.sum()) + self.vehicle_artificial

    @property
    def vehicles(self) -> float:
        return float(self.values.sum())


def _solve_highspy(c, A: csc_matrix, lower, upper):
    """Interior point without crossover: central (non-vertex) duals."""
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("solver", "ipm")
    h.setOptionValue("run_crossover", "off")
    m, k = A.shape
    inf = highspy.kHighsInf
    lp = highspy.HighsLp()
    lp.num_col_ = k
    lp.num_row_ = m
    lp.col_cost_ = np.asarray(c, dtype=float)
    lp.col_lower_ = np.zeros(k)
    lp.col_upper_ = np.full(k, inf)
    lp.row_lower_ = np.where(np.isinf(lower), -inf, lower)
    lp.row_upper_ = np.where(np.isinf(upper), inf, upper)
    lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    lp.a_matrix_.start_ = A.indptr.astype(np.int32)
    lp.a_matrix_.index_ = A.indices.astype(np.int32)
    lp.a_matrix_.value_ = A.data.astype(float)
    h.passModel(lp)
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        raise RuntimeError(f"RMP solve failed: {h.modelStatusToString(status)}")
    sol = h.getSolution()
    return np.array(sol.col_value), np.array(sol.row_dual), float(np.dot(c, sol.col_value))


def _solve_linprog(c, A: csc_matrix, lower, upper):
    """Dual simplex; every row is split into its finite one-sided halves."""
    A = A.tocsr()
    ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
    for r in range(A.shape[0]):
        if lower[r] == upper[r]:
            eq_rows.append(r)
            eq_rhs.append(lower[r])
            continue
        if np.isfinite(lower[r]):
            ub_rows.append((r, -1.0))
            ub_rhs.append(-lower[r])
        if np.isfinite(upper[r]):
            ub_rows.append((r, 1.0))
            ub_rhs.append(upper[r])
    kw = {}
    if ub_rows:
        kw["A_ub"] = csc_matrix(np.vstack([sign * A[r].toarray() for r, sign in ub_rows]))
        kw["b_ub"] = ub_rhs
    if eq_rows:
        kw["A_eq"] = A[eq_rows]
        kw["b_eq"] = eq_rhs
    res = linprog(c, bounds=(0, None), method="highs", **kw)
    if res.status != 0:
        raise RuntimeError(f"RMP solve failed: {res.message}")
    duals = np.zeros(A.shape[0])
    for (r, sign), mu in zip(ub_rows, res.ineqlin.marginals if ub_rows else []):
        duals[r] += sign * mu
    for r, mu in zip(eq_rows, res.eqlin.marginals if eq_rows else []):
        duals[r] += mu
    return res.x, duals, float(res.fun)


def solve_rmp(
    columns: Sequence[RmpColumn],
    n_clients: int,
    covering: bool = True,
    art_cost: float = 1e12,
    active: Optional[int] = None,
    method: str = "simplex",
    vehicles: tuple[Optional[int], Optional[int]] = (None, None),
) -> RmpSolution:
    """Solve the LP relaxation over ``columns`` plus one artificial per client.

    Rows exist only for clients in ``active`` (bitmask, default all); the
    duals of inactive clients are reported as 0.  Columns touching an
    inactive client are ignored.  ``vehicles`` bounds the number of routes;
    a lower bound gets its own artificial column.  ``method="ipm"`` returns
    interior (well-centred) duals, which keeps pricing on these instances
    much smaller than the extreme-point duals of the simplex.
    """
    rows = [c for c in range(1, n_clients + 1) if active is None or active >> c & 1]
    row_of = {c: r for r, c in enumerate(rows)}
    cols = [c for c in columns if active is None or not c.incidence & ~active]
    m, k = len(rows), len(cols)
    lo, hi = vehicles
    if m == 0:
        return RmpSolution(cols, np.zeros(k), DualVector.zeros(n_clients), 0.0, np.zeros(n_clients))
    veh_row = lo is not None or hi is not None
    data, ri, ci = [], [], []
    for j, col in enumerate(cols):
        for v in col.route.visits:
            ri.append(row_of[v])
            ci.append(j)
            data.append(1.0)
        if veh_row:
            ri.append(m)
            ci.append(j)
            data.append(1.0)
    for r in range(m):
        ri.append(r)
        ci.append(k + r)
        data.append(1.0)
    n_art = m
    if lo is not None:
        ri.append(m)
        ci.append(k + m)
        data.append(1.0)
        n_art += 1
    n_rows = m + veh_row
    A = csc_matrix((data, (ri, ci)), shape=(n_rows, k + n_art))
    # costs are fixed-point; HiGHS behaves better on unit-scale objectives
    c = np.array([col.cost for col in cols] + [art_cost] * n_art, dtype=float) / SCALE
    lower = np.ones(n_rows)
    upper = np.full(n_rows, np.inf) if covering else np.ones(n_rows)
    if veh_row:
        lower[m] = -np.inf if lo is None else lo
        upper[m] = np.inf if hi is None else hi
    if method == "ipm":
        try:
            x, row_duals, fun = _solve_highspy(c, A, lower, upper)
        except RuntimeError:
            # no crossover occasionally leaves the status undecided
            x, row_duals, fun = _solve_linprog(c, A, lower, upper)
    else:
        x, row_duals, fun = _solve_linprog(c, A, lower, upper)
    pi = [0.0] * n_clients
    art = np.zeros(n_clients)
    for r, client in enumerate(rows):
        pi[client - 1] = float(row_duals[r]) * SCALE
        art[client - 1] = x[k + r]
    mu = float(row_duals[m]) * SCALE if veh_row else 0.0
    veh_art = float(x[k + m]) if lo is not None else 0.0
    return RmpSolution(cols, np.array(x[:k]), DualVector(tuple(pi), mu), fun * SCALE, art, veh_art)
