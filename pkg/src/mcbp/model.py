"""Domain types, instance checks, and the independent route validator.

All times, loads, distances and costs are stored as fixed-point integers
(``SCALE`` milliunits per unit).  Node 0 is the origin depot, nodes ``1..n``
are clients and node ``n + 1`` is the destination depot.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

SCALE = 1000


def to_fixed(x: float) -> int:
    return int(round(x * SCALE))


def from_fixed(v: int | float) -> float:
    return v / SCALE


class InvalidInstanceError(ValueError):
    pass


@dataclass(frozen=True)
class TimeWindow:
    start: int
    end: int
    day: int = 0

    def __post_init__(self):
        if self.start > self.end:
            raise InvalidInstanceError(f"window start {self.start} > end {self.end}")
        if self.day < 0:
            raise InvalidInstanceError("window day must be >= 0")


@dataclass(frozen=True)
class Client:
    id: int
    demand: int
    service_time: int
    windows: tuple[TimeWindow, ...]
    category: int = 1
    # merged window index -> indices into the original window list
    window_origin: tuple[tuple[int, ...], ...] = ()


@dataclass(frozen=True)
class CompartmentSpec:
    capacity: int
    client_cap: Optional[int] = None


@dataclass(frozen=True)
class VehicleType:
    total_capacity: int
    compartments: tuple[CompartmentSpec, ...]
    fixed_cost: int
    # item_compartment[client_index][m] with client_index = client id - 1
    item_compartment: tuple[tuple[int, ...], ...]

    @property
    def n_compartments(self) -> int:
        return len(self.compartments)


@dataclass(frozen=True)
class DriverRules:
    max_daily_work: int
    max_daily_distance: int
    break_length: int
    horizon_days: int
    max_total_work: Optional[int] = None
    count_postbreak_leg: bool = False


@dataclass(frozen=True)
class Instance:
    clients: tuple[Client, ...]
    cost: tuple[tuple[int, ...], ...]
    time: tuple[tuple[int, ...], ...]
    distance: tuple[tuple[int, ...], ...]
    vehicle: VehicleType
    rules: DriverRules
    # item_item[i-1][j-1] for client ids i, j
    item_item: tuple[tuple[int, ...], ...]
    coords: Optional[tuple[tuple[float, float], ...]] = None
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.clients)

    @property
    def sink(self) -> int:
        return self.n + 1

    def client(self, node: int) -> Client:
        return self.clients[node - 1]

    def demand(self, node: int) -> int:
        return self.clients[node - 1].demand if 1 <= node <= self.n else 0

    def service(self, node: int) -> int:
        return self.clients[node - 1].service_time if 1 <= node <= self.n else 0

    def compatible(self, i: int, j: int) -> bool:
        return bool(self.item_item[i - 1][j - 1])

    def allowed(self, node: int, m: int) -> bool:
        return bool(self.vehicle.item_compartment[node - 1][m])


@dataclass(frozen=True)
class Route:
    """A depot-to-depot path with its schedule and compartment loading.

    ``breaks`` has one flag per leg (``len(visits) + 1`` legs, the last one
    entering the destination depot).  ``loading`` maps each visit to a
    compartment index, or is None when no loading has been computed yet.
    """

    visits: tuple[int, ...]
    arrivals: tuple[int, ...] = ()
    windows: tuple[int, ...] = ()
    breaks: tuple[int, ...] = ()
    loading: Optional[tuple[int, ...]] = None
    cost: int = 0
    rcost: Optional[float] = field(default=None, compare=False)

    @property
    def incidence(self) -> int:
        mask = 0
        for v in self.visits:
            mask |= 1 << v
        return mask

    @property
    def days(self) -> tuple[int, ...]:
        out, d = [], 0
        for b in self.breaks[: len(self.visits)]:
            d += b
            out.append(d)
        return tuple(out)

    def arcs(self, sink: int) -> tuple[tuple[int, int], ...]:
        path = (0, *self.visits, sink)
        return tuple(zip(path[:-1], path[1:]))

    def with_loading(self, loading: Sequence[int]) -> "Route":
        return replace(self, loading=tuple(loading))


@dataclass
class Solution:
    routes: list[Route]
    objective: int
    lower_bound: float
    status: str  # optimal | feasible | infeasible | time_limit
    wall_seconds: float = 0.0
    stats: dict = field(default_factory=dict)
    message: str = ""


@dataclass(frozen=True)
class Violation:
    kind: str
    index: int = -1
    detail: str = ""

    def __str__(self) -> str:
        where = f" at visit {self.index}" if self.index >= 0 else ""
        return f"{self.kind}{where}: {self.detail}" if self.detail else f"{self.kind}{where}"


def normalize_time_windows(client: Client) -> Client:
    """Merge overlapping windows and sort them by start.

    Windows that touch (``end == next start``) are merged as well.  The
    mapping from each merged window back to the original indices is kept in
    ``window_origin``; a merged window takes the day of its earliest member.
    """
    if not client.windows:
        raise InvalidInstanceError(f"client {client.id} has no time window")
    order = sorted(range(len(client.windows)), key=lambda k: (client.windows[k].start, client.windows[k].end))
    # when re-normalizing, carry the existing back-mapping through
    origin = client.window_origin or tuple((k,) for k in range(len(client.windows)))
    merged: list[list] = []
    for k in order:
        w = client.windows[k]
        if merged and w.start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], w.end)
            merged[-1][3].extend(origin[k])
        else:
            merged.append([w.start, w.end, w.day, list(origin[k])])
    windows = tuple(TimeWindow(s, e, d) for s, e, d, _ in merged)
    back = tuple(tuple(sorted(o)) for *_, o in merged)
    return replace(client, windows=windows, window_origin=back)


def validate_instance(inst: Instance) -> list[str]:
    """Return every structural problem found in ``inst`` (empty list means ok)."""
    problems: list[str] = []
    n = inst.n
    size = n + 2
    for name, mat in (("cost", inst.cost), ("time", inst.time), ("distance", inst.distance)):
        if len(mat) != size or any(len(row) != size for row in mat):
            problems.append(f"{name} matrix must be {size}x{size}")
    if problems:
        return problems
    for c_idx, c in enumerate(inst.clients, start=1):
        if c.id != c_idx:
            problems.append(f"client at position {c_idx} has id {c.id}")
        if c.demand <= 0:
            problems.append(f"client {c.id}: nonpositive demand")
        if c.service_time < 0:
            problems.append(f"client {c.id}: negative service time")
        if not c.windows:
            problems.append(f"client {c.id}: no time window")
            continue
        for a, b in zip(c.windows, c.windows[1:]):
            if b.start <= a.end:
                problems.append(f"client {c.id}: windows not normalized")
                break
        if c.windows[0].start < 0:
            problems.append(f"client {c.id}: negative window start")
    for name, mat in (("cost", inst.cost), ("time", inst.time), ("distance", inst.distance)):
        bad = _triangle_violation(mat)
        if bad:
            i, j, k = bad
            problems.append(f"triangle inequality violated in {name}: {i}->{k} > {i}->{j}->{k}")
        if any(v < 0 for row in mat for v in row):
            problems.append(f"negative entry in {name} matrix")
    f = inst.item_item
    if len(f) != n or any(len(row) != n for row in f):
        problems.append(f"item_item matrix must be {n}x{n}")
    else:
        if any(f[i][j] != f[j][i] for i in range(n) for j in range(i + 1, n)):
            problems.append("asymmetric compatibility matrix")
        if any(f[i][i] != 1 for i in range(n)):
            problems.append("compatibility matrix diagonal must be 1")
    v = inst.vehicle
    if not v.compartments:
        problems.append("vehicle has no compartments")
    for m, comp in enumerate(v.compartments):
        if not 0 <= comp.capacity <= v.total_capacity:
            problems.append(f"compartment {m}: capacity outside [0, total]")
    if len(v.item_compartment) != n or any(len(row) != len(v.compartments) for row in v.item_compartment):
        problems.append("item_compartment matrix has wrong shape")
    r = inst.rules
    if min(r.max_daily_work, r.max_daily_distance, r.break_length) < 0 or r.horizon_days < 1:
        problems.append("driver rules must be nonnegative with at least one day")
    return problems


def _triangle_violation(mat) -> Optional[tuple[int, int, int]]:
    size = len(mat)
    for j in range(size):
        row_j = mat[j]
        for i in range(size):
            via = mat[i][j]
            row_i = mat[i]
            for k in range(size):
                if row_i[k] > via + row_j[k]:
                    return i, j, k
    return None


def route_cost(inst: Instance, visits: Sequence[int]) -> int:
    path = (0, *visits, inst.sink)
    return inst.vehicle.fixed_cost + sum(inst.cost[a][b] for a, b in zip(path[:-1], path[1:]))


def validate_route(inst: Instance, r: Route) -> Optional[Violation]:
    """Replay a route from scratch; return the first violation or None.

    The stored window and break choices are taken as given and every
    timing, driver-rule, capacity and compatibility condition is re-derived.
    This deliberately shares no code with the pricing engine.
    """
    n, sink = inst.n, inst.sink
    visits = r.visits
    k = len(visits)
    if len(set(visits)) != k:
        return Violation("elementarity", detail="client visited twice")
    for idx, v in enumerate(visits):
        if not 1 <= v <= n:
            return Violation("unknown client", idx, str(v))
    if len(r.breaks) != k + 1 or len(r.windows) != k or len(r.arrivals) != k:
        return Violation("schedule shape", detail="breaks/windows/arrivals length mismatch")
    rules = inst.rules
    T, dist_cap, B = rules.max_daily_work, rules.max_daily_distance, rules.break_length
    t = work = drive = total = day = 0
    prev = 0
    for idx in range(k + 1):
        nxt = visits[idx] if idx < k else sink
        brk = r.breaks[idx]
        if brk not in (0, 1):
            return Violation("break flag", idx, str(brk))
        svc = inst.clients[prev - 1].service_time if prev else 0
        leg_t, leg_d = inst.time[prev][nxt], inst.distance[prev][nxt]
        arrive = t + svc + leg_t + B * brk
        if brk:
            day += 1
            if rules.count_postbreak_leg:
                work, drive = leg_t, leg_d
            else:
                work = drive = 0
        else:
            work += leg_t + svc
            drive += leg_d
        total += leg_t + svc
        if day > rules.horizon_days - 1:
            return Violation("horizon", idx, f"day {day} beyond horizon")
        if work > T:
            return Violation("daily working time", idx, f"{work} > {T}")
        if drive > dist_cap:
            return Violation("daily driving distance", idx, f"{drive} > {dist_cap}")
        if rules.max_total_work is not None and total > rules.max_total_work:
            return Violation("total working time", idx)
        if idx == k:
            break
        wins = inst.clients[nxt - 1].windows
        p = r.windows[idx]
        if not 0 <= p < len(wins):
            return Violation("time window", idx, f"window index {p} invalid")
        if arrive > wins[p].end:
            return Violation("time window", idx, f"arrival {arrive} after end {wins[p].end}")
        t = max(arrive, wins[p].start)
        if r.arrivals[idx] != t:
            return Violation("schedule", idx, f"stored start {r.arrivals[idx]} != replayed {t}")
        prev = nxt
    load_violation = _check_loading(inst, visits, r.loading)
    if load_violation:
        return load_violation
    if route_cost(inst, visits) != r.cost:
        return Violation("cost", detail=f"stored {r.cost} != {route_cost(inst, visits)}")
    return None


def _check_loading(inst: Instance, visits, loading) -> Optional[Violation]:
    if loading is None:
        return Violation("loading", detail="no compartment assignment")
    if len(loading) != len(visits):
        return Violation("loading", detail="assignment length mismatch")
    comps = inst.vehicle.compartments
    used = [0] * len(comps)
    members: list[list[int]] = [[] for _ in comps]
    for idx, (v, m) in enumerate(zip(visits, loading)):
        if not 0 <= m < len(comps):
            return Violation("loading", idx, f"compartment {m} invalid")
        if not inst.vehicle.item_compartment[v - 1][m]:
            return Violation("item-to-compartment", idx)
        for other in members[m]:
            if not inst.item_item[v - 1][other - 1]:
                return Violation("item-to-item", idx, f"clients {other} and {v}")
        members[m].append(v)
        used[m] += inst.clients[v - 1].demand
        if used[m] > comps[m].capacity:
            return Violation("compartment capacity", idx)
        cap = comps[m].client_cap
        if cap is not None and len(members[m]) > cap:
            return Violation("compartment client cap", idx)
    if sum(used) > inst.vehicle.total_capacity:
        return Violation("vehicle capacity")
    return None


def validate_solution(inst: Instance, sol: Solution) -> list[str]:
    """Check coverage, per-route validity and the objective sum."""
    problems = []
    seen: dict[int, int] = {}
    for ri, r in enumerate(sol.routes):
        v = validate_route(inst, r)
        if v is not None:
            problems.append(f"route {ri}: {v}")
        for c in r.visits:
            seen[c] = seen.get(c, 0) + 1
    if sol.status in ("optimal", "feasible", "time_limit") and sol.routes:
        for c in range(1, inst.n + 1):
            if seen.get(c, 0) != 1:
                problems.append(f"client {c} covered {seen.get(c, 0)} times")
        if sum(r.cost for r in sol.routes) != sol.objective:
            problems.append("objective differs from the sum of route costs")
    return problems
