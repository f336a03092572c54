"""Seeded instance generator with the eight-category compatibility presets."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .model import (
    Client,
    CompartmentSpec,
    DriverRules,
    Instance,
    TimeWindow,
    VehicleType,
    normalize_time_windows,
    to_fixed,
)

ALL = None

# category -> allowed compartments (1-based), keyed by compartment count
ITEM_TO_COMPARTMENT = {
    2: {1: ALL, 2: ALL, 3: {1}, 4: {1}, 5: {1}, 6: {2}, 7: {2}, 8: {2}},
    4: {1: ALL, 2: ALL, 3: {1, 2}, 4: {1, 2}, 5: {1, 2}, 6: {3, 4}, 7: {3, 4}, 8: {3, 4}},
    6: {1: ALL, 2: {1, 2}, 3: {1, 2, 3, 4}, 4: {1, 2, 3, 4}, 5: {1, 2, 3, 4}, 6: {1, 2, 3, 4},
        7: {3, 4, 5, 6}, 8: {3, 4, 5, 6}},
    8: {1: ALL, 2: {1, 2}, 3: {1, 2, 3, 4, 5, 6}, 4: {1, 2, 3, 4, 5, 6}, 5: {1, 2, 3, 4, 5, 6},
        6: {1, 2, 3, 4, 5, 6}, 7: {5, 6, 7, 8}, 8: {5, 6, 7, 8}},
}

# category -> categories it may share a compartment with (identical for every preset)
ITEM_TO_ITEM = {1: ALL, 2: ALL, 3: {1, 5, 7}, 4: {2, 6, 8}, 5: {1, 3, 7}, 6: {2, 4, 8}, 7: {1, 3, 5}, 8: {2, 4, 6}}


def category_allows(n_compartments: int, category: int, compartment: int) -> bool:
    """``compartment`` is 1-based."""
    try:
        row = ITEM_TO_COMPARTMENT[n_compartments]
    except KeyError:
        raise ValueError(f"no preset for {n_compartments} compartments") from None
    allowed = row[category]
    return allowed is ALL or compartment in allowed


def categories_compatible(a: int, b: int) -> bool:
    # symmetric closure of the preset lists; a category is compatible with itself
    if a == b:
        return True
    la, lb = ITEM_TO_ITEM[a], ITEM_TO_ITEM[b]
    return la is ALL or lb is ALL or b in la or a in lb


@dataclass(frozen=True)
class GeneratorConfig:
    n_clients: int = 20
    n_compartments: int = 6
    n_categories: int = 8
    horizon_days: int = 5
    windows_per_day: int = 1
    active_days: Optional[int] = None  # days on which a client can be served (None: every day)
    single_window: bool = False  # keep one window per client, drawn from the multi-window set
    seed: int = 0
    radius: float = 250.0  # miles
    speed: float = 50.0  # miles per hour
    demand_min: float = 500.0
    demand_max: float = 4500.0
    service_min: float = 0.5  # hours
    service_max: float = 1.5
    open_min: float = 6.0  # hour of day a window opens
    open_max: float = 10.0
    width_min: float = 4.0
    width_max: float = 8.0
    total_capacity: float = 40000.0
    compartment_capacity: str = "full"  # "full": each compartment up to the vehicle total; "split": total / count
    max_daily_work: float = 12.0
    max_daily_distance: float = 580.0
    break_length: float = 10.0
    fixed_cost: Optional[float] = None  # default: 10 x the most expensive singleton route

    def __post_init__(self):
        if self.n_compartments not in ITEM_TO_COMPARTMENT:
            raise ValueError(f"no preset for {self.n_compartments} compartments")
        if not 1 <= self.n_categories <= 8:
            raise ValueError("n_categories must be in 1..8")
        if self.compartment_capacity not in ("full", "split"):
            raise ValueError("compartment_capacity must be 'full' or 'split'")
        if self.n_clients < 1 or self.horizon_days < 1 or self.windows_per_day < 1:
            raise ValueError("n_clients, horizon_days and windows_per_day must be positive")


def _metric_closure(mat: np.ndarray) -> np.ndarray:
    out = mat.copy()
    for k in range(out.shape[0]):
        out = np.minimum(out, out[:, k:k + 1] + out[k:k + 1, :])
    return out


def generate(cfg: GeneratorConfig) -> Instance:
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_clients
    # depot-centred uniform disc
    radius = cfg.radius * np.sqrt(rng.random(n))
    angle = rng.random(n) * 2 * math.pi
    pts = np.zeros((n + 2, 2))
    pts[1:n + 1, 0] = radius * np.cos(angle)
    pts[1:n + 1, 1] = radius * np.sin(angle)
    euclid = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    dist = _metric_closure(np.round(euclid * 1000).astype(np.int64))
    travel = _metric_closure(np.round(euclid / cfg.speed * 1000).astype(np.int64))

    demand = rng.uniform(cfg.demand_min, cfg.demand_max, n)
    service = rng.uniform(cfg.service_min, cfg.service_max, n)
    category = rng.integers(1, cfg.n_categories + 1, n)
    days_avail = cfg.horizon_days if cfg.active_days is None else min(cfg.active_days, cfg.horizon_days)
    raw_windows = []
    for _ in range(n):
        days = sorted(rng.choice(cfg.horizon_days, size=days_avail, replace=False).tolist())
        wins = []
        # each day's service span is cut into equal slots, one window per slot
        slot = (cfg.open_max + cfg.width_max - cfg.open_min) / cfg.windows_per_day
        for d in days:
            for w in range(cfg.windows_per_day):
                s0 = cfg.open_min + w * slot
                start = s0 + rng.uniform(0, 0.3 * slot)
                width = min(rng.uniform(cfg.width_min, cfg.width_max) / cfg.windows_per_day, s0 + slot - start)
                wins.append((24 * d + start, 24 * d + start + width, d))
        raw_windows.append(wins)
    # separate stream so the single-window variant is a subset of the multi-window one
    pick = np.random.default_rng([cfg.seed, 1]).integers(0, 1 << 30, n)

    clients = []
    for i in range(n):
        wins = raw_windows[i]
        if cfg.single_window:
            wins = [wins[int(pick[i]) % len(wins)]]
        c = Client(
            id=i + 1,
            demand=to_fixed(float(demand[i])),
            service_time=to_fixed(float(service[i])),
            windows=tuple(TimeWindow(to_fixed(s), to_fixed(e), d) for s, e, d in wins),
            category=int(category[i]),
        )
        clients.append(normalize_time_windows(c))

    M = cfg.n_compartments
    total = to_fixed(cfg.total_capacity)
    comp_cap = total if cfg.compartment_capacity == "full" else total // M
    b = tuple(tuple(int(category_allows(M, int(category[i]), m + 1)) for m in range(M)) for i in range(n))
    f = tuple(tuple(int(categories_compatible(int(category[i]), int(category[j]))) for j in range(n))
              for i in range(n))
    cost = tuple(tuple(int(v) for v in row) for row in dist)
    if cfg.fixed_cost is None:
        fixed = 10 * max(cost[0][i] + cost[i][n + 1] for i in range(1, n + 1))
    else:
        fixed = to_fixed(cfg.fixed_cost)
    vehicle = VehicleType(total, tuple(CompartmentSpec(comp_cap) for _ in range(M)), fixed, b)
    rules = DriverRules(
        max_daily_work=to_fixed(cfg.max_daily_work),
        max_daily_distance=to_fixed(cfg.max_daily_distance),
        break_length=to_fixed(cfg.break_length),
        horizon_days=cfg.horizon_days,
    )
    return Instance(
        clients=tuple(clients),
        cost=cost,
        time=tuple(tuple(int(v) for v in row) for row in travel),
        distance=cost,
        vehicle=vehicle,
        rules=rules,
        item_item=f,
        coords=tuple((round(float(x), 6), round(float(y), 6)) for x, y in pts),
        name=f"gen-n{n}-m{M}-s{cfg.seed}",
    )


def with_compartments(inst: Instance, n_compartments: int, capacity: str = "full") -> Instance:
    """Same clients and geometry, different compartment preset."""
    M = n_compartments
    total = inst.vehicle.total_capacity
    comp_cap = total if capacity == "full" else total // M
    b = tuple(tuple(int(category_allows(M, c.category, m + 1)) for m in range(M)) for c in inst.clients)
    vehicle = replace(inst.vehicle, compartments=tuple(CompartmentSpec(comp_cap) for _ in range(M)),
                      item_compartment=b)
    return replace(inst, vehicle=vehicle, name=f"{inst.name}-m{M}")
