"""JSON instance and solution files (decimal units on disk, fixed-point in memory)."""
from __future__ import annotations

import json
from pathlib import Path

from .model import (
    Client,
    CompartmentSpec,
    DriverRules,
    Instance,
    InvalidInstanceError,
    Route,
    Solution,
    TimeWindow,
    VehicleType,
    from_fixed,
    normalize_time_windows,
    to_fixed,
)


def _mat_out(mat):
    return [[from_fixed(v) for v in row] for row in mat]


def _mat_in(mat):
    return tuple(tuple(to_fixed(v) for v in row) for row in mat)


def instance_to_dict(inst: Instance) -> dict:
    r = inst.rules
    return {
        "name": inst.name,
        "clients": [
            {
                "id": c.id,
                "demand": from_fixed(c.demand),
                "service_time": from_fixed(c.service_time),
                "category": c.category,
                "windows": [{"start": from_fixed(w.start), "end": from_fixed(w.end), "day": w.day}
                            for w in c.windows],
            }
            for c in inst.clients
        ],
        "coords": [list(p) for p in inst.coords] if inst.coords is not None else None,
        "matrices": {"cost": _mat_out(inst.cost), "time": _mat_out(inst.time),
                     "distance": _mat_out(inst.distance)},
        "vehicle": {
            "total_capacity": from_fixed(inst.vehicle.total_capacity),
            "fixed_cost": from_fixed(inst.vehicle.fixed_cost),
            "compartments": [{"capacity": from_fixed(c.capacity), "client_cap": c.client_cap}
                             for c in inst.vehicle.compartments],
            "item_compartment": [list(row) for row in inst.vehicle.item_compartment],
        },
        "driver_rules": {
            "max_daily_work": from_fixed(r.max_daily_work),
            "max_daily_distance": from_fixed(r.max_daily_distance),
            "break_length": from_fixed(r.break_length),
            "horizon_days": r.horizon_days,
            "max_total_work": None if r.max_total_work is None else from_fixed(r.max_total_work),
            "count_postbreak_leg": r.count_postbreak_leg,
        },
        "item_item": [list(row) for row in inst.item_item],
    }


def instance_from_dict(d: dict) -> Instance:
    try:
        clients = []
        for c in d["clients"]:
            wins = tuple(TimeWindow(to_fixed(w["start"]), to_fixed(w["end"]), int(w.get("day", 0)))
                         for w in c["windows"])
            clients.append(normalize_time_windows(Client(
                id=int(c["id"]),
                demand=to_fixed(c["demand"]),
                service_time=to_fixed(c.get("service_time", 0)),
                windows=wins,
                category=int(c.get("category", 1)),
            )))
        m = d["matrices"]
        v = d["vehicle"]
        r = d["driver_rules"]
        vehicle = VehicleType(
            total_capacity=to_fixed(v["total_capacity"]),
            compartments=tuple(CompartmentSpec(to_fixed(c["capacity"]), c.get("client_cap"))
                               for c in v["compartments"]),
            fixed_cost=to_fixed(v.get("fixed_cost", 0)),
            item_compartment=tuple(tuple(int(x) for x in row) for row in v["item_compartment"]),
        )
        rules = DriverRules(
            max_daily_work=to_fixed(r["max_daily_work"]),
            max_daily_distance=to_fixed(r["max_daily_distance"]),
            break_length=to_fixed(r["break_length"]),
            horizon_days=int(r["horizon_days"]),
            max_total_work=None if r.get("max_total_work") is None else to_fixed(r["max_total_work"]),
            count_postbreak_leg=bool(r.get("count_postbreak_leg", False)),
        )
        coords = d.get("coords")
        return Instance(
            clients=tuple(clients),
            cost=_mat_in(m["cost"]),
            time=_mat_in(m["time"]),
            distance=_mat_in(m["distance"]),
            vehicle=vehicle,
            rules=rules,
            item_item=tuple(tuple(int(x) for x in row) for row in d["item_item"]),
            coords=tuple((float(x), float(y)) for x, y in coords) if coords is not None else None,
            name=d.get("name", ""),
        )
    except (KeyError, TypeError) as exc:
        raise InvalidInstanceError(f"malformed instance file: {exc!r}") from exc


def solution_to_dict(sol: Solution) -> dict:
    routes = []
    for r in sol.routes:
        days = r.days
        routes.append({
            "visits": list(r.visits),
            "schedule": [{"arrival": from_fixed(a), "window": w, "day": d}
                         for a, w, d in zip(r.arrivals, r.windows, days)],
            "breaks": list(r.breaks),
            "loading": None if r.loading is None else list(r.loading),
            "cost": from_fixed(r.cost),
        })
    lb = sol.lower_bound
    return {
        "routes": routes,
        "objective": from_fixed(sol.objective),
        "lower_bound": from_fixed(lb) if lb not in (float("inf"), float("-inf")) else None,
        "status": sol.status,
        "wall_seconds": sol.wall_seconds,
        "stats": sol.stats,
    }


def solution_from_dict(d: dict) -> Solution:
    routes = []
    for r in d["routes"]:
        sched = r["schedule"]
        routes.append(Route(
            visits=tuple(r["visits"]),
            arrivals=tuple(to_fixed(s["arrival"]) for s in sched),
            windows=tuple(int(s["window"]) for s in sched),
            breaks=tuple(int(b) for b in r["breaks"]),
            loading=None if r.get("loading") is None else tuple(r["loading"]),
            cost=to_fixed(r["cost"]),
        ))
    lb = d.get("lower_bound")
    return Solution(
        routes=routes,
        objective=to_fixed(d["objective"]),
        lower_bound=float("-inf") if lb is None else float(to_fixed(lb)),
        status=d["status"],
        wall_seconds=float(d.get("wall_seconds", 0.0)),
        stats=d.get("stats", {}),
    )


def dump_json(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def load_instance(path) -> Instance:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidInstanceError(f"{path}: not valid JSON ({exc})") from exc
    return instance_from_dict(data)


def save_instance(inst: Instance, path) -> None:
    dump_json(instance_to_dict(inst), path)


def load_solution(path) -> Solution:
    return solution_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_solution(sol: Solution, path) -> None:
    dump_json(solution_to_dict(sol), path)
