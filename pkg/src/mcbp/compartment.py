"""Exact loading feasibility for a route's clients over a vehicle's compartments."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .model import Instance


@dataclass(frozen=True)
class AssignmentProblem:
    # (client id, demand, category) per client on the route
    clients: tuple[tuple[int, int, int], ...]
    capacities: tuple[int, ...]
    client_caps: tuple[Optional[int], ...]
    total_capacity: int
    # allowed[k][m]: client k may use compartment m
    allowed: tuple[tuple[int, ...], ...]
    # compatible[k][l]: clients k and l may share a compartment
    compatible: tuple[tuple[int, ...], ...]
    reason: str = ""

    @classmethod
    def from_route(cls, inst: Instance, visits: Sequence[int], reason: str = "") -> "AssignmentProblem":
        v = inst.vehicle
        return cls(
            clients=tuple((c, inst.clients[c - 1].demand, inst.clients[c - 1].category) for c in visits),
            capacities=tuple(cp.capacity for cp in v.compartments),
            client_caps=tuple(cp.client_cap for cp in v.compartments),
            total_capacity=v.total_capacity,
            allowed=tuple(v.item_compartment[c - 1] for c in visits),
            compatible=tuple(tuple(inst.item_item[a - 1][b - 1] for b in visits) for a in visits),
            reason=reason,
        )


def check_feasible(p: AssignmentProblem) -> Optional[tuple[int, ...]]:
    """Return a compartment index per client (route order), or None if none exists.

    Depth-first search placing clients by decreasing demand.  Empty
    compartments that are indistinguishable for the remaining clients are
    tried only once.
    """
    k = len(p.clients)
    n_comp = len(p.capacities)
    demands = [c[1] for c in p.clients]
    if sum(demands) > p.total_capacity:
        return None
    order = sorted(range(k), key=lambda i: (-demands[i], i))
    # compartment signature for symmetry breaking among empty compartments
    sig = [
        (p.capacities[m], p.client_caps[m], tuple(p.allowed[i][m] for i in range(k)))
        for m in range(n_comp)
    ]
    load = [0] * n_comp
    members: list[list[int]] = [[] for _ in range(n_comp)]
    assign = [-1] * k

    def place(pos: int) -> bool:
        if pos == k:
            return True
        i = order[pos]
        q = demands[i]
        tried_empty = set()
        for m in range(n_comp):
            if not p.allowed[i][m] or load[m] + q > p.capacities[m]:
                continue
            mem = members[m]
            if not mem:
                if sig[m] in tried_empty:
                    continue
                tried_empty.add(sig[m])
            cap = p.client_caps[m]
            if cap is not None and len(mem) >= cap:
                continue
            row = p.compatible[i]
            if any(not row[o] for o in mem):
                continue
            load[m] += q
            mem.append(i)
            assign[i] = m
            if place(pos + 1):
                return True
            mem.pop()
            load[m] -= q
        assign[i] = -1
        return False

    return tuple(assign) if place(0) else None


def find_loading(inst: Instance, visits: Sequence[int]) -> Optional[tuple[int, ...]]:
    if not visits:
        return ()
    return check_feasible(AssignmentProblem.from_route(inst, visits))


def needs_check(inst: Instance, visits: Sequence[int], kappa: int) -> bool:
    """True when a route's loading must be verified explicitly.

    A route is exempt only if its load stays below ``L - kappa``, every pair
    of its clients is compatible, and every client may use any compartment.
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    v = inst.vehicle
    if sum(inst.clients[c - 1].demand for c in visits) >= v.total_capacity - kappa:
        return True
    for c in visits:
        if not all(v.item_compartment[c - 1]):
            return True
    for a_idx, a in enumerate(visits):
        row = inst.item_item[a - 1]
        for b in visits[a_idx + 1:]:
            if not row[b - 1]:
                return True
    return False
