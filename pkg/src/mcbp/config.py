"""Solver configuration shared by the exact, rolling-space and heuristic drivers."""
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional


@dataclass
class SolverConfig:
    covering: bool = True
    time_limit: Optional[float] = None
    node_limit: Optional[int] = None
    max_cg_iterations: int = 500
    tolerance: float = 1e-6  # integrality / fathoming tolerance, in cost units
    lp_method: str = "ipm"  # "ipm" (central duals, no crossover) or "simplex"

    # pricing
    pricing_limit: int = 200
    same_day: bool = True
    inter_day: bool = True
    arc_filtering: bool = True
    aggressive: bool = True
    aggressive_tol: float = 0.001  # relative RMP improvement considered stalled
    aggressive_patience: int = 3
    heuristic_caps: tuple = (8, 64)  # labels kept per node and day at each heuristic level (0: no cap)
    bound_pruning: bool = True
    pricing_loading: str = "set"  # "set": exact loading check per client set; "track": per-compartment labels
    eps_frac: float = 0.01
    eps_time: Optional[float] = None
    eps_cost: Optional[float] = None
    eps_work: Optional[float] = None
    eps_drive: Optional[float] = None

    # master problem
    column_selection: bool = True
    topk: int = 30
    disjoint_k: int = 10
    stabilization: bool = True
    smoothing: float = 0.2  # weight of the stability centre

    # tree search
    diving: bool = True
    dive_every: int = 10
    dive_pricing: bool = True
    dive_cg_iterations: int = 30
    master_mip: bool = True  # integer covering over the pool alongside each dive
    master_mip_nodes: int = 200
    warm_start: bool = True

    # rolling space
    kappa_frac: float = 0.15
    cluster_min: int = 20
    cluster_max: int = 25
    cluster_step: float = 0.5
    threads: int = 1
    relaxed_pricing: bool = True
    exact_fallback: bool = True

    log_path: Optional[str] = None
    seed: int = 0

    def __post_init__(self):
        if self.lp_method not in ("ipm", "simplex"):
            raise ValueError(f"unknown lp_method {self.lp_method!r}")
        if self.pricing_loading not in ("set", "track"):
            raise ValueError(f"unknown pricing_loading {self.pricing_loading!r}")
        if not 1 <= self.cluster_min <= self.cluster_max:
            raise ValueError("need 1 <= cluster_min <= cluster_max")
        if not 0 < self.cluster_step <= 1:
            raise ValueError("cluster_step must be in (0, 1]")
        if self.kappa_frac < 0:
            raise ValueError("kappa_frac must be nonnegative")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if self.time_limit is not None and self.time_limit < 0:
            raise ValueError("time_limit must be nonnegative")

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown solver options: {sorted(unknown)}")
        return cls(**d)
