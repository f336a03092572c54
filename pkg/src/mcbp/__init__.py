"""Branch-and-price for the multi-compartment VRP with multiple time windows."""
from .model import (
    SCALE,
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
    to_fixed,
    validate_instance,
    validate_route,
    validate_solution,
)
from .config import SolverConfig
from .generator import GeneratorConfig, generate
from .bnb import solve_bnp
from .rolling import solve_rs_bnp
from .heuristic import solve_lh
from .oracle import oracle_solve

__version__ = "0.1.0"

__all__ = [
    "SCALE", "Client", "CompartmentSpec", "DriverRules", "Instance", "InvalidInstanceError", "Route",
    "Solution", "TimeWindow", "VehicleType", "from_fixed", "to_fixed", "validate_instance",
    "validate_route", "validate_solution", "SolverConfig", "GeneratorConfig", "generate",
    "solve_bnp", "solve_rs_bnp", "solve_lh", "oracle_solve",
]
