"""Experiment runner: instances x solver modes x generator sweeps -> CSV, table, plots."""
from __future__ import annotations

import csv
import itertools
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path
from typing import Optional

from .config import SolverConfig
from .generator import GeneratorConfig, generate
from .io import load_instance
from .model import Instance, Solution, from_fixed, validate_solution

log = logging.getLogger(__name__)

COLUMNS = ["instance", "mode", "params", "status", "Obj", "#Veh", "#Col", "#Nod", "Time", "Gap", "error"]


def solve_with(mode: str, inst: Instance, config: SolverConfig) -> Solution:
    if mode == "bnp":
        from .bnb import solve_bnp
        return solve_bnp(inst, config)
    if mode == "rsbnp":
        from .rolling import solve_rs_bnp
        return solve_rs_bnp(inst, config)
    if mode == "lh":
        from .heuristic import solve_lh
        return solve_lh(inst, config)
    if mode == "oracle":
        from .oracle import oracle_solve
        return oracle_solve(inst)
    raise ValueError(f"unknown mode {mode!r}")


def _gap(sol: Solution) -> Optional[float]:
    lb = sol.lower_bound
    if not sol.routes or lb in (math.inf, -math.inf) or sol.objective == 0:
        return None
    return max(0.0, 100.0 * (sol.objective - lb) / sol.objective)


def _expand(spec: dict, base_dir: Path) -> list[tuple[str, dict, object]]:
    """(instance label, sweep params, GeneratorConfig or file path) triples."""
    sweep = spec.get("sweep", {}) or {}
    keys = sorted(sweep)
    combos = [dict(zip(keys, vals)) for vals in itertools.product(*(sweep[k] for k in keys))] or [{}]
    out = []
    for k, entry in enumerate(spec.get("instances", []) or []):
        if "file" in entry:
            out.append((entry.get("name", Path(entry["file"]).stem), {}, base_dir / entry["file"]))
            continue
        gen = GeneratorConfig(**entry.get("generator", {}))
        for params in combos:
            cfg = replace(gen, **params)
            label = entry.get("name", f"gen{k}-n{cfg.n_clients}-s{cfg.seed}")
            out.append((label, params, cfg))
    return out


def _run_one(job) -> dict:
    label, params, source, mode, solver = job
    row = {"instance": label, "mode": mode, "params": json.dumps(params, sort_keys=True), "status": "",
           "Obj": "", "#Veh": "", "#Col": "", "#Nod": "", "Time": "", "Gap": "", "error": ""}
    try:
        inst = generate(source) if isinstance(source, GeneratorConfig) else load_instance(source)
        sol = solve_with(mode, inst, SolverConfig.from_dict(solver))
        problems = validate_solution(inst, sol)
        if problems:
            raise RuntimeError("invalid solution: " + "; ".join(problems[:3]))
        gap = _gap(sol)
        row.update({
            "status": sol.status,
            "Obj": f"{from_fixed(sol.objective):.3f}" if sol.routes else "",
            "#Veh": len(sol.routes),
            "#Col": sol.stats.get("columns", ""),
            "#Nod": sol.stats.get("nodes", ""),
            "Time": f"{sol.wall_seconds:.2f}",
            "Gap": "" if gap is None else f"{gap:.2f}",
        })
    except Exception as exc:  # recorded per run; the runner keeps going
        log.warning("run %s/%s failed: %s", label, mode, exc)
        row.update(status="error", error=f"{type(exc).__name__}: {exc}")
    return row


def format_table(rows: list[dict]) -> str:
    if not rows:
        return "(no runs)\n"
    cols = [c for c in COLUMNS if c != "error"] + (["error"] if any(r["error"] for r in rows) else [])
    widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in cols}
    lines = ["  ".join(c.ljust(widths[c]) for c in cols), "  ".join("-" * widths[c] for c in cols)]
    for r in rows:
        lines.append("  ".join(str(r[c]).ljust(widths[c]) for c in cols))
    return "\n".join(lines) + "\n"


def _plot(rows: list[dict], out_dir: Path) -> list[str]:
    """Objective and runtime against compartment count, one line per instance and mode."""
    series: dict[tuple, list] = {}
    for r in rows:
        params = json.loads(r["params"])
        if "n_compartments" not in params or not r["Obj"]:
            continue
        series.setdefault((r["instance"], r["mode"]), []).append(
            (params["n_compartments"], float(r["Obj"]), float(r["Time"])))
    if not series:
        return []
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for (inst, mode), pts in sorted(series.items()):
        pts.sort()
        xs = [p[0] for p in pts]
        ax1.plot(xs, [p[1] for p in pts], marker="o", label=f"{inst} {mode}")
        ax2.plot(xs, [p[2] for p in pts], marker="o", label=f"{inst} {mode}")
    ax1.set_xlabel("compartments")
    ax1.set_ylabel("objective")
    ax2.set_xlabel("compartments")
    ax2.set_ylabel("time (s)")
    ax1.legend(fontsize="small")
    fig.tight_layout()
    path = out_dir / "compartments.png"
    fig.savefig(path)
    plt.close(fig)
    return [str(path)]


def run_experiment(spec, out_dir) -> dict:
    """Run every (instance, sweep point, mode) combination and write the report.

    ``spec`` is a dict or a path to a JSON file with keys ``instances``
    (generator configs or instance files), ``modes``, optional ``sweep``
    (generator field -> values), ``solver`` (SolverConfig overrides),
    ``workers`` and ``plots``.
    """
    base_dir = Path(".")
    if not isinstance(spec, dict):
        base_dir = Path(spec).parent
        spec = json.loads(Path(spec).read_text(encoding="utf-8"))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    solver = spec.get("solver", {}) or {}
    SolverConfig.from_dict(solver)  # fail early on unknown options
    modes = spec.get("modes", ["rsbnp"]) or []
    jobs = [(label, params, src, mode, solver) for label, params, src in _expand(spec, base_dir) for mode in modes]
    workers = int(spec.get("workers", 1))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_run_one, jobs))
    else:
        rows = [_run_one(j) for j in jobs]

    with open(out / "results.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS)
        w.writeheader()
        w.writerows(rows)
    table = format_table(rows)
    (out / "report.txt").write_text(table, encoding="utf-8")
    plots = _plot(rows, out) if spec.get("plots", False) else []
    return {"rows": rows, "table": table, "plots": plots, "csv": str(out / "results.csv")}


def example_spec() -> dict:
    return {
        "instances": [{"generator": asdict(GeneratorConfig(n_clients=10, seed=1, horizon_days=3, active_days=1))}],
        "modes": ["rsbnp", "lh"],
        "sweep": {"n_compartments": [2, 4, 6, 8]},
        "solver": {"time_limit": 60},
        "plots": True,
    }
