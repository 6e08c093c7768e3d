"""Convergence studies: scaled EC processes against their limit, across n and seeds.

A study runs a grid of (n, seed) rows.  Each row samples a cloud, solves for
the exclusion radius, builds the EC process on the scale grid, and records
the sup distance between chi_n(t)/scale and the limit curve over the
configured interval.  The limit curve is evaluated once per study.

Output layout under the study directory:

    meta.json        version, config echo, RNG scheme, backend, total wall time
    results.csv      n,seed,R_n,scale,exterior_count,sup_distance,curve,error
    summary.csv      n,median,q10,q90 (nearest-rank quantiles over clean rows)
    curves/run_{n}_{seed}.csv (+ .json sidecars)

Everything except the wall-time entry in meta.json is a pure function of the
config, byte for byte, whatever the worker count: rows are computed from
per-seed RNG streams and written in canonical (n, seed) order.
"""

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ._backend import BACKEND
from ._version import __version__
from .complexes import DEFAULT_BUDGET, ComplexRule, rule_from_spec
from .ec_process import default_grid, ec_process, process_csv_text
from .errors import ConfigurationError, PrecisionError, ResourceBudgetError
from .limits import LimitFunction, MCSettings
from .radial_models import (
    RadialLaw,
    law_from_json,
    preset,
    radius_R_n,
    sample_cloud,
    scaling_denominator,
)
from .rng import BIT_GENERATOR, STREAM_AUDIT, STREAM_CLOUD, STREAM_LIMIT_BASE

DEFAULT_MAX_N = 1_000_000


def _resolve_law(spec) -> RadialLaw:
    if isinstance(spec, RadialLaw):
        return spec
    if isinstance(spec, str):
        return preset(spec)
    if isinstance(spec, dict):
        return law_from_json(spec)
    raise ConfigurationError(f"cannot interpret law spec {spec!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative study description; all fields JSON-representable.

    ``law`` is a preset name, a law JSON document, or a RadialLaw; ``rule`` a
    "kind[:threshold]" string, a rule document, or a ComplexRule.  n beyond
    ``max_n`` is rejected (exterior counts at the default laws stay small well
    past that size; raising max_n is an explicit opt-in).
    """

    law: object = "example_3_2"
    rule: object = "rips_linf"
    xi: float = 1.0
    n_values: tuple = (1_000, 10_000, 100_000)
    seeds: tuple = tuple(range(1, 21))
    t_max: float = 3.0
    step: float = 0.02
    sup_interval: tuple = (0.1, 3.0)
    eps: float = 1e-6
    mc_samples: int = 200_000
    mc_seed: int = 0
    k_cap: Optional[int] = None
    budget: int = DEFAULT_BUDGET
    max_n: int = DEFAULT_MAX_N

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "sup_interval",
                           (float(self.sup_interval[0]), float(self.sup_interval[1])))
        if not self.n_values:
            raise ConfigurationError("n_values must be nonempty")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ConfigurationError(f"n_values must be strictly increasing: {self.n_values}")
        if self.n_values[0] < 1:
            raise ConfigurationError("n_values must be >= 1")
        if self.n_values[-1] > self.max_n:
            raise ConfigurationError(
                f"n = {self.n_values[-1]} exceeds max_n = {self.max_n}; "
                "raise max_n explicitly to run larger studies"
            )
        if not self.seeds:
            raise ConfigurationError("seeds must be nonempty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigurationError(f"seeds must be distinct: {self.seeds}")
        if not (self.t_max > 0 and self.step > 0):
            raise ConfigurationError("t_max and step must be positive")
        a, b = self.sup_interval
        if not (0 <= a < b <= self.t_max + 1e-9):
            raise ConfigurationError(
                f"sup_interval must satisfy 0 <= a < b <= t_max, got {self.sup_interval}"
            )
        if not (self.eps > 0):
            raise ConfigurationError("eps must be positive")
        if self.mc_samples < 2:
            raise ConfigurationError("mc_samples must be >= 2")

    def resolved_law(self) -> RadialLaw:
        return _resolve_law(self.law)

    def resolved_rule(self) -> ComplexRule:
        return rule_from_spec(self.rule)

    def canonical(self) -> dict:
        law = self.resolved_law()
        return {
            "law": law.describe(),
            "rule": self.resolved_rule().describe(),
            "xi": self.xi,
            "n_values": list(self.n_values),
            "seeds": list(self.seeds),
            "t_max": self.t_max,
            "step": self.step,
            "sup_interval": list(self.sup_interval),
            "eps": self.eps,
            "mc_samples": self.mc_samples,
            "mc_seed": self.mc_seed,
            "k_cap": self.k_cap,
            "budget": self.budget,
            "max_n": self.max_n,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(doc) - known
        if extra:
            raise ConfigurationError(f"unknown config keys: {sorted(extra)}")
        return cls(**doc)


@dataclass
class RunRow:
    n: int
    seed: int
    R_n: float
    scale: float
    exterior_count: int
    sup_distance: float
    curve_file: str
    error: str = ""
    wall_time: float = 0.0


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list
    summary: list
    limit_t: np.ndarray
    limit_values: np.ndarray
    limit_k_used: int
    out_dir: Optional[Path] = None


def nearest_rank(values, p: float) -> float:
    """Nearest-rank quantile: the ceil(p*N)-th smallest value."""
    vals = sorted(float(v) for v in values)
    if not vals:
        raise ConfigurationError("quantile of an empty sample")
    if not (0 < p <= 1):
        raise ConfigurationError(f"p must lie in (0, 1], got {p!r}")
    rank = max(1, math.ceil(p * len(vals)))
    return vals[rank - 1]


def _sup_mask(grid: np.ndarray, a: float, b: float) -> np.ndarray:
    slack = 1e-9 * max(1.0, b)
    return (grid >= a - slack) & (grid <= b + slack)


def _compute_row(law, rule, config: ExperimentConfig, n: int, seed: int,
                 grid: np.ndarray, mask: np.ndarray, limit_vals: np.ndarray):
    """One (n, seed) row; returns (RunRow fields..., curve_text, sidecar)."""
    t0 = time.perf_counter()
    cloud = sample_cloud(law, n, seed)
    R = radius_R_n(law, n, config.xi)
    norms = np.sqrt(np.einsum("ij,ij->i", cloud.points, cloud.points))
    ext_count = int((norms >= R).sum())
    curve_name = f"curves/run_{n}_{seed}.csv"
    try:
        proc = ec_process(cloud, rule, R, grid, k_cap=config.k_cap,
                          budget=config.budget)
    except (ResourceBudgetError, PrecisionError) as exc:
        row = RunRow(n=n, seed=seed, R_n=R, scale=scaling_denominator(law, R),
                     exterior_count=ext_count, sup_distance=float("nan"),
                     curve_file="", error=str(exc),
                     wall_time=time.perf_counter() - t0)
        return row, None, None
    sup_d = float(np.abs(proc.chi_scaled[mask] - limit_vals).max())
    row = RunRow(n=n, seed=seed, R_n=R, scale=proc.scale,
                 exterior_count=int(proc.meta["exterior_count"]),
                 sup_distance=sup_d, curve_file=curve_name,
                 wall_time=time.perf_counter() - t0)
    text, sidecar = process_csv_text(proc, per_k=False)
    return row, text, sidecar


def _row_worker(payload):
    cfg = ExperimentConfig.from_dict(payload["config"])
    law = cfg.resolved_law()
    rule = cfg.resolved_rule()
    grid = np.asarray(payload["grid"], dtype=np.float64)
    mask = np.asarray(payload["mask"], dtype=bool)
    limit_vals = np.asarray(payload["limit_vals"], dtype=np.float64)
    return _compute_row(law, rule, cfg, payload["n"], payload["seed"],
                        grid, mask, limit_vals)


def sup_distance_table(rows) -> list:
    """Nearest-rank median/q10/q90 of sup_distance per n, clean rows only."""
    by_n = {}
    for row in rows:
        if row.error:
            continue
        by_n.setdefault(row.n, []).append(row.sup_distance)
    out = []
    for n in sorted(by_n):
        vals = by_n[n]
        out.append({
            "n": n,
            "median": nearest_rank(vals, 0.5),
            "q10": nearest_rank(vals, 0.1),
            "q90": nearest_rank(vals, 0.9),
        })
    return out


def _fmt(x) -> str:
    return repr(float(x))


def run_convergence(config: ExperimentConfig, out_dir=None,
                    jobs: int = 1) -> ExperimentResult:
    """Run the (n, seed) grid of a study and write its output directory.

    ``jobs`` > 1 distributes rows over a process pool; outputs are written by
    the parent in canonical order, so the bytes are identical to a jobs=1 run.
    Resource and precision errors abort only their row, recorded in the
    ``error`` column.  Custom (callable) laws and rules cannot cross process
    boundaries; use jobs=1 for them.
    """
    t_start = time.perf_counter()
    law = config.resolved_law()
    rule = config.resolved_rule()
    grid = default_grid(config.t_max, config.step)
    a, b = config.sup_interval
    mask = _sup_mask(grid, a, b)
    if not mask.any():
        raise ConfigurationError("sup_interval contains no grid points")
    mc = MCSettings(samples=config.mc_samples, seed=config.mc_seed)
    limit = LimitFunction.for_law(law, rule=rule, xi=config.xi,
                                  eps=config.eps, mc=mc)
    lcurve = limit.curve(grid[mask])
    limit_vals = lcurve.value

    tasks = [(n, seed) for n in config.n_values for seed in config.seeds]
    results = {}
    if jobs > 1:
        if not law.serializable or rule.kind == "custom":
            raise ConfigurationError(
                "jobs > 1 needs JSON-representable law and rule specs; "
                "run caller-supplied callables with jobs=1"
            )
        payload_base = {
            "config": config.canonical(),
            "grid": grid.tolist(),
            "mask": mask.tolist(),
            "limit_vals": np.asarray(limit_vals).tolist(),
        }
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = {}
            for n, seed in tasks:
                payload = dict(payload_base, n=n, seed=seed)
                futs[(n, seed)] = pool.submit(_row_worker, payload)
            for key, fut in futs.items():
                results[key] = fut.result()
    else:
        for n, seed in tasks:
            results[(n, seed)] = _compute_row(law, rule, config, n, seed,
                                              grid, mask, limit_vals)

    rows = [results[key][0] for key in tasks]
    summary = sup_distance_table(rows)
    result = ExperimentResult(config=config, rows=rows, summary=summary,
                              limit_t=grid[mask], limit_values=np.asarray(limit_vals),
                              limit_k_used=lcurve.k_used)

    if out_dir is not None:
        out = Path(out_dir)
        (out / "curves").mkdir(parents=True, exist_ok=True)
        for key in tasks:
            row, text, sidecar = results[key]
            if text is None:
                continue
            curve_path = out / row.curve_file
            curve_path.write_text(text, encoding="utf-8")
            curve_path.with_suffix(".json").write_text(
                json.dumps(sidecar, indent=2, sort_keys=True) + "\n",
                encoding="utf-8")
        with (out / "results.csv").open("w", encoding="utf-8", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["n", "seed", "R_n", "scale", "exterior_count",
                         "sup_distance", "curve", "error"])
            for row in rows:
                wr.writerow([row.n, row.seed, _fmt(row.R_n), _fmt(row.scale),
                             row.exterior_count, _fmt(row.sup_distance),
                             row.curve_file, row.error])
        with (out / "summary.csv").open("w", encoding="utf-8", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["n", "median", "q10", "q90"])
            for s in summary:
                wr.writerow([s["n"], _fmt(s["median"]), _fmt(s["q10"]),
                             _fmt(s["q90"])])
        meta = {
            "version": __version__,
            "config": config.canonical(),
            "rng": {
                "algorithm": BIT_GENERATOR,
                "streams": {
                    "cloud": STREAM_CLOUD,
                    "audit": STREAM_AUDIT,
                    "limit_term_base": STREAM_LIMIT_BASE,
                },
            },
            "backend": BACKEND,
            "limit_k_used": int(lcurve.k_used),
            "rows": len(rows),
            "wall_time_s": time.perf_counter() - t_start,
        }
        (out / "meta.json").write_text(
            json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        result.out_dir = out
    return result
