"""The Euler characteristic process chi_n(t) of exterior points on a scale grid.

chi_n(t) = sum_k (-1)^k S_k(t) where S_k(t) counts the k-simplices, at scale
t, of the complex built on the points with |y| >= R_n.  The sample path is
right-continuous piecewise constant; a grid evaluation is exact at every grid
node and is the step interpolation in between (exact everywhere when the grid
contains all breakpoints).

CSV interchange: header "t,chi,chi_scaled", optionally followed by per-k
columns "S0,S1,...".  Metadata (n, seed, R_n, scale, law, rule) goes to a
sidecar JSON next to the CSV (same name, .json suffix).
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ._backend import BACKEND
from .complexes import (
    ComplexRule,
    DEFAULT_BUDGET,
    ec_at,
    grid_census,
    points_outside,
)
from .errors import DomainError, UnsupportedConfigurationError
from .radial_models import PointCloud, scaling_denominator

__all__ = [
    "ECProcess", "ec_at", "ec_process", "default_grid", "breakpoints",
    "sup_functional", "write_process_csv", "read_process_csv",
]

_SLACK = 1e-9  # relative grid-coverage slack for float grids built by arange


def default_grid(t_max: float = 3.0, step: float = 0.02) -> np.ndarray:
    """The grid {step * j : j = 0..floor(t_max/step)}; default covers [0, 3]."""
    if not (t_max > 0) or not (step > 0):
        raise DomainError("t_max and step must be positive")
    count = int(math.floor(t_max / step + 1e-9)) + 1
    return np.arange(count, dtype=np.float64) * step


@dataclass(frozen=True, eq=False)
class ECProcess:
    """A piecewise-constant sample path of chi_n with its per-k curves."""

    t_grid: np.ndarray
    chi: np.ndarray
    scale: float
    n: int
    R_n: float
    per_k: Optional[np.ndarray] = None
    truncated: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def chi_scaled(self) -> np.ndarray:
        return self.chi / self.scale

    def value_at(self, t: float) -> int:
        """chi at the largest grid node <= t (right-continuous step lookup)."""
        if not (self.t_grid[0] <= t <= self.t_grid[-1]):
            raise DomainError(
                f"t = {t!r} outside grid coverage "
                f"[{self.t_grid[0]!r}, {self.t_grid[-1]!r}]"
            )
        idx = int(np.searchsorted(self.t_grid, t, side="right")) - 1
        return int(self.chi[idx])


def ec_process(cloud, rule: ComplexRule, R_n: float, t_grid=None, *,
               k_cap=None, budget=DEFAULT_BUDGET, scale=None,
               keep_per_k: bool = True) -> ECProcess:
    """Build chi_n on a grid from the points outside the ball of radius R_n.

    One census pass at the grid ceiling serves the whole grid: each simplex is
    binned at its appearance scale and counts accumulate along the grid (valid
    by the filtration nesting H4).  ``scale`` defaults to the convergence
    denominator of the cloud's law, or to 1.0 when R_n = 0 (degenerate ball,
    no normalization defined).
    """
    if t_grid is None:
        t_grid = default_grid()
    grid = np.asarray(t_grid, dtype=np.float64)
    if isinstance(cloud, PointCloud):
        pts, law, n, seed = cloud.points, cloud.law, cloud.n, cloud.seed
    else:
        pts = np.asarray(cloud, dtype=np.float64)
        law, n, seed = None, int(pts.shape[0]), None
    if not (R_n >= 0):
        raise DomainError(f"R_n must be nonnegative, got {R_n!r}")
    ext = points_outside(pts, R_n)
    if scale is None:
        if law is not None and R_n > 0:
            scale = scaling_denominator(law, R_n)
        else:
            scale = 1.0
    counts, nsx, trunc = grid_census(ext, rule, grid, k_cap=k_cap, budget=budget)
    signs = np.where(np.arange(counts.shape[0]) % 2 == 0, 1, -1).astype(np.int64)
    chi = (signs[:, None] * counts).sum(axis=0)
    meta = {
        "n": n,
        "seed": seed,
        "R_n": float(R_n),
        "scale": float(scale),
        "exterior_count": int(ext.shape[0]),
        "law": law.describe() if law is not None else None,
        "rule": rule.describe(),
        "truncated": bool(trunc),
        "n_simplices": int(nsx),
        "backend": BACKEND,
    }
    return ECProcess(t_grid=grid, chi=chi.astype(np.int64), scale=float(scale),
                     n=n, R_n=float(R_n), per_k=counts if keep_per_k else None,
                     truncated=bool(trunc), meta=meta)


def breakpoints(points, rule: ComplexRule) -> np.ndarray:
    """Sorted distinct scales where chi can change (Rips rules only).

    A clique appears with its largest edge, so the critical scales are exactly
    the pairwise distances divided by the threshold.  Cech appearance scales
    would need miniball radii of every subset; unsupported.
    """
    if rule.kind not in ("rips_l2", "rips_linf"):
        raise UnsupportedConfigurationError(
            f"breakpoints are defined for Rips rules, not {rule.kind!r}"
        )
    pts = np.asarray(getattr(points, "points", points), dtype=np.float64)
    m = pts.shape[0]
    if m < 2:
        return np.empty(0, dtype=np.float64)
    a, b = np.triu_indices(m, k=1)
    diff = pts[a] - pts[b]
    if rule.kind == "rips_linf":
        dist = np.abs(diff).max(axis=1)
    else:
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return np.unique(dist / rule.unit_threshold)


def sup_functional(obj, a: float, b: float, *, step: float = 0.02) -> float:
    """sup of |value| over [a, b] for an ECProcess or a limit-function object.

    For a process the sup runs over grid nodes in [a, b] (exact when the grid
    holds every breakpoint in the interval, a step-resolution approximation
    otherwise); the interval must be covered by the grid.  For a limit object
    (anything with a ``curve`` method) the sup runs over {a + step*j} plus b.
    """
    if not (0 <= a < b):
        raise DomainError(f"need 0 <= a < b, got a={a!r}, b={b!r}")
    if isinstance(obj, ECProcess):
        t = obj.t_grid
        slack = _SLACK * max(1.0, b)
        if t[0] > a + slack or t[-1] < b - slack:
            raise DomainError(
                f"[{a!r}, {b!r}] not covered by the process grid "
                f"[{t[0]!r}, {t[-1]!r}]"
            )
        mask = (t >= a - slack) & (t <= b + slack)
        return float(np.abs(obj.chi[mask]).max())
    if hasattr(obj, "curve"):
        count = int(math.floor((b - a) / step + 1e-9)) + 1
        grid = a + np.arange(count, dtype=np.float64) * step
        if grid[-1] < b - _SLACK * max(1.0, b):
            grid = np.append(grid, b)
        vals = obj.curve(grid).value
        return float(np.abs(np.asarray(vals)).max())
    raise DomainError(f"cannot take a sup over {type(obj).__name__}")


# ---------------------------------------------------------------------------
# CSV interchange


def _fmt(x) -> str:
    return repr(float(x))


def process_csv_text(proc: ECProcess, *, per_k: bool = False):
    """(csv_text, sidecar_dict) for a process, without touching the filesystem."""
    keep_k = per_k and proc.per_k is not None
    header = "t,chi,chi_scaled"
    if keep_k:
        header += "," + ",".join(f"S{k}" for k in range(proc.per_k.shape[0]))
    lines = [header]
    scaled = proc.chi_scaled
    for j in range(proc.t_grid.shape[0]):
        row = [_fmt(proc.t_grid[j]), str(int(proc.chi[j])), _fmt(scaled[j])]
        if keep_k:
            row.extend(str(int(v)) for v in proc.per_k[:, j])
        lines.append(",".join(row))
    sidecar = dict(proc.meta)
    sidecar.setdefault("scale", proc.scale)
    sidecar.setdefault("R_n", proc.R_n)
    sidecar.setdefault("n", proc.n)
    sidecar.setdefault("truncated", proc.truncated)
    return "\n".join(lines) + "\n", sidecar


def write_process_csv(proc: ECProcess, path, *, per_k: bool = False) -> Path:
    """Write "t,chi,chi_scaled[,S0,S1,...]" plus a metadata sidecar JSON."""
    path = Path(path)
    text, sidecar = process_csv_text(proc, per_k=per_k)
    path.write_text(text, encoding="utf-8")
    path.with_suffix(".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path


def read_process_csv(path) -> ECProcess:
    path = Path(path)
    text = path.read_text(encoding="utf-8").strip().split("\n")
    cols = text[0].split(",")
    if cols[:3] != ["t", "chi", "chi_scaled"]:
        raise DomainError(f"{path} does not look like a process CSV: {text[0]!r}")
    k_cols = len(cols) - 3
    t, chi = [], []
    per_k = [[] for _ in range(k_cols)]
    for line in text[1:]:
        parts = line.split(",")
        t.append(float(parts[0]))
        chi.append(int(parts[1]))
        for k in range(k_cols):
            per_k[k].append(int(parts[3 + k]))
    meta = {}
    side = path.with_suffix(".json")
    if side.exists():
        meta = json.loads(side.read_text(encoding="utf-8"))
    chi_arr = np.asarray(chi, dtype=np.int64)
    scale = float(meta.get("scale", 1.0))
    return ECProcess(
        t_grid=np.asarray(t, dtype=np.float64),
        chi=chi_arr,
        scale=scale,
        n=int(meta.get("n") or 0),
        R_n=float(meta.get("R_n", 0.0)),
        per_k=np.asarray(per_k, dtype=np.int64) if k_cols else None,
        truncated=bool(meta.get("truncated", False)),
        meta=meta,
    )
