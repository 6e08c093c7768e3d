"""Exhaustive subset references for simplex counts and the Euler characteristic.

For a small point set (m <= 20) every nonempty subset is classified directly:
its appearance scale for the built-in rules, or its indicator value for a
custom rule.  chi and per-dimension counts follow by the alternating sum over
all 2^m - 1 subsets, with no graph enumeration involved, which makes this an
independent oracle for the census machinery.

run_oracle_suite draws seeded clouds from the heavy-tail example preset, cuts
them to a fixed number of exterior points, and compares ec_at/simplex_counts
against the subset reference across rules and scales.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from ._miniball import miniball_radius
from .complexes import ComplexRule, ec_at, evaluate_h, points_outside, simplex_counts
from .errors import DomainError
from .radial_models import preset, sample_cloud

_MAX_BRUTE = 20

DEFAULT_SCALES = (0.4, 0.9, 1.5, 2.2, 3.0)


def subset_scales(points, rule: ComplexRule):
    """Appearance scale of every nonempty subset, grouped by dimension.

    Returns a list ``scales`` with scales[k] an array over all (k+1)-subsets
    in combinations order.  Built-in rules only.
    """
    pts = np.asarray(points, dtype=np.float64)
    m = pts.shape[0]
    if m > _MAX_BRUTE:
        raise DomainError(f"subset oracle is exponential; m={m} exceeds {_MAX_BRUTE}")
    if rule.kind == "custom":
        raise DomainError("custom rules have no appearance scale; use subset_counts_at")
    out = [np.zeros(m, dtype=np.float64)]
    if m < 2:
        return out
    diff = pts[:, None, :] - pts[None, :, :]
    if rule.kind == "rips_linf":
        D = np.abs(diff).max(axis=2) / rule.unit_threshold
    else:
        D = np.sqrt(np.einsum("ijd,ijd->ij", diff, diff)) / rule.unit_threshold
    for size in range(2, m + 1):
        idx = np.array(list(combinations(range(m), size)), dtype=np.intp)
        if rule.kind == "cech":
            vals = np.fromiter(
                (2.0 * miniball_radius(pts[list(row)]) / rule.unit_threshold
                 for row in idx),
                dtype=np.float64, count=idx.shape[0],
            )
        else:
            sub = D[idx[:, :, None], idx[:, None, :]]
            vals = sub.max(axis=(1, 2))
        out.append(vals)
    return out


def subset_counts_at(points, rule: ComplexRule, t: float) -> np.ndarray:
    """counts[k] = number of (k+1)-subsets with h_t = 1, by direct evaluation."""
    pts = np.asarray(points, dtype=np.float64)
    m = pts.shape[0]
    if m > _MAX_BRUTE:
        raise DomainError(f"subset oracle is exponential; m={m} exceeds {_MAX_BRUTE}")
    if m == 0:
        return np.zeros(1, dtype=np.int64)
    if rule.kind != "custom":
        scales = subset_scales(pts, rule)
        if t == 0:
            counts = [m] + [0] * (m - 1)
        else:
            counts = [int((s <= t).sum()) for s in scales]
        return np.asarray(counts, dtype=np.int64)
    counts = np.zeros(m, dtype=np.int64)
    for size in range(1, m + 1):
        for comb in combinations(range(m), size):
            counts[size - 1] += evaluate_h(rule, t, pts[list(comb)])
    return counts


def subset_chi_at(points, rule: ComplexRule, t: float) -> int:
    counts = subset_counts_at(points, rule, t)
    signs = np.where(np.arange(counts.shape[0]) % 2 == 0, 1, -1)
    return int((signs * counts).sum())


@dataclass
class OracleReport:
    trials: int
    checks: int
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def summary(self) -> str:
        if self.ok:
            return f"oracle suite: {self.checks} checks over {self.trials} clouds, all equal"
        lines = [f"oracle suite: {len(self.mismatches)} mismatches "
                 f"in {self.checks} checks over {self.trials} clouds"]
        for m in self.mismatches[:20]:
            lines.append(f"  {m}")
        return "\n".join(lines)


def _suite_rules():
    return (
        ComplexRule.rips_l2(1.0),
        ComplexRule.rips_linf(2.0 ** -0.5),
        ComplexRule.cech(1.0),
    )


def run_oracle_suite(trials: int = 50, max_n: int = 12, seed: int = 0,
                     scales=DEFAULT_SCALES,
                     rules: Optional[tuple] = None) -> OracleReport:
    """Compare census outputs against the subset reference on seeded clouds.

    Each trial samples 40 points from the heavy-tail example preset, picks the
    exclusion radius between the max_n-th and (max_n+1)-th largest norms so
    exactly max_n points are exterior, and checks ec_at and simplex_counts
    against the subset oracle at every (rule, scale) pair.
    """
    if not (1 <= max_n <= 15):
        raise DomainError(f"max_n must lie in [1, 15], got {max_n!r}")
    law = preset("example_3_2")
    rules = rules or _suite_rules()
    report = OracleReport(trials=trials, checks=0)
    for trial in range(trials):
        cloud = sample_cloud(law, 40, seed + trial)
        norms = np.sort(np.sqrt(np.einsum("ij,ij->i", cloud.points, cloud.points)))[::-1]
        radius = 0.5 * (norms[max_n - 1] + norms[max_n])
        ext = points_outside(cloud.points, radius)
        for rule in rules:
            cached = subset_scales(ext, rule)
            for t in scales:
                want = [int((s <= t).sum()) for s in cached] if t > 0 else None
                if want is None:
                    want = [ext.shape[0]] + [0] * (ext.shape[0] - 1)
                got = simplex_counts(ext, rule, float(t))
                g = got.counts
                w = np.asarray(want, dtype=np.int64)
                width = max(g.shape[0], w.shape[0])
                gp = np.zeros(width, dtype=np.int64)
                wp = np.zeros(width, dtype=np.int64)
                gp[: g.shape[0]] = g
                wp[: w.shape[0]] = w
                report.checks += 1
                if not np.array_equal(gp, wp):
                    report.mismatches.append(
                        dict(trial=trial, rule=rule.name or rule.kind, t=t,
                             field="counts", want=wp.tolist(), got=gp.tolist())
                    )
                    continue
                signs = np.where(np.arange(width) % 2 == 0, 1, -1)
                chi_want = int((signs * wp).sum())
                chi_got = ec_at(ext, rule, float(t))
                report.checks += 1
                if chi_got != chi_want:
                    report.mismatches.append(
                        dict(trial=trial, rule=rule.name or rule.kind, t=t,
                             field="chi", want=chi_want, got=chi_got)
                    )
    return report
