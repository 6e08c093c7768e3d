"""Geometric complex rules and simplex counting over point sets.

A rule is an indicator h on finite point sets, applied at scale t via
h_t(X) := h(X / t).  The three built-in rules all fit the template
"h = 1 iff <size functional>(X) <= unit_threshold":

* rips_l2    size = diameter under the Euclidean norm
* rips_linf  size = diameter under the max norm
* cech       size = twice the radius of the smallest enclosing ball
             (exact up to dimension 3)

Every built-in simplex therefore has an appearance scale, size/unit_threshold,
and membership at scale t is the closed comparison scale <= t.  At t = 0 only
singletons are members.  The counting routines enumerate cliques of the
neighbor graph by ordered depth-first search; for the Rips rules every clique
is a simplex and its scale is the largest edge scale, so a single enumeration
serves a whole grid of scales.  For Cech the clique scale is recomputed from
the enclosing ball, which only grows when vertices are added, so branches
above the grid ceiling are pruned.

Custom rules supply their own indicator plus an l2 locality constant and must
pass the automated H1-H4 audit when registered through ``custom_rule``.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _backend
from ._miniball import miniball_radius
from ._spatial import all_pairs, forward_adjacency, neighbor_pairs
from .errors import (
    ConfigurationError,
    DomainError,
    ResourceBudgetError,
    UnsupportedConfigurationError,
)
from .rng import STREAM_AUDIT, make_generator

DEFAULT_BUDGET = 100_000_000

_KINDS = ("rips_l2", "rips_linf", "cech", "custom")

# slack applied to the spatial-hash cell width so that the exact closed
# comparison scale <= t is never lost to the bucketing radius rounding down
_PAD = 1.0 + 1e-12


@dataclass(frozen=True)
class ComplexRule:
    """An indicator rule with its threshold and locality constant.

    ``locality_c`` is the H3 constant in the rule's own metric: point sets
    whose native diameter exceeds locality_c * t are never simplices at scale
    t.  For built-ins it equals unit_threshold.  ``l2_locality(d)`` converts
    it to a Euclidean bound (sqrt(d) * u for the max-norm rule), which is what
    integration boxes and truncation bounds need.
    """

    kind: str
    unit_threshold: float = 1.0
    locality_c: float = 0.0
    h: Optional[Callable] = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigurationError(f"unknown rule kind {self.kind!r}")
        if self.kind != "custom" and not (self.unit_threshold > 0):
            raise ConfigurationError("unit_threshold must be positive")
        if self.locality_c == 0.0:
            object.__setattr__(self, "locality_c", self.unit_threshold)
        if not (self.locality_c > 0):
            raise ConfigurationError("locality_c must be positive")
        if self.kind == "custom" and self.h is None:
            raise ConfigurationError("custom rules need an indicator callable")

    @classmethod
    def rips_l2(cls, unit_threshold: float = 1.0) -> "ComplexRule":
        return cls("rips_l2", unit_threshold, name=f"rips_l2:{unit_threshold!r}")

    @classmethod
    def rips_linf(cls, unit_threshold: float = 1.0) -> "ComplexRule":
        return cls("rips_linf", unit_threshold, name=f"rips_linf:{unit_threshold!r}")

    @classmethod
    def cech(cls, unit_threshold: float = 1.0) -> "ComplexRule":
        return cls("cech", unit_threshold, name=f"cech:{unit_threshold!r}")

    @property
    def pair_metric(self) -> str:
        return "linf" if self.kind == "rips_linf" else "l2"

    def diam(self, points) -> float:
        """Diameter in the rule's native metric (l2 for cech and custom)."""
        pts = np.asarray(points, dtype=np.float64)
        if pts.shape[0] < 2:
            return 0.0
        if self.kind == "rips_linf":
            return float((pts.max(axis=0) - pts.min(axis=0)).max())
        a, b = np.triu_indices(pts.shape[0], k=1)
        diff = pts[a] - pts[b]
        return float(np.sqrt(np.einsum("ij,ij->i", diff, diff).max()))

    def l2_locality(self, d: int) -> float:
        if self.kind == "rips_linf":
            return float(np.sqrt(d)) * self.unit_threshold
        return self.locality_c

    def describe(self) -> dict:
        out = {"kind": self.kind, "unit_threshold": self.unit_threshold}
        if self.kind == "custom":
            out["name"] = self.name or "custom"
            out["locality_c"] = self.locality_c
        return out


def rule_from_spec(spec) -> ComplexRule:
    """Rule from a dict {"kind", "unit_threshold"} or a "kind[:threshold]" string.

    Bare kinds get their conventional thresholds: 1/sqrt(2) for rips_linf (the
    pairing under which the heavy-tail preset has a closed-form limit), 1.0
    for the others.
    """
    if isinstance(spec, ComplexRule):
        return spec
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind == "custom":
            raise ConfigurationError("custom rules cannot be built from a spec")
        u = spec.get("unit_threshold")
        if u is None:
            u = 2.0 ** -0.5 if kind == "rips_linf" else 1.0
        return ComplexRule(kind, float(u))
    if isinstance(spec, str):
        kind, _, thr = spec.partition(":")
        kind = kind.strip()
        if thr.strip():
            return ComplexRule(kind, float(thr))
        u = 2.0 ** -0.5 if kind == "rips_linf" else 1.0
        return ComplexRule(kind, u)
    raise ConfigurationError(f"cannot interpret rule spec {spec!r}")


def default_rule() -> ComplexRule:
    """The max-norm Rips rule at threshold 1/sqrt(2) used by the example presets."""
    return ComplexRule.rips_linf(2.0 ** -0.5)


# ---------------------------------------------------------------------------
# indicator evaluation


def _as_points(simplex) -> np.ndarray:
    pts = np.asarray(simplex, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2:
        raise DomainError("a simplex is a 2d array of points")
    if pts.shape[0] == 0:
        raise DomainError("a simplex needs at least one point")
    return pts


def appearance_scale(rule: ComplexRule, simplex) -> float:
    """Smallest t at which the simplex belongs to the complex (built-ins only)."""
    pts = _as_points(simplex)
    if pts.shape[0] == 1:
        return 0.0
    if rule.kind in ("rips_l2", "rips_linf"):
        return rule.diam(pts) / rule.unit_threshold
    if rule.kind == "cech":
        if pts.shape[1] > 3:
            raise UnsupportedConfigurationError(
                f"cech rule supports dimension <= 3, got d={pts.shape[1]}"
            )
        return 2.0 * miniball_radius(pts) / rule.unit_threshold
    raise UnsupportedConfigurationError(
        "custom rules have no closed appearance scale"
    )


def evaluate_h(rule: ComplexRule, t: float, simplex) -> int:
    """h_t of a simplex: 1 iff the point set is a face at scale t.

    t must be nonnegative.  At t = 0 only singletons qualify, matching the
    convention that the counting process starts from isolated points.
    """
    pts = _as_points(simplex)
    if not (t >= 0):
        raise DomainError(f"scale t must be nonnegative, got {t!r}")
    if pts.shape[0] == 1:
        return 1
    if t == 0:
        return 0
    if rule.kind == "custom":
        return 1 if rule.h(pts / t) else 0
    return 1 if appearance_scale(rule, pts) <= t else 0


def points_outside(points, radius: float) -> np.ndarray:
    """Rows of ``points`` with Euclidean norm >= radius (closed comparison)."""
    pts = np.asarray(getattr(points, "points", points), dtype=np.float64)
    if pts.ndim != 2:
        raise DomainError("points_outside expects an (n, d) array")
    if pts.shape[0] == 0:
        return pts.copy()
    norms = np.sqrt(np.einsum("ij,ij->i", pts, pts))
    return pts[norms >= radius]


# ---------------------------------------------------------------------------
# neighbor graph


@dataclass(frozen=True)
class NeighborGraph:
    n: int
    i: np.ndarray
    j: np.ndarray
    scale: np.ndarray  # appearance scales; l2 distances for custom rules
    t: float

    @property
    def edge_count(self) -> int:
        return int(self.i.shape[0])


def neighbor_graph(points, rule: ComplexRule, t: float) -> NeighborGraph:
    """Edges {i, j} with h_t(pair) = 1, built with a uniform spatial hash."""
    pts = np.asarray(points, dtype=np.float64)
    if not (t >= 0):
        raise DomainError(f"scale t must be nonnegative, got {t!r}")
    m = pts.shape[0]
    if rule.kind == "custom":
        ii, jj, dist = neighbor_pairs(pts, t * rule.locality_c * _PAD, "l2")
        keep = np.fromiter(
            (evaluate_h(rule, t, pts[[a, b]]) == 1 for a, b in zip(ii, jj)),
            dtype=bool,
            count=ii.shape[0],
        )
        return NeighborGraph(m, ii[keep], jj[keep], dist[keep], t)
    ii, jj, dist = neighbor_pairs(pts, t * rule.unit_threshold * _PAD, rule.pair_metric)
    scale = dist / rule.unit_threshold
    keep = scale <= t
    return NeighborGraph(m, ii[keep], jj[keep], scale[keep], t)


# ---------------------------------------------------------------------------
# censuses


@dataclass(frozen=True)
class SimplexCounts:
    """Per-dimension face counts of the complex at a single scale."""

    counts: np.ndarray  # counts[k] = number of k-simplices
    t: float
    truncated: bool
    n_simplices: int

    @property
    def euler_characteristic(self) -> int:
        signs = np.where(np.arange(self.counts.shape[0]) % 2 == 0, 1, -1)
        return int((signs * self.counts).sum())


def _grid_array(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 1 or g.shape[0] == 0:
        raise DomainError("grid must be a nonempty 1d array")
    if not (g[0] >= 0):
        raise DomainError("grid values must be nonnegative")
    if g.shape[0] > 1 and not np.all(np.diff(g) > 0):
        raise DomainError("grid must be strictly increasing")
    return g


def _rips_grid_census(pts, rule, grid, budget, k_cap):
    m = pts.shape[0]
    t_hi = grid[-1]
    ii, jj, dist = neighbor_pairs(pts, t_hi * rule.unit_threshold * _PAD, rule.pair_metric)
    scale = dist / rule.unit_threshold
    keep = scale <= t_hi
    indptr, indices, wts = forward_adjacency(m, ii[keep], jj[keep], scale[keep])
    return _backend.rips_census(indptr, indices, wts, grid, budget, -1 if k_cap is None else k_cap)


def _cech_grid_census(pts, rule, grid, budget, k_cap):
    m, d = pts.shape
    if d > 3:
        raise UnsupportedConfigurationError(
            f"cech rule supports dimension <= 3, got d={d}"
        )
    u = rule.unit_threshold
    G = grid.shape[0]
    t_hi = grid[-1]
    cap = -1 if k_cap is None else int(k_cap)
    ii, jj, dist = neighbor_pairs(pts, t_hi * u * _PAD, "l2")
    pscale = dist / u
    keep = pscale <= t_hi
    indptr, indices, wts = forward_adjacency(m, ii[keep], jj[keep], pscale[keep])

    grid_list = grid.tolist()
    from bisect import bisect_left

    deltas = np.zeros((min(max(m, 1), 64) if cap < 0 else min(max(m, 1), 64, cap + 1), G),
                      dtype=np.int64)
    zero_shift = 1 if grid[0] == 0.0 else 0
    nsx = 0
    truncated = False
    max_dim = 0

    def bump():
        nonlocal nsx
        nsx += 1
        if nsx > budget:
            raise ResourceBudgetError(
                f"simplex budget {budget} exceeded; raise the budget, shrink the "
                "grid ceiling, or use a larger exclusion radius"
            )

    for v in range(m):
        bump()
        deltas[0, 0] += 1
        lo, hi = indptr[v], indptr[v + 1]
        if hi == lo:
            continue
        if cap == 0:
            truncated = True
            continue
        stack = [[indices[lo:hi], wts[lo:hi], 0, 0.0, [v], 1]]
        while stack:
            frame = stack[-1]
            cand, cw, pos, cs, members, size = frame
            if pos >= cand.shape[0]:
                stack.pop()
                continue
            frame[2] = pos + 1
            u_vtx = int(cand[pos])
            bump()
            new_members = members + [u_vtx]
            if size == 1:
                s_new = float(cw[pos])
            else:
                s_new = 2.0 * miniball_radius(pts[new_members]) / u
                if s_new < cs:  # enclosing balls only grow; clamp roundoff
                    s_new = cs
            if s_new > t_hi:
                continue  # supersets can only be larger: prune
            j = bisect_left(grid_list, s_new)
            if s_new == 0.0:
                j += zero_shift
            if j < G:
                deltas[size, j] += 1
                max_dim = max(max_dim, size)
            sub = cand[pos + 1:]
            if sub.shape[0] == 0:
                continue
            a, b = indptr[u_vtx], indptr[u_vtx + 1]
            nb = indices[a:b]
            if nb.shape[0] == 0:
                continue
            loc = np.searchsorted(nb, sub)
            locc = np.minimum(loc, nb.shape[0] - 1)
            ok = nb[locc] == sub
            child = sub[ok]
            if child.shape[0] == 0:
                continue
            if cap >= 0 and size + 1 > cap:
                truncated = True
                continue
            if size + 1 >= 64:
                raise ResourceBudgetError(
                    "a clique reached 64 vertices: the census necessarily holds "
                    f"more than 2^64 simplices, beyond the budget of {budget}"
                )
            ccw = np.maximum(cw[pos + 1:][ok], wts[a:b][loc[ok]])
            stack.append([child, ccw, 0, s_new, new_members, size + 1])

    return deltas[: max_dim + 1], nsx, truncated


def _custom_counts_at(pts, rule, t, budget, k_cap):
    m = pts.shape[0]
    cap = -1 if k_cap is None else int(k_cap)
    counts = [m]
    nsx = m
    truncated = False
    if nsx > budget:
        raise ResourceBudgetError(f"simplex budget {budget} exceeded")
    if t == 0 or m < 2:
        return np.asarray(counts, dtype=np.int64), nsx, truncated
    g = neighbor_graph(pts, rule, t)
    order = np.lexsort((g.j, g.i))
    indptr, indices, _ = forward_adjacency(m, g.i[order], g.j[order], g.scale[order])

    def extend(cand, members, size):
        nonlocal nsx, truncated
        for pos in range(cand.shape[0]):
            u_vtx = int(cand[pos])
            nsx += 1
            if nsx > budget:
                raise ResourceBudgetError(f"simplex budget {budget} exceeded")
            new_members = members + [u_vtx]
            if size >= 2 and evaluate_h(rule, t, pts[new_members]) == 0:
                continue  # monotone indicator: supersets stay 0
            while len(counts) <= size:
                counts.append(0)
            counts[size] += 1
            sub = cand[pos + 1:]
            if sub.shape[0] == 0:
                continue
            a, b = indptr[u_vtx], indptr[u_vtx + 1]
            nb = indices[a:b]
            if nb.shape[0] == 0:
                continue
            loc = np.searchsorted(nb, sub)
            locc = np.minimum(loc, nb.shape[0] - 1)
            child = sub[nb[locc] == sub]
            if child.shape[0] == 0:
                continue
            if cap >= 0 and size + 1 > cap:
                truncated = True
                continue
            if size + 1 >= 64:
                raise ResourceBudgetError("clique depth implies budget overflow")
            extend(child, new_members, size + 1)

    if cap == 0:
        truncated = indices.shape[0] > 0
    else:
        for v in range(m):
            lo, hi = indptr[v], indptr[v + 1]
            if hi > lo:
                extend(indices[lo:hi], [v], 1)
    return np.asarray(counts, dtype=np.int64), nsx, truncated


def grid_census(points, rule: ComplexRule, grid, *, k_cap=None, budget=DEFAULT_BUDGET):
    """Per-dimension simplex counts over a scale grid.

    Returns (counts, n_simplices, truncated) where counts[k, j] is the number
    of k-simplices present at grid[j] (cumulative in j).
    """
    pts = np.asarray(points, dtype=np.float64)
    g = _grid_array(grid)
    if pts.shape[0] == 0:
        return np.zeros((1, g.shape[0]), dtype=np.int64), 0, False
    if rule.kind in ("rips_l2", "rips_linf"):
        deltas, nsx, trunc = _rips_grid_census(pts, rule, g, budget, k_cap)
    elif rule.kind == "cech":
        deltas, nsx, trunc = _cech_grid_census(pts, rule, g, budget, k_cap)
    else:
        cols = []
        nsx = 0
        trunc = False
        for t in g:
            counts_t, used, tr = _custom_counts_at(pts, rule, float(t), budget, k_cap)
            nsx += used
            trunc = trunc or tr
            cols.append(counts_t)
        rows = max(c.shape[0] for c in cols)
        out = np.zeros((rows, g.shape[0]), dtype=np.int64)
        for j, c in enumerate(cols):
            out[: c.shape[0], j] = c
        return out, nsx, trunc
    return np.cumsum(deltas, axis=1), nsx, trunc


def simplex_counts(points, rule: ComplexRule, t: float, *, k_cap=None,
                   budget=DEFAULT_BUDGET) -> SimplexCounts:
    """Face counts of the complex on ``points`` at scale t."""
    if not (t >= 0):
        raise DomainError(f"scale t must be nonnegative, got {t!r}")
    counts, nsx, trunc = grid_census(points, rule, np.array([t]), k_cap=k_cap, budget=budget)
    return SimplexCounts(counts[:, 0].copy(), float(t), trunc, nsx)


def ec_at(points, rule: ComplexRule, t: float, *, k_cap=None,
          budget=DEFAULT_BUDGET) -> int:
    """Euler characteristic at a single scale (alternating sum over the census)."""
    return simplex_counts(points, rule, t, k_cap=k_cap, budget=budget).euler_characteristic


# ---------------------------------------------------------------------------
# rule audit and custom registration


def _random_simplex(gen, d, size, spread):
    return gen.normal(0.0, spread, size=(size, d))


def audit_rule(rule: ComplexRule, d: int = 2, cases: int = 200, seed: int = 0) -> None:
    """Automated H1-H4 audit on random inputs; raises ConfigurationError on failure.

    H1 monotonicity under subsets, H2 translation invariance, H3 locality at
    the declared constant (native metric), H4 monotonicity in the scale.
    """
    gen = make_generator(seed, STREAM_AUDIT)
    c = rule.locality_c
    for case in range(cases):
        size = int(gen.integers(1, 7))
        spread = float(gen.uniform(0.05, 1.5))
        pts = _random_simplex(gen, d, size, spread)
        t = float(gen.uniform(0.05, 3.0))
        hv = evaluate_h(rule, t, pts)
        if hv not in (0, 1):
            raise ConfigurationError(f"audit: h_t returned {hv!r}, not 0/1 (case {case})")
        if size > 1:
            keep = gen.random(size) < 0.6
            if not keep.any():
                keep[int(gen.integers(0, size))] = True
            if hv > evaluate_h(rule, t, pts[keep]):
                raise ConfigurationError(
                    f"audit: H1 fails, h(superset) > h(subset) (case {case})"
                )
        shift = gen.normal(0.0, 2.0, size=d)
        if evaluate_h(rule, t, pts + shift) != hv:
            raise ConfigurationError(f"audit: H2 fails under translation (case {case})")
        if size > 1:
            diam = rule.diam(pts)
            if diam > 0:
                far = pts * (1.5 * c * t / diam)
                if evaluate_h(rule, t, far) != 0:
                    raise ConfigurationError(
                        f"audit: H3 fails, native diameter {1.5 * c * t:g} > "
                        f"{c}*t but h_t = 1 (case {case})"
                    )
        s = float(gen.uniform(0.0, t))
        if evaluate_h(rule, s, pts) > hv:
            raise ConfigurationError(
                f"audit: H4 fails, h_s > h_t for s={s:g} < t={t:g} (case {case})"
            )


def custom_rule(h: Callable, locality_c: float, name: str = "custom", *,
                d: int = 2, cases: int = 200, seed: int = 0) -> ComplexRule:
    """Register a caller-supplied indicator as a rule.

    ``h`` maps an (m, d) array to a truthy/falsy value and is applied at scale
    t as h(X / t).  ``locality_c`` is its Euclidean H3 constant.  The rule is
    audited on ``cases`` random inputs before being returned.
    """
    rule = ComplexRule("custom", unit_threshold=locality_c, locality_c=locality_c,
                       h=h, name=name)
    audit_rule(rule, d=d, cases=cases, seed=seed)
    return rule


def brute_neighbor_pairs(points, rule: ComplexRule, t: float):
    """All-pairs reference for neighbor_graph (testing aid)."""
    pts = np.asarray(points, dtype=np.float64)
    ii, jj, dist = all_pairs(pts, t * rule.unit_threshold * _PAD, rule.pair_metric)
    scale = dist / rule.unit_threshold
    keep = scale <= t
    return ii[keep], jj[keep], scale[keep]
