"""Deterministic limit functions sum_k (-1)^k s_k(t) for both tail regimes.

Heavy regime (regularly varying tail, exponent alpha > d):

    s_0 = s_{d-1} xi / (alpha - d)
    s_k(t) = s_{d-1} xi^{k+1} / ((k+1)! (alpha(k+1) - d)) * H(k, t),  k >= 1

with H(k, t) = integral over (R^d)^k of h_t(0, y_1, ..., y_k) dy.  For the
max-norm Rips rule H has the closed form (u t)^{dk} (k+1)^d (per-coordinate
factorization); otherwise H is estimated by box Monte Carlo.

Light regime (exponential-type tail, scale limit zeta in (0, inf]):

    s_0 = s_{d-1} xi
    s_k(t) = s_{d-1} xi^{k+1} / ((k+1)! (k+1)) * Vol_k(t) * E[1_h * w]

where the radial coordinate of the tail integral is integrated out
analytically (it is exponential with rate k+1 restricted to a half-line,
which contributes the 1/(k+1) and the weight below), leaving

    w = exp((1/zeta) * ((k+1) m - S)),   S = sum_i <theta, y_i>,
    m = min(0, min_i <theta, y_i>),      so w in (0, 1],

and (1_h, Vol_k, the y-sampler) chosen per rule: for the Euclidean rules the
sphere direction theta is fixed to e_1 (the y-region is rotation invariant)
and y_i are uniform in the ball of radius u t; for the max-norm rule the
indicator region {h_t(0, y) = 1} is sampled exactly per coordinate and theta
is averaged over the sphere as part of the MC.  zeta = inf makes w = 1 and
reduces s_k to the heavy formula with (alpha(k+1) - d) replaced by (k+1).

Common random numbers: samples are drawn once per k at scale 1 and rescaled
by t, so limit curves are smooth in t and obey the exact scaling identity
H(k, t) = t^{dk} H(k, 1) under a fixed seed.

Truncation: the series is cut at the smallest K whose next term bound

    s_{d-1} xi^{K+2} (c t)^{d(K+1)} omega_d^{K+1} / ((K+2)! (alpha - d))

falls below eps (heavy; c the Euclidean locality constant of the rule); the
light bound replaces 1/(alpha - d) by 1/(K+2) and is valid because w <= 1.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._miniball import miniball_radius
from .complexes import ComplexRule, default_rule
from .errors import (
    ConfigurationError,
    DomainError,
    PrecisionError,
    UnsupportedConfigurationError,
)
from .radial_models import RadialLaw, sphere_area, unit_ball_volume
from .rng import STREAM_LIMIT_BASE, make_generator

_K_HARD_CAP = 10_000
_PAIR_CHUNK = 20_000_000  # float ops per chunk in pairwise indicator passes


@dataclass(frozen=True)
class MCSettings:
    """Monte Carlo budget: sample count, base seed, optional precision gate.

    When ``se_target`` is set, light-tail evaluations raise PrecisionError if
    the aggregated std_error stays above it at this sample budget.
    """

    samples: int = 200_000
    seed: int = 0
    se_target: Optional[float] = None


@dataclass(frozen=True)
class HIntegral:
    estimate: float
    std_error: float
    exact: bool


@dataclass(frozen=True)
class LightEstimate:
    value: float
    std_error: float
    k_used: int = 0


@dataclass(frozen=True)
class LimitParams:
    """Regime parameters: (d, alpha) heavy or (d, zeta[, tau]) light."""

    d: int
    xi: float = 1.0
    rule: ComplexRule = field(default_factory=default_rule)
    alpha: Optional[float] = None
    tau: Optional[float] = None
    zeta: Optional[float] = None

    def __post_init__(self):
        if not (self.xi > 0):
            raise DomainError(f"xi must be positive, got {self.xi!r}")
        if self.d < 1:
            raise DomainError(f"dimension must be >= 1, got {self.d!r}")
        if self.rule.kind == "custom":
            raise UnsupportedConfigurationError(
                "limit evaluation needs one of the built-in rules"
            )
        if self.alpha is not None and not (self.alpha > self.d):
            raise DomainError(
                f"heavy regime needs alpha > d, got alpha={self.alpha!r}, d={self.d}"
            )
        if self.zeta is not None and not (self.zeta > 0):
            raise DomainError(f"zeta must be positive (inf allowed), got {self.zeta!r}")
        if self.tau is not None and not (0 < self.tau <= 1):
            raise DomainError(f"tau must lie in (0, 1], got {self.tau!r}")

    @classmethod
    def heavy(cls, d, alpha, xi=1.0, rule=None):
        return cls(d=d, xi=xi, rule=rule or default_rule(), alpha=float(alpha))

    @classmethod
    def light(cls, d, zeta, xi=1.0, rule=None, tau=None):
        return cls(d=d, xi=xi, rule=rule or default_rule(), zeta=float(zeta), tau=tau)

    @classmethod
    def for_law(cls, law: RadialLaw, rule=None, xi=1.0):
        if law.family == "regularly_varying":
            if law.alpha is None:
                raise ConfigurationError("heavy law lacks a tail exponent alpha")
            return cls.heavy(law.d, law.alpha, xi=xi, rule=rule)
        return cls.light(law.d, law.zeta, xi=xi, rule=rule, tau=law.tau)

    @property
    def regime(self) -> str:
        if self.alpha is not None:
            return "heavy"
        if self.zeta is not None:
            return "light"
        raise ConfigurationError("params carry neither alpha nor zeta")


# ---------------------------------------------------------------------------
# the h-integral


def _box_indicator(rule: ComplexRule, z: np.ndarray) -> np.ndarray:
    """Indicator that the rule's size functional of {0} union z is <= 1.

    Box samples z live at the normalized scale y / (u t), where the membership
    constraint becomes size({0} union z) <= 1 regardless of u and t.
    """
    n, k, d = z.shape
    if rule.kind == "rips_linf":
        hi = np.maximum(z.max(axis=1), 0.0)
        lo = np.minimum(z.min(axis=1), 0.0)
        return ((hi - lo).max(axis=1) <= 1.0)
    if rule.kind == "rips_l2":
        sq = np.einsum("nkd,nkd->nk", z, z)
        ok = (sq <= 1.0).all(axis=1)
        if k > 1:
            iu, ju = np.triu_indices(k, 1)
            step = max(1, _PAIR_CHUNK // (iu.shape[0] * d))
            for s in range(0, n, step):
                blk = z[s:s + step]
                diff = blk[:, iu, :] - blk[:, ju, :]
                psq = np.einsum("npd,npd->np", diff, diff)
                ok[s:s + step] &= (psq <= 1.0).all(axis=1)
        return ok
    if rule.kind == "cech":
        if d > 3:
            raise UnsupportedConfigurationError(
                f"cech rule supports dimension <= 3, got d={d}"
            )
        out = np.empty(n, dtype=bool)
        pts = np.empty((k + 1, d))
        pts[0] = 0.0
        for i in range(n):
            pts[1:] = z[i]
            out[i] = 2.0 * miniball_radius(pts) <= 1.0
        return out
    raise UnsupportedConfigurationError(f"no sampler for rule kind {rule.kind!r}")


def h_integral(rule: ComplexRule, k: int, t: float, d: int,
               mc: Optional[MCSettings] = None, method: str = "auto") -> HIntegral:
    """The factor integral H(k, t) = int h_t(0, y_1..y_k) dy over (R^d)^k.

    Closed form for the max-norm rule: (u t)^{dk} (k+1)^d.  Otherwise box
    Monte Carlo over [-u t, u t]^{dk} with the zero-hit standard error floored
    at the one-hit level.  The same seed gives the exact scaling identity
    H(k, t) = t^{dk} H(k, 1).
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise DomainError(f"k must be an integer >= 1, got {k!r} "
                          "(the k=0 term is the constant s_0)")
    if not (t >= 0):
        raise DomainError(f"t must be nonnegative, got {t!r}")
    if method not in ("auto", "mc"):
        raise DomainError(f"method must be 'auto' or 'mc', got {method!r}")
    u = rule.unit_threshold
    if rule.kind == "rips_linf" and method == "auto":
        return HIntegral((u * t) ** (d * k) * (k + 1) ** d, 0.0, True)
    mc = mc or MCSettings()
    gen = make_generator(mc.seed, STREAM_LIMIT_BASE + k)
    z = gen.uniform(-1.0, 1.0, size=(mc.samples, int(k), int(d)))
    hits = _box_indicator(rule, z)
    n = mc.samples
    p = hits.mean()
    p_floor = max(p, 1.0 / n)
    se_p = math.sqrt(p_floor * (1.0 - p_floor) / n)
    vol = (2.0 * u * t) ** (d * k)
    return HIntegral(vol * float(p), vol * se_p, False)


# ---------------------------------------------------------------------------
# truncation


def _log_bound(regime: str, params: LimitParams, t: float, k: int) -> float:
    d, xi, rule = params.d, params.xi, params.rule
    c = rule.l2_locality(d)
    if t <= 0:
        return -math.inf
    base = (math.log(sphere_area(d)) + (k + 1) * math.log(xi)
            + d * k * math.log(c * t) + k * math.log(unit_ball_volume(d))
            - math.lgamma(k + 2))
    if regime == "heavy":
        return base - math.log(params.alpha - d)
    return base - math.log(k + 1)


def truncation_K(params: LimitParams, t: float, eps: float) -> int:
    """Smallest K with the (K+1)-th term bound below eps."""
    if not (eps > 0):
        raise DomainError(f"eps must be positive, got {eps!r}")
    if t == 0:
        return 0
    regime = params.regime
    log_eps = math.log(eps)
    for k in range(1, _K_HARD_CAP):
        if _log_bound(regime, params, t, k) < log_eps:
            return k - 1
    raise PrecisionError(
        f"term bound did not fall below eps={eps!r} within {_K_HARD_CAP} terms"
    )


def term_bound(params: LimitParams, t: float, k: int) -> float:
    """Upper bound for the k-th series term (k >= 1), as used by truncation."""
    if k < 1:
        raise DomainError("term bounds are defined for k >= 1")
    return math.exp(_log_bound(params.regime, params, t, k))


def _log_pref_heavy(params: LimitParams, k: int) -> float:
    return (math.log(sphere_area(params.d)) + (k + 1) * math.log(params.xi)
            - math.lgamma(k + 2) - math.log(params.alpha * (k + 1) - params.d))


def _log_pref_light(params: LimitParams, k: int) -> float:
    return (math.log(sphere_area(params.d)) + (k + 1) * math.log(params.xi)
            - math.lgamma(k + 2) - math.log(k + 1))


# ---------------------------------------------------------------------------
# heavy regime


def s0_heavy(params: LimitParams) -> float:
    return sphere_area(params.d) * params.xi / (params.alpha - params.d)


def s0_light(params: LimitParams) -> float:
    return sphere_area(params.d) * params.xi


def heavy_term(params: LimitParams, k: int, t: float,
               mc: Optional[MCSettings] = None):
    """(value, std_error) of s_k(t) in the heavy regime, k >= 1."""
    if params.regime != "heavy":
        raise DomainError("heavy_term needs heavy-regime params (alpha set)")
    H = h_integral(params.rule, k, t, params.d, mc)
    pref = math.exp(_log_pref_heavy(params, k))
    return pref * H.estimate, pref * H.std_error


def _heavy_curve(params: LimitParams, grid: np.ndarray, eps: float,
                 mc: Optional[MCSettings]):
    t_max = float(grid.max()) if grid.size else 0.0
    s0 = s0_heavy(params)
    values = np.full(grid.shape, s0, dtype=np.float64)
    var = np.zeros(grid.shape, dtype=np.float64)
    if t_max == 0.0:
        return values, np.sqrt(var), 0
    K = truncation_K(params, t_max, eps)
    d, rule = params.d, params.rule
    with np.errstate(divide="ignore"):
        logt = np.log(grid)  # -inf at t=0 kills every k >= 1 term exactly
    for k in range(1, K + 1):
        H1 = h_integral(rule, k, 1.0, d, mc)
        lp = _log_pref_heavy(params, k)
        sign = -1.0 if k % 2 else 1.0
        if H1.estimate > 0:
            values += sign * np.exp(lp + math.log(H1.estimate) + d * k * logt)
        if H1.std_error > 0:
            var += np.exp(2.0 * (lp + math.log(H1.std_error) + d * k * logt))
    return values, np.sqrt(var), K


def limit_heavy(params: LimitParams, t: float, eps: float = 1e-6,
                mc: Optional[MCSettings] = None) -> float:
    """Value of the heavy-regime limit at t, truncated below eps."""
    if not (t >= 0):
        raise DomainError(f"t must be nonnegative, got {t!r}")
    values, _, _ = _heavy_curve(params, np.array([t]), eps, mc)
    return float(values[0])


def closed_form_example32(t: float) -> float:
    """The closed form (pi/2) [e^{-t^2/2} + sqrt(pi/2) (2 Phi(t) - 1) / t].

    This is the heavy-regime limit for d=2, alpha=4, xi=1 with the max-norm
    rule at threshold 1/sqrt(2); at t=0 the removable singularity evaluates
    to pi.  Phi is computed through erf for uniform accuracy.
    """
    if not (t >= 0):
        raise DomainError(f"t must be nonnegative, got {t!r}")
    if t == 0:
        return math.pi
    two_phi_minus_1 = math.erf(t / math.sqrt(2.0))
    return (math.pi / 2.0) * (
        math.exp(-t * t / 2.0)
        + math.sqrt(math.pi / 2.0) * two_phi_minus_1 / t
    )


# ---------------------------------------------------------------------------
# light regime


def _sample_linf_region(gen, n: int, k: int, d: int, u: float) -> np.ndarray:
    """Uniform samples of the exact region {h_1(0, y) = 1} for the max-norm rule.

    Coordinates are independent; per coordinate the region
    {x in R^k : max(0, x) - min(0, x) <= u} splits into k+1 equal-volume
    pieces by the location of the minimum (the all-nonnegative piece, or the
    piece where x_i = v < 0 is the minimum and the rest lie in [v, v+u]).
    Draw order per coordinate: piece index, v, then the k offsets.
    """
    out = np.empty((n, k, d), dtype=np.float64)
    for c in range(d):
        piece = gen.integers(0, k + 1, size=n)
        v = gen.uniform(-u, 0.0, size=n)
        x = gen.uniform(0.0, u, size=(n, k))
        neg = piece > 0
        x[neg] += v[neg, None]
        x[neg, piece[neg] - 1] = v[neg]
        out[:, :, c] = x
    return out


def _sample_l2_ball(gen, n: int, k: int, d: int, radius: float) -> np.ndarray:
    """Uniform samples in the radius ball of R^d, shape (n, k, d).

    Draw order: the n*k*d Gaussians, then the n*k radial uniforms.
    """
    g = gen.standard_normal((n, k, d))
    norms = np.sqrt(np.einsum("nkd,nkd->nk", g, g))
    norms[norms == 0.0] = 1.0
    r = radius * gen.random((n, k)) ** (1.0 / d)
    return g * (r / norms)[:, :, None]


def _ball_indicator(rule: ComplexRule, z: np.ndarray) -> np.ndarray:
    """h at scale 1 of {0} union z, for z already inside the radius-u ball."""
    u = rule.unit_threshold
    n, k, d = z.shape
    if k == 1:
        return np.ones(n, dtype=bool)
    if rule.kind == "rips_l2":
        ok = np.ones(n, dtype=bool)
        iu, ju = np.triu_indices(k, 1)
        step = max(1, _PAIR_CHUNK // (iu.shape[0] * d))
        uu = u * u
        for s in range(0, n, step):
            blk = z[s:s + step]
            diff = blk[:, iu, :] - blk[:, ju, :]
            psq = np.einsum("npd,npd->np", diff, diff)
            ok[s:s + step] = (psq <= uu).all(axis=1)
        return ok
    if rule.kind == "cech":
        out = np.empty(n, dtype=bool)
        pts = np.empty((k + 1, d))
        pts[0] = 0.0
        half = u / 2.0
        for i in range(n):
            pts[1:] = z[i]
            out[i] = miniball_radius(pts) <= half
        return out
    raise UnsupportedConfigurationError(f"no ball indicator for {rule.kind!r}")


def _light_k_samples(params: LimitParams, k: int, mc: MCSettings):
    """Scale-1 sample batch for the k-th light term: (log_vol1, ind, base).

    base = (k+1) * min(0, min_i <theta, z_i>) - sum_i <theta, z_i> at scale 1;
    at scale t the weight is exp((t / zeta) * base) and the region volume is
    t^{dk} * exp(log_vol1).
    """
    d, rule = params.d, params.rule
    u = rule.unit_threshold
    n = mc.samples
    gen = make_generator(mc.seed, STREAM_LIMIT_BASE + k)
    if rule.kind == "rips_linf":
        g = gen.standard_normal((n, d))
        gn = np.sqrt(np.einsum("nd,nd->n", g, g))
        gn[gn == 0.0] = 1.0
        theta = g / gn[:, None]
        z = _sample_linf_region(gen, n, k, d, u)
        log_vol1 = d * k * math.log(u) + d * math.log(k + 1)
        ind = np.ones(n, dtype=np.float64)
        dots = np.einsum("nkd,nd->nk", z, theta)
    else:
        z = _sample_l2_ball(gen, n, k, d, u)
        log_vol1 = k * (math.log(unit_ball_volume(d)) + d * math.log(u))
        ind = _ball_indicator(rule, z).astype(np.float64)
        dots = z[:, :, 0]
    m = np.minimum(0.0, dots.min(axis=1))
    base = (k + 1) * m - dots.sum(axis=1)
    return log_vol1, ind, base


def light_term(params: LimitParams, k: int, t: float,
               mc: Optional[MCSettings] = None):
    """(value, std_error) of s_k(t) in the light regime, k >= 1."""
    if params.regime != "light":
        raise DomainError("light_term needs light-regime params (zeta set)")
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise DomainError(f"k must be an integer >= 1, got {k!r}")
    if not (t >= 0):
        raise DomainError(f"t must be nonnegative, got {t!r}")
    if t == 0:
        return 0.0, 0.0
    mc = mc or MCSettings()
    d = params.d
    pref = math.exp(_log_pref_light(params, k))
    if math.isinf(params.zeta):
        H = h_integral(params.rule, k, t, d, mc)
        return pref * H.estimate, pref * H.std_error
    log_vol1, ind, base = _light_k_samples(params, k, mc)
    w = ind * np.exp((t / params.zeta) * base)
    scale_k = math.exp(_log_pref_light(params, k) + log_vol1 + d * k * math.log(t))
    mean = float(w.mean())
    se = float(w.std(ddof=1)) / math.sqrt(mc.samples)
    return scale_k * mean, scale_k * se


def _light_curve(params: LimitParams, grid: np.ndarray, eps: float,
                 mc: Optional[MCSettings]):
    mc = mc or MCSettings()
    t_max = float(grid.max()) if grid.size else 0.0
    s0 = s0_light(params)
    values = np.full(grid.shape, s0, dtype=np.float64)
    var = np.zeros(grid.shape, dtype=np.float64)
    if t_max == 0.0:
        return values, np.sqrt(var), 0
    K = truncation_K(params, t_max, eps)
    d = params.d
    pos = grid > 0
    with np.errstate(divide="ignore"):
        logt = np.log(grid)
    for k in range(1, K + 1):
        sign = -1.0 if k % 2 else 1.0
        lp = _log_pref_light(params, k)
        if math.isinf(params.zeta):
            H1 = h_integral(params.rule, k, 1.0, d, mc)
            if H1.estimate > 0:
                values += sign * np.exp(lp + math.log(H1.estimate) + d * k * logt)
            if H1.std_error > 0:
                var += np.exp(2.0 * (lp + math.log(H1.std_error) + d * k * logt))
            continue
        log_vol1, ind, base = _light_k_samples(params, k, mc)
        root_n = math.sqrt(mc.samples)
        for j in np.nonzero(pos)[0]:
            t = float(grid[j])
            w = ind * np.exp((t / params.zeta) * base)
            scale_k = math.exp(lp + log_vol1 + d * k * math.log(t))
            values[j] += sign * scale_k * float(w.mean())
            var[j] += (scale_k * float(w.std(ddof=1)) / root_n) ** 2
    return values, np.sqrt(var), K


def limit_light(params: LimitParams, t: float, eps: float = 1e-6,
                mc: Optional[MCSettings] = None) -> LightEstimate:
    """Light-regime limit at t with its Monte Carlo std_error.

    Raises PrecisionError when ``mc.se_target`` is set and not reached.
    """
    if not (t >= 0):
        raise DomainError(f"t must be nonnegative, got {t!r}")
    mc = mc or MCSettings()
    values, ses, K = _light_curve(params, np.array([t]), eps, mc)
    se = float(ses[0])
    if mc.se_target is not None and se > mc.se_target:
        raise PrecisionError(
            f"MC std_error {se:g} above target {mc.se_target:g} "
            f"at {mc.samples} samples"
        )
    return LightEstimate(float(values[0]), se, K)


# ---------------------------------------------------------------------------
# the limit function object


@dataclass(frozen=True)
class LimitCurve:
    t: np.ndarray
    value: np.ndarray
    std_error: np.ndarray
    k_used: int


@dataclass(frozen=True)
class LimitFunction:
    """Evaluator for the limit of chi_n(t)/scale in either regime."""

    params: LimitParams
    truncation_eps: float = 1e-6
    mc: MCSettings = field(default_factory=MCSettings)

    @property
    def regime(self) -> str:
        return self.params.regime

    @classmethod
    def for_law(cls, law: RadialLaw, rule=None, xi: float = 1.0,
                eps: float = 1e-6, mc: Optional[MCSettings] = None):
        return cls(LimitParams.for_law(law, rule=rule, xi=xi),
                   truncation_eps=eps, mc=mc or MCSettings())

    def curve(self, grid) -> LimitCurve:
        g = np.asarray(grid, dtype=np.float64)
        if g.ndim != 1 or g.size == 0:
            raise DomainError("curve needs a nonempty 1d grid")
        if not (g.min() >= 0):
            raise DomainError("grid values must be nonnegative")
        if self.regime == "heavy":
            values, ses, K = _heavy_curve(self.params, g, self.truncation_eps, self.mc)
        else:
            values, ses, K = _light_curve(self.params, g, self.truncation_eps, self.mc)
            if self.mc.se_target is not None and ses.size and ses.max() > self.mc.se_target:
                raise PrecisionError(
                    f"MC std_error {ses.max():g} above target "
                    f"{self.mc.se_target:g} at {self.mc.samples} samples"
                )
        return LimitCurve(g, values, ses, K)

    def value(self, t: float) -> float:
        return float(self.curve(np.array([float(t)])).value[0])

    def value_with_error(self, t: float):
        c = self.curve(np.array([float(t)]))
        return float(c.value[0]), float(c.std_error[0])
