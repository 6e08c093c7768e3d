"""Spherically symmetric sampling laws with heavy or exponential-type tails.

Two families:

* regularly_varying: f(x) = profile(|x|) with profile(r) ~ r^(-alpha) up to
  slow variation, alpha > d.  The canonical member is
  f(r) = A / (1 + r^alpha) with A chosen so f integrates to 1.
* exponential_type: f(x) = C * exp(-psi(|x|)) with psi regularly varying of
  index tau in (0, 1].  The canonical member is psi(r) = r^tau / tau.  The
  auxiliary scale a(z) = 1 / psi'(z) has a limit zeta in (0, inf], supplied
  analytically (it is a property of psi, never estimated from samples).

Points are drawn as R * Theta with Theta a normalized d-variate Gaussian and
R from the radial marginal s_{d-1} r^(d-1) f(r) by inverse CDF.  Canonical
families and the two presets invert through closed-form special functions;
caller-supplied profiles go through a 4096-node monotone quadrature table
polished by bisection to 1e-10 relative.

Draw order inside sample_cloud is part of the determinism contract: first the
n radial uniforms, then the n*d Gaussians, from one generator.
"""

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from .errors import ConfigurationError, DomainError
from .rng import STREAM_CLOUD, make_generator

PRESET_NAMES = ("example_3_2", "example_4_2")

_TAIL_MASS = 1e-13
_NORM_TOL = 1e-6
_TABLE_NODES = 4096


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere in R^d (s_{d-1} = d * omega_d)."""
    return d * unit_ball_volume(d)


def _vectorized(f: Callable) -> Callable:
    """Wrap a scalar-or-array radial function so it always maps arrays to arrays."""

    def g(r):
        arr = np.asarray(r, dtype=np.float64)
        scalar = arr.ndim == 0
        flat = np.atleast_1d(arr)
        try:
            out = np.asarray(f(flat), dtype=np.float64)
            if out.shape != flat.shape:
                raise ValueError
        except Exception:
            out = np.fromiter((float(f(float(v))) for v in flat), dtype=np.float64,
                              count=flat.shape[0])
        return float(out[0]) if scalar else out.reshape(arr.shape)

    return g


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


class _RadialTable:
    """Monotone CDF table of a radial marginal with panelwise Gauss quadrature.

    The table spans [0, hi] where hi captures all but ~1e-13 of the mass;
    inversion conditions on that range, so draws beyond hi (probability below
    the tail tolerance) clamp to hi.
    """

    def __init__(self, marginal: Callable, nodes: int = _TABLE_NODES):
        self._m = marginal
        hi = 1.0
        for _ in range(700):
            try:
                with warnings.catch_warnings():
                    # slow-convergence warnings are expected while probing far
                    # beyond the mass; the estimate is only a range locator
                    warnings.simplefilter("ignore", integrate.IntegrationWarning)
                    tail = integrate.quad(lambda r: float(self._m(r)), hi,
                                          np.inf, limit=200)[0]
            except Exception as exc:
                raise ConfigurationError(
                    f"radial quadrature failed on [{hi:g}, inf): {exc}"
                ) from exc
            if tail < _TAIL_MASS:
                break
            hi *= 2.0
        else:
            raise ConfigurationError(
                "radial marginal mass does not decay on [1, 2^700); "
                "is the profile integrable?"
            )
        # locate the bottom of the grid by octave slices [lo/2, lo] walked
        # down from hi; quad over [0, lo] can miss an interior bump entirely.
        # r^(d-1) f(r) is nondecreasing near 0, so the mass below lo is at
        # most one slice and the relative cutoff is safe.
        lo = hi
        acc = 0.0
        for octave in range(1, 701):
            s_oct = float(self._panel(np.asarray([lo / 2.0]), np.asarray([lo]))[0])
            acc += s_oct
            lo *= 0.5
            if lo < 1e-280:
                break
            if octave >= 80 and acc > 0.0 and s_oct <= _TAIL_MASS * acc:
                break
        self.grid = np.concatenate(([0.0], np.geomspace(lo, hi, nodes - 1)))
        a = self.grid[:-1]
        b = self.grid[1:]
        mass = self._panel(a, b)
        self.G = np.concatenate(([0.0], np.cumsum(mass)))
        self.G = np.maximum.accumulate(self.G)
        self.total_mass = float(self.G[-1] + tail)
        if not (self.G[-1] > 0):
            raise ConfigurationError("radial marginal has no mass on the table range")

    def _panel(self, a, b):
        # 16-point Gauss-Legendre on each [a_i, b_i], vectorized over panels
        half = (b - a) / 2.0
        x = (a + half)[:, None] + half[:, None] * _GL_X[None, :]
        v = self._m(x.ravel()).reshape(x.shape)
        return half * (v @ _GL_W)

    def cdf(self, r):
        r = np.asarray(r, dtype=np.float64)
        scalar = r.ndim == 0
        rr = np.atleast_1d(r).astype(np.float64)
        i = np.clip(np.searchsorted(self.grid, rr, side="right") - 1,
                    0, self.grid.shape[0] - 2)
        a = self.grid[i]
        b = np.clip(rr, a, self.grid[i + 1])
        out = (self.G[i] + self._panel(a, b)) / self.G[-1]
        out = np.clip(out, 0.0, 1.0)
        return float(out[0]) if scalar else out.reshape(r.shape)

    def ppf(self, u):
        u = np.asarray(u, dtype=np.float64)
        scalar = u.ndim == 0
        uu = np.atleast_1d(u).astype(np.float64)
        target = np.clip(uu, 0.0, 1.0) * self.G[-1]
        i = np.clip(np.searchsorted(self.G, target, side="right") - 1,
                    0, self.grid.shape[0] - 2)
        base = self.G[i]
        anchor = self.grid[i]
        lo = self.grid[i].copy()
        hi = self.grid[i + 1].copy()
        for _ in range(44):
            mid = 0.5 * (lo + hi)
            below = base + self._panel(anchor, mid) < target
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        return float(out[0]) if scalar else out.reshape(u.shape)


@dataclass(frozen=True, eq=False)
class RadialLaw:
    """Immutable spherically symmetric density specification.

    ``density`` evaluates the profile f at a radius, ``radial_cdf`` and
    ``radial_ppf`` the CDF/inverse of |X|.  Light-tail laws additionally carry
    psi, psi' and the scale limit zeta.
    """

    family: str
    d: int
    alpha: Optional[float] = None
    tau: Optional[float] = None
    zeta: Optional[float] = None
    norm_const: Optional[float] = None
    preset: Optional[str] = None
    serializable: bool = False
    _density: Callable = field(default=None, repr=False)
    _cdf: Callable = field(default=None, repr=False)
    _ppf: Callable = field(default=None, repr=False)
    _psi: Callable = field(default=None, repr=False)
    _psi_prime: Callable = field(default=None, repr=False)

    def density(self, r):
        return self._density(r)

    def radial_cdf(self, r):
        return self._cdf(r)

    def radial_ppf(self, u):
        return self._ppf(u)

    def psi(self, r):
        if self._psi is None:
            raise DomainError("psi is defined only for exponential_type laws")
        return self._psi(r)

    def psi_prime(self, r):
        if self._psi_prime is None:
            raise DomainError("psi_prime is defined only for exponential_type laws")
        return self._psi_prime(r)

    def a(self, z):
        """Auxiliary scale a(z) = 1 / psi'(z) of the light-tail family."""
        p = self.psi_prime(z)
        if not (p > 0):
            raise DomainError(f"psi'({z!r}) = {p!r} is not positive")
        return 1.0 / p

    def describe(self) -> dict:
        try:
            return law_to_json(self)
        except ConfigurationError:
            return {"family": self.family, "d": self.d, "custom": True}


def _validate_d(d) -> int:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ConfigurationError(f"ambient dimension must be an integer >= 2, got {d!r}")
    return int(d)


def regularly_varying(d: int, alpha: float,
                      radial_density: Optional[Callable] = None) -> RadialLaw:
    """Heavy-tail law with exponent alpha > d.

    Without ``radial_density`` the canonical profile A/(1 + r^alpha) is used,
    with closed-form CDF and inverse through the regularized incomplete beta
    function.  A caller-supplied profile must be a normalized density on R^d;
    it is tabulated numerically and its normalization checked to 1e-6.
    """
    d = _validate_d(d)
    alpha = float(alpha)
    if not (alpha > d):
        raise ConfigurationError(f"need alpha > d, got alpha={alpha!r}, d={d}")
    if radial_density is None:
        s = sphere_area(d)
        A = alpha * math.sin(math.pi * d / alpha) / (math.pi * s)
        aa = d / alpha
        bb = 1.0 - d / alpha

        def dens(r):
            r = np.asarray(r, dtype=np.float64)
            return A / (1.0 + r ** alpha)

        def cdf(r):
            r = np.asarray(r, dtype=np.float64)
            x = r ** alpha / (1.0 + r ** alpha)
            return special.betainc(aa, bb, x)

        def ppf(u):
            u = np.asarray(u, dtype=np.float64)
            # complementary branch near u=1: betainc symmetry keeps 1-x exact
            lowside = u <= 0.5
            x = special.betaincinv(aa, bb, np.where(lowside, u, 0.5))
            xc = special.betaincinv(bb, aa, np.where(lowside, 0.5, 1.0 - u))
            ratio = np.where(lowside, x / (1.0 - x), (1.0 - xc) / np.maximum(xc, 1e-300))
            return ratio ** (1.0 / alpha)

        return RadialLaw("regularly_varying", d, alpha=alpha, norm_const=A,
                         serializable=True, _density=dens, _cdf=cdf, _ppf=ppf)

    prof = _vectorized(radial_density)
    s = sphere_area(d)
    table = _RadialTable(lambda r: s * np.asarray(r, dtype=np.float64) ** (d - 1) * prof(r))
    if abs(table.total_mass - 1.0) > _NORM_TOL:
        raise ConfigurationError(
            f"radial density integrates to {table.total_mass!r} over "
            f"[0, {table.grid[-1]:g}] plus tail, not 1 within {_NORM_TOL:g}"
        )
    return RadialLaw("regularly_varying", d, alpha=alpha, serializable=False,
                     _density=prof, _cdf=table.cdf, _ppf=table.ppf)


def exponential_type(d: int, tau: Optional[float] = None, *,
                     psi: Optional[Callable] = None,
                     psi_prime: Optional[Callable] = None,
                     zeta: Optional[float] = None,
                     norm_const: Optional[float] = None) -> RadialLaw:
    """Light-tail law f = C * exp(-psi(r)) with psi of regular-variation index tau.

    Canonical member (psi given by tau alone): psi(r) = r^tau / tau, for which
    C, the radial CDF and its inverse have closed forms through the incomplete
    gamma function, and zeta = 1 when tau = 1, zeta = inf when tau < 1.  The
    tau = 1 boundary is accepted in every dimension; it is the zeta = 1 case
    exercised by the bundled light-tail example law.

    Custom member: supply psi, psi_prime and zeta (= lim 1/psi'(z), a property
    of psi the caller asserts analytically).  C is computed from the
    normalization integral unless ``norm_const`` is given, in which case it is
    checked to 1e-6.  Eventual monotonicity of psi', psi'' is assumed, not
    mechanically checked; psi' > 0 is spot-checked on the table range.
    """
    d = _validate_d(d)
    if psi is None:
        if tau is None:
            raise ConfigurationError("exponential_type needs tau or a custom psi")
        tau = float(tau)
        if not (0.0 < tau <= 1.0):
            raise ConfigurationError(
                f"tau must lie in (0, 1], got {tau!r} (tau > 1 has vanishing "
                "scale zeta = 0, outside the supported regime)"
            )
        s = sphere_area(d)
        k = d / tau
        C = 1.0 / (s * tau ** (k - 1.0) * math.gamma(k))
        z = 1.0 if tau == 1.0 else math.inf

        def dens(r):
            r = np.asarray(r, dtype=np.float64)
            return C * np.exp(-(r ** tau) / tau)

        def cdf(r):
            r = np.asarray(r, dtype=np.float64)
            return special.gammainc(k, r ** tau / tau)

        def ppf(u):
            u = np.asarray(u, dtype=np.float64)
            return (tau * special.gammaincinv(k, u)) ** (1.0 / tau)

        def psi_f(r):
            r = np.asarray(r, dtype=np.float64)
            return r ** tau / tau

        def psi_p(r):
            r = np.asarray(r, dtype=np.float64)
            return r ** (tau - 1.0)

        return RadialLaw("exponential_type", d, tau=tau, zeta=z, norm_const=C,
                         serializable=True, _density=dens, _cdf=cdf, _ppf=ppf,
                         _psi=psi_f, _psi_prime=psi_p)

    if psi_prime is None or zeta is None:
        raise ConfigurationError("custom exponential_type needs psi, psi_prime and zeta")
    if not (zeta > 0):
        raise ConfigurationError(f"zeta must be positive (inf allowed), got {zeta!r}")
    psi_v = _vectorized(psi)
    psi_pv = _vectorized(psi_prime)
    s = sphere_area(d)
    tau_f = None if tau is None else float(tau)

    def unnorm(r):
        r = np.asarray(r, dtype=np.float64)
        return s * r ** (d - 1) * np.exp(-psi_v(r))

    table = _RadialTable(unnorm)
    if norm_const is None:
        C = 1.0 / table.total_mass
    else:
        C = float(norm_const)
        if abs(C * table.total_mass - 1.0) > _NORM_TOL:
            raise ConfigurationError(
                f"norm_const {C!r} makes the density integrate to "
                f"{C * table.total_mass!r} over [0, {table.grid[-1]:g}], not 1"
            )
    probe = table.grid[[1, _TABLE_NODES // 4, _TABLE_NODES // 2, -1]]
    pp = psi_pv(probe)
    if np.any(pp <= 0):
        raise ConfigurationError(
            f"psi_prime must be positive; found {pp.min()!r} on the support"
        )

    def dens(r):
        return C * np.exp(-psi_v(np.asarray(r, dtype=np.float64)))

    return RadialLaw("exponential_type", d, tau=tau_f, zeta=float(zeta),
                     norm_const=C, serializable=False, _density=dens,
                     _cdf=table.cdf, _ppf=table.ppf, _psi=psi_v, _psi_prime=psi_pv)


def preset(name: str) -> RadialLaw:
    """The two bundled example laws, with their closed-form inverses.

    example_3_2: d=2, alpha=4, f(r) = 2 / (pi^2 (1 + r^4)), inverse CDF
    r = sqrt(tan(pi u / 2)).  example_4_2: d=2, tau=1, f = exp(-r)/(2 pi),
    radial marginal Gamma(2, 1), zeta = 1.
    """
    if name == "example_3_2":
        A = 2.0 / math.pi ** 2

        def dens(r):
            r = np.asarray(r, dtype=np.float64)
            return A / (1.0 + r ** 4)

        def cdf(r):
            r = np.asarray(r, dtype=np.float64)
            return (2.0 / math.pi) * np.arctan(r ** 2)

        def ppf(u):
            u = np.asarray(u, dtype=np.float64)
            return np.sqrt(np.tan(0.5 * math.pi * u))

        return RadialLaw("regularly_varying", 2, alpha=4.0, norm_const=A,
                         preset=name, serializable=True,
                         _density=dens, _cdf=cdf, _ppf=ppf)
    if name == "example_4_2":
        C = 1.0 / (2.0 * math.pi)

        def dens(r):
            r = np.asarray(r, dtype=np.float64)
            return C * np.exp(-r)

        def cdf(r):
            r = np.asarray(r, dtype=np.float64)
            return special.gammainc(2.0, r)

        def ppf(u):
            u = np.asarray(u, dtype=np.float64)
            return special.gammaincinv(2.0, u)

        def psi_f(r):
            return np.asarray(r, dtype=np.float64) * 1.0

        def psi_p(r):
            return np.ones_like(np.asarray(r, dtype=np.float64))

        return RadialLaw("exponential_type", 2, tau=1.0, zeta=1.0, norm_const=C,
                         preset=name, serializable=True, _density=dens,
                         _cdf=cdf, _ppf=ppf, _psi=psi_f, _psi_prime=psi_p)
    raise ConfigurationError(
        f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
    )


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True, eq=False)
class PointCloud:
    """n i.i.d. points in R^d with their generation metadata."""

    points: np.ndarray
    n: int
    seed: int
    law: Optional[RadialLaw] = None

    def __post_init__(self):
        self.points.setflags(write=False)

    @property
    def d(self) -> int:
        return int(self.points.shape[1])


def sample_cloud(law: RadialLaw, n: int, seed: int) -> PointCloud:
    """Sample n points as R * Theta; pure in (law, n, seed).

    R is drawn by inverse CDF from the radial marginal, Theta as a normalized
    d-variate standard Gaussian.  The n radial uniforms are drawn before the
    Gaussians, from a single counter-based stream keyed by the seed.
    """
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    n = int(n)
    gen = make_generator(seed, STREAM_CLOUD)
    u = gen.random(n)
    r = np.asarray(law.radial_ppf(u), dtype=np.float64)
    g = gen.standard_normal((n, law.d))
    norms = np.sqrt(np.einsum("ij,ij->i", g, g))
    norms[norms == 0.0] = 1.0
    pts = (r / norms)[:, None] * g
    return PointCloud(points=pts, n=n, seed=int(seed), law=law)


def radius_R_n(law: RadialLaw, n: int, xi: float = 1.0) -> float:
    """Radius R with n * f(R) = xi, found by bisection on the decreasing tail.

    Converges to about 1e-13 relative.  Raises DomainError when xi >= n * f(0)
    (no solution on the tail).
    """
    if not (n >= 1):
        raise DomainError(f"n must be >= 1, got {n!r}")
    if not (xi > 0):
        raise DomainError(f"xi must be positive, got {xi!r}")
    f0 = float(law.density(0.0))
    if not (n * f0 > xi):
        raise DomainError(
            f"no radius solves n*f(R) = xi: n*f(0) = {n * f0!r} <= xi = {xi!r}"
        )
    lo, hi = 0.0, 1.0
    for _ in range(2100):
        if n * float(law.density(hi)) <= xi:
            break
        lo = hi
        hi *= 2.0
    else:
        raise DomainError("n*f(R) never falls to xi on [0, 2^2100)")
    for _ in range(200):
        if hi - lo <= 1e-14 * hi:
            break
        mid = 0.5 * (lo + hi)
        if n * float(law.density(mid)) > xi:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scaling_denominator(law: RadialLaw, R_n: float) -> float:
    """The regime's convergence denominator: R^d (heavy) or a(R) * R^(d-1) (light)."""
    if not (R_n > 0):
        raise DomainError(f"R_n must be positive, got {R_n!r}")
    if law.family == "regularly_varying":
        return float(R_n) ** law.d
    return float(law.a(float(R_n)) * float(R_n) ** (law.d - 1))


# ---------------------------------------------------------------------------
# JSON interchange


def law_to_json(law: RadialLaw) -> dict:
    """JSON document for a canonical or preset law; custom callables have none."""
    if not law.serializable:
        raise ConfigurationError(
            "law with caller-supplied callables has no JSON form"
        )
    zeta = None
    if law.family == "exponential_type":
        zeta = "inf" if math.isinf(law.zeta) else float(law.zeta)
    return {
        "family": law.family,
        "d": law.d,
        "alpha": law.alpha,
        "tau": law.tau,
        "zeta": zeta,
        "preset": law.preset,
    }


def law_from_json(doc) -> RadialLaw:
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if not isinstance(doc, dict):
        raise ConfigurationError(f"law document must be a JSON object, got {type(doc)}")
    name = doc.get("preset")
    if name:
        law = preset(name)
        for key in ("family", "d", "alpha", "tau"):
            want = doc.get(key)
            have = getattr(law, key)
            if want is not None and want != have:
                raise ConfigurationError(
                    f"preset {name!r} has {key} = {have!r}, document says {want!r}"
                )
        return law
    family = doc.get("family")
    if family == "regularly_varying":
        if doc.get("alpha") is None:
            raise ConfigurationError("regularly_varying document needs alpha")
        return regularly_varying(doc["d"], doc["alpha"])
    if family == "exponential_type":
        if doc.get("tau") is None:
            raise ConfigurationError("exponential_type document needs tau")
        law = exponential_type(doc["d"], doc["tau"])
        z = doc.get("zeta")
        if z is not None:
            zv = math.inf if z == "inf" else float(z)
            if zv != law.zeta:
                raise ConfigurationError(
                    f"tau = {law.tau!r} implies zeta = {law.zeta!r}, "
                    f"document says {z!r}"
                )
        return law
    raise ConfigurationError(f"unknown law family {family!r}")
