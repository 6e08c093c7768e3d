"""Radial laws: inverses, sampling, the exclusion radius, JSON interchange."""

import json
import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from tailchi import (
    ConfigurationError,
    DomainError,
    exponential_type,
    law_from_json,
    law_to_json,
    preset,
    radius_R_n,
    regularly_varying,
    sample_cloud,
    scaling_denominator,
    sphere_area,
    unit_ball_volume,
)


def _laws():
    return {
        "heavy_2_4": regularly_varying(2, 4.0),
        "heavy_3_5.5": regularly_varying(3, 5.5),
        "light_2_1": exponential_type(2, 1.0),
        "light_3_0.7": exponential_type(3, 0.7),
        "preset_3_2": preset("example_3_2"),
        "preset_4_2": preset("example_4_2"),
    }


# ---------------------------------------------------------------------------
# geometry constants


def test_sphere_and_ball_constants():
    assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-14)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-14)
    assert sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-14)
    assert sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-14)


# ---------------------------------------------------------------------------
# densities and inverses


@pytest.mark.parametrize("name", sorted(_laws()))
def test_density_integrates_to_one(name):
    law = _laws()[name]
    s = sphere_area(law.d)
    total, err = integrate.quad(
        lambda r: s * r ** (law.d - 1) * float(law.density(r)),
        0.0, np.inf, limit=200,
    )
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("name", sorted(_laws()))
def test_cdf_matches_quadrature(name):
    law = _laws()[name]
    s = sphere_area(law.d)
    for r in (0.3, 1.0, 2.7):
        want, _ = integrate.quad(
            lambda x: s * x ** (law.d - 1) * float(law.density(x)), 0.0, r
        )
        assert float(law.radial_cdf(r)) == pytest.approx(want, abs=1e-10)


@pytest.mark.parametrize("name", sorted(_laws()))
def test_ppf_round_trip(name):
    law = _laws()[name]
    u = np.linspace(0.01, 0.99, 99)
    r = law.radial_ppf(u)
    assert np.all(np.diff(r) > 0)
    back = law.radial_cdf(r)
    assert np.abs(np.asarray(back) - u).max() < 1e-8


def test_heavy_ppf_stays_finite_near_one():
    law = regularly_varying(2, 4.0)
    u = 1.0 - np.geomspace(1e-16, 1e-4, 40)
    r = np.asarray(law.radial_ppf(u))
    assert np.isfinite(r).all()
    back = np.asarray(law.radial_cdf(r))
    assert np.abs(back - u).max() < 1e-8


def test_heavy_tail_is_regularly_varying():
    # 1 - F(tr) over 1 - F(r) approaches t^(d - alpha); radii kept small
    # enough that the tail mass stays representable next to 1
    for d, alpha in ((2, 4.0), (3, 5.5)):
        law = regularly_varying(d, alpha)
        for r in (10.0, 30.0, 100.0):
            for t in (2.0, 5.0):
                ratio = (1.0 - float(law.radial_cdf(t * r))) / (
                    1.0 - float(law.radial_cdf(r)))
                assert ratio == pytest.approx(t ** (d - alpha), rel=0.05)


def test_preset_3_2_closed_forms():
    law = preset("example_3_2")
    assert (law.d, law.alpha, law.family) == (2, 4.0, "regularly_varying")
    assert float(law.density(0.0)) == pytest.approx(2.0 / math.pi ** 2, rel=1e-15)
    u = np.array([0.1, 0.5, 0.9])
    assert np.allclose(law.radial_ppf(u), np.sqrt(np.tan(0.5 * math.pi * u)), rtol=1e-14)
    # agrees with the canonical member at the same (d, alpha)
    canon = regularly_varying(2, 4.0)
    r = np.array([0.2, 1.0, 3.0, 10.0])
    assert np.allclose(law.radial_cdf(r), canon.radial_cdf(r), atol=1e-12)
    assert np.allclose(law.density(r), canon.density(r), rtol=1e-12)


def test_preset_4_2_closed_forms():
    law = preset("example_4_2")
    assert (law.d, law.tau, law.zeta) == (2, 1.0, 1.0)
    assert float(law.density(0.0)) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-15)
    u = np.array([0.1, 0.5, 0.9])
    assert np.allclose(law.radial_ppf(u), special.gammaincinv(2.0, u), rtol=1e-14)
    assert float(law.psi_prime(3.7)) == 1.0
    canon = exponential_type(2, 1.0)
    r = np.array([0.2, 1.0, 3.0, 10.0])
    assert np.allclose(law.radial_cdf(r), canon.radial_cdf(r), atol=1e-12)


def test_light_zeta_by_tau():
    assert exponential_type(2, 1.0).zeta == 1.0
    assert math.isinf(exponential_type(2, 0.5).zeta)
    assert math.isinf(exponential_type(3, 0.7).zeta)


def test_parameter_validation():
    with pytest.raises(ConfigurationError, match="alpha > d"):
        regularly_varying(3, 2.5)
    with pytest.raises(ConfigurationError, match="zeta = 0"):
        exponential_type(2, 1.5)
    with pytest.raises(ConfigurationError):
        exponential_type(2, 0.0)
    with pytest.raises(ConfigurationError):
        exponential_type(2)  # neither tau nor psi
    with pytest.raises(ConfigurationError):
        regularly_varying(1, 4.0)  # ambient dimension >= 2
    with pytest.raises(ConfigurationError):
        preset("example_9_9")


# ---------------------------------------------------------------------------
# caller-supplied profiles against the canonical closed forms


def test_custom_heavy_profile_matches_canonical():
    canon = regularly_varying(2, 4.0)
    A = canon.norm_const
    law = regularly_varying(2, 4.0, radial_density=lambda r: A / (1.0 + r ** 4))
    assert not law.serializable
    r = np.array([0.1, 0.7, 1.8, 6.0, 40.0])
    assert np.allclose(law.radial_cdf(r), canon.radial_cdf(r), atol=2e-9)
    u = np.linspace(0.02, 0.98, 49)
    assert np.allclose(law.radial_ppf(u), canon.radial_ppf(u), rtol=2e-7)


def test_custom_light_profile_matches_canonical():
    law = exponential_type(
        2, 1.0,
        psi=lambda r: np.asarray(r, dtype=np.float64),
        psi_prime=lambda r: np.ones_like(np.asarray(r, dtype=np.float64)),
        zeta=1.0,
    )
    canon = exponential_type(2, 1.0)
    assert law.norm_const == pytest.approx(canon.norm_const, rel=1e-9)
    r = np.array([0.3, 1.2, 4.0, 15.0])
    assert np.allclose(law.radial_cdf(r), canon.radial_cdf(r), atol=2e-9)
    u = np.linspace(0.02, 0.98, 49)
    assert np.allclose(law.radial_ppf(u), canon.radial_ppf(u), rtol=2e-7)


def test_unnormalized_profile_rejected():
    with pytest.raises(ConfigurationError, match="integrates"):
        regularly_varying(2, 4.0, radial_density=lambda r: 1.1 * (2.0 / math.pi ** 2) / (1.0 + r ** 4))
    with pytest.raises(ConfigurationError):
        exponential_type(
            2, 1.0,
            psi=lambda r: np.asarray(r, dtype=np.float64),
            psi_prime=lambda r: np.ones_like(np.asarray(r, dtype=np.float64)),
            zeta=1.0,
            norm_const=0.9,  # wrong: true constant is 1/(2 pi)
        )


def test_custom_light_needs_all_pieces():
    with pytest.raises(ConfigurationError):
        exponential_type(2, psi=lambda r: r)  # no psi_prime, no zeta
    with pytest.raises(ConfigurationError):
        exponential_type(2, psi=lambda r: r, psi_prime=lambda r: 1.0, zeta=-1.0)


# ---------------------------------------------------------------------------
# sampling


def test_sample_cloud_deterministic_and_frozen():
    law = preset("example_3_2")
    a = sample_cloud(law, 300, seed=5)
    b = sample_cloud(law, 300, seed=5)
    c = sample_cloud(law, 300, seed=6)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    assert (a.n, a.seed, a.d) == (300, 5, 2)
    with pytest.raises(ValueError):
        a.points[0, 0] = 99.0  # read-only view
    with pytest.raises(DomainError):
        sample_cloud(law, -1, seed=0)
    assert sample_cloud(law, 0, seed=0).points.shape == (0, 2)


@pytest.mark.parametrize("name", ["heavy_2_4", "light_2_1", "preset_3_2", "light_3_0.7"])
def test_sampled_radii_follow_radial_cdf(name):
    law = _laws()[name]
    n = 20000
    cloud = sample_cloud(law, n, seed=12)
    radii = np.sqrt(np.einsum("ij,ij->i", cloud.points, cloud.points))
    stat = stats.kstest(radii, lambda r: np.asarray(law.radial_cdf(r))).statistic
    assert stat < 1.63 / math.sqrt(n)  # KS 1% critical value


def test_sampled_angles_uniform():
    law = preset("example_3_2")
    cloud = sample_cloud(law, 16000, seed=9)
    ang = np.arctan2(cloud.points[:, 1], cloud.points[:, 0])
    counts, _ = np.histogram(ang, bins=16, range=(-math.pi, math.pi))
    expected = 16000 / 16
    chi2 = ((counts - expected) ** 2 / expected).sum()
    assert chi2 < 30.58  # chi-square 1% critical value, 15 dof


# ---------------------------------------------------------------------------
# the exclusion radius and the scaling denominator


def test_radius_solves_density_equation():
    for name, law in _laws().items():
        for n in (10 ** 3, 10 ** 6):
            R = radius_R_n(law, n, xi=1.0)
            assert n * float(law.density(R)) == pytest.approx(1.0, rel=1e-9), name


def test_radius_closed_forms():
    law = preset("example_3_2")
    for n in (10 ** 3, 10 ** 4, 10 ** 5):
        want = (2.0 * n / math.pi ** 2 - 1.0) ** 0.25
        assert radius_R_n(law, n, 1.0) == pytest.approx(want, rel=1e-12)
    assert radius_R_n(law, 10 ** 4, 1.0) == pytest.approx(6.7085548, rel=1e-7)
    light = preset("example_4_2")
    n = 138393  # about 2 pi e^10, putting R near 10
    want = math.log(n / (2.0 * math.pi))
    assert radius_R_n(light, n, 1.0) == pytest.approx(want, rel=1e-12)


def test_radius_monotone_in_n_and_xi():
    law = preset("example_3_2")
    rs = [radius_R_n(law, n, 1.0) for n in (10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5)]
    assert all(a < b for a, b in zip(rs, rs[1:]))
    assert radius_R_n(law, 10 ** 3, 2.0) < radius_R_n(law, 10 ** 3, 1.0)


def test_radius_rejects_unsolvable():
    law = preset("example_3_2")
    with pytest.raises(DomainError):
        radius_R_n(law, 3, xi=10.0)  # n f(0) < xi
    with pytest.raises(DomainError):
        radius_R_n(law, 0, xi=1.0)
    with pytest.raises(DomainError):
        radius_R_n(law, 100, xi=0.0)


def test_scaling_denominator_by_regime():
    heavy = preset("example_3_2")
    assert scaling_denominator(heavy, 5.0) == pytest.approx(25.0, rel=1e-14)
    light = preset("example_4_2")
    # psi' = 1 so a(R) = 1 and the denominator is R^(d-1) = R
    assert scaling_denominator(light, 7.5) == pytest.approx(7.5, rel=1e-14)
    sub = exponential_type(2, 0.5)
    R = 9.0
    want = R ** 0.5 * R  # a(R) = R^(1 - tau)
    assert scaling_denominator(sub, R) == pytest.approx(want, rel=1e-12)
    with pytest.raises(DomainError):
        scaling_denominator(heavy, 0.0)


# ---------------------------------------------------------------------------
# JSON interchange


def test_law_json_round_trip():
    for law in (regularly_varying(2, 4.0), regularly_varying(3, 5.5),
                exponential_type(2, 1.0), exponential_type(3, 0.7),
                preset("example_3_2"), preset("example_4_2")):
        doc = law_to_json(law)
        json.dumps(doc)  # must be a plain JSON object
        back = law_from_json(doc)
        assert (back.family, back.d, back.alpha, back.tau) == (
            law.family, law.d, law.alpha, law.tau)
        if law.zeta is None:
            assert back.zeta is None
        else:
            assert back.zeta == law.zeta
        r = np.array([0.4, 1.3, 5.0])
        assert np.allclose(back.radial_cdf(r), law.radial_cdf(r), atol=1e-14)


def test_law_json_infinite_zeta_spelled_out():
    doc = law_to_json(exponential_type(2, 0.5))
    assert doc["zeta"] == "inf"
    assert math.isinf(law_from_json(doc).zeta)


def test_law_json_rejects_inconsistencies():
    with pytest.raises(ConfigurationError):
        law_from_json({"preset": "example_3_2", "alpha": 3.0})
    with pytest.raises(ConfigurationError):
        law_from_json({"family": "exponential_type", "d": 2, "tau": 1.0,
                       "zeta": 5.0})
    with pytest.raises(ConfigurationError):
        law_from_json({"family": "regularly_varying", "d": 2})  # no alpha
    with pytest.raises(ConfigurationError):
        law_from_json({"family": "weibull", "d": 2})
    with pytest.raises(ConfigurationError):
        law_from_json([1, 2, 3])


def test_custom_law_has_no_json_form():
    A = 2.0 / math.pi ** 2
    law = regularly_varying(2, 4.0, radial_density=lambda r: A / (1.0 + r ** 4))
    with pytest.raises(ConfigurationError):
        law_to_json(law)
    assert law.describe()["custom"] is True
