"""The chi_n(t) sample path: grids, breakpoints, sups, CSV interchange."""

import json
import math

import numpy as np
import pytest

from tailchi import (
    ComplexRule,
    DomainError,
    ECProcess,
    UnsupportedConfigurationError,
    breakpoints,
    default_grid,
    default_rule,
    ec_at,
    ec_process,
    preset,
    radius_R_n,
    read_process_csv,
    sample_cloud,
    scaling_denominator,
    sup_functional,
    write_process_csv,
)

RULES = (
    ComplexRule.rips_l2(1.0),
    ComplexRule.rips_linf(2.0 ** -0.5),
    ComplexRule.cech(1.0),
)


def test_default_grid_shape():
    g = default_grid()
    assert g[0] == 0.0 and g[-1] == pytest.approx(3.0, abs=1e-12)
    assert g.shape[0] == 151
    assert np.allclose(np.diff(g), 0.02)
    g2 = default_grid(1.0, 0.25)
    assert g2.tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    with pytest.raises(DomainError):
        default_grid(0.0, 0.1)


def test_process_matches_per_node_recounts():
    cloud = sample_cloud(preset("example_3_2"), 400, seed=2)
    R = radius_R_n(preset("example_3_2"), 400, 1.0)
    grid = default_grid(2.0, 0.25)
    for rule in RULES:
        proc = ec_process(cloud, rule, R, grid)
        ext = cloud.points[np.sqrt((cloud.points ** 2).sum(axis=1)) >= R]
        for j, t in enumerate(grid):
            assert proc.chi[j] == ec_at(ext, rule, float(t)), (rule.kind, t)


def test_process_starts_at_point_count():
    cloud = sample_cloud(preset("example_3_2"), 300, seed=4)
    R = radius_R_n(preset("example_3_2"), 300, 1.0)
    proc = ec_process(cloud, default_rule(), R, np.array([0.0, 1.0]))
    assert proc.chi[0] == proc.meta["exterior_count"]


def test_process_scale_defaults_to_law_denominator():
    law = preset("example_3_2")
    cloud = sample_cloud(law, 200, seed=3)
    R = radius_R_n(law, 200, 1.0)
    proc = ec_process(cloud, default_rule(), R)
    assert proc.scale == pytest.approx(scaling_denominator(law, R), rel=1e-14)
    assert np.allclose(proc.chi_scaled, proc.chi / proc.scale)
    override = ec_process(cloud, default_rule(), R, scale=2.0)
    assert override.scale == 2.0
    bare = ec_process(cloud.points, default_rule(), R)
    assert bare.scale == 1.0  # plain arrays carry no law


def test_process_on_plain_array_and_r_zero():
    pts = np.array([[0.0, 0.0], [10.0, 0.0]])
    proc = ec_process(pts, ComplexRule.rips_l2(1.0), 0.0, np.array([0.0, 1.0]))
    assert proc.scale == 1.0
    assert proc.chi.tolist() == [2, 2]
    with pytest.raises(DomainError):
        ec_process(pts, ComplexRule.rips_l2(1.0), -1.0)


def test_value_at_is_right_continuous_step():
    grid = np.array([0.0, 0.5, 1.0])
    proc = ECProcess(t_grid=grid, chi=np.array([3, 2, 1]), scale=1.0, n=3, R_n=0.0)
    assert proc.value_at(0.0) == 3
    assert proc.value_at(0.49) == 3
    assert proc.value_at(0.5) == 2
    assert proc.value_at(0.75) == 2
    assert proc.value_at(1.0) == 1
    with pytest.raises(DomainError):
        proc.value_at(1.5)
    with pytest.raises(DomainError):
        proc.value_at(-0.1)


def test_per_k_columns_alternate_to_chi():
    cloud = sample_cloud(preset("example_3_2"), 500, seed=7)
    R = radius_R_n(preset("example_3_2"), 500, 1.0)
    proc = ec_process(cloud, default_rule(), R, default_grid(2.0, 0.5))
    signs = np.where(np.arange(proc.per_k.shape[0]) % 2 == 0, 1, -1)
    assert np.array_equal((signs[:, None] * proc.per_k).sum(axis=0), proc.chi)
    lean = ec_process(cloud, default_rule(), R, default_grid(2.0, 0.5),
                      keep_per_k=False)
    assert lean.per_k is None
    assert np.array_equal(lean.chi, proc.chi)


def test_grid_refinement_is_a_restriction():
    cloud = sample_cloud(preset("example_3_2"), 300, seed=9)
    R = radius_R_n(preset("example_3_2"), 300, 1.0)
    coarse = default_grid(2.0, 0.5)
    fine = default_grid(2.0, 0.25)
    for rule in RULES:
        pc = ec_process(cloud, rule, R, coarse)
        pf = ec_process(cloud, rule, R, fine)
        assert np.array_equal(pf.chi[::2], pc.chi)


# ---------------------------------------------------------------------------
# breakpoints


def test_breakpoints_pairwise_distances():
    pts = np.array([[0.0, 0.0], [1.0, 1.0]])
    rule = ComplexRule.rips_l2(1.0)
    bps = breakpoints(pts, rule)
    assert bps.shape == (1,)
    assert bps[0] == pytest.approx(math.sqrt(2.0), rel=1e-15)
    # threshold rescales the critical scale
    half = breakpoints(pts, ComplexRule.rips_l2(2.0))
    assert half[0] == pytest.approx(math.sqrt(2.0) / 2.0, rel=1e-15)


def test_breakpoints_deduplicate_and_sort():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])  # distances 1, 1, 2
    bps = breakpoints(pts, ComplexRule.rips_l2(1.0))
    assert bps.tolist() == [1.0, 2.0]
    assert breakpoints(pts[:1], ComplexRule.rips_l2(1.0)).shape == (0,)


def test_breakpoints_exact_for_process():
    # evaluating on the breakpoint grid reproduces the path exactly: compare
    # against a much finer grid
    gen = np.random.default_rng(15)
    pts = gen.normal(0.0, 1.0, size=(12, 2))
    rule = ComplexRule.rips_linf(2.0 ** -0.5)
    bps = breakpoints(pts, rule)
    grid = np.unique(np.concatenate(([0.0], bps)))
    proc = ec_process(pts, rule, 0.0, grid)
    fine = np.linspace(0.0, float(bps.max()) * 1.01, 997)
    for t in fine:
        idx = int(np.searchsorted(grid, t, side="right")) - 1
        assert proc.chi[idx] == ec_at(pts, rule, float(t))


def test_breakpoints_unsupported_for_cech_and_custom():
    pts = np.zeros((3, 2))
    with pytest.raises(UnsupportedConfigurationError):
        breakpoints(pts, ComplexRule.cech(1.0))


# ---------------------------------------------------------------------------
# sup functional


def test_sup_functional_single_far_point():
    # one exterior point: chi = 1 for every t, sup over [0, 5] is 1
    pts = np.array([[100.0, 0.0]])
    proc = ec_process(pts, default_rule(), 1.0, default_grid(5.0, 0.5))
    assert sup_functional(proc, 0.0, 5.0) == 1.0
    assert sup_functional(proc, 0.3, 2.7) == 1.0


def test_sup_functional_reads_grid_window():
    grid = np.array([0.0, 1.0, 2.0, 3.0])
    proc = ECProcess(t_grid=grid, chi=np.array([5, -7, 2, 1]), scale=1.0,
                     n=5, R_n=0.0)
    assert sup_functional(proc, 0.0, 3.0) == 7.0
    assert sup_functional(proc, 2.0, 3.0) == 2.0
    with pytest.raises(DomainError):
        sup_functional(proc, 0.0, 4.0)  # interval not covered
    with pytest.raises(DomainError):
        sup_functional(proc, 2.0, 1.0)


def test_sup_functional_rejects_unknown_objects():
    with pytest.raises(DomainError):
        sup_functional(object(), 0.0, 1.0)


# ---------------------------------------------------------------------------
# CSV interchange


def test_csv_round_trip(tmp_path):
    law = preset("example_3_2")
    cloud = sample_cloud(law, 250, seed=11)
    R = radius_R_n(law, 250, 1.0)
    proc = ec_process(cloud, default_rule(), R, default_grid(1.5, 0.25))
    path = tmp_path / "proc.csv"
    write_process_csv(proc, path, per_k=True)
    back = read_process_csv(path)
    assert np.array_equal(back.t_grid, proc.t_grid)
    assert np.array_equal(back.chi, proc.chi)
    assert np.array_equal(back.per_k, proc.per_k)
    assert back.scale == proc.scale
    assert back.R_n == proc.R_n
    assert back.n == proc.n
    assert back.meta["law"]["preset"] == "example_3_2"
    assert back.meta["rule"]["kind"] == "rips_linf"


def test_csv_bytes_are_deterministic(tmp_path):
    law = preset("example_3_2")
    cloud = sample_cloud(law, 250, seed=11)
    R = radius_R_n(law, 250, 1.0)
    texts = []
    for run in range(2):
        proc = ec_process(cloud, default_rule(), R, default_grid(1.5, 0.25))
        p = tmp_path / f"run{run}.csv"
        write_process_csv(proc, p)
        texts.append(p.read_bytes())
    assert texts[0] == texts[1]
    first = texts[0].decode().split("\n")
    assert first[0] == "t,chi,chi_scaled"
    assert len(first) == 1 + 7 + 1  # header, 7 grid rows, trailing newline


def test_csv_sidecar_content(tmp_path):
    law = preset("example_3_2")
    cloud = sample_cloud(law, 100, seed=13)
    R = radius_R_n(law, 100, 1.0)
    proc = ec_process(cloud, default_rule(), R, np.array([0.0, 1.0]))
    path = write_process_csv(proc, tmp_path / "p.csv")
    side = json.loads(path.with_suffix(".json").read_text())
    for key in ("n", "seed", "R_n", "scale", "exterior_count", "law", "rule",
                "truncated", "n_simplices", "backend"):
        assert key in side
    assert side["n"] == 100 and side["seed"] == 13


def test_read_rejects_foreign_csv(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(DomainError):
        read_process_csv(p)


# ---------------------------------------------------------------------------
# distributional sanity of the whole pipeline


def test_exterior_count_concentrates_near_planted_mean():
    # the count outside R_n is Binomial(n, 1 - F(R_n)); its mean over R_n^2
    # approaches the scaled singleton limit s_1 xi / (alpha - d) = pi
    law = preset("example_3_2")
    n = 2000
    R = radius_R_n(law, n, 1.0)
    p = 1.0 - float(law.radial_cdf(R))
    counts = []
    for seed in range(30):
        cloud = sample_cloud(law, n, seed=seed)
        norms = np.sqrt((cloud.points ** 2).sum(axis=1))
        counts.append(int((norms >= R).sum()))
    mean = float(np.mean(counts))
    sigma = math.sqrt(n * p * (1.0 - p) / 30.0)
    assert abs(mean - n * p) < 3.0 * sigma
    assert n * p / R ** 2 == pytest.approx(math.pi, rel=0.01)
