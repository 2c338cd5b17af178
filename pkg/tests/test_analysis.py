import numpy as np
import pytest

from pdisc import analysis as A
from pdisc.geometry import Domain
from pdisc.radius import ConstantRadiusField, ParametricRadiusField
from pdisc.sampler import PatternMeta, SamplePattern, bridson_constant, fast_variable, generate


def _pattern(points, r=0.1, domain=None):
    pts = np.asarray(points, dtype=float)
    meta = PatternMeta("manual", 0, None, {"family": "constant", "gamma": 1.0}, (1.0,) * pts.shape[1])
    return SamplePattern(pts, np.full(len(pts), r), domain or Domain.cube(pts.shape[1]), meta)


def test_voronoi_single_point():
    prof = A.voronoi_areas(_pattern([[0.1, -0.2]]), 256)
    assert prof.area.tolist() == [1.0]


def test_voronoi_symmetric_pair():
    prof = A.voronoi_areas(_pattern([[0.1, 0.2], [0.1, -0.2]]), 512)
    assert prof.area[0] == prof.area[1] == 0.5


def test_voronoi_regular_grid():
    D = 300
    prof = A.voronoi_areas(_pattern([[-0.25, -0.25], [-0.25, 0.25], [0.25, -0.25], [0.25, 0.25]]), D)
    assert np.all(np.abs(prof.area - 0.25) <= 2 / D)


def test_voronoi_tree_matches_brute():
    pat = fast_variable(ParametricRadiusField(15), seed=3)
    dom = pat.domain
    assert np.array_equal(A.voronoi_labels(pat.points, dom, 96), A.voronoi_labels_brute(pat.points, dom, 96))


def test_voronoi_errors():
    with pytest.raises(ValueError):
        A.voronoi_areas(_pattern([[0.0, 0.0, 0.0]]), 256)
    with pytest.raises(ValueError):
        A.voronoi_areas(_pattern([[0.0, 0.0]]), 128)


def test_area_conservation_and_boundary_flag():
    pat = fast_variable(ParametricRadiusField(60), seed=1)
    prof = A.voronoi_areas(pat, 512)
    assert prof.total_area == pytest.approx(1.0, abs=5e-3)
    assert prof.boundary.any() and not prof.boundary.all()


def test_similarity_self_and_density():
    p50 = [A.voronoi_areas(generate(ParametricRadiusField(50), seed=s), 512) for s in range(3)]
    p150 = [A.voronoi_areas(generate(ParametricRadiusField(150), seed=s), 512) for s in range(3)]
    same = A.profile_similarity(p50, p50)
    assert same.max_rel_diff == 0.0
    cmp = A.profile_similarity(p150, p50)
    ok = ~cmp.empty
    assert np.all(cmp.median_b[ok] > cmp.median_a[ok])
    assert cmp.edges[-1] == pytest.approx(np.sqrt(0.5))


def test_similarity_flags_empty_bins():
    a = A.voronoi_areas(_pattern([[0.0, 0.0], [0.3, 0.3]]), 256)
    cmp = A.profile_similarity(a, a, bins=20)
    assert cmp.empty.sum() == 18 and np.isnan(cmp.rel_diff[cmp.empty]).all()
    other = A.voronoi_areas(_pattern([[0.0, 0.0]]), 512)
    with pytest.raises(ValueError):
        A.profile_similarity(a, other)


def test_raster_resolution_stability():
    pats = [generate(ParametricRadiusField(30), seed=s) for s in range(5)]
    _, m1, _ = A.binned_medians([A.voronoi_areas(p, 1024) for p in pats])
    _, m2, _ = A.binned_medians([A.voronoi_areas(p, 2048) for p in pats])
    ok = ~np.isnan(m1)
    assert np.max(np.abs(m2[ok] / m1[ok] - 1)) < 0.02


def test_coverage():
    f = ParametricRadiusField(100)
    pat = fast_variable(f, k=30, seed=2)
    rep = A.coverage_fraction(pat, f, 10_000, seed=1, multipliers=(0.5, 1.0, 2.0))
    assert rep.fractions == tuple(sorted(rep.fractions))
    assert rep.fraction_r >= 0.95 and rep.fraction_2r >= rep.fraction_r
    empty = _pattern(np.empty((0, 2)))
    assert A.coverage_fraction(empty, f).fractions == (0.0, 0.0)
    with pytest.raises(ValueError):
        A.coverage_fraction(pat, f, 100)


def test_nn_stats():
    pat = bridson_constant(0.1, 30, seed=0)
    st = A.nn_stats(pat)
    assert st.valid and 1 < st.mean_ratio <= 2
    lattice = _pattern([[x, y] for x in (-0.2, -0.1, 0.0) for y in (-0.2, -0.1)], r=0.1)
    bad = A.nn_stats(lattice, ConstantRadiusField(0.1))
    assert bad.min_ratio == pytest.approx(1.0) and not bad.valid
    with pytest.raises(ValueError):
        A.nn_stats(_pattern([[0.0, 0.0]]))


def test_csv_writers(tmp_path):
    pat = fast_variable(ParametricRadiusField(20), seed=0)
    prof = A.voronoi_areas(pat, 256)
    lines = A.write_voronoi_csv(prof, tmp_path / "v.csv").read_text().splitlines()
    assert lines[0] == "point_index,distance,area" and len(lines) == len(pat) + 1
    cov = A.coverage_fraction(pat, ParametricRadiusField(20))
    lines = A.write_coverage_csv(cov, tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "multiplier,fraction" and len(lines) == 3
    cmp = A.profile_similarity(prof, prof)
    assert len(A.write_similarity_csv(cmp, tmp_path / "s.csv").read_text().splitlines()) == 21
