import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmac.ensemble import SignalEnsemble, classical_ensemble
from qmac.entropy import EntropyProfile, conditional_entropies
from qmac.errors import InvalidProfile, InvalidSamplerPlan, LambdaOutOfRange
from qmac.region import (
    RateRegion,
    SamplerPlan,
    batch_profiles,
    contains,
    convex_hull,
    pentagon,
    hull_convergence,
    region_union,
    sample_distributions,
    simplex_grid,
    time_share,
)

from conftest import H_RHO_C, random_ensembles

EXAMPLE_PROFILE = EntropyProfile(1.0, H_RHO_C, 1.0)


@st.composite
def profiles(draw):
    ha = draw(st.floats(0.0, 3.0))
    hb = draw(st.floats(0.0, 3.0))
    h = draw(st.floats(max(ha, hb), ha + hb))
    return EntropyProfile(h, ha, hb)


def test_pentagon_example():
    v = pentagon(EXAMPLE_PROFILE).vertices
    expected = [(0, 0), (H_RHO_C, 0), (H_RHO_C, 1 - H_RHO_C), (0, 1)]
    assert v.shape == (4, 2)
    assert np.allclose(v, expected, atol=1e-6)
    assert np.allclose(v[2], (0.600876, 0.399124), atol=1e-6)


def test_pentagon_rectangle_and_point():
    assert np.allclose(pentagon(EntropyProfile(2, 1, 1)).vertices, [(0, 0), (1, 0), (1, 1), (0, 1)])
    assert np.allclose(pentagon(EntropyProfile(0, 0, 0)).vertices, [(0, 0)])


def test_pentagon_rejects_invalid_profile():
    with pytest.raises(InvalidProfile):
        pentagon(EntropyProfile(1.0, 0.2, 0.3))


def test_contains_examples():
    region = pentagon(EXAMPLE_PROFILE)
    assert contains(region, (0.3, 0.5), 1e-9)
    assert not contains(region, (0.6, 0.6), 1e-9)
    assert contains(region, (0, 0), 0.0)
    assert contains(pentagon(EntropyProfile(0, 0, 0)), (0, 0), 0.0)


def test_contains_degenerate_segment():
    seg = pentagon(EntropyProfile(1.0, 0.0, 1.0))
    assert len(seg.vertices) == 2
    assert contains(seg, (0, 0.5))
    assert not contains(seg, (0.1, 0.5))


def test_time_share_examples():
    assert time_share((1, 0), (0, 1), 0.5) == (0.5, 0.5)
    assert time_share((0.3, 0.2), (0.9, 0.1), 1.0) == (0.3, 0.2)
    r = time_share((H_RHO_C, 1 - H_RHO_C), (0, 1), 0.25)
    assert r.r1 == pytest.approx(0.150219, abs=1e-6)
    assert r.r2 == pytest.approx(0.849781, abs=1e-6)
    with pytest.raises(LambdaOutOfRange):
        time_share((0, 0), (1, 1), 1.5)


@settings(max_examples=300, deadline=None)
@given(profiles())
def test_pentagon_is_convex_region(prof):
    assert pentagon(prof).violations() == []


@settings(max_examples=200, deadline=None)
@given(profiles(), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_time_share_stays_inside(prof, s1, t1, s2, t2, lam):
    region = pentagon(prof)
    v = region.vertices
    # points inside via convex weights on vertices
    def interior(s, t):
        w = np.r_[s, t, 1.0, np.zeros(len(v))][: len(v)]
        if w.sum() == 0:
            w[0] = 1.0
        w = w / w.sum()
        return tuple(w @ v)
    a, b = interior(s1, t1), interior(s2, t2)
    assert contains(region, a) and contains(region, b)
    assert contains(region, time_share(a, b, lam))


def test_outmost_vertices_random(rng):
    for e in random_ensembles(rng, 200):
        prof = conditional_entropies(e)
        region = pentagon(prof)
        top = region.max_sum_vertices(1e-9)
        h, ha, hb = prof.h_joint, prof.h_cond_a, prof.h_cond_b
        for corner in ((h - hb, hb), (ha, h - ha)):
            assert np.min(np.max(np.abs(top - np.array(corner)), axis=1)) < 1e-9


def test_simplex_grid():
    g = simplex_grid(3, 0.5)
    assert len(g) == 6 and np.allclose(g.sum(axis=1), 1)
    assert len(simplex_grid(2, 0.05)) == 21
    with pytest.raises(InvalidSamplerPlan):
        simplex_grid(2, 0.3)


def test_sampler_plan_errors(example):
    with pytest.raises(InvalidSamplerPlan):
        sample_distributions(example, SamplerPlan(grid_step=None))
    with pytest.raises(InvalidSamplerPlan):
        sample_distributions(example, SamplerPlan(grid_step=None, random_samples=5))


def test_batch_profiles_match_direct(rng):
    for e in random_ensembles(rng, 20):
        P, Q = sample_distributions(e, SamplerPlan(grid_step=None, random_samples=10, seed=3))
        got = batch_profiles(e, P, Q)
        for k in range(len(P)):
            prof = conditional_entropies(e.with_distributions(P[k] / P[k].sum(), Q[k] / Q[k].sum()))
            assert got[k] == pytest.approx([prof.h_joint, prof.h_cond_a, prof.h_cond_b], abs=1e-9)


def test_union_single_letters():
    e = SignalEnsemble(["a"], ["b"], [[[1, 0]]], [1.0], [1.0])
    assert np.allclose(region_union(e, SamplerPlan(grid_step=1.0)).vertices, [(0, 0)])


def test_union_example_contains_uniform_pentagon(example):
    union = region_union(example, SamplerPlan(0.05, 500, 11))
    base = pentagon(conditional_entropies(example))
    assert union.violations() == []
    assert all(contains(union, v, 1e-9) for v in base.vertices)
    assert union.area() >= base.area() - 1e-12


def test_union_classical_square():
    union = region_union(classical_ensemble([0.5, 0.5], [0.5, 0.5]), SamplerPlan(0.05))
    assert np.allclose(union.vertices, [(0, 0), (1, 0), (1, 1), (0, 1)], atol=1e-3)


def test_union_monotone_under_refinement(rng):
    e = next(random_ensembles(rng, 1, dims=(2, 3), sizes=(2, 3)))
    coarse = region_union(e, SamplerPlan(0.5))
    fine = region_union(e, SamplerPlan(0.1, 50, 5))
    assert all(contains(fine, v, 1e-9) for v in coarse.vertices)
    assert fine.area() >= coarse.area() - 1e-12


def test_union_contains_every_pentagon(rng):
    for e in random_ensembles(rng, 10, dims=(2, 4), sizes=(1, 3)):
        plan = SamplerPlan(0.25, 20, 9)
        union = region_union(e, plan)
        P, Q = sample_distributions(e, plan)
        for k in range(len(P)):
            prof = conditional_entropies(e.with_distributions(P[k] / P[k].sum(), Q[k] / Q[k].sum()))
            for v in pentagon(prof).vertices:
                assert contains(union, v, 1e-9)


def test_hull_drops_interior_and_collinear():
    pts = [(0, 0), (1, 0), (2, 0), (2, 2), (0, 2), (1, 1), (1, 2)]
    assert np.allclose(convex_hull(pts), [(0, 0), (2, 0), (2, 2), (0, 2)])


def test_hull_ulp_neighbours_keep_corner():
    x = 0.6008760366928562
    pts = [(0, 0), (x, 0), (np.nextafter(x, 1), 0.3955), (x, 0.3991), (0, 1), (np.nextafter(x, 1), 0.1)]
    region = RateRegion.from_points(pts)
    assert contains(region, (x, 0.3991), 1e-12)


def test_hull_convergence_ladder(example):
    ladder = hull_convergence(example, SamplerPlan(grid_step=0.1, random_samples=30, seed=4))
    assert [r["grid_step"] for r in ladder] == [1.0, 0.5, 0.2, 0.1, 0.1]
    assert [r["pairs"] for r in ladder] == [4, 9, 36, 121, 151]
    areas = [r["area"] for r in ladder]
    # grid 1/m contains grid 1/k when k divides m, and then the area cannot shrink
    steps = [round(1 / r["grid_step"]) for r in ladder[:4]]
    for i, k in enumerate(steps):
        for j, m in enumerate(steps):
            if m % k == 0:
                assert areas[j] >= areas[i] - 1e-12
    assert areas[-1] >= areas[-2] - 1e-12
    final = region_union(example, SamplerPlan(grid_step=0.1, random_samples=30, seed=4))
    assert areas[-1] == pytest.approx(final.area(), abs=1e-12)
