from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gridcyber.geo import SubstationDistances, haversine_km, pairwise_km
from gridcyber.placement import KTooLarge, kmeans, kmeans_labels, place_bas, place_uccs, planted_plan
from gridcyber.synthetic import synthetic_case


def _cosine_law_km(a, b, r=6371.0088):
    la1, lo1, la2, lo2 = map(math.radians, (*a, *b))
    c = math.sin(la1) * math.sin(la2) + math.cos(la1) * math.cos(la2) * math.cos(lo2 - lo1)
    return r * math.acos(max(-1.0, min(1.0, c)))


def test_haversine_matches_spherical_cosine_law():
    rng = np.random.default_rng(3)
    for _ in range(200):
        a = (rng.uniform(-80, 80), rng.uniform(-180, 180))
        b = (rng.uniform(-80, 80), rng.uniform(-180, 180))
        assert haversine_km(a, b) == pytest.approx(_cosine_law_km(a, b), rel=1e-6, abs=1e-3)
    # one degree of latitude
    assert haversine_km((0, 0), (1, 0)) == pytest.approx(111.195, abs=1e-2)


def test_pairwise_condensed_layout_and_cache(tmp_path):
    rng = np.random.default_rng(0)
    pts = np.column_stack([rng.uniform(30, 40, 12), rng.uniform(-90, -80, 12)])
    vec = pairwise_km(pts)
    k = 0
    for i in range(12):
        for j in range(i + 1, 12):
            assert vec[k] == pytest.approx(haversine_km(pts[i], pts[j]), rel=1e-5)
            k += 1
    ids = list(range(100, 112))
    d1 = SubstationDistances(ids, pts, tmp_path, key="abc")
    d2 = SubstationDistances(ids, pts, tmp_path, key="abc")
    assert not d1.from_cache and d2.from_cache
    assert d2.between(103, 107) == d1.between(107, 103) == pytest.approx(haversine_km(pts[3], pts[7]), rel=1e-5)
    assert d1.between(105, 105) == 0.0


def _nearest_centroid_holds(points, labels, centers):
    d = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    own = d[np.arange(len(points)), labels]
    return bool(np.all(own <= d.min(axis=1) + 1e-12))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 120), st.integers(1, 12), st.integers(0, 10_000))
def test_kmeans_nearest_centroid_invariant(n, k, seed):
    k = min(k, n)
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n, 2)) * rng.uniform(0.1, 5)
    labels, centers = kmeans_labels(pts, k, seed)
    assert set(np.unique(labels)) == set(range(k))  # no empty clusters
    assert _nearest_centroid_holds(pts, labels, centers)
    for c in range(k):
        assert np.allclose(centers[c], pts[labels == c].mean(axis=0))


def test_kmeans_deterministic_and_k_bounds():
    pts = np.random.default_rng(1).uniform(size=(40, 2))
    a = kmeans(pts, 5, seed=7)
    b = kmeans(pts, 5, seed=7)
    assert a == b
    assert sorted(i for c in a for i in c.member_sub_ids) == list(range(40))
    with pytest.raises(KTooLarge):
        kmeans(pts, 41, seed=0)


def test_kmeans_recovers_separated_blobs():
    rng = np.random.default_rng(5)
    centres = np.array([[0, 0], [10, 0], [0, 10]])
    pts = np.concatenate([c + rng.normal(scale=0.3, size=(30, 2)) for c in centres])
    labels, _ = kmeans_labels(pts, 3, seed=0)
    for blob in range(3):
        assert len(set(labels[blob * 30:(blob + 1) * 30])) == 1


def test_place_uccs_labels_and_regions():
    case = synthetic_case(60, seed=2, region="SC")
    plan = place_uccs(case, 3, seed=0)
    assert plan.n_utilities == 3
    assert set(plan.utility_of) == {s.sub_id for s in case.substations}
    assert plan.utility_labels == ("SC.Utility1", "SC.Utility2", "SC.Utility3")
    lab = plan.sub_labels[1]
    assert lab == f"SC.Utility{plan.utility_of[1] + 1}.SUB 1"
    plan = place_bas(plan, 2, seed=0)
    assert plan.n_bas == 2 and sorted(plan.utility_ba) in ([0, 0, 1], [0, 1, 1])
    assert plan.labels["ba/1"] == "BA1"
    with pytest.raises(KTooLarge):
        place_bas(plan, 4, seed=0)


def test_duplicate_substation_names_get_suffix():
    case = synthetic_case(6, seed=0)
    subs = [dataclasses.replace(s, sub_name="SAME") for s in case.substations]
    case = dataclasses.replace(case, substations=subs)
    plan = place_uccs(case, 1, seed=0)
    labels = list(plan.sub_labels.values())
    assert len(set(labels)) == 6
    assert labels[0].endswith("SAME") and labels[1].endswith("SAME#2")


def test_planted_plan():
    case = synthetic_case(10, seed=0)
    plan = planted_plan(case, {s.sub_id: (0 if s.sub_id <= 7 else 1) for s in case.substations})
    assert [len(c.member_sub_ids) for c in plan.utilities] == [7, 3]
    assert plan.n_bas == 1 and plan.utility_ba == (0, 0)
