import itertools
import math

import numpy as np
import pytest

from radartrack.association import (Assignment, SimilarityThresholds,
                                    SimilarityWeights, amplitude_similarity,
                                    area_similarity, associate,
                                    distance_similarity, overlap_similarity,
                                    similarity, total_similarity,
                                    velocity_similarity)
from radartrack.model import BoundingBox, Cluster, FeatureVector


def feat(px=0.0, py=0.0, vr=0.0, amp=1.0, bbox=None):
    if bbox is None:
        bbox = BoundingBox(px - 0.5, px + 0.5, py - 0.5, py + 0.5)
    return FeatureVector(px=px, py=py, vr=vr, amplitude=amp, bbox=bbox)


def random_feature(rng):
    px, py = rng.uniform(-10, 10), rng.uniform(-10, 10)
    w, h = rng.uniform(0, 3), rng.uniform(0, 3)
    return FeatureVector(
        px=px, py=py, vr=rng.uniform(-5, 5), amplitude=rng.uniform(0, 50),
        bbox=BoundingBox(px - w / 2, px + w / 2, py - h / 2, py + h / 2))


def cluster_at(cid, feature):
    return Cluster(id=cid, member_indices=frozenset({0}), features=feature)


EQUAL_W = SimilarityWeights(0.2, 0.2, 0.2, 0.2, 0.2)
THR = SimilarityThresholds(d_thres=10.0, v_thres=4.0, area_thres=2.0, gate=0.5)


def test_weights_validation():
    with pytest.raises(ValueError):
        SimilarityWeights(0.5, 0.5, 0.5, 0.0, 0.0)
    with pytest.raises(ValueError):
        SimilarityWeights(1.2, -0.2, 0.0, 0.0, 0.0)


def test_thresholds_validation():
    with pytest.raises(ValueError):
        SimilarityThresholds(d_thres=0.0)
    with pytest.raises(ValueError):
        SimilarityThresholds(gate=0.0)


def test_distance_similarity_examples():
    assert distance_similarity(feat(0, 0), feat(0, 0), 10.0) == 1.0
    assert distance_similarity(feat(0, 0), feat(3, 4), 10.0) == pytest.approx(0.5)
    assert distance_similarity(feat(0, 0), feat(20, 0), 10.0) == 0.0


def test_velocity_similarity_examples():
    assert velocity_similarity(feat(vr=2.0), feat(vr=2.0), 4.0) == 1.0
    assert velocity_similarity(feat(vr=0.0), feat(vr=4.0), 4.0) == 0.0
    assert velocity_similarity(feat(vr=0.0), feat(vr=1.0), 4.0) == pytest.approx(0.75)


def test_area_similarity_examples():
    b1 = BoundingBox(0, 1, 0, 1)
    b2 = BoundingBox(0, 1.5, 0, 1)
    assert area_similarity(feat(bbox=b1), feat(bbox=b1), 2.0) == 1.0
    assert area_similarity(feat(bbox=b1), feat(bbox=b2), 2.0) == pytest.approx(0.75)
    big = BoundingBox(0, 5, 0, 5)
    assert area_similarity(feat(bbox=b1), feat(bbox=big), 2.0) == 0.0


def test_overlap_similarity_examples():
    b = BoundingBox(0, 2, 0, 2)
    assert overlap_similarity(b, b) == 1.0
    assert overlap_similarity(b, BoundingBox(5, 6, 5, 6)) == 0.0
    assert overlap_similarity(b, BoundingBox(1, 3, 0, 2)) == pytest.approx(1 / 3)


def test_overlap_similarity_degenerate_boxes():
    p1 = BoundingBox(1, 1, 2, 2)
    p2 = BoundingBox(1, 1, 2, 2)
    p3 = BoundingBox(1, 1, 3, 3)
    assert overlap_similarity(p1, p2) == 1.0
    assert overlap_similarity(p1, p3) == 0.0
    assert overlap_similarity(p1, BoundingBox(0, 2, 0, 4)) == 0.0


def test_amplitude_similarity_examples():
    assert amplitude_similarity(feat(amp=7), feat(amp=7)) == 1.0
    assert amplitude_similarity(feat(amp=100), feat(amp=50)) == pytest.approx(0.5)
    assert amplitude_similarity(feat(amp=0), feat(amp=5)) == 0.0
    assert amplitude_similarity(feat(amp=0), feat(amp=0)) == 1.0


def test_similarity_identical_is_exactly_one():
    rng = np.random.default_rng(31)
    for _ in range(200):
        f = random_feature(rng)
        assert similarity(f, f, EQUAL_W, THR) == 1.0
        assert similarity(f, f, SimilarityWeights(), SimilarityThresholds()) == 1.0


def test_similarity_hand_computed():
    # components 0.5, 0.75, 0.75, 1/3, 0.5 under equal weights
    f1 = feat(px=0, py=0, vr=0, amp=100, bbox=BoundingBox(0, 2, 0, 2))
    f2 = feat(px=3, py=4, vr=1, amp=50, bbox=BoundingBox(1, 3, 0, 2))
    thr = SimilarityThresholds(d_thres=10.0, v_thres=4.0, area_thres=2.0, gate=0.5)
    assert area_similarity(f1, f2, 2.0) == 1.0  # both boxes area 4
    f2 = FeatureVector(px=3, py=4, vr=1, amplitude=50, bbox=BoundingBox(1, 3, 0, 2.25))
    # areas 4 and 4.5 -> 0.75; overlap inter 2, union 6.5
    expected = 0.2 * (0.5 + 0.75 + 0.75 + 2 / 6.5 + 0.5)
    assert similarity(f1, f2, EQUAL_W, thr) == pytest.approx(expected, abs=1e-12)


def test_similarity_components_and_sum_in_unit_interval():
    rng = np.random.default_rng(32)
    for _ in range(2000):
        f1, f2 = random_feature(rng), random_feature(rng)
        comps = (
            distance_similarity(f1, f2, THR.d_thres),
            velocity_similarity(f1, f2, THR.v_thres),
            area_similarity(f1, f2, THR.area_thres),
            overlap_similarity(f1.bbox, f2.bbox),
            amplitude_similarity(f1, f2),
        )
        for c in comps:
            assert 0.0 <= c <= 1.0
        s = similarity(f1, f2, EQUAL_W, THR)
        assert 0.0 <= s <= 1.0
        assert s == similarity(f2, f1, EQUAL_W, THR)


def test_similarity_monotone_in_distance_velocity_area():
    base = feat(px=0, py=0, vr=0, amp=5, bbox=BoundingBox(-1, 1, -1, 1))
    prev = None
    for d in np.linspace(0, 15, 40):
        other = FeatureVector(px=d, py=0, vr=0, amplitude=5,
                              bbox=BoundingBox(d - 1, d + 1, -1, 1))
        s = similarity(base, other, EQUAL_W, THR)
        if prev is not None:
            assert s <= prev + 1e-12
        prev = s
    prev = None
    for dv in np.linspace(0, 8, 40):
        other = FeatureVector(px=0, py=0, vr=dv, amplitude=5,
                              bbox=BoundingBox(-1, 1, -1, 1))
        s = similarity(base, other, EQUAL_W, THR)
        if prev is not None:
            assert s <= prev + 1e-12
        prev = s


def test_overlap_weight_degeneracy_equals_iou():
    rng = np.random.default_rng(33)
    w = SimilarityWeights(0.0, 0.0, 0.0, 1.0, 0.0)
    for _ in range(500):
        f1, f2 = random_feature(rng), random_feature(rng)
        iou = overlap_similarity(f1.bbox, f2.bbox)
        assert abs(similarity(f1, f2, w, THR) - iou) <= 1e-12


def test_associate_no_tracks():
    clusters = [cluster_at(0, feat()), cluster_at(1, feat(px=5))]
    a = associate([], clusters, EQUAL_W, THR)
    assert a.pairs == ()
    assert a.unmatched_clusters == (0, 1)


def test_associate_single_match():
    f = feat()
    a = associate([(7, f)], [cluster_at(3, f)], EQUAL_W, THR)
    assert a.pairs == ((7, 3, 1.0),)
    assert a.unmatched_tracks == ()
    assert a.unmatched_clusters == ()


def test_associate_greedy_matrix():
    # similarity matrix [[0.9, 0.6], [0.8, 0.85]] realized through distance
    # alone: sims are 1 - d/10, so place the four points at the distances
    # 1, 4 (from t0) and 2, 1.5 (from t1)
    w = SimilarityWeights(1.0, 0.0, 0.0, 0.0, 0.0)
    thr = SimilarityThresholds(d_thres=10.0, v_thres=1.0, area_thres=1.0, gate=0.5)
    t0 = feat(px=0.0, py=0.0)
    c0 = cluster_at(0, feat(px=1.0, py=0.0))
    c1 = cluster_at(1, feat(px=4.0, py=0.0))
    # intersection of circles around c0 (r=2) and c1 (r=1.5)
    x = 67.0 / 24.0
    y = math.sqrt(4.0 - (x - 1.0) ** 2)
    t1 = feat(px=x, py=y)
    sims = {(ti, ci): similarity(tf, c.features, w, thr)
            for ti, tf in ((0, t0), (1, t1)) for ci, c in ((0, c0), (1, c1))}
    assert sims[(0, 0)] == pytest.approx(0.9)
    assert sims[(0, 1)] == pytest.approx(0.6)
    assert sims[(1, 0)] == pytest.approx(0.8)
    assert sims[(1, 1)] == pytest.approx(0.85)
    a = associate([(0, t0), (1, t1)], [c0, c1], w, thr)
    # greedy picks 0.9 first, then 0.85; here that also equals the best total
    assert [(t, c) for t, c, _ in a.pairs] == [(0, 0), (1, 1)]
    best = associate([(0, t0), (1, t1)], [c0, c1], w, thr, method="optimal")
    assert [(t, c) for t, c, _ in best.pairs] == [(0, 0), (1, 1)]


def test_associate_below_gate():
    a = associate([(0, feat(px=0))], [cluster_at(0, feat(px=100))], EQUAL_W, THR)
    assert a.pairs == ()
    assert a.unmatched_tracks == (0,)
    assert a.unmatched_clusters == (0,)


def test_associate_tie_break_deterministic():
    f = feat()
    a = associate([(2, f), (1, f)], [cluster_at(5, f), cluster_at(4, f)], EQUAL_W, THR)
    # all sims are 1.0; lower track id wins first, then lower cluster id
    assert a.pairs == ((1, 4, 1.0), (2, 5, 1.0))


def test_associate_one_to_one_property():
    rng = np.random.default_rng(34)
    for _ in range(100):
        nt, nc = int(rng.integers(0, 6)), int(rng.integers(0, 6))
        tracks = [(i, random_feature(rng)) for i in range(nt)]
        clusters = [cluster_at(j, random_feature(rng)) for j in range(nc)]
        a = associate(tracks, clusters, EQUAL_W, THR)
        tids = [t for t, _, _ in a.pairs]
        cids = [c for _, c, _ in a.pairs]
        assert len(set(tids)) == len(tids)
        assert len(set(cids)) == len(cids)
        for _, _, s in a.pairs:
            assert s >= THR.gate
        assert set(tids) | set(a.unmatched_tracks) == set(range(nt))
        assert set(cids) | set(a.unmatched_clusters) == set(range(nc))


def test_greedy_versus_exhaustive_optimal():
    # greedy is not claimed optimal; record the achieved ratio and sanity-check
    rng = np.random.default_rng(35)
    ratios = []
    for _ in range(60):
        nt, nc = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        tracks = [(i, random_feature(rng)) for i in range(nt)]
        clusters = [cluster_at(j, random_feature(rng)) for j in range(nc)]
        greedy = associate(tracks, clusters, EQUAL_W, THR, method="greedy")
        optimal = associate(tracks, clusters, EQUAL_W, THR, method="optimal")
        tg, to = total_similarity(greedy), total_similarity(optimal)
        assert tg <= to + 1e-12
        if to > 0:
            ratios.append(tg / to)
    assert ratios, "no non-trivial instances generated"
    print(f"\ngreedy/optimal total-similarity ratio: min={min(ratios):.4f} "
          f"mean={sum(ratios) / len(ratios):.4f}")
    assert min(ratios) >= 0.5  # classic greedy matching bound


def test_duplicate_ids_rejected():
    f = feat()
    with pytest.raises(ValueError):
        associate([(0, f), (0, f)], [], EQUAL_W, THR)
    with pytest.raises(ValueError):
        associate([], [cluster_at(1, f), cluster_at(1, f)], EQUAL_W, THR)
