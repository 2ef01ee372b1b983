"""Weighted feature similarity and frame-to-track assignment.

Similarity between two cluster features is a convex combination of five
components (centroid distance, radial velocity, box area, box overlap,
amplitude), each clamped to [0, 1]. Clamping doubles as a hard per-component
gate: beyond a component's threshold it contributes nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import BoundingBox, Cluster, FeatureVector

_WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class SimilarityWeights:
    """Importance weights of the five similarity components; must sum to 1."""

    w_dis: float = 0.3
    w_vel: float = 0.2
    w_area: float = 0.15
    w_overlap: float = 0.2
    w_amp: float = 0.15

    def __post_init__(self):
        vals = self.as_tuple()
        for v in vals:
            if not 0.0 <= v <= 1.0:
                raise ValueError("each weight must be in [0, 1]")
        if abs(sum(vals) - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError("weights must sum to 1")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.w_dis, self.w_vel, self.w_area, self.w_overlap, self.w_amp)


@dataclass(frozen=True)
class SimilarityThresholds:
    """Scale parameters of the distance/velocity/area components plus the
    minimum combined similarity (gate) required to accept a match."""

    d_thres: float = 2.0
    v_thres: float = 2.0
    area_thres: float = 2.0
    gate: float = 0.4

    def __post_init__(self):
        if self.d_thres <= 0 or self.v_thres <= 0 or self.area_thres <= 0:
            raise ValueError("thresholds must be > 0")
        if not 0.0 < self.gate <= 1.0:
            raise ValueError("gate must be in (0, 1]")


@dataclass(frozen=True)
class Assignment:
    """One-to-one matching result.

    pairs holds (track_id, cluster_id, similarity) with every similarity at
    or above the gate; leftovers are listed unmatched.
    """

    pairs: tuple[tuple[int, int, float], ...]
    unmatched_tracks: tuple[int, ...]
    unmatched_clusters: tuple[int, ...]


def _clamp01(v: float) -> float:
    return 0.0 if v < 0.0 else (1.0 if v > 1.0 else v)


def distance_similarity(f1: FeatureVector, f2: FeatureVector, d_thres: float) -> float:
    """1 at coincident centroids, falling linearly to 0 at d_thres apart."""
    d = math.hypot(f1.px - f2.px, f1.py - f2.py)
    return _clamp01(1.0 - d / d_thres)


def velocity_similarity(f1: FeatureVector, f2: FeatureVector, v_thres: float) -> float:
    return _clamp01(1.0 - abs(f1.vr - f2.vr) / v_thres)


def area_similarity(f1: FeatureVector, f2: FeatureVector, area_thres: float) -> float:
    return _clamp01(1.0 - abs(f1.area - f2.area) / area_thres)


def overlap_similarity(b1: BoundingBox, b2: BoundingBox) -> float:
    """Intersection-over-union of two boxes.

    Two zero-area boxes score 1 if they coincide exactly and 0 otherwise.
    """
    iw = min(b1.x_max, b2.x_max) - max(b1.x_min, b2.x_min)
    ih = min(b1.y_max, b2.y_max) - max(b1.y_min, b2.y_min)
    inter = max(0.0, iw) * max(0.0, ih)
    union = b1.area + b2.area - inter
    if union <= 0.0:
        return 1.0 if b1 == b2 else 0.0
    return inter / union


def amplitude_similarity(f1: FeatureVector, f2: FeatureVector) -> float:
    """1 minus the amplitude gap relative to the larger amplitude.

    Both amplitudes zero counts as identical (1); one zero against a
    positive amplitude scores 0.
    """
    hi = max(f1.amplitude, f2.amplitude)
    if hi == 0.0:
        return 1.0
    return _clamp01(1.0 - abs(f1.amplitude - f2.amplitude) / hi)


def similarity(f1: FeatureVector, f2: FeatureVector,
               weights: SimilarityWeights, thresholds: SimilarityThresholds) -> float:
    """Weighted sum of the five clamped components, in [0, 1].

    The sum is normalized by the total weight so that identical features
    score exactly 1 even when the weights only sum to 1 within tolerance.
    """
    w = weights.as_tuple()
    comps = (
        distance_similarity(f1, f2, thresholds.d_thres),
        velocity_similarity(f1, f2, thresholds.v_thres),
        area_similarity(f1, f2, thresholds.area_thres),
        overlap_similarity(f1.bbox, f2.bbox),
        amplitude_similarity(f1, f2),
    )
    total = w[0] + w[1] + w[2] + w[3] + w[4]
    return (w[0] * comps[0] + w[1] * comps[1] + w[2] * comps[2]
            + w[3] * comps[3] + w[4] * comps[4]) / total


def _similarity_table(predicted, clusters, weights, thresholds):
    return {
        (tid, c.id): similarity(feat, c.features, weights, thresholds)
        for tid, feat in predicted
        for c in clusters
    }


def associate(predicted: list[tuple[int, FeatureVector]], clusters: list[Cluster],
              weights: SimilarityWeights, thresholds: SimilarityThresholds,
              method: str = "greedy") -> Assignment:
    """Match predicted track features to clusters, one-to-one.

    The default greedy policy repeatedly takes the globally highest
    remaining (track, cluster) similarity at or above the gate, breaking
    ties by lower track id then lower cluster id. method="optimal" instead
    maximizes the total similarity by exhaustive search (small problems
    only; intended for comparison runs).
    """
    track_ids = [tid for tid, _ in predicted]
    cluster_ids = [c.id for c in clusters]
    if len(set(track_ids)) != len(track_ids):
        raise ValueError("track ids must be unique")
    if len(set(cluster_ids)) != len(cluster_ids):
        raise ValueError("cluster ids must be unique")

    sims = _similarity_table(predicted, clusters, weights, thresholds)
    if method == "greedy":
        pairs = _greedy_pairs(sims, thresholds.gate)
    elif method == "optimal":
        pairs = _optimal_pairs(track_ids, cluster_ids, sims, thresholds.gate)
    else:
        raise ValueError(f"unknown association method {method!r}")

    used_t = {t for t, _, _ in pairs}
    used_c = {c for _, c, _ in pairs}
    return Assignment(
        pairs=tuple(pairs),
        unmatched_tracks=tuple(sorted(t for t in track_ids if t not in used_t)),
        unmatched_clusters=tuple(sorted(c for c in cluster_ids if c not in used_c)),
    )


def _greedy_pairs(sims, gate):
    order = sorted(sims.items(), key=lambda kv: (-kv[1], kv[0][0], kv[0][1]))
    used_t, used_c = set(), set()
    pairs = []
    for (tid, cid), s in order:
        if s < gate or tid in used_t or cid in used_c:
            continue
        used_t.add(tid)
        used_c.add(cid)
        pairs.append((tid, cid, s))
    return pairs


def _optimal_pairs(track_ids, cluster_ids, sims, gate):
    """Best-total-similarity matching by exhaustive enumeration."""
    if len(track_ids) * len(cluster_ids) > 64:
        raise ValueError("optimal matching is exhaustive; problem too large")
    eligible = {tid: [c for c in cluster_ids if sims[(tid, c)] >= gate]
                for tid in track_ids}
    best: list[tuple[int, int, float]] = []
    best_total = -1.0

    tids = sorted(track_ids)

    def recurse(i, used_c, chosen, total):
        nonlocal best, best_total
        if i == len(tids):
            key = sorted((t, c) for t, c, _ in chosen)
            if total > best_total + 1e-15 or (
                    abs(total - best_total) <= 1e-15
                    and key < sorted((t, c) for t, c, _ in best)):
                best = list(chosen)
                best_total = total
            return
        tid = tids[i]
        recurse(i + 1, used_c, chosen, total)
        for c in eligible[tid]:
            if c in used_c:
                continue
            chosen.append((tid, c, sims[(tid, c)]))
            recurse(i + 1, used_c | {c}, chosen, total + sims[(tid, c)])
            chosen.pop()

    recurse(0, frozenset(), [], 0.0)
    return sorted(best, key=lambda p: (p[0], p[1]))


def total_similarity(assignment: Assignment) -> float:
    return sum(s for _, _, s in assignment.pairs)
