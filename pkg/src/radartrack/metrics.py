"""Track-versus-truth evaluation: centroid error, box overlap, detection F1.

Detections and truth are compared frame by frame with greedy nearest-centroid
matching (one-to-one, capped at a match distance). A match against a
non-clutter truth target is a true positive; an unmatched detection is a
false positive; an unmatched non-clutter truth entry is a false negative.
Clutter truth entries absorb detections that sit on them: such detections are
not rewarded, and they are penalized (counted as false positives) only when
the tracker explicitly claims them as moving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .association import overlap_similarity
from .model import BoundingBox

CLUTTER = "clutter"


@dataclass(frozen=True)
class GroundTruthTrack:
    """Truth trajectory of one target: per-frame centroid and box."""

    target: int
    label: str
    centroids: dict[int, tuple[float, float]] = field(default_factory=dict)
    boxes: dict[int, BoundingBox] = field(default_factory=dict)

    @property
    def is_clutter(self) -> bool:
        return self.label == CLUTTER

    def frames(self) -> list[int]:
        return sorted(self.centroids)


@dataclass(frozen=True)
class DetectionRecord:
    """One tracker output row, as read back from a tracking run."""

    frame: int
    track_id: int
    x: float
    y: float
    bbox: BoundingBox
    moving: Optional[bool] = None


@dataclass(frozen=True)
class PairReport:
    """Per (truth target, track) aggregate over their common matched frames."""

    target: int
    track_id: int
    frames: int
    cme: float
    bbor: float


@dataclass(frozen=True)
class EvalReport:
    pairs: tuple[PairReport, ...]
    precision: float
    recall: float
    f1: float
    cme: float
    bbor: float
    true_positives: int
    false_positives: int
    false_negatives: int
    matched_frames: int
    residuals: tuple[tuple[int, int, int, float, float, float], ...]

    def to_dict(self) -> dict:
        return {
            "pairs": [
                {"target": p.target, "track_id": p.track_id, "frames": p.frames,
                 "cme": p.cme, "bbor": p.bbor}
                for p in self.pairs
            ],
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "cme": self.cme,
            "bbor": self.bbor,
            "true_positives": self.true_positives,
            "false_positives": self.false_positives,
            "false_negatives": self.false_negatives,
            "matched_frames": self.matched_frames,
        }


def cme(gt: dict[int, tuple[float, float]], dt: dict[int, tuple[float, float]]) -> float:
    """Mean Euclidean centroid distance over the common frames."""
    common = sorted(set(gt) & set(dt))
    if not common:
        raise ValueError("no common frames")
    total = 0.0
    for f in common:
        gx, gy = gt[f]
        dx, dy = dt[f]
        total += math.hypot(gx - dx, gy - dy)
    return total / len(common)


def bbor(gt: dict[int, BoundingBox], dt: dict[int, BoundingBox]) -> float:
    """Mean intersection-over-union of boxes over the common frames."""
    common = sorted(set(gt) & set(dt))
    if not common:
        raise ValueError("no common frames")
    return sum(overlap_similarity(gt[f], dt[f]) for f in common) / len(common)


def _f_score(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def evaluate(gt_tracks: list[GroundTruthTrack],
             detections: list[DetectionRecord],
             match_dist: float = 1.0) -> EvalReport:
    """Score a tracking run against truth.

    Matching runs per frame: all (detection, truth) pairs within match_dist
    are sorted by centroid distance and claimed greedily one-to-one.
    """
    if match_dist <= 0:
        raise ValueError("match_dist must be > 0")
    if not gt_tracks:
        raise ValueError("ground truth is empty")

    by_target = {g.target: g for g in gt_tracks}
    dt_by_frame: dict[int, list[DetectionRecord]] = {}
    for d in detections:
        dt_by_frame.setdefault(d.frame, []).append(d)
    frames = set(dt_by_frame)
    for g in gt_tracks:
        frames.update(g.centroids)

    tp = fp = fn = 0
    triples: list[tuple[int, int, int, float, float, float]] = []  # frame, target, track, dx, dy, iou
    per_pair: dict[tuple[int, int], list[tuple[int, float, float]]] = {}

    for f in sorted(frames):
        dts = dt_by_frame.get(f, [])
        gts = [(g.target, g.centroids[f], g.boxes[f])
               for g in gt_tracks if f in g.centroids]
        cands = []
        for d in dts:
            for target, (gx, gy), _ in gts:
                dist = math.hypot(d.x - gx, d.y - gy)
                if dist <= match_dist:
                    cands.append((dist, target, d.track_id, d))
        cands.sort(key=lambda c: (c[0], c[1], c[2]))
        used_targets, used_tracks = set(), set()
        matched_dt_ids = set()
        for dist, target, track_id, d in cands:
            if target in used_targets or track_id in used_tracks:
                continue
            used_targets.add(target)
            used_tracks.add(track_id)
            matched_dt_ids.add(track_id)
            g = by_target[target]
            if g.is_clutter:
                # Clutter is not a target; flagging it as a mover is a false alarm.
                if d.moving:
                    fp += 1
                continue
            tp += 1
            gx, gy = g.centroids[f]
            iou = overlap_similarity(g.boxes[f], d.bbox)
            triples.append((f, target, track_id, d.x - gx, d.y - gy, iou))
            per_pair.setdefault((target, track_id), []).append(
                (f, math.hypot(d.x - gx, d.y - gy), iou))
        fp += sum(1 for d in dts if d.track_id not in matched_dt_ids)
        fn += sum(1 for target, _, _ in gts
                  if target not in used_targets and not by_target[target].is_clutter)

    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    pairs = tuple(
        PairReport(target=target, track_id=track_id, frames=len(rows),
                   cme=sum(r[1] for r in rows) / len(rows),
                   bbor=sum(r[2] for r in rows) / len(rows))
        for (target, track_id), rows in sorted(per_pair.items())
    )
    n_matched = sum(p.frames for p in pairs)
    overall_cme = (sum(p.cme * p.frames for p in pairs) / n_matched) if n_matched else 0.0
    overall_bbor = (sum(p.bbor * p.frames for p in pairs) / n_matched) if n_matched else 0.0
    return EvalReport(
        pairs=pairs, precision=precision, recall=recall,
        f1=_f_score(precision, recall), cme=overall_cme, bbor=overall_bbor,
        true_positives=tp, false_positives=fp, false_negatives=fn,
        matched_frames=n_matched, residuals=tuple(triples),
    )
