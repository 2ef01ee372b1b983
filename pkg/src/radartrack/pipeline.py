"""End-to-end per-frame processing: suppress, cluster, associate, filter.

This is the library-level entry point the CLI wraps. Given a frame sequence
(and optionally per-frame ego motion) it runs the whole chain and returns
plain track records ready for serialization, plus world-frame corrected
trajectories when ego motion is available.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from .clustering import cluster, suppress_non_maxima
from .config import PipelineConfig
from .ego import EgoMotion, classify_moving, correct_trajectory, dead_reckon, motion_residual
from .io import track_record
from .model import Frame, azimuth_of
from .tracking import Tracker, radial_projection


class EgoAlignmentError(ValueError):
    """Ego records do not cover the frame sequence."""


def align_ego(frames: list[Frame], ego_records: list[EgoMotion]) -> list[EgoMotion]:
    """Pick the ego record for each frame, erroring on the first gap."""
    by_frame = {e.frame: e for e in ego_records}
    aligned = []
    for f in frames:
        ego = by_frame.get(f.index)
        if ego is None:
            raise EgoAlignmentError(f"no ego record for frame {f.index}")
        aligned.append(ego)
    return aligned


def _compensate_frame(frame: Frame, ego: EgoMotion) -> Frame:
    """Replace each plot's radial velocity with its ego-compensated value."""
    plots = tuple(
        replace(p, radial_velocity=motion_residual(
            p.radial_velocity, azimuth_of(p.x, p.y), ego))
        for p in frame.plots
    )
    return Frame(index=frame.index, timestamp=frame.timestamp, plots=plots)


def run_tracking(frames: list[Frame], ego_records: Optional[list[EgoMotion]],
                 cfg: PipelineConfig) -> tuple[list[dict], list[dict]]:
    """Track a frame sequence; returns (track records, corrected records).

    Track records are emitted for every live track at every frame. When ego
    motion is supplied each record carries a moving/static flag and a
    world-frame corrected record is emitted alongside.
    """
    ego = align_ego(frames, ego_records) if ego_records is not None else None
    poses = (dead_reckon(ego, [f.timestamp for f in frames])
             if ego is not None and frames else [])
    pose_by_frame = {p.frame: p for p in poses}

    tracker = Tracker(
        kf=cfg.kf, weights=cfg.weights, thresholds=cfg.thresholds,
        lifecycle=cfg.lifecycle, association_method=cfg.association.method,
    )
    compensate = cfg.ego.compensate_before_association and ego is not None

    records: list[dict] = []
    corrected: list[dict] = []
    for k, frame in enumerate(frames):
        work = _compensate_frame(frame, ego[k]) if compensate else frame
        work = suppress_non_maxima(work, cfg.clustering.suppression_radius)
        clusters = cluster(work, cfg.clustering)
        tracks, _, assignment = tracker.step(work, clusters)
        matched = {tid: cid for tid, cid, _ in assignment.pairs}
        by_cid = {c.id: c for c in clusters}

        for t in tracks:
            feat = t.feature
            moving = None
            if ego is not None:
                cid = matched.get(t.id)
                if cid is not None:
                    cf = by_cid[cid].features
                    vr, az = cf.vr, azimuth_of(cf.px, cf.py)
                else:
                    vr = radial_projection(t.velocity[0], t.velocity[1],
                                           feat.px, feat.py)
                    az = azimuth_of(feat.px, feat.py)
                if compensate:
                    moving = abs(vr) > cfg.ego.delta_v
                else:
                    moving = classify_moving(vr, az, ego[k], cfg.ego.delta_v)
            records.append(track_record(
                frame.index, t.id, t.status, feat.px, feat.py,
                t.velocity[0], t.velocity[1], feat.bbox, t.last_similarity,
                moving=moving))
            if ego is not None:
                (_, (wx, wy)), = correct_trajectory(
                    [(frame.index, (feat.px, feat.py))], pose_by_frame)
                corrected.append({"frame": frame.index, "track_id": t.id,
                                  "status": t.status, "px": wx, "py": wy})
    return records, corrected
