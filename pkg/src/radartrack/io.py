"""JSON-Lines readers and writers for every file the pipeline touches.

One record per line throughout. Readers report the 1-based line number on
malformed input; unknown fields in frame records are ignored so upstream
producers can carry extra metadata.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Optional

from .ego import EgoMotion
from .metrics import CLUTTER, DetectionRecord, GroundTruthTrack
from .model import BoundingBox, Frame, Plot


class FormatError(ValueError):
    """Malformed input file content."""


def _read_lines(path: str | Path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as err:
                raise FormatError(f"{path}: line {lineno}: invalid JSON: {err}") from err


def _require(rec: dict, keys: Iterable[str], path, lineno) -> None:
    for key in keys:
        if key not in rec:
            raise FormatError(f"{path}: line {lineno}: missing field {key!r}")


def read_frames(path: str | Path) -> list[Frame]:
    """Read a frame sequence; enforces strictly increasing timestamps."""
    frames: list[Frame] = []
    for lineno, rec in _read_lines(path):
        _require(rec, ("index", "timestamp", "plots"), path, lineno)
        try:
            plots = tuple(
                Plot(x=float(p["x"]), y=float(p["y"]), amplitude=float(p["amp"]),
                     radial_velocity=float(p["vr"]))
                for p in rec["plots"]
            )
            frame = Frame(index=int(rec["index"]), timestamp=float(rec["timestamp"]),
                          plots=plots)
        except (KeyError, TypeError, ValueError) as err:
            raise FormatError(f"{path}: line {lineno}: bad frame record: {err}") from err
        if frames and frame.timestamp <= frames[-1].timestamp:
            raise FormatError(
                f"{path}: line {lineno}: timestamp not increasing at frame {frame.index}")
        frames.append(frame)
    return frames


def write_frames(path: str | Path, frames: Iterable[Frame]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for f in frames:
            rec = {"index": f.index, "timestamp": f.timestamp,
                   "plots": [{"x": p.x, "y": p.y, "amp": p.amplitude,
                              "vr": p.radial_velocity} for p in f.plots]}
            fh.write(json.dumps(rec) + "\n")


def read_ego(path: str | Path) -> list[EgoMotion]:
    """Read ego records. A nonzero heading field is rejected (v1 tracks
    straight-line motion only)."""
    records: list[EgoMotion] = []
    for lineno, rec in _read_lines(path):
        _require(rec, ("frame", "vx", "vy"), path, lineno)
        heading = rec.get("heading", 0.0)
        if heading != 0.0:
            raise FormatError(
                f"{path}: line {lineno}: nonzero heading is not supported")
        try:
            records.append(EgoMotion(frame=int(rec["frame"]), vx=float(rec["vx"]),
                                     vy=float(rec["vy"])))
        except (TypeError, ValueError) as err:
            raise FormatError(f"{path}: line {lineno}: bad ego record: {err}") from err
    return records


def write_ego(path: str | Path, records: Iterable[EgoMotion]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps({"frame": r.frame, "vx": r.vx, "vy": r.vy}) + "\n")


def _bbox_from_list(vals) -> BoundingBox:
    xmin, xmax, ymin, ymax = (float(v) for v in vals)
    return BoundingBox(x_min=xmin, x_max=xmax, y_min=ymin, y_max=ymax)


def read_ground_truth(path: str | Path) -> list[GroundTruthTrack]:
    tracks: dict[int, GroundTruthTrack] = {}
    for lineno, rec in _read_lines(path):
        _require(rec, ("frame", "target", "class", "cx", "cy", "bbox"), path, lineno)
        try:
            target = int(rec["target"])
            frame = int(rec["frame"])
            label = str(rec["class"])
            cx, cy = float(rec["cx"]), float(rec["cy"])
            box = _bbox_from_list(rec["bbox"])
        except (TypeError, ValueError) as err:
            raise FormatError(f"{path}: line {lineno}: bad truth record: {err}") from err
        track = tracks.get(target)
        if track is None:
            track = GroundTruthTrack(target=target, label=label)
            tracks[target] = track
        elif track.label != label:
            raise FormatError(
                f"{path}: line {lineno}: target {target} changes class")
        track.centroids[frame] = (cx, cy)
        track.boxes[frame] = box
    return [tracks[t] for t in sorted(tracks)]


def write_ground_truth(path: str | Path, tracks: Iterable[GroundTruthTrack]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for g in tracks:
            for frame in g.frames():
                cx, cy = g.centroids[frame]
                fh.write(json.dumps({
                    "frame": frame, "target": g.target, "class": g.label,
                    "cx": cx, "cy": cy, "bbox": g.boxes[frame].as_list(),
                }) + "\n")


def track_record(frame: int, track_id: int, status: str, px: float, py: float,
                 vx: float, vy: float, bbox: BoundingBox,
                 similarity: Optional[float],
                 moving: Optional[bool] = None) -> dict:
    rec = {"frame": frame, "track_id": track_id, "status": status,
           "px": px, "py": py, "vx": vx, "vy": vy,
           "bbox": bbox.as_list(), "similarity": similarity}
    if moving is not None:
        rec["moving"] = moving
    return rec


def write_track_records(path: str | Path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def read_track_records(path: str | Path) -> list[dict]:
    records = []
    for lineno, rec in _read_lines(path):
        _require(rec, ("frame", "track_id", "status", "px", "py", "bbox"), path, lineno)
        records.append(rec)
    return records


def detections_from_track_records(records: Iterable[dict],
                                  statuses: tuple[str, ...] = ("confirmed",)
                                  ) -> list[DetectionRecord]:
    """Convert raw track records into evaluation inputs.

    Only records whose status is listed count as detections; tentative and
    coasting rows carry no measurement confidence.
    """
    out = []
    for rec in records:
        if rec["status"] not in statuses:
            continue
        out.append(DetectionRecord(
            frame=int(rec["frame"]), track_id=int(rec["track_id"]),
            x=float(rec["px"]), y=float(rec["py"]),
            bbox=_bbox_from_list(rec["bbox"]),
            moving=rec.get("moving"),
        ))
    return out


def ground_truth_as_detections(tracks: Iterable[GroundTruthTrack]) -> list[dict]:
    """Express truth in the track-record format (testing convenience)."""
    records = []
    for g in tracks:
        for frame in g.frames():
            cx, cy = g.centroids[frame]
            records.append(track_record(frame, g.target, "confirmed", cx, cy,
                                        0.0, 0.0, g.boxes[frame], None,
                                        moving=None if g.label == CLUTTER else True))
    return records
