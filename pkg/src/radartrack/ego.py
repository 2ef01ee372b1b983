"""Ego-motion handling: static-return compensation and world-frame restore.

When the radar vehicle moves, every static object acquires an apparent
radial velocity that depends only on the vehicle velocity and the object's
azimuth. Removing that term classifies returns as moving or static, and
dead-reckoning the vehicle lets sensor-frame trajectories be restored to the
world frame.

Sign note: plot radial velocities are receding-positive, so the apparent
radial velocity of a static point is the NEGATIVE of the projected vehicle
speed (a point ahead of a forward-moving vehicle closes range). The
compensation therefore adds the projection rather than subtracting it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


@dataclass(frozen=True)
class EgoMotion:
    """Radar-vehicle velocity components at one frame (vehicle frame)."""

    frame: int
    vx: float
    vy: float

    def __post_init__(self):
        if not (math.isfinite(self.vx) and math.isfinite(self.vy)):
            raise ValueError("ego velocity must be finite")

    @property
    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)


@dataclass(frozen=True)
class EgoPose:
    """Dead-reckoned vehicle pose in the world frame."""

    frame: int
    x: float
    y: float
    heading: float = 0.0


def static_radial_velocity(ego: EgoMotion, azimuth: float) -> float:
    """Project the vehicle velocity onto the line of sight at ``azimuth``.

    Returns vx*sin(azimuth) + vy*cos(azimuth). Under the receding-positive
    convention a static point at that azimuth appears with the NEGATIVE of
    this value; see motion_residual.
    """
    return ego.vx * math.sin(azimuth) + ego.vy * math.cos(azimuth)


def motion_residual(vr: float, azimuth: float, ego: EgoMotion) -> float:
    """Radial velocity left after removing the ego-induced static term.

    Zero (up to noise) for static world points; equals the target's own
    world radial speed component otherwise.
    """
    return vr + static_radial_velocity(ego, azimuth)


def classify_moving(vr: float, azimuth: float, ego: EgoMotion, delta_v: float) -> bool:
    """True iff the compensated radial velocity exceeds delta_v."""
    if delta_v <= 0:
        raise ValueError("delta_v must be > 0")
    return abs(motion_residual(vr, azimuth, ego)) > delta_v


def dead_reckon(ego_stream: Sequence[EgoMotion],
                timestamps: Sequence[float]) -> list[EgoPose]:
    """Integrate vehicle velocity into world-frame poses (trapezoidal).

    Requires one ego record per frame, in frame order matching the
    timestamps. The first pose is the origin with heading 0; heading stays 0
    (straight-line motion model).
    """
    if len(ego_stream) != len(timestamps):
        raise ValueError("ego stream and timestamps must have equal length")
    if not ego_stream:
        return []
    for a, b in zip(ego_stream, ego_stream[1:]):
        if b.frame != a.frame + 1:
            raise ValueError(f"ego stream gap between frame {a.frame} and frame {b.frame}")
    for ta, tb in zip(timestamps, timestamps[1:]):
        if tb <= ta:
            raise ValueError("timestamps must increase strictly")
    poses = [EgoPose(frame=ego_stream[0].frame, x=0.0, y=0.0)]
    x = y = 0.0
    for prev, curr, ta, tb in zip(ego_stream, ego_stream[1:], timestamps, timestamps[1:]):
        dt = tb - ta
        x += 0.5 * (prev.vx + curr.vx) * dt
        y += 0.5 * (prev.vy + curr.vy) * dt
        poses.append(EgoPose(frame=curr.frame, x=x, y=y))
    return poses


def correct_trajectory(history: Iterable[tuple[int, tuple[float, float]]],
                       poses: Mapping[int, EgoPose] | Sequence[EgoPose]
                       ) -> list[tuple[int, tuple[float, float]]]:
    """Transform sensor-frame points into the world frame, per frame.

    ``history`` yields (frame, (x, y)) sensor-frame points; every frame must
    have a pose. With heading fixed at 0 the transform is a pure
    translation by the vehicle position.
    """
    if not isinstance(poses, Mapping):
        poses = {p.frame: p for p in poses}
    out = []
    for frame, (x, y) in history:
        pose = poses.get(frame)
        if pose is None:
            raise ValueError(f"no ego pose for frame {frame}")
        c, s = math.cos(pose.heading), math.sin(pose.heading)
        wx = pose.x + c * x - s * y
        wy = pose.y + s * x + c * y
        out.append((frame, (wx, wy)))
    return out
