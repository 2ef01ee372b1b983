"""Core value types for radar point-cloud tracking.

Coordinate convention used throughout the package: y points along the radar
boresight (forward), x is lateral (positive right). Azimuth is measured from
the +y axis toward +x, so a point at range r and azimuth a sits at
(r*sin(a), r*cos(a)). Radial velocity is positive for receding targets.

All types here are immutable values; operations return new instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def azimuth_of(x: float, y: float) -> float:
    """Azimuth angle (radians) of point (x, y), measured from +y toward +x."""
    return math.atan2(x, y)


@dataclass(frozen=True)
class Plot:
    """A single radar detection: position, echo amplitude, radial velocity.

    Amplitude is a linear (not dB) magnitude in arbitrary units and must be
    non-negative. Radial velocity is in m/s, positive = receding.
    """

    x: float
    y: float
    amplitude: float
    radial_velocity: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)
                and math.isfinite(self.amplitude)
                and math.isfinite(self.radial_velocity)):
            raise ValueError("plot fields must be finite")
        if self.amplitude < 0:
            raise ValueError("plot amplitude must be >= 0")

    @property
    def range(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def azimuth(self) -> float:
        return azimuth_of(self.x, self.y)


@dataclass(frozen=True)
class Frame:
    """One radar scan: an index, a timestamp, and an ordered list of plots.

    Plot order is stable and used for deterministic tie-breaking downstream.
    Timestamps must increase strictly across a sequence of frames; that is
    enforced by the consumers that see the sequence, not per frame.
    """

    index: int
    timestamp: float
    plots: tuple[Plot, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("frame index must be >= 0")
        if not math.isfinite(self.timestamp):
            raise ValueError("frame timestamp must be finite")
        object.__setattr__(self, "plots", tuple(self.plots))

    def __len__(self) -> int:
        return len(self.plots)


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box; degenerate (zero-area) boxes are allowed."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ValueError("bounding box edges out of order")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def as_list(self) -> list[float]:
        return [self.x_min, self.x_max, self.y_min, self.y_max]


@dataclass(frozen=True)
class FeatureVector:
    """Nine-component cluster descriptor.

    Holds the centroid (px, py), the mean radial velocity vr, the mean
    amplitude, the min/max bounding box of the member plots, and the box
    area. Area is always derived from the box, never stored independently.
    """

    px: float
    py: float
    vr: float
    amplitude: float
    bbox: BoundingBox

    @property
    def area(self) -> float:
        return self.bbox.area

    @property
    def centroid(self) -> tuple[float, float]:
        return (self.px, self.py)


@dataclass(frozen=True)
class Cluster:
    """A group of plots hypothesized to come from one target.

    ``member_indices`` index into the frame the cluster was extracted from.
    """

    id: int
    member_indices: frozenset[int]
    features: FeatureVector

    def __post_init__(self):
        if not self.member_indices:
            raise ValueError("empty cluster")
        object.__setattr__(self, "member_indices", frozenset(self.member_indices))


def extract_features(frame: Frame, members) -> FeatureVector:
    """Compute the feature vector of the given plot subset of a frame.

    Centroid, radial velocity and amplitude are arithmetic means over the
    members; the bounding box is the min/max envelope of member coordinates.
    A singleton yields a degenerate zero-area box.
    """
    idx = sorted(members)
    if not idx:
        raise ValueError("empty cluster")
    n = len(frame.plots)
    for i in idx:
        if i < 0 or i >= n:
            raise ValueError(f"plot index {i} out of range for frame {frame.index}")
    pts = [frame.plots[i] for i in idx]
    m = float(len(pts))
    px = sum(p.x for p in pts) / m
    py = sum(p.y for p in pts) / m
    vr = sum(p.radial_velocity for p in pts) / m
    amp = sum(p.amplitude for p in pts) / m
    bbox = BoundingBox(
        x_min=min(p.x for p in pts),
        x_max=max(p.x for p in pts),
        y_min=min(p.y for p in pts),
        y_max=max(p.y for p in pts),
    )
    return FeatureVector(px=px, py=py, vr=vr, amplitude=amp, bbox=bbox)
