"""Synthetic scenario generator with ground truth.

Targets move at constant velocity in the world frame; the radar vehicle
likewise. Each target carries a persistent scatterer pattern: a Poisson
number of points (floored at one, so small targets never vanish) placed
uniformly over its extent when the scenario starts and riding along with it
afterwards, which makes noiseless static scenes repeat exactly frame after
frame. Plots are observed in the sensor frame with optional Gaussian
position, velocity, and amplitude noise; radial velocities are exact
relative range rates (receding-positive) before noise. False alarms are
redrawn each frame, uniform over the field of view at low amplitude. Output
is deterministic for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ego import EgoMotion, static_radial_velocity
from .metrics import GroundTruthTrack
from .model import BoundingBox, Frame, Plot, azimuth_of

CLASS_DEFAULTS = {
    # class: (extent (width, depth) m, reflectivity a.u., mean plots/frame)
    "pedestrian": ((0.5, 0.5), 6.0, 10),
    "bicycle": ((0.6, 1.8), 10.0, 12),
    "sedan": ((1.8, 4.5), 20.0, 18),
    "clutter": ((0.3, 0.3), 5.0, 4),
}


@dataclass(frozen=True)
class TargetSpec:
    label: str
    start: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)
    extent: tuple[float, float] = None  # type: ignore[assignment]
    reflectivity: float = None  # type: ignore[assignment]
    plot_count: int = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.label not in CLASS_DEFAULTS:
            raise ValueError(f"unknown target class {self.label!r}")
        ext, refl, count = CLASS_DEFAULTS[self.label]
        if self.extent is None:
            object.__setattr__(self, "extent", ext)
        if self.reflectivity is None:
            object.__setattr__(self, "reflectivity", refl)
        if self.plot_count is None:
            object.__setattr__(self, "plot_count", count)
        object.__setattr__(self, "start", tuple(self.start))
        object.__setattr__(self, "velocity", tuple(self.velocity))
        object.__setattr__(self, "extent", tuple(self.extent))
        if self.extent[0] <= 0 or self.extent[1] <= 0:
            raise ValueError("extent must be positive")
        if self.plot_count < 1:
            raise ValueError("plot_count must be >= 1")
        if self.reflectivity <= 0:
            raise ValueError("reflectivity must be > 0")
        if self.label == "clutter" and self.velocity != (0.0, 0.0):
            raise ValueError("clutter must have velocity (0, 0)")

    def position(self, t: float) -> tuple[float, float]:
        return (self.start[0] + self.velocity[0] * t,
                self.start[1] + self.velocity[1] * t)

    def box_at(self, t: float) -> BoundingBox:
        cx, cy = self.position(t)
        w, d = self.extent
        return BoundingBox(x_min=cx - w / 2, x_max=cx + w / 2,
                           y_min=cy - d / 2, y_max=cy + d / 2)


@dataclass(frozen=True)
class NoiseSpec:
    position: float = 0.0
    velocity: float = 0.0
    amplitude: float = 0.0

    def __post_init__(self):
        if min(self.position, self.velocity, self.amplitude) < 0:
            raise ValueError("noise sigmas must be >= 0")


@dataclass(frozen=True)
class ScenarioConfig:
    duration: float = 4.0
    frame_rate: float = 10.0
    targets: tuple[TargetSpec, ...] = ()
    ego: tuple[float, float] = (0.0, 0.0)
    noise: NoiseSpec = NoiseSpec()
    false_alarm_rate: float = 0.0
    fov: tuple[float, float, float, float] = (-15.0, 15.0, 0.0, 40.0)  # xmin xmax ymin ymax
    seed: int = 0

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("duration must be > 0")
        if self.frame_rate <= 0:
            raise ValueError("frame_rate must be > 0")
        if self.false_alarm_rate < 0:
            raise ValueError("false_alarm_rate must be >= 0")
        if self.fov[1] <= self.fov[0] or self.fov[3] <= self.fov[2]:
            raise ValueError("fov must be (xmin, xmax, ymin, ymax) with positive extent")
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "ego", tuple(self.ego))
        object.__setattr__(self, "fov", tuple(self.fov))

    @property
    def n_frames(self) -> int:
        return max(1, int(round(self.duration * self.frame_rate)))


def _relative_radial_velocity(sx: float, sy: float,
                              target_v: tuple[float, float],
                              ego: EgoMotion) -> float:
    """Range rate of a scatter point at sensor position (sx, sy).

    Projects (target velocity - ego velocity) on the line of sight through
    the azimuth angle, sharing the trig path with the static compensation so
    the two cancel exactly for static targets in noiseless runs.
    """
    az = azimuth_of(sx, sy)
    target_radial = target_v[0] * math.sin(az) + target_v[1] * math.cos(az)
    return target_radial - static_radial_velocity(ego, az)


def simulate(cfg: ScenarioConfig
             ) -> tuple[list[Frame], list[EgoMotion], list[GroundTruthTrack]]:
    """Generate frames (sensor frame), ego records, and world-frame truth."""
    rng = np.random.default_rng(cfg.seed)
    dt = 1.0 / cfg.frame_rate
    ego = EgoMotion(frame=0, vx=cfg.ego[0], vy=cfg.ego[1])
    min_refl = min((t.reflectivity for t in cfg.targets), default=1.0)

    # Persistent scatterer patterns, one per target, in target order.
    patterns = []
    for target in cfg.targets:
        n = max(1, int(rng.poisson(target.plot_count)))
        w, d = target.extent
        offsets = [(rng.uniform(-w / 2, w / 2), rng.uniform(-d / 2, d / 2))
                   for _ in range(n)]
        patterns.append(offsets)

    frames: list[Frame] = []
    ego_records: list[EgoMotion] = []
    gt = [GroundTruthTrack(target=i, label=t.label)
          for i, t in enumerate(cfg.targets)]

    for k in range(cfg.n_frames):
        t = k * dt
        ego_x, ego_y = cfg.ego[0] * t, cfg.ego[1] * t
        plots: list[Plot] = []
        for i, target in enumerate(cfg.targets):
            cx, cy = target.position(t)
            gt[i].centroids[k] = (cx, cy)
            gt[i].boxes[k] = target.box_at(t)
            for ox, oy in patterns[i]:
                sx = cx + ox - ego_x
                sy = cy + oy - ego_y
                vr = _relative_radial_velocity(sx, sy, target.velocity, ego)
                if cfg.noise.velocity > 0:
                    vr += rng.normal(0.0, cfg.noise.velocity)
                amp = target.reflectivity
                if cfg.noise.amplitude > 0:
                    amp += rng.normal(0.0, cfg.noise.amplitude)
                if cfg.noise.position > 0:
                    sx += rng.normal(0.0, cfg.noise.position)
                    sy += rng.normal(0.0, cfg.noise.position)
                plots.append(Plot(x=sx, y=sy, amplitude=max(amp, 0.0),
                                  radial_velocity=vr))
        if cfg.false_alarm_rate > 0:
            for _ in range(int(rng.poisson(cfg.false_alarm_rate))):
                fx = rng.uniform(cfg.fov[0], cfg.fov[1])
                fy = rng.uniform(cfg.fov[2], cfg.fov[3])
                amp = rng.uniform(0.0, 0.5 * min_refl)
                vr = rng.normal(0.0, 1.0)
                plots.append(Plot(x=fx, y=fy, amplitude=amp, radial_velocity=vr))
        frames.append(Frame(index=k, timestamp=t, plots=tuple(plots)))
        ego_records.append(EgoMotion(frame=k, vx=cfg.ego[0], vy=cfg.ego[1]))

    return frames, ego_records, gt
