"""Plot suppression and density clustering.

Two stages: a non-maximum suppression pass that keeps only locally
amplitude-dominant plots, then a DBSCAN variant whose noise test and region
growing take amplitude and radial velocity into account, so that dim sparse
returns are dropped while bright sparse returns survive, and spatially
overlapping targets with different speeds or echo strengths are not merged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .model import Cluster, Frame, extract_features


@dataclass(frozen=True)
class ClusteringParams:
    """Clustering knobs.

    amp_thres may be None, in which case each frame uses half its mean plot
    amplitude. suppression_radius 0 disables suppression entirely.
    """

    epsilon: float = 0.5
    min_pts: int = 2
    vel_thres: float = 1.0
    amp_thres: Optional[float] = None
    suppression_radius: float = 0.2

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.min_pts < 1:
            raise ValueError("min_pts must be >= 1")
        if self.vel_thres <= 0:
            raise ValueError("vel_thres must be > 0")
        if self.amp_thres is not None and self.amp_thres <= 0:
            raise ValueError("amp_thres must be > 0 when set")
        if self.suppression_radius < 0:
            raise ValueError("suppression_radius must be >= 0")


def suppress_non_maxima(frame: Frame, radius: float) -> Frame:
    """Keep only plots that are amplitude maxima within ``radius``.

    A plot survives iff no other plot within Euclidean distance <= radius has
    a strictly higher amplitude, with equal-amplitude contests won by the
    plot that comes first in the frame. The dominance test runs against the
    original plot set, which makes the operation idempotent. radius 0
    returns the frame unchanged.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0 or len(frame.plots) <= 1:
        return frame
    plots = frame.plots
    r2 = radius * radius
    kept = []
    for i, p in enumerate(plots):
        dominated = False
        for j, q in enumerate(plots):
            if i == j:
                continue
            dx = p.x - q.x
            dy = p.y - q.y
            if dx * dx + dy * dy <= r2:
                if q.amplitude > p.amplitude or (q.amplitude == p.amplitude and j < i):
                    dominated = True
                    break
        if not dominated:
            kept.append(p)
    return Frame(index=frame.index, timestamp=frame.timestamp, plots=tuple(kept))


def _neighborhoods(frame: Frame, epsilon: float) -> list[list[int]]:
    """Epsilon neighborhoods (strict radius, self included), ascending index."""
    plots = frame.plots
    n = len(plots)
    e2 = epsilon * epsilon
    neigh = [[] for _ in range(n)]
    for i in range(n):
        neigh[i].append(i)
    for i in range(n):
        pi = plots[i]
        for j in range(i + 1, n):
            pj = plots[j]
            dx = pi.x - pj.x
            dy = pi.y - pj.y
            if dx * dx + dy * dy < e2:
                neigh[i].append(j)
                neigh[j].append(i)
    for lst in neigh:
        lst.sort()
    return neigh


def cluster(frame: Frame, params: ClusteringParams, *,
            amplitude_noise_test: bool = True) -> list[Cluster]:
    """Group the frame's plots into clusters.

    Stages, all deterministic in ascending plot index:

    1. Noise pre-marking: a plot is noise iff its epsilon neighborhood is
       smaller than min_pts AND its amplitude is below the frame's mean
       amplitude (so a bright sparse plot is kept). Passing
       amplitude_noise_test=False drops the amplitude clause, reducing the
       noise test to the plain density criterion.
    2. Region growing from each unvisited non-noise plot: a neighbor joins
       the growing cluster iff its own neighborhood has at least min_pts
       plots and its velocity and amplitude are within vel_thres/amp_thres
       of the plot through which it was reached (chained comparison against
       the expansion parent). Growth continues through joined plots.
    3. Plots never joined to any cluster are discarded as noise.

    Clusters come back ordered by smallest member index with ids 0..k-1.
    """
    n = len(frame.plots)
    if n == 0:
        return []
    plots = frame.plots
    mean_amp = sum(p.amplitude for p in plots) / n
    amp_thres = params.amp_thres if params.amp_thres is not None else 0.5 * mean_amp
    neigh = _neighborhoods(frame, params.epsilon)

    def is_noise(i: int) -> bool:
        if len(neigh[i]) >= params.min_pts:
            return False
        if amplitude_noise_test:
            return plots[i].amplitude < mean_amp
        return True

    claimed = [False] * n
    groups: list[list[int]] = []
    for seed in range(n):
        if claimed[seed] or is_noise(seed):
            continue
        claimed[seed] = True
        members = [seed]
        frontier = [seed]
        while frontier:
            parent = frontier.pop(0)
            pp = plots[parent]
            for j in neigh[parent]:
                if claimed[j]:
                    continue
                if len(neigh[j]) < params.min_pts:
                    continue
                pj = plots[j]
                if abs(pj.radial_velocity - pp.radial_velocity) >= params.vel_thres:
                    continue
                if abs(pj.amplitude - pp.amplitude) >= amp_thres:
                    continue
                claimed[j] = True
                members.append(j)
                frontier.append(j)
        groups.append(sorted(members))

    groups.sort(key=lambda g: g[0])
    return [
        Cluster(id=k, member_indices=frozenset(g),
                features=extract_features(frame, g))
        for k, g in enumerate(groups)
    ]


def noise_indices(frame: Frame, clusters: list[Cluster]) -> list[int]:
    """Plot indices of the frame that ended up in no cluster."""
    member = set()
    for c in clusters:
        member.update(c.member_indices)
    return [i for i in range(len(frame.plots)) if i not in member]
