"""Per-target Kalman filtering and track lifecycle management.

The filter state is the 8-vector [px, py, vx, vy, bx_max, bx_min, by_max,
by_min]: centroid, Cartesian velocity, and the four bounding-box edges. The
motion model is constant velocity with the box translating rigidly along
with the centroid. Measurements are full-state: a matched cluster supplies
centroid and box directly, and the Cartesian velocity is reconstructed from
the cluster's Doppler speed plus the tangential component inferred from the
centroid's angular displacement since the last measurement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .association import Assignment, SimilarityThresholds, SimilarityWeights, associate
from .model import BoundingBox, Cluster, FeatureVector, Frame, azimuth_of

STATE_DIM = 8

TENTATIVE = "tentative"
CONFIRMED = "confirmed"
COASTING = "coasting"
DELETED = "deleted"

_SYM_TOL = 1e-9


@dataclass(frozen=True)
class KFConfig:
    """Filter noise intensities and the tangential attenuation factor.

    q_* are continuous-time process-noise intensities (covariance grows
    linearly with the prediction interval); r_* are measurement variances.
    xi in [0, 1] scales the tangential velocity estimate to damp the effect
    of azimuth error; r_pos defaults to the square of a 0.12 m position
    resolution.
    """

    q_pos: float = 0.01
    q_vel: float = 0.1
    q_box: float = 0.01
    r_pos: float = 0.0144
    r_vel: float = 0.1
    r_box: float = 0.05
    xi: float = 0.5

    def __post_init__(self):
        if min(self.q_pos, self.q_vel, self.q_box) < 0:
            raise ValueError("process noise intensities must be >= 0")
        if min(self.r_pos, self.r_vel, self.r_box) <= 0:
            raise ValueError("measurement variances must be > 0")
        if not 0.0 <= self.xi <= 1.0:
            raise ValueError("xi must be in [0, 1]")

    def q_diagonal(self, dt: float) -> np.ndarray:
        return np.array([self.q_pos, self.q_pos, self.q_vel, self.q_vel,
                         self.q_box, self.q_box, self.q_box, self.q_box]) * dt

    def r_diagonal(self) -> np.ndarray:
        return np.array([self.r_pos, self.r_pos, self.r_vel, self.r_vel,
                         self.r_box, self.r_box, self.r_box, self.r_box])


@dataclass(frozen=True)
class KFState:
    """Filter mean and covariance. Covariance must be symmetric PSD."""

    x: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(STATE_DIM)
        P = np.asarray(self.P, dtype=float).reshape(STATE_DIM, STATE_DIM)
        if np.abs(P - P.T).max() > _SYM_TOL:
            raise ValueError("covariance must be symmetric")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "P", P)
        x.setflags(write=False)
        P.setflags(write=False)


def transition_matrix(dt: float) -> np.ndarray:
    """Constant-velocity transition; box edges co-move with the centroid."""
    A = np.eye(STATE_DIM)
    A[0, 2] = dt
    A[1, 3] = dt
    A[4, 2] = dt
    A[5, 2] = dt
    A[6, 3] = dt
    A[7, 3] = dt
    return A


def _ordered_box(x: np.ndarray) -> np.ndarray:
    """Swap inverted box edges (filter noise can cross them)."""
    x = x.copy()
    if x[4] < x[5]:
        x[4], x[5] = x[5], x[4]
    if x[6] < x[7]:
        x[6], x[7] = x[7], x[6]
    return x


def predict(state: KFState, dt: float, cfg: KFConfig) -> KFState:
    """Propagate mean and covariance by dt seconds."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if not np.all(np.isfinite(state.x)):
        raise ValueError("state is not finite")
    A = transition_matrix(dt)
    x = A @ state.x
    P = A @ state.P @ A.T + np.diag(cfg.q_diagonal(dt))
    P = 0.5 * (P + P.T)
    return KFState(x=x, P=P)


def update(state: KFState, z: np.ndarray, cfg: KFConfig) -> KFState:
    """Fold a full-state measurement into the filter.

    Measurement model is the identity, so the gain reduces to
    K = P (R + P)^-1. Box-edge ordering is re-asserted afterwards.
    """
    z = np.asarray(z, dtype=float).reshape(STATE_DIM)
    if not np.all(np.isfinite(z)):
        raise ValueError("measurement is not finite")
    R = np.diag(cfg.r_diagonal())
    S = R + state.P
    # K = P S^-1 via a solve on the transposed system (S symmetric).
    K = np.linalg.solve(S, state.P.T).T
    x = state.x + K @ (z - state.x)
    P = (np.eye(STATE_DIM) - K) @ state.P
    P = 0.5 * (P + P.T)
    return KFState(x=_ordered_box(x), P=P)


def estimate_tangential_velocity(prev_centroid: tuple[float, float],
                                 curr_centroid: tuple[float, float],
                                 vr: float, dt: float, xi: float) -> tuple[float, float]:
    """Cartesian velocity from Doppler speed plus angular displacement.

    The tangential speed is the previous range times the sine of the
    azimuth change over dt (positive toward +x), attenuated by xi, and the
    pair is recombined at the current azimuth:

        vt = r_prev * sin(az_curr - az_prev) / dt
        vx = vr * sin(az_curr) + xi * vt * cos(az_curr)
        vy = vr * cos(az_curr) + xi * vt * sin(az_curr)
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    r_prev = math.hypot(prev_centroid[0], prev_centroid[1])
    if r_prev == 0.0:
        raise ValueError("previous centroid at the radar origin")
    theta = azimuth_of(*curr_centroid) - azimuth_of(*prev_centroid)
    theta = math.remainder(theta, math.tau)
    vt = r_prev * math.sin(theta) / dt
    phi = azimuth_of(*curr_centroid)
    vx = vr * math.sin(phi) + xi * vt * math.cos(phi)
    vy = vr * math.cos(phi) + xi * vt * math.sin(phi)
    return (vx, vy)


def radial_projection(vx: float, vy: float, x: float, y: float) -> float:
    """Radial component of (vx, vy) seen from the origin at point (x, y)."""
    r = math.hypot(x, y)
    if r == 0.0:
        return 0.0
    return (vx * x + vy * y) / r


def feature_from_state(state: KFState, amplitude: float) -> FeatureVector:
    """Build a cluster-comparable feature from a filter state.

    The box is expanded minimally if filtering pushed the centroid outside
    it, so that the feature keeps the centroid-in-box property that measured
    features have by construction.
    """
    px, py, vx, vy, bxmax, bxmin, bymax, bymin = (float(v) for v in state.x)
    if bxmax < bxmin:
        bxmax, bxmin = bxmin, bxmax
    if bymax < bymin:
        bymax, bymin = bymin, bymax
    bbox = BoundingBox(
        x_min=min(bxmin, px), x_max=max(bxmax, px),
        y_min=min(bymin, py), y_max=max(bymax, py),
    )
    vr = radial_projection(vx, vy, px, py)
    return FeatureVector(px=px, py=py, vr=vr, amplitude=amplitude, bbox=bbox)


@dataclass(frozen=True)
class Track:
    """Immutable snapshot of one tracked target."""

    id: int
    state: KFState
    status: str
    hits: int
    consecutive_misses: int
    history: tuple[tuple[int, FeatureVector], ...]
    last_centroid: tuple[float, float]
    last_centroid_time: float
    amplitude: float
    last_similarity: Optional[float] = None

    @property
    def velocity(self) -> tuple[float, float]:
        return (float(self.state.x[2]), float(self.state.x[3]))

    @property
    def feature(self) -> FeatureVector:
        return self.history[-1][1]


@dataclass(frozen=True)
class TrackEvent:
    frame: int
    kind: str  # created | confirmed | deleted
    track_id: int


@dataclass(frozen=True)
class LifecycleParams:
    confirm_hits: int = 3
    max_misses: int = 3

    def __post_init__(self):
        if self.confirm_hits < 1 or self.max_misses < 1:
            raise ValueError("lifecycle counts must be >= 1")


def _seed_state(cluster: Cluster, cfg: KFConfig) -> KFState:
    f = cluster.features
    phi = azimuth_of(f.px, f.py)
    x = np.array([f.px, f.py,
                  f.vr * math.sin(phi), f.vr * math.cos(phi),
                  f.bbox.x_max, f.bbox.x_min, f.bbox.y_max, f.bbox.y_min])
    P = np.diag(cfg.r_diagonal())
    return KFState(x=x, P=P)


class Tracker:
    """Sequential multi-target tracker; call step() frame-by-frame.

    Each step predicts every live track, associates predicted features with
    the frame's clusters, updates matched tracks, ages unmatched ones, and
    spawns tentative tracks from unmatched clusters. Track ids are never
    reused within a tracker's lifetime.
    """

    def __init__(self, kf: KFConfig = KFConfig(),
                 weights: SimilarityWeights = SimilarityWeights(),
                 thresholds: SimilarityThresholds = SimilarityThresholds(),
                 lifecycle: LifecycleParams = LifecycleParams(),
                 association_method: str = "greedy"):
        self.kf = kf
        self.weights = weights
        self.thresholds = thresholds
        self.lifecycle = lifecycle
        self.association_method = association_method
        self._tracks: list[Track] = []
        self._next_id = 0
        self._last_timestamp: Optional[float] = None

    @property
    def tracks(self) -> list[Track]:
        return list(self._tracks)

    def step(self, frame: Frame, clusters: list[Cluster]
             ) -> tuple[list[Track], list[TrackEvent], Assignment]:
        """Advance the tracker by one frame.

        Returns the live track snapshots after the step, the lifecycle
        events it produced, and the association that drove it.
        """
        if self._last_timestamp is not None and frame.timestamp <= self._last_timestamp:
            raise ValueError(
                f"non-monotone timestamp {frame.timestamp} at frame {frame.index}")
        dt = (frame.timestamp - self._last_timestamp
              if self._last_timestamp is not None else None)
        events: list[TrackEvent] = []

        predicted: list[tuple[int, Track]] = []
        for t in self._tracks:
            state = predict(t.state, dt, self.kf) if dt is not None else t.state
            predicted.append((t.id, replace(t, state=state)))

        predicted_features = [(tid, feature_from_state(t.state, t.amplitude))
                              for tid, t in predicted]
        assignment = associate(predicted_features, clusters, self.weights,
                               self.thresholds, method=self.association_method)
        matched = {tid: (cid, sim) for tid, cid, sim in assignment.pairs}
        by_cid = {c.id: c for c in clusters}

        survivors: list[Track] = []
        for tid, t in predicted:
            if tid in matched:
                cid, sim = matched[tid]
                survivors.append(self._apply_match(t, by_cid[cid], sim, frame, events))
            else:
                aged = self._apply_miss(t, frame, events)
                if aged is not None:
                    survivors.append(aged)

        for cid in assignment.unmatched_clusters:
            survivors.append(self._spawn(by_cid[cid], frame, events))

        self._tracks = survivors
        self._last_timestamp = frame.timestamp
        return list(self._tracks), events, assignment

    def _apply_match(self, t: Track, cluster: Cluster, sim: float,
                     frame: Frame, events: list[TrackEvent]) -> Track:
        f = cluster.features
        meas_dt = frame.timestamp - t.last_centroid_time
        if t.last_centroid == (0.0, 0.0):
            # Degenerate geometry: no angular reference, keep the radial part.
            phi = azimuth_of(f.px, f.py)
            vx, vy = f.vr * math.sin(phi), f.vr * math.cos(phi)
        else:
            vx, vy = estimate_tangential_velocity(
                t.last_centroid, f.centroid, f.vr, meas_dt, self.kf.xi)
        z = np.array([f.px, f.py, vx, vy,
                      f.bbox.x_max, f.bbox.x_min, f.bbox.y_max, f.bbox.y_min])
        state = update(t.state, z, self.kf)
        hits = t.hits + 1
        status = t.status
        if status == COASTING:
            status = CONFIRMED
        if status == TENTATIVE and hits >= self.lifecycle.confirm_hits:
            status = CONFIRMED
            events.append(TrackEvent(frame.index, "confirmed", t.id))
        estimate = feature_from_state(state, f.amplitude)
        return replace(
            t, state=state, status=status, hits=hits, consecutive_misses=0,
            history=t.history + ((frame.index, estimate),),
            last_centroid=f.centroid, last_centroid_time=frame.timestamp,
            amplitude=f.amplitude, last_similarity=sim,
        )

    def _apply_miss(self, t: Track, frame: Frame,
                    events: list[TrackEvent]) -> Optional[Track]:
        misses = t.consecutive_misses + 1
        status = COASTING if t.status in (CONFIRMED, COASTING) else t.status
        if misses >= self.lifecycle.max_misses:
            events.append(TrackEvent(frame.index, "deleted", t.id))
            return None
        estimate = feature_from_state(t.state, t.amplitude)
        return replace(
            t, status=status, consecutive_misses=misses,
            history=t.history + ((frame.index, estimate),),
            last_similarity=None,
        )

    def _spawn(self, cluster: Cluster, frame: Frame,
               events: list[TrackEvent]) -> Track:
        f = cluster.features
        state = _seed_state(cluster, self.kf)
        tid = self._next_id
        self._next_id += 1
        events.append(TrackEvent(frame.index, "created", tid))
        return Track(
            id=tid, state=state, status=TENTATIVE, hits=1, consecutive_misses=0,
            history=((frame.index, feature_from_state(state, f.amplitude)),),
            last_centroid=f.centroid, last_centroid_time=frame.timestamp,
            amplitude=f.amplitude, last_similarity=None,
        )
