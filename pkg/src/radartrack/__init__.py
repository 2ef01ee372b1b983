"""Cluster-based multi-target tracking for automotive radar point clouds.

Pipeline stages: non-maximum plot suppression, amplitude/velocity-aware
density clustering, weighted feature-similarity association, per-track
Kalman filtering with tangential-velocity reconstruction, ego-motion
compensation, and track-versus-truth evaluation. A deterministic scenario
simulator stands in for radar hardware.
"""

from .association import (Assignment, SimilarityThresholds, SimilarityWeights,
                          amplitude_similarity, area_similarity, associate,
                          distance_similarity, overlap_similarity, similarity,
                          velocity_similarity)
from .clustering import ClusteringParams, cluster, noise_indices, suppress_non_maxima
from .config import (PipelineConfig, load_pipeline_config, load_scenario_config,
                     pipeline_config_from_dict, pipeline_config_to_dict,
                     scenario_config_from_dict)
from .ego import (EgoMotion, EgoPose, classify_moving, correct_trajectory,
                  dead_reckon, motion_residual, static_radial_velocity)
from .metrics import (DetectionRecord, EvalReport, GroundTruthTrack, PairReport,
                      bbor, cme, evaluate)
from .model import (BoundingBox, Cluster, FeatureVector, Frame, Plot,
                    azimuth_of, extract_features)
from .pipeline import run_tracking
from .simulate import NoiseSpec, ScenarioConfig, TargetSpec, simulate
from .tracking import (KFConfig, KFState, LifecycleParams, Track, Tracker,
                       TrackEvent, estimate_tangential_velocity,
                       feature_from_state, predict, update)

__version__ = "0.1.0"

__all__ = [
    "Assignment", "BoundingBox", "Cluster", "ClusteringParams",
    "DetectionRecord", "EgoMotion", "EgoPose", "EvalReport", "FeatureVector",
    "Frame", "GroundTruthTrack", "KFConfig", "KFState", "LifecycleParams",
    "NoiseSpec", "PairReport", "PipelineConfig", "Plot", "ScenarioConfig",
    "SimilarityThresholds", "SimilarityWeights", "TargetSpec", "Track",
    "Tracker", "TrackEvent", "amplitude_similarity", "area_similarity",
    "associate", "azimuth_of", "bbor", "classify_moving", "cluster", "cme",
    "correct_trajectory", "dead_reckon", "distance_similarity",
    "estimate_tangential_velocity", "evaluate", "extract_features",
    "feature_from_state", "load_pipeline_config", "load_scenario_config",
    "motion_residual", "noise_indices", "overlap_similarity",
    "pipeline_config_from_dict", "pipeline_config_to_dict", "predict",
    "run_tracking", "scenario_config_from_dict", "similarity", "simulate",
    "static_radial_velocity", "suppress_non_maxima", "update",
    "velocity_similarity",
]
