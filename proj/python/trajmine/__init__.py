"""Radar trajectory clustering, conformance monitoring, and airspace complexity."""

from trajmine._core import (
    ComplexityReading,
    FlightMetadata,
    ImsKnowledgeBase,
    ResampledTrajectory,
    RouteModel,
    RunConfig,
    TrackPoint,
    Trajectory,
    TurningPoint,
    detect_turning_points,
    filter_flights,
    fit_route_model,
    generate_corpus,
    group_entropy,
    load_run_config,
    load_tracks,
    resample,
    run_replay,
    train_ims,
)

__all__ = [
    "ComplexityReading",
    "FlightMetadata",
    "ImsKnowledgeBase",
    "ResampledTrajectory",
    "RouteModel",
    "RunConfig",
    "TrackPoint",
    "Trajectory",
    "TurningPoint",
    "detect_turning_points",
    "filter_flights",
    "fit_route_model",
    "generate_corpus",
    "group_entropy",
    "load_run_config",
    "load_tracks",
    "resample",
    "run_replay",
    "train_ims",
]
