"""Visual place recognition benchmarking: HOG/CoHOG descriptors, top-1
accuracy, Real-Time Matched Frames and resource/power telemetry."""

__version__ = "0.1.0"

from .cohog import CohogParams, RegionalDescriptorSet, cohog_describe, cohog_match, entropy_map, select_rois
from .hog import GlobalDescriptor, HogParams, hog_compare, hog_describe
from .imaging import GradientField, GrayImage, Rect, gradients, load_image, patch_entropy, resize
from .matching import (
    GroundTruth,
    MatchOutcome,
    SimilarityMatrix,
    evaluate_matches,
    l1_similarity,
    similarity_matrix,
)
from .rmf import RmfParams, RmfResult, compute_rmf, evaluate_rmf, frame_interval, incoming_frame_rate, vpr_frame_rate
from .harness import RunConfig, run_benchmark
from .report import BenchmarkReport, emit_report, read_report
from .telemetry import PhaseTimer, ResourceSampler, ingest_power_log, window_energy

__all__ = [
    "CohogParams", "RegionalDescriptorSet", "cohog_describe", "cohog_match", "entropy_map", "select_rois",
    "GlobalDescriptor", "HogParams", "hog_compare", "hog_describe",
    "GradientField", "GrayImage", "Rect", "gradients", "load_image", "patch_entropy", "resize",
    "GroundTruth", "MatchOutcome", "SimilarityMatrix", "evaluate_matches", "l1_similarity", "similarity_matrix",
    "RmfParams", "RmfResult", "compute_rmf", "evaluate_rmf", "frame_interval", "incoming_frame_rate",
    "vpr_frame_rate",
    "RunConfig", "run_benchmark", "BenchmarkReport", "emit_report", "read_report",
    "PhaseTimer", "ResourceSampler", "ingest_power_log", "window_energy",
]
