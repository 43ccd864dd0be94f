"""Toolkit for decomposing humor in recorded speech: segments transcripts at
audience-laughter markers, annotates punchlines with verbal and vocal
features, links repeated concepts across build-up sentences, and serves the
results over a JSON API and CLI."""

from .errors import NotFoundError, PunchkitError, ValidationError
from .pipeline import BundlePaths, PipelineConfig, process_bundle, recompute_document
from .store import SpeechStore
from .textfeats import AUDIO_KINDS, TEXT_KINDS, FeatureAnnotation, ThresholdConfig

__version__ = "0.1.0"

__all__ = [
    "AUDIO_KINDS",
    "BundlePaths",
    "FeatureAnnotation",
    "NotFoundError",
    "PipelineConfig",
    "PunchkitError",
    "SpeechStore",
    "TEXT_KINDS",
    "ThresholdConfig",
    "ValidationError",
    "process_bundle",
    "recompute_document",
    "__version__",
]
