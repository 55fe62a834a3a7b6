"""Single-config orchestration of the full pipeline with stage caching."""

from .config import PipelineConfig, load_pipeline_config
from .fixture import FixturePlan, build_fixture_corpus
from .runner import STAGE_ORDER, AwaitingAnnotation, RunManifest, run_pipeline

__all__ = [
    "PipelineConfig",
    "load_pipeline_config",
    "FixturePlan",
    "build_fixture_corpus",
    "STAGE_ORDER",
    "AwaitingAnnotation",
    "RunManifest",
    "run_pipeline",
]
