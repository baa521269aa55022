from zonet.pipeline.analyze import UnsupportedNetwork, UsageError, analyze_network
from zonet.pipeline.config import WORKERS_ENV, ConfigError, PipelineConfig, load_config
from zonet.pipeline.inputs import load_network_source
from zonet.pipeline.runner import SCHEMA_VERSION, PipelineReport, iter_records, run_pipeline, summarize
from zonet.pipeline.search import STAGES, NetworkVerdictRecord, analyze_for_pipeline

__all__ = [
    "ConfigError",
    "NetworkVerdictRecord",
    "PipelineConfig",
    "PipelineReport",
    "SCHEMA_VERSION",
    "STAGES",
    "UnsupportedNetwork",
    "UsageError",
    "WORKERS_ENV",
    "analyze_for_pipeline",
    "analyze_network",
    "iter_records",
    "load_config",
    "load_network_source",
    "run_pipeline",
    "summarize",
]
