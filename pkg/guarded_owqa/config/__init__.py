from .settings import PipelineConfig, get_settings

__all__ = ["PipelineConfig", "get_settings"]
