from .results_sink_adapter import FilesystemResultsSinkAdapter

__all__ = ["FilesystemResultsSinkAdapter"]
