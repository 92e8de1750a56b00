from .results_sink_adapter import InMemoryResultsSinkAdapter

__all__ = ["InMemoryResultsSinkAdapter"]
