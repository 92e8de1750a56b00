from .filesystem.results_sink_adapter import FilesystemResultsSinkAdapter
from .idx.mnist_loader_adapter import IdxMnistLoaderAdapter
from .inmemory.results_sink_adapter import InMemoryResultsSinkAdapter
from .scipy.assignment_solver_adapter import ScipyAssignmentSolverAdapter
from .scipy.sinkhorn_solver_adapter import LogDomainSinkhornSolverAdapter

__all__ = [
    "FilesystemResultsSinkAdapter",
    "IdxMnistLoaderAdapter",
    "InMemoryResultsSinkAdapter",
    "ScipyAssignmentSolverAdapter",
    "LogDomainSinkhornSolverAdapter",
]
