from .assignment_solver_adapter import ScipyAssignmentSolverAdapter, exact_w1
from .sinkhorn_solver_adapter import LogDomainSinkhornSolverAdapter, sinkhorn_w1

__all__ = [
    "ScipyAssignmentSolverAdapter",
    "LogDomainSinkhornSolverAdapter",
    "exact_w1",
    "sinkhorn_w1",
]
