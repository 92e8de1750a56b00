from abc import ABC, abstractmethod

from wassdim.domain.model import CostMatrix, TransportResult


class TransportSolverPort(ABC):
    @abstractmethod
    def solve(self, cost: CostMatrix) -> TransportResult:
        """Wasserstein-1 between uniform measures on the rows and columns."""
        pass

    @abstractmethod
    def describe(self) -> dict:
        pass
