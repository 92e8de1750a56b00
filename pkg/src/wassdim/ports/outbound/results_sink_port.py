from abc import ABC, abstractmethod
from typing import Any, Dict, List, Sequence


class ResultsSinkPort(ABC):
    @abstractmethod
    def write_results(
        self, rows: List[Dict[str, Any]], columns: Sequence[str]
    ) -> None:
        pass

    @abstractmethod
    def write_series(
        self, rows: List[Dict[str, Any]], columns: Sequence[str]
    ) -> None:
        pass

    @abstractmethod
    def write_manifest(self, manifest: Dict[str, Any]) -> None:
        pass
