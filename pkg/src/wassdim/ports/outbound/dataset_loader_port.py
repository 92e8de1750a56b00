from abc import ABC, abstractmethod

from wassdim.domain.model import LabeledCloud


class DatasetLoaderPort(ABC):
    @abstractmethod
    def load(self, split: str = "test") -> LabeledCloud:
        """Load a labeled dataset split."""
        pass
