"""
In-memory results sink for wassdim.

Keeps published tables and manifests in memory, primarily for testing.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence

from wassdim.ports.outbound.results_sink_port import ResultsSinkPort

logger = logging.getLogger(__name__)


class InMemoryResultsSinkAdapter(ResultsSinkPort):
    """
    Implementation of ResultsSinkPort storing everything it receives.

    Attributes:
        results: Rows of the last results table, restricted to its columns
        series: Rows of the last series table
        manifest: The last manifest, or None
    """

    def __init__(self):
        self.results: List[Dict[str, Any]] = []
        self.series: List[Dict[str, Any]] = []
        self.results_columns: List[str] = []
        self.series_columns: List[str] = []
        self.manifest: Optional[Dict[str, Any]] = None

    @staticmethod
    def _project(
        rows: List[Dict[str, Any]], columns: Sequence[str]
    ) -> List[Dict[str, Any]]:
        return [{column: row.get(column) for column in columns} for row in rows]

    def write_results(
        self, rows: List[Dict[str, Any]], columns: Sequence[str]
    ) -> None:
        self.results = self._project(rows, columns)
        self.results_columns = list(columns)
        logger.debug(f"Stored {len(rows)} result rows in memory")

    def write_series(
        self, rows: List[Dict[str, Any]], columns: Sequence[str]
    ) -> None:
        self.series = self._project(rows, columns)
        self.series_columns = list(columns)
        logger.debug(f"Stored {len(rows)} series rows in memory")

    def write_manifest(self, manifest: Dict[str, Any]) -> None:
        self.manifest = dict(manifest)

    def clear(self) -> None:
        """Forget everything stored so far."""
        self.results, self.series = [], []
        self.results_columns, self.series_columns = [], []
        self.manifest = None
