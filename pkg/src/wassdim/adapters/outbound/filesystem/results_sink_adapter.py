"""
Filesystem results sink for wassdim.

Writes the three artifacts of an experiment run into one output directory:
results.csv, series.csv and manifest.json.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence

import pandas as pd

from wassdim.ports.outbound.results_sink_port import ResultsSinkPort

logger = logging.getLogger(__name__)

RESULTS_FILE = "results.csv"
SERIES_FILE = "series.csv"
MANIFEST_FILE = "manifest.json"


class FilesystemResultsSinkAdapter(ResultsSinkPort):
    """
    Implementation of ResultsSinkPort writing CSV and JSON files with pandas.

    Attributes:
        out_dir: Directory receiving the files; created on first write
    """

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)

    def _prepare(self) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def _write_table(
        self, name: str, rows: List[Dict[str, Any]], columns: Sequence[str]
    ) -> Path:
        self._prepare()
        path = self.out_dir / name
        # Fixed column order; missing values are written as empty cells.
        frame = pd.DataFrame(rows, columns=list(columns))
        frame.to_csv(path, index=False)
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_results(
        self, rows: List[Dict[str, Any]], columns: Sequence[str]
    ) -> None:
        self._write_table(RESULTS_FILE, rows, columns)

    def write_series(
        self, rows: List[Dict[str, Any]], columns: Sequence[str]
    ) -> None:
        self._write_table(SERIES_FILE, rows, columns)

    def write_manifest(self, manifest: Dict[str, Any]) -> None:
        self._prepare()
        path = self.out_dir / MANIFEST_FILE
        path.write_text(json.dumps(manifest, indent=2, default=str) + "\n")
        logger.info(f"Wrote manifest to {path}")
