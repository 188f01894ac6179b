"""
CSV parser for observation files and the Dataset container shared with the simulators.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.utils.errors import DataError
from src.utils.logger import setup_logger


@dataclass
class Dataset:
    """
    Observations as an (n, dim) array with their column names.

    Attributes:
        values: Observation matrix
        columns: One name per column
        source: File path or generator description
        rows: Original row numbers (1-based, header excluded) of each observation
    """

    values: np.ndarray
    columns: List[str]
    source: str = ""
    rows: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim == 1:
            self.values = self.values[:, None]
        if self.values.shape[1] != len(self.columns):
            raise DataError(f"{self.values.shape[1]} column(s) of values but {len(self.columns)} name(s)")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def order_statistics(self, column: int = 0) -> np.ndarray:
        return np.sort(self.values[:, column], kind="stable")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values, columns=self.columns)

    def summary(self) -> Dict[str, Dict[str, float]]:
        """Per-column n, mean, sd, min, quartiles and max."""
        described = self.to_frame().describe()
        return {col: {stat: float(v) for stat, v in described[col].items()} for col in self.columns}

    def save(self, path: Path):
        """Write as headered CSV (the format ``CSVParser`` reads)."""
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")


class CSVParser:
    """
    Parser for headered CSV observation files.
    Selects one or two named columns and validates every cell.
    """

    def __init__(self):
        self.logger = setup_logger(self.__class__.__name__)

    def parse(
        self,
        path: Path,
        columns: Optional[Sequence[str]] = None,
        n_rows: Optional[int] = None,
        row_seed: int = 0
    ) -> Dataset:
        """
        Read observations from a CSV file.

        Args:
            path: CSV file with a header row
            columns: Column names to keep (default: every column)
            n_rows: Keep a random subset of this many rows
            row_seed: Seed of the subset selection

        Returns:
            Dataset with the selected columns

        Raises:
            DataError: Missing file, unknown column, empty or non-numeric cell
        """
        path = Path(path)
        self.logger.info(f"Reading observations: {path}")
        if not path.exists():
            raise DataError(f"input file not found: {path}")

        try:
            frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise DataError(f"could not read {path}: {e}") from e

        frame.columns = [str(col).strip() for col in frame.columns]
        columns = list(columns) if columns else list(frame.columns)
        missing = [col for col in columns if col not in frame.columns]
        if missing:
            raise DataError(f"unknown column(s) {missing}; file has {list(frame.columns)}")
        if not 1 <= len(columns) <= 2:
            raise DataError(f"select one or two columns, got {len(columns)}")
        if frame.empty:
            raise DataError(f"{path} has no data rows")

        values = np.column_stack([self._parse_column(frame[col], col) for col in columns])
        rows = np.arange(1, len(frame) + 1)

        if n_rows is not None and n_rows < len(values):
            keep = np.sort(np.random.default_rng(row_seed).choice(len(values), size=n_rows, replace=False))
            values, rows = values[keep], rows[keep]
            self.logger.info(f"Selected {n_rows} of {len(frame)} rows (seed {row_seed})")

        dataset = Dataset(values=values, columns=columns, source=str(path), rows=rows)
        self.logger.info(f"Loaded {dataset.n} observation(s) of {dataset.dim} variable(s)")
        return dataset

    def _parse_column(self, column: pd.Series, name: str) -> np.ndarray:
        """Convert one text column, naming the first bad row."""
        text = column.str.strip()
        values = pd.to_numeric(text, errors="coerce")
        bad = values.isna() | ~np.isfinite(values.to_numpy(dtype=float, na_value=np.nan))
        if bad.any():
            position = int(np.flatnonzero(bad.to_numpy())[0])
            cell = text.iloc[position]
            reason = "missing value" if cell == "" else f"non-numeric value '{cell}'"
            raise DataError(f"{reason} in column '{name}'", row=position + 1)
        return values.to_numpy(dtype=float)
