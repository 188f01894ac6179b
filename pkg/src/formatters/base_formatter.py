"""
Base formatter class for run artifacts.
"""

import json
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from src.utils.logger import setup_logger

# Round-trip precision for every float written to CSV
FLOAT_FORMAT = "%.17g"


class BaseFormatter(ABC):
    """
    Abstract base class for artifact formatters.

    Each formatter handles one family of outputs:
    - RunArtifactFormatter: draws, predictive draws, diagnostics and manifest of a fit
    - MarkdownFormatter: human-readable summary report
    """

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        """
        Initialize the formatter.

        Args:
            config: Formatter-specific configuration
        """
        self.config = config or {}
        self.logger = setup_logger(self.__class__.__name__)

    @abstractmethod
    def format(self, payload: Any, output_dir: Path) -> List[Path]:
        """
        Write the payload's artifacts.

        Args:
            payload: Object to serialize
            output_dir: Target directory

        Returns:
            Paths of the written files
        """
        pass

    def _validate_output_path(self, output_path: Path) -> Path:
        """Validate and prepare output path."""
        output_path.parent.mkdir(parents=True, exist_ok=True)
        return output_path

    def _write_frame(self, frame: pd.DataFrame, output_path: Path) -> Path:
        output_path = self._validate_output_path(output_path)
        frame.to_csv(output_path, index=False, float_format=FLOAT_FORMAT, encoding="utf-8", lineterminator="\n")
        self.logger.debug(f"Wrote {len(frame)} row(s) to {output_path}")
        return output_path

    def _write_json(self, payload: Any, output_path: Path) -> Path:
        output_path = self._validate_output_path(output_path)
        with open(output_path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, default=str)
            f.write("\n")
        return output_path
