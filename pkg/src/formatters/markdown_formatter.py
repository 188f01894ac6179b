"""
Markdown formatter for run summaries.
"""

from pathlib import Path
from typing import Any, Dict, List

from src.formatters.base_formatter import BaseFormatter


class MarkdownFormatter(BaseFormatter):
    """
    Formatter for Markdown output format.

    Generates a readable run summary with:
    - Posterior table
    - Diagnostics table
    - Acceptance rates
    - Predictive correlation band (bivariate runs)
    """

    def format(self, summary: Dict[str, Any], output_dir: Path) -> List[Path]:
        """
        Format a run summary as Markdown.

        Args:
            summary: Report from ``summarize``
            output_dir: Output directory

        Returns:
            Path of the generated Markdown file
        """
        output_path = self._validate_output_path(Path(output_dir) / self.config.get("filename", "summary.md"))
        self.logger.info(f"Formatting summary as Markdown: {output_path}")

        content = self._prepare_markdown_content(summary)
        with open(output_path, "w", encoding="utf-8") as f:
            f.write(content)

        self.logger.info(f"Markdown summary saved to: {output_path}")
        return [output_path]

    def _prepare_markdown_content(self, summary: Dict[str, Any]) -> str:
        """Prepare the complete Markdown content."""
        content_parts = []

        title = self.config.get("title", "Posterior Summary")
        content_parts.append(f"# {title}\n")
        content_parts.append(
            f"Model `{summary.get('model')}`: {summary.get('n_draws')} retained state(s) "
            f"from {summary.get('n_chains')} chain(s).\n"
        )
        content_parts.append("---\n")

        content_parts.append("## Posterior\n")
        content_parts.append(self._table(summary.get("posterior", [])))

        content_parts.append("## Diagnostics\n")
        content_parts.append(self._table(summary.get("diagnostics", [])))

        rates = summary.get("acceptance_rates", {})
        if rates:
            content_parts.append("## Acceptance Rates\n")
            content_parts.append(self._table([{"move": k, "rate": v} for k, v in sorted(rates.items())]))

        band = summary.get("predictive_correlation")
        if band:
            content_parts.append("## Predictive Correlation\n")
            content_parts.append(
                f"Over {band['windows']} windows: median {band['median']:.3f}, "
                f"90% band [{band['q0.05']:.3f}, {band['q0.95']:.3f}].\n"
            )
        return "\n".join(content_parts)

    def _table(self, records: List[Dict[str, Any]]) -> str:
        if not records:
            return "_none_\n"
        headers = list(records[0].keys())
        lines = ["| " + " | ".join(headers) + " |", "|" + "---|" * len(headers)]
        for record in records:
            lines.append("| " + " | ".join(self._cell(record.get(h)) for h in headers) + " |")
        return "\n".join(lines) + "\n"

    @staticmethod
    def _cell(value: Any) -> str:
        if isinstance(value, float):
            return f"{value:.4g}"
        return str(value)
