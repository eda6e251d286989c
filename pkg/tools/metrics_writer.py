"""
MetricsWriter tool for line-delimited metric records and human-readable tables.
"""

import json
import sys
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel

sys.path.append(str(Path(__file__).parent.parent))
from models.errors import StoreError
from models.schema import CycleRecord, Metrics, ReductionRecord

METRICS_NAME = "metrics.jsonl"


class MetricsWriter:
    """Appends metric records to ``metrics.jsonl`` and formats the tables."""

    def __init__(self, directory: Optional[str] = None):
        self.output_path: Optional[Path] = Path(directory) / METRICS_NAME if directory else None

    def append(self, record: Union[CycleRecord, ReductionRecord]) -> None:
        """
        Append one record as a JSON line tagged with its kind.

        Args:
            record: a cycle row or a reduction outcome
        """
        if self.output_path is None:
            return
        kind = "cycle" if isinstance(record, CycleRecord) else "reduction"
        line = json.dumps({"kind": kind, **record.model_dump()}, sort_keys=True, separators=(",", ":"))
        try:
            self.output_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.output_path, "a", encoding="utf-8") as f:
                f.write(line + "\n")
        except OSError as e:
            raise StoreError(f"Cannot write metrics to {self.output_path}: {e}") from e

    def rewrite(self, metrics: Metrics) -> None:
        """Replace the metrics file with the records held in ``metrics``; used after a resume."""
        if self.output_path is None:
            return
        if self.output_path.exists():
            self.output_path.unlink()
        records: List[BaseModel] = sorted(
            list(metrics.history) + list(metrics.reductions),
            key=lambda r: (r.cycle, isinstance(r, CycleRecord)),
        )
        for record in records:
            self.append(record)

    def format_table(self, metrics: Metrics) -> str:
        """Per-cycle rates, one row per cycle."""
        lines = [
            f"{'cycle':>5}  {'RateSynth':>9}  {'RateARC':>8}  {'|S|':>7}  {'|L|':>7}",
            "-" * 44,
        ]
        for row in metrics.history:
            lines.append(
                f"{row.cycle:>5}  {row.rate_synth:>8.2%}  {row.rate_arc:>7.2%}  "
                f"{row.store_links:>7}  {row.pool_size:>7}"
            )
        return "\n".join(lines)

    def format_reductions(self, metrics: Metrics) -> str:
        lines = [f"{'cycle':>5}  {'mean':>6}  {'learned':>7}  {'failed':>6}  {'sample':>7}  next", "-" * 50]
        for r in metrics.reductions:
            sample = f"{r.sample_rate:.2%}" if r.sample_rate is not None else "-"
            lines.append(f"{r.cycle:>5}  {r.mean:>6.2%}  {r.learned:>7}  {r.unlearned:>6}  {sample:>7}  {r.next_phase}")
        return "\n".join(lines)

    def format_cross_table(self, metrics: Metrics) -> str:
        """
        Snapshot-by-collection solve rates.

        Rows are policy snapshots, columns the synthetic tasks first stored in
        each cycle.
        """
        header = "snapshot" + "".join(f"{'c' + str(c):>9}" for c in metrics.cross_table_columns)
        lines = [header, "-" * len(header)]
        for c, row in zip(metrics.cross_table_rows, metrics.cross_table):
            cells = "".join(f"{v:>9.2%}" if v is not None else f"{'-':>9}" for v in row)
            lines.append(f"{'c' + str(c):>8}" + cells)
        return "\n".join(lines)
