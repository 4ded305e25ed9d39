"""
Experiment reports
One JSON document per run plus a CSV side table per named table.
"""

import csv
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from .codec import dump_json
from .config import VERSION

logger = logging.getLogger(__name__)


def jsonable(value: Any) -> Any:
    """Fractions as "p/q", numpy scalars and arrays as plain values and lists."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


@dataclass
class ReportRow:
    """One assertion: what was checked, the statement it checks, and the outcome."""
    check: str
    anchor: str
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "anchor": self.anchor,
            "passed": bool(self.passed),
            "detail": jsonable(self.detail),
        }


@dataclass
class Report:
    experiment: str
    inputs: Dict[str, Any]
    rows: List[ReportRow] = field(default_factory=list)
    tables: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)
    version: str = VERSION
    generated_at: str = ""

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def failures(self) -> List[ReportRow]:
        return [row for row in self.rows if not row.passed]

    def add(self, check: str, anchor: str, passed: bool, **detail) -> ReportRow:
        row = ReportRow(check, anchor, bool(passed), detail)
        self.rows.append(row)
        mark = "✓" if row.passed else "✗"
        log = logger.info if row.passed else logger.error
        log(f"{mark} {self.experiment}: {check}")
        return row

    def table(self, name: str, rows: List[Dict[str, Any]]):
        self.tables[name] = [jsonable(row) for row in rows]

    def results(self) -> Dict[str, Any]:
        """Everything except the timestamp; identical for identical inputs."""
        return {
            "experiment": self.experiment,
            "inputs": jsonable(self.inputs),
            "rows": [row.to_dict() for row in self.rows],
            "tables": self.tables,
            "version": self.version,
        }

    def to_dict(self) -> Dict[str, Any]:
        data = self.results()
        data["generated_at"] = self.generated_at
        return data


def write_report(report: Report, output_dir: Path) -> Path:
    """Write <experiment>.json and <experiment>.<table>.csv files; returns the JSON path."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    if not report.generated_at:
        report.generated_at = datetime.now(timezone.utc).isoformat()

    path = output_dir / f"{report.experiment}.json"
    dump_json(report.to_dict(), path)
    for name, rows in sorted(report.tables.items()):
        if not rows:
            continue
        table_path = output_dir / f"{report.experiment}.{name}.csv"
        with open(table_path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    logger.info(f"Report written to {path}")
    return path
