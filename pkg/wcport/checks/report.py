from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np


def mean_se(samples) -> Tuple[float, float]:
    """Sample mean and its standard error (numpy's pairwise summation)."""
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    mean = float(np.mean(samples))
    se = float(np.std(samples, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, se


@dataclass(frozen=True)
class ReportRow:
    checkpoint: float
    estimate: float
    se: float
    threshold: float
    passed: bool
    label: str = ""

    @property
    def key(self) -> str:
        return self.label or repr(float(self.checkpoint))


@dataclass
class VerificationReport:
    check: str
    rows: List[ReportRow] = field(default_factory=list)
    k: float = 4.0
    seed: Optional[int] = None
    notes: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def estimates(self) -> np.ndarray:
        return np.array([r.estimate for r in self.rows])

    def add(self, checkpoint: float, estimate: float, se: float, allowance: float = 0.0, label: str = "") -> ReportRow:
        """Append a row that passes iff |estimate| <= k·se + allowance."""
        threshold = self.k * se + allowance
        row = ReportRow(float(checkpoint), float(estimate), float(se), float(threshold), bool(abs(estimate) <= threshold), label)
        self.rows.append(row)
        return row

    def add_row(self, row: ReportRow):
        self.rows.append(row)

    def csv_rows(self):
        return [(self.check, r.key, repr(r.estimate), repr(r.se), "true" if r.passed else "false") for r in self.rows]

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{self.check}: {status} ({len(self.rows)} checkpoints, k={self.k:g}, seed={self.seed})"]
        for r in self.rows:
            mark = "ok " if r.passed else "BAD"
            lines.append(f"  [{mark}] {r.key:>12}  estimate={r.estimate:+.6e}  se={r.se:.3e}  threshold={r.threshold:.3e}")
        for key, value in self.notes.items():
            lines.append(f"  {key}: {value}")
        return "\n".join(lines)


def report_table(report: VerificationReport):
    """rich Table rendering of a report for the console."""
    from rich.table import Table

    status = "[success]PASS[/success]" if report.passed else "[error]FAIL[/error]"
    table = Table(title=f"{report.check} {status}  (k={report.k:g}, seed={report.seed})")
    for col in ("checkpoint", "estimate", "se", "threshold", "pass"):
        table.add_column(col, justify="right")
    for r in report.rows:
        table.add_row(r.key, f"{r.estimate:+.6e}", f"{r.se:.3e}", f"{r.threshold:.3e}", "yes" if r.passed else "no")
    return table
