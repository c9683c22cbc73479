"""CSV writers for path bundles, surfaces, policy paths and reports.

Numbers are written with repr() so identical inputs give identical bytes.
Every file is written to a temporary sibling and renamed into place.
"""

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

from wcport.console import info
from wcport.interfaces import OutputFormatter


def _num(x) -> str:
    return repr(float(x))


def atomic_write(filename, text: str):
    path = Path(filename)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


class PathBundleCsv(OutputFormatter):
    """`t,path0,path1,...`, one row per time node."""

    def save(self, data, filename: str):
        header = ["t"] + [f"path{i}" for i in range(data.n_paths)]
        rows = ([_num(t)] + [_num(z) for z in data.values[:, j]] for j, t in enumerate(data.times))
        atomic_write(filename, render_csv(header, rows))
        info(f"[CSV] {data.n_paths} paths x {data.times.size} nodes -> {filename}")


class SurfaceCsv(OutputFormatter):
    """Long format `t,x,<column>`, time-major (all x for t_0, then t_1, ...)."""

    def __init__(self, column: str = "v"):
        self.column = column

    def save(self, data, filename: str):
        values = data.v if self.column == "v" else getattr(data, self.column)
        x = data.grid.nodes
        rows = (
            (_num(t), _num(xj), _num(values[i, j]))
            for i, t in enumerate(data.times)
            for j, xj in enumerate(x)
        )
        atomic_write(filename, render_csv(["t", "x", self.column], rows))
        info(f"[CSV] {self.column} surface {values.shape[0]}x{values.shape[1]} -> {filename}")


class PolicyPathsCsv(OutputFormatter):
    """`t,pi0,...,pi_m0,...,reference`: π̂(t, z_t), π^M(z_t) per path, reference ODE policy."""

    def save(self, data, filename: str):
        n = data.pi.shape[0]
        header = ["t"] + [f"pi{i}" for i in range(n)] + [f"pi_m{i}" for i in range(n)] + ["reference"]
        rows = (
            [_num(t)] + [_num(p) for p in data.pi[:, j]] + [_num(p) for p in data.pi_m[:, j]] + [_num(data.reference[j])]
            for j, t in enumerate(data.times)
        )
        atomic_write(filename, render_csv(header, rows))
        info(f"[CSV] policy along {n} paths -> {filename}")


class ReportCsv(OutputFormatter):
    """`check,checkpoint,estimate,se,pass` for one or more reports."""

    HEADER = ["check", "checkpoint", "estimate", "se", "pass"]

    def save(self, data, filename: str):
        reports = data if isinstance(data, (list, tuple)) else [data]
        rows = [row for report in reports for row in report.csv_rows()]
        atomic_write(filename, render_csv(self.HEADER, rows))
        info(f"[CSV] {len(reports)} report(s) -> {filename}")
