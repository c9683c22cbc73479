"""SVG line plots rendered with matplotlib; same input, same bytes."""

import io
from dataclasses import dataclass
from typing import List, Optional, Sequence

import matplotlib
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from wcport.errors import ValidationError
from wcport.formatters.csv_output import atomic_write
from wcport.interfaces import OutputFormatter

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
REFERENCE_COLOR = "#1f3fbf"
DASH = (6.0, 4.0)
SERIES_GID = "series-{}"

# fixed hash salt keeps clip-path ids stable; text stays text so labels are searchable
SVG_RC = {
    "svg.hashsalt": "wcport",
    "svg.fonttype": "none",
    "lines.scale_dashes": False,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


@dataclass(frozen=True)
class Series:
    label: str
    xs: Sequence[float]
    ys: Sequence[float]
    dashed: bool = False


@dataclass(frozen=True)
class SvgStyle:
    """Figure size in inches plus the text around the axes."""

    width: float = 6.4
    height: float = 4.0
    title: str = ""
    x_label: str = "t"
    y_label: str = ""


def _range(values: np.ndarray):
    lo, hi = float(values.min()), float(values.max())
    if hi - lo <= 1e-12 * max(1.0, abs(lo), abs(hi)):
        pad = 0.5 * abs(lo) if lo != 0.0 else 1.0
        return lo - pad, hi + pad
    return lo, hi


def emit_svg(series: List[Series], style: Optional[SvgStyle] = None) -> str:
    """SVG document with axes, a legend and one line per series.

    Series k is drawn in a group with id `series-k`; dashed series carry a
    stroke-dasharray.
    """
    if not series:
        raise ValidationError("emit_svg needs at least one series")
    style = style or SvgStyle()
    xs_all = np.concatenate([np.asarray(s.xs, dtype=float) for s in series])
    ys_all = np.concatenate([np.asarray(s.ys, dtype=float) for s in series])
    if xs_all.size == 0:
        raise ValidationError("emit_svg needs non-empty series")

    with matplotlib.rc_context(SVG_RC):
        fig = Figure(figsize=(style.width, style.height))
        FigureCanvasAgg(fig)
        ax = fig.add_subplot()
        solid = 0
        for k, s in enumerate(series):
            if s.dashed:
                color, linestyle = REFERENCE_COLOR, (0, DASH)
            else:
                color, linestyle = PALETTE[solid % len(PALETTE)], "-"
                solid += 1
            ax.plot(
                np.asarray(s.xs, dtype=float),
                np.asarray(s.ys, dtype=float),
                color=color,
                linestyle=linestyle,
                lw=1.5,
                label=s.label,
                gid=SERIES_GID.format(k),
            )
        ax.set_xlim(*_range(xs_all))
        ax.set_ylim(*_range(ys_all))
        if style.title:
            ax.set_title(style.title, fontsize=11)
        if style.x_label:
            ax.set_xlabel(style.x_label)
        if style.y_label:
            ax.set_ylabel(style.y_label)
        ax.legend(loc="best", fontsize=8, frameon=False)
        fig.tight_layout()

        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue().decode("utf-8")


class SvgOutput(OutputFormatter):
    def __init__(self, style: Optional[SvgStyle] = None):
        self.style = style

    def save(self, data: List[Series], filename: str):
        atomic_write(filename, emit_svg(data, self.style))
