from __future__ import annotations

import io
from pathlib import Path
from typing import Sequence

import matplotlib
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from ..exceptions import CustomValueError
from ..utils import as_float_array

__all__ = [
    'svg_curve',
    'write_svg'
]


# the SVG backend works at 72 points per inch: an 800 x 600 viewBox
FIGSIZE = (800 / 72, 600 / 72)
DPI = 72

# text stays text, ids and metadata do not change between runs
_SVG_RC = {'svg.fonttype': 'none', 'svg.hashsalt': 'thermobvp'}


def svg_curve(x: Sequence[float], y: Sequence[float], title: str = '', xlabel: str = '', ylabel: str = '') -> str:
    """A single line plot rendered to a standalone SVG document."""

    xs, ys = as_float_array(x), as_float_array(y)

    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
        raise CustomValueError('need two equally long sequences of at least two points', svg_curve)

    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise CustomValueError('cannot plot non-finite values', svg_curve)

    with matplotlib.rc_context(_SVG_RC):
        fig = Figure(figsize=FIGSIZE, dpi=DPI)
        FigureCanvasAgg(fig)

        ax = fig.add_subplot()
        ax.plot(xs, ys, color='#1f4e9c', linewidth=2)

        if ys.min() < 0 < ys.max():
            ax.axhline(0.0, color='#bbbbbb', linewidth=1)

        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)

        buffer = io.StringIO()
        fig.savefig(buffer, format='svg', metadata={'Date': None})

    return buffer.getvalue()


def write_svg(
    path: str | Path, x: Sequence[float], y: Sequence[float], title: str = '', xlabel: str = '', ylabel: str = ''
) -> Path:
    (target := Path(path)).write_text(svg_curve(x, y, title, xlabel, ylabel))
    return target
