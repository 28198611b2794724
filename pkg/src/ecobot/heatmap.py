"""Self-contained SVG heatmap of a configuration-space sweep.

One colored cell per (DVFS level, speed) pair, shaded by achieved
throughput on an 8-step viridis-like ramp; cells meeting the throughput
requirement are annotated with their trip energy. No plotting library.
"""

from __future__ import annotations

from .plant import PlantModels
from .sim import SweepGrid

# 8-step viridis-like ramp, low throughput -> light, full throughput -> dark
_RAMP = (
    "#fde725",
    "#a0da39",
    "#4ac16d",
    "#1fa187",
    "#277f8e",
    "#365c8d",
    "#46327e",
    "#440154",
)

_CELL_W = 66
_CELL_H = 40
_MARGIN_LEFT = 70
_MARGIN_TOP = 44
_MARGIN_BOTTOM = 52
_MARGIN_RIGHT = 16


def _color(throughput: float) -> str:
    bucket = min(int(throughput * len(_RAMP)), len(_RAMP) - 1)
    return _RAMP[bucket]


def render_heatmap(grid: SweepGrid, models: PlantModels, title: str) -> str:
    """Render the sweep as an SVG document string.

    Frequency runs left to right, speed bottom to top, so the
    full-throughput plateau sits toward the lower right.
    """
    n_f = grid.n_dvfs
    n_v = grid.n_speeds
    width = _MARGIN_LEFT + n_f * _CELL_W + _MARGIN_RIGHT
    height = _MARGIN_TOP + n_v * _CELL_H + _MARGIN_BOTTOM
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" font-family="sans-serif" font-size="14" '
        f'text-anchor="middle">{title}</text>',
    ]
    for cell in grid.cells:
        x = _MARGIN_LEFT + cell.dvfs_index * _CELL_W
        # highest speed at the top
        y = _MARGIN_TOP + (n_v - 1 - cell.speed_index) * _CELL_H
        parts.append(
            f'<rect x="{x}" y="{y}" width="{_CELL_W}" height="{_CELL_H}" '
            f'fill="{_color(cell.throughput)}" stroke="white" stroke-width="1"/>'
        )
        if cell.feasible and cell.energy_j is not None:
            fill = "white" if cell.throughput > 0.625 else "black"
            parts.append(
                f'<text x="{x + _CELL_W / 2:.1f}" y="{y + _CELL_H / 2 + 4:.1f}" '
                f'font-family="sans-serif" font-size="11" text-anchor="middle" '
                f'fill="{fill}">{cell.energy_j:.0f}</text>'
            )
    # axis labels
    for i in range(n_f):
        x = _MARGIN_LEFT + i * _CELL_W + _CELL_W / 2
        y = _MARGIN_TOP + n_v * _CELL_H + 16
        ghz = models.dvfs[i].frequency_hz / 1e9
        parts.append(
            f'<text x="{x:.1f}" y="{y}" font-family="sans-serif" font-size="10" '
            f'text-anchor="middle">{ghz:.2f}</text>'
        )
    for j in range(n_v):
        x = _MARGIN_LEFT - 8
        y = _MARGIN_TOP + (n_v - 1 - j) * _CELL_H + _CELL_H / 2 + 4
        parts.append(
            f'<text x="{x}" y="{y:.1f}" font-family="sans-serif" font-size="10" '
            f'text-anchor="end">{models.speeds[j]:.1f}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_LEFT + n_f * _CELL_W / 2:.1f}" '
        f'y="{_MARGIN_TOP + n_v * _CELL_H + 38}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle">CPU frequency (GHz)</text>'
    )
    parts.append(
        f'<text x="16" y="{_MARGIN_TOP + n_v * _CELL_H / 2:.1f}" '
        f'font-family="sans-serif" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MARGIN_TOP + n_v * _CELL_H / 2:.1f})">'
        f"robot speed (m/s)</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
