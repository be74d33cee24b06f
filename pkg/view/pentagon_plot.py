"""
Pentagon figures: calibrated radii drawn as closed polygons on five spokes.
"""
import io
import math
from typing import Optional, Sequence, Tuple

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from entity.Profile import RadiiVector

Series = Tuple[str, RadiiVector, str]

# Fixed salt and no date keep the SVG byte-identical across runs.
SVG_RC = {"svg.hashsalt": "irs-pentagon", "svg.fonttype": "none"}


def slot_angles(count: int = 5) -> np.ndarray:
    """Spoke angles in radians: slot k sits at 90° + k·72°."""
    return np.deg2rad(90.0 + 360.0 / count * np.arange(count))


def pentagon_vertices(radii: RadiiVector, scale: float = 1.0) -> np.ndarray:
    """(5, 2) array of x, y vertex coordinates for radii in slot order."""
    angles = slot_angles(len(radii.values))
    r = radii.as_array() * scale
    return np.column_stack([r * np.cos(angles), r * np.sin(angles)])


def _slot_labels(series: Sequence[Series]) -> Sequence[str]:
    for _, radii, _ in series:
        if radii.ordering is not None:
            return [m.short_name for m in radii.ordering.slots]
    return [f"m{k + 1}" for k in range(len(series[0][1].values))]


def render_pentagon_svg(series: Sequence[Series], scale: float = 1.0, title: Optional[str] = None) -> str:
    """
    Draw one closed pentagon per series and return a standalone SVG document.

    Args:
        series: (label, radii, colour) triples; radii in the profile's slot order.
        scale: Plot units per unit radius.
        title: Optional figure title.

    Returns:
        str: The SVG document.
    """
    if not series:
        raise ValueError("render_pentagon_svg needs at least one series")

    labels = _slot_labels(series)
    angles = slot_angles(len(labels))
    extent = scale * max(1.0, max(float(np.max(r.as_array())) for _, r, _ in series))

    with matplotlib.rc_context(SVG_RC):
        fig = Figure(figsize=(6, 6))
        ax = fig.add_subplot(111)
        ax.set_aspect("equal")
        ax.axis("off")

        # Spokes and the unit reference pentagon
        for angle in angles:
            ax.plot([0, extent * math.cos(angle)], [0, extent * math.sin(angle)],
                    color="#cccccc", linewidth=0.8, zorder=0)
        unit = pentagon_vertices(RadiiVector((1.0,) * len(labels)), scale)
        ax.fill(unit[:, 0], unit[:, 1], fill=False, edgecolor="#999999", linestyle="--", linewidth=0.8, zorder=1)

        for label, radii, color in series:
            vertices = pentagon_vertices(radii, scale)
            ax.fill(vertices[:, 0], vertices[:, 1], facecolor=color, edgecolor=color,
                    alpha=0.25, linewidth=0, zorder=2)
            closed = np.vstack([vertices, vertices[:1]])
            ax.plot(closed[:, 0], closed[:, 1], color=color, linewidth=2, marker="o", label=label, zorder=3)

        for name, angle in zip(labels, angles):
            ax.text(1.15 * extent * math.cos(angle), 1.15 * extent * math.sin(angle), name,
                    ha="center", va="center", fontsize=10)

        limit = 1.3 * extent
        ax.set_xlim(-limit, limit)
        ax.set_ylim(-limit, limit)
        ax.legend(loc="lower right", frameon=False)
        if title:
            ax.set_title(title)

        buffer = io.BytesIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue().decode("utf-8")


def write_pentagon_svg(series: Sequence[Series], path, scale: float = 1.0, title: Optional[str] = None) -> None:
    svg = render_pentagon_svg(series, scale, title)
    with open(path, "w", encoding="utf-8") as f:
        f.write(svg)
