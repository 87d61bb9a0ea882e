from typing import List, Optional, Sequence, Tuple

from logger import get_logger
from schemas.achieve_schema import RenderOptions
from services.errors import UnsupportedDimension
from services.nset_service import DiscreteNSet

logger = get_logger(__name__)

PREAMBLE = """\
<?xml version="1.0" standalone="no"?>
<svg width="%(width).3f" height="%(height).3f" viewBox="%(min_x).3f %(min_y).3f %(width).3f %(height).3f" version="1.1" xmlns="http://www.w3.org/2000/svg">
<rect x="%(min_x).3f" y="%(min_y).3f" width="%(width).3f" height="%(height).3f" style="fill:#ffffff"/>
"""

POSTAMBLE = """\
</svg>
"""


class SVG:
    def __init__(self):
        self.min_x = None
        self.max_x = None
        self.min_y = None
        self.max_y = None
        self.commands: List[str] = []

    def require(self, x: float, y: float):
        if self.min_x is None:
            self.min_x = self.max_x = x
            self.min_y = self.max_y = y
        else:
            self.min_x = min(self.min_x, x)
            self.max_x = max(self.max_x, x)
            self.min_y = min(self.min_y, y)
            self.max_y = max(self.max_y, y)

    def polygon(self, points: Sequence[Tuple[float, float]], fill: str = "none", color: str = "#000000", width: float = 0.5):
        for x, y in points:
            self.require(x, y)
        self.commands.append(
            '<polygon points="%s" style="fill:%s;stroke:%s;stroke-width:%.3f" />' % (
                " ".join("%.3f,%.3f" % p for p in points), fill, color, width
            )
        )

    def line(self, points: Sequence[Tuple[float, float]], color: str = "#000000", width: float = 0.5):
        for x, y in points:
            self.require(x, y)
        self.commands.append(
            '<polyline points="%s" style="fill:none;stroke:%s;stroke-width:%.3f" />' % (
                " ".join("%.3f,%.3f" % p for p in points), color, width
            )
        )

    def text(self, x: float, y: float, text: str, size: float = 8.0, color: str = "#333333"):
        self.require(x, y)
        self.commands.append(
            '<text x="%.3f" y="%.3f" fill="%s" font-size="%.1f" font-family="monospace" text-anchor="middle">%s</text>' % (
                x, y, color, size, text
            )
        )

    def render(self) -> str:
        pad = max(self.max_x - self.min_x, self.max_y - self.min_y) * 0.05
        fields = {
            "min_x": self.min_x - pad,
            "min_y": self.min_y - pad,
            "width": self.max_x - self.min_x + 2 * pad,
            "height": self.max_y - self.min_y + 2 * pad,
        }
        return PREAMBLE % fields + "".join(item + "\n" for item in self.commands) + POSTAMBLE


def _residue_color(index: int, count: int) -> str:
    hue = (index * 360.0) / count
    return "hsl(%.1f,65%%,70%%)" % hue


def render_svg(K: DiscreteNSet, opts: Optional[RenderOptions] = None) -> str:
    """Squares of K in the plane (y upwards), coloured by residue, over the unit-square grid."""
    if K.n != 2:
        raise UnsupportedDimension(f"Rendering needs n=2, got n={K.n}")
    opts = opts or RenderOptions()
    unit = opts.cell_size * K.k
    side = opts.cell_size
    svg = SVG()
    count = K.k ** 2

    for index, (u, x) in enumerate(zip(K.cells(), K.shifts)):
        left = (u[0] / K.k + x[0]) * unit
        top = -(u[1] / K.k + x[1]) * unit - side
        corners = [(left, top), (left + side, top), (left + side, top + side), (left, top + side)]
        svg.polygon(corners, fill=_residue_color(index, count), color="#444444", width=0.5)
        if opts.show_labels:
            svg.text(left + side / 2, top + side / 2 + 3, "%d,%d" % u)

    if opts.show_grid:
        for i in range(K.k + 1):
            weight = 1.5 if i in (0, K.k) else 0.3
            svg.line([(i * side, 0.0), (i * side, -unit)], color="#000000", width=weight)
            svg.line([(0.0, -i * side), (unit, -i * side)], color="#000000", width=weight)

    logger.info(f"Rendered {count} squares at k={K.k}")
    return svg.render()
