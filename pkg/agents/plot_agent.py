import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import svgwrite

from models.instance import Instance
from utils.verification import check_ids

logger = logging.getLogger(__name__)

VIEWPORT = 1000
MARGIN = 24
POLYGON_FILL = "#9ecae1"
POLYGON_STROKE = "#08519c"
POINT_FILL = "#111111"


def _mapper(instance: Instance, size: int, margin: int):
    min_x, min_y, max_x, max_y = instance.bbox
    scale = (size - 2 * margin) / max(max_x - min_x, max_y - min_y, 1)

    def to_view(x: int, y: int) -> Tuple[float, float]:
        # y grows upward in the instance, downward in SVG
        return round(margin + (x - min_x) * scale, 3), round(size - margin - (y - min_y) * scale, 3)

    return to_view


def render_svg(instance: Instance, cycle: Optional[Sequence[int]] = None, score: Optional[float] = None,
               size: int = VIEWPORT) -> str:
    """Points as dots, the polygon (if any) as one filled path, and a caption with the score."""
    if cycle is not None:
        check_ids(cycle, instance)
    to_view = _mapper(instance, size, MARGIN)
    dwg = svgwrite.Drawing(size=(size, size), profile="full", debug=False)
    dwg.viewbox(0, 0, size, size)
    dwg.add(dwg.rect(insert=(0, 0), size=(size, size), fill="white"))

    if cycle:
        corners = [to_view(instance.xs[v], instance.ys[v]) for v in cycle]
        d = "M " + " L ".join(f"{x},{y}" for x, y in corners) + " Z"
        dwg.add(dwg.path(d=d, id="polygon", fill=POLYGON_FILL, stroke=POLYGON_STROKE,
                         stroke_width=1, stroke_linejoin="round"))

    radius = 2.5 if instance.n <= 1000 else 0.8
    dots = dwg.g(id="points", fill=POINT_FILL, stroke="none")
    for p in instance.points:
        dots.add(dwg.circle(center=to_view(p.x, p.y), r=radius))
    dwg.add(dots)

    caption = f"{instance.name}  n={instance.n}"
    if score is not None:
        caption += f"  score={score:.6f}"
    dwg.add(dwg.text(caption, insert=(MARGIN, MARGIN - 8), font_size=14, font_family="monospace"))
    return dwg.tostring()


def write_svg(path: Union[str, Path], instance: Instance, cycle: Optional[Sequence[int]] = None,
              score: Optional[float] = None) -> None:
    Path(path).write_text(render_svg(instance, cycle, score), encoding="utf-8")
    logger.info("[Plot] wrote %s", path)
