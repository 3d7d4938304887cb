# cristalq/services/plots.py
"""
Dibujo de cristales colocados.

- render_svg: texto SVG con las coordenadas matemáticas tal cual
  (grupo con scale(1,-1)), viewBox ajustado con margen del 5%.
- render_png: vista previa con matplotlib; se guarda en la carpeta de
  salida con un nombre con timestamp y se devuelve la ruta absoluta.

Acá sí se usan flotantes: sólo para dibujar.
"""

from __future__ import annotations

import os
from datetime import datetime
from typing import List, Tuple

import matplotlib

# Backend "Agg": se dibuja sin ventana
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from cristalq import config  # noqa: E402
from cristalq.services.realization import PlacedCrystal  # noqa: E402

Point = Tuple[float, float]


def _xy(value) -> Point:
    z = value.to_complex()
    return (z.real, z.imag)


def _num(value: float) -> str:
    text = f"{value:.{config.SVG_SIGNIFICANT_DIGITS}g}"
    return "0" if text in ("-0", "0") else text


def _drawing_points(crystal: PlacedCrystal, show_lattice: bool) -> List[Point]:
    points = [_xy(v.position) for v in crystal.vertices]
    for segment in crystal.segments:
        points += [_xy(segment.start), _xy(segment.end)]
    if show_lattice:
        points += [(0.0, 0.0), _xy(crystal.lattice.w1), _xy(crystal.lattice.w2)]
    return points or [(0.0, 0.0)]


def _bounds(points: List[Point]) -> Tuple[float, float, float, float]:
    """(xmin, ymin, ancho, alto) con el margen ya agregado."""
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    width = max(max(xs) - min(xs), 1e-9)
    height = max(max(ys) - min(ys), 1e-9)
    margin = config.SVG_MARGIN_RATIO * max(width, height)
    return (
        min(xs) - margin,
        min(ys) - margin,
        width + 2 * margin,
        height + 2 * margin,
    )


# ============================
#   SVG
# ============================

def render_svg(crystal: PlacedCrystal, show_lattice: bool = False) -> str:
    xmin, ymin, width, height = _bounds(_drawing_points(crystal, show_lattice))
    radius = config.SVG_VERTEX_RADIUS_RATIO * max(width, height)
    stroke = radius / 3

    # con scale(1,-1) el rango y visible es [-(ymin+alto), -ymin]
    view_box = " ".join(_num(v) for v in (xmin, -(ymin + height), width, height))
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{view_box}">',
        f"<!-- {config.TOOL_NAME} {config.TOOL_VERSION}: ventana {crystal.window},"
        f" degenerado={str(crystal.degenerate).lower()} -->",
        '<g transform="scale(1,-1)">',
        f'<g id="edges" stroke="black" stroke-width="{_num(stroke)}" fill="none">',
    ]
    for segment in crystal.segments:
        (x1, y1), (x2, y2) = _xy(segment.start), _xy(segment.end)
        lines.append(
            f'<line data-edge="{segment.edge}" x1="{_num(x1)}" y1="{_num(y1)}"'
            f' x2="{_num(x2)}" y2="{_num(y2)}"/>'
        )
    lines.append("</g>")

    lines.append('<g id="vertices" fill="black">')
    for vertex in crystal.vertices:
        cx, cy = _xy(vertex.position)
        lines.append(
            f'<circle data-vertex="{vertex.vertex}" cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(radius)}"/>'
        )
    lines.append("</g>")

    if show_lattice:
        lines.append(f'<g id="lattice" stroke="red" stroke-width="{_num(stroke)}">')
        for name, vector in (("w1", crystal.lattice.w1), ("w2", crystal.lattice.w2)):
            x, y = _xy(vector)
            lines.append(
                f'<line data-basis="{name}" x1="0" y1="0" x2="{_num(x)}" y2="{_num(y)}"'
                ' marker-end="url(#arrow)"/>'
            )
        lines.append("</g>")
        lines.insert(
            2,
            '<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5"'
            ' markerWidth="6" markerHeight="6" orient="auto">'
            '<path d="M0,0 L10,5 L0,10 z" fill="red"/></marker></defs>',
        )

    lines += ["</g>", "</svg>"]
    return "\n".join(lines) + "\n"


# ============================
#   PNG
# ============================

def _build_output_path(base_name: str) -> str:
    """
    Ruta única con timestamp, por ejemplo: out/kagome-20251209-193000.png
    """
    out_dir = config.output_dir()
    os.makedirs(out_dir, exist_ok=True)
    timestamp = datetime.now().strftime("%Y%m%d-%H%M%S")
    return os.path.abspath(os.path.join(out_dir, f"{base_name}-{timestamp}.png"))


def render_png(
    crystal: PlacedCrystal,
    base_name: str = "cristal",
    show_lattice: bool = False,
) -> str:
    plt.figure(figsize=(6, 6))
    for segment in crystal.segments:
        (x1, y1), (x2, y2) = _xy(segment.start), _xy(segment.end)
        plt.plot([x1, x2], [y1, y2], color="black", linewidth=1)

    xs = [_xy(v.position)[0] for v in crystal.vertices]
    ys = [_xy(v.position)[1] for v in crystal.vertices]
    plt.scatter(xs, ys, s=12, color="black", zorder=3)

    if show_lattice:
        for vector in (crystal.lattice.w1, crystal.lattice.w2):
            x, y = _xy(vector)
            plt.arrow(0, 0, x, y, color="red", length_includes_head=True, head_width=0.05)

    plt.gca().set_aspect("equal")
    plt.title(f"Realización estándar (ventana {crystal.window})")
    plt.grid(True, alpha=0.3)
    plt.tight_layout()

    output_path = _build_output_path(base_name)
    plt.savefig(output_path, dpi=config.PNG_DPI)
    plt.close()
    return output_path
