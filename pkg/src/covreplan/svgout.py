"""Self-contained SVG rendering of worlds, paths, and coverage."""

from __future__ import annotations

from .tourplanner import CoveragePath, DETOUR_STEP, RANK_STEP, TRANSITION_STEP
from .worldmodel import Cell, CellState, World

SCALE = 20  # px per cell

_STATE_FILL = {
    int(CellState.KNOWN_OBSTACLE): "#33373d",
    int(CellState.HIDDEN_OBSTACLE): "#e8b84b",
    int(CellState.REVEALED_OBSTACLE): "#d14b4b",
}

_STEP_STYLE = {
    RANK_STEP: ("#2563c9", 3.0, None),
    TRANSITION_STEP: ("#888888", 1.5, "6,4"),
    DETOUR_STEP: ("#8b3fc9", 2.0, "2,3"),
}


def _px(cell: Cell) -> tuple[float, float]:
    return (cell[0] + 0.5) * SCALE, (cell[1] + 0.5) * SCALE


def render_svg(world: World, path: CoveragePath | None = None,
               covered: set[Cell] | None = None) -> str:
    w_px, h_px = world.width * SCALE, world.height * SCALE
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w_px}" '
           f'height="{h_px}" viewBox="0 0 {w_px} {h_px}">',
           f'<rect width="{w_px}" height="{h_px}" fill="#f7f7f2"/>']

    out.append('<g id="covered">')
    for cell in sorted(covered or ()):
        x, y = cell[0] * SCALE, cell[1] * SCALE
        out.append(f'<rect x="{x}" y="{y}" width="{SCALE}" height="{SCALE}" '
                   f'fill="#bfe3bf"/>')
    out.append('</g>')

    out.append('<g id="obstacles">')
    for r in range(world.height):
        for c in range(world.width):
            fill = _STATE_FILL.get(int(world.grid[r, c]))
            if fill:
                out.append(f'<rect x="{c * SCALE}" y="{r * SCALE}" '
                           f'width="{SCALE}" height="{SCALE}" fill="{fill}"/>')
    out.append('</g>')

    out.append(f'<g id="grid" stroke="#d8d8d0" stroke-width="0.5">')
    for c in range(world.width + 1):
        out.append(f'<line x1="{c * SCALE}" y1="0" x2="{c * SCALE}" '
                   f'y2="{h_px}"/>')
    for r in range(world.height + 1):
        out.append(f'<line x1="0" y1="{r * SCALE}" x2="{w_px}" '
                   f'y2="{r * SCALE}"/>')
    out.append('</g>')

    if path is not None:
        for kind in (TRANSITION_STEP, DETOUR_STEP, RANK_STEP):
            color, width, dash = _STEP_STYLE[kind]
            out.append(f'<g id="{kind}" stroke="{color}" fill="none" '
                       f'stroke-width="{width}"'
                       + (f' stroke-dasharray="{dash}"' if dash else "")
                       + '>')
            for step in path.steps:
                if step.kind != kind or len(step.cells) < 2:
                    continue
                pts = " ".join(f"{x:.1f},{y:.1f}"
                               for x, y in map(_px, step.cells))
                out.append(f'<polyline points="{pts}"/>')
            out.append('</g>')
        sx, sy = _px(world.cell_at(path.start.x, path.start.y))
        out.append(f'<circle cx="{sx}" cy="{sy}" r="{SCALE * 0.3:.1f}" '
                   f'fill="#1a9850"/>')

    out.append('</svg>')
    return "\n".join(out)
