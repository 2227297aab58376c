"""Grid environment: obstacles, cell grid extraction, sensing and coverage queries.

The environment is pre-rasterized to the tool grid (square cells of side equal
to the tool width).  Hidden obstacle cells look free to planners until the
robot's sensor reveals them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

Cell = tuple[int, int]  # (col, row)


class MapParseError(ValueError):
    """Raised for malformed map or scenario files; message names line/column."""


class NothingToCover(ValueError):
    """Raised when a grid extraction yields no free cells."""


class CellState(IntEnum):
    FREE = 0
    KNOWN_OBSTACLE = 1
    HIDDEN_OBSTACLE = 2
    REVEALED_OBSTACLE = 3


@dataclass
class World:
    """Rasterized environment with known, hidden and revealed obstacle cells."""

    width: int
    height: int
    cell_size: float
    grid: np.ndarray  # int8[height, width] of CellState values

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("world must be at least 1x1")
        if self.cell_size <= 0:
            raise ValueError("cell_size must be positive")
        if self.grid.shape != (self.height, self.width):
            raise ValueError("grid shape does not match width/height")

    def state(self, cell: Cell) -> CellState:
        col, row = cell
        return CellState(self.grid[row, col])

    def in_bounds(self, cell: Cell) -> bool:
        col, row = cell
        return 0 <= col < self.width and 0 <= row < self.height

    def believed_free(self, cell: Cell) -> bool:
        """Free according to current knowledge (hidden obstacles look free)."""
        s = self.grid[cell[1], cell[0]]
        return s == CellState.FREE or s == CellState.HIDDEN_OBSTACLE

    def truly_free(self, cell: Cell) -> bool:
        return self.grid[cell[1], cell[0]] == CellState.FREE

    def center(self, cell: Cell) -> tuple[float, float]:
        col, row = cell
        return ((col + 0.5) * self.cell_size, (row + 0.5) * self.cell_size)

    def cell_at(self, x: float, y: float) -> Cell:
        return (int(x // self.cell_size), int(y // self.cell_size))

    def copy(self) -> "World":
        return World(self.width, self.height, self.cell_size, self.grid.copy())


def normalize_heading(theta: float) -> float:
    theta = math.fmod(theta, 2.0 * math.pi)
    if theta < 0:
        theta += 2.0 * math.pi
    if theta >= 2.0 * math.pi:  # tiny negatives can round up to exactly 2*pi
        theta = 0.0
    return theta


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "heading", normalize_heading(self.heading))


@dataclass(frozen=True)
class RobotParams:
    tool_width: float
    v_max: float
    accel: float
    omega: float  # rad/s, turn-in-place
    sensor_radius: float

    def __post_init__(self):
        for name in ("tool_width", "v_max", "accel", "omega", "sensor_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


class Iop:
    """Indexed set of free grid cells with 4-neighbor adjacency.

    Cells are stored in row-major order; indices are dense 0..n-1 (a fixed
    ordering keeps LP variable layout reproducible).  Neighbor arrays hold the
    neighbor's index or -1 when the neighbor is not a member cell.
    """

    __slots__ = ("cells", "index", "left", "right", "up", "down")

    def __init__(self, cells: list[Cell]):
        if not cells:
            raise NothingToCover("nothing to cover: empty free cell set")
        if len(set(cells)) != len(cells):
            raise ValueError("duplicate cells in IOP")
        self.cells: tuple[Cell, ...] = tuple(sorted(cells, key=lambda c: (c[1], c[0])))
        self.index: dict[Cell, int] = {c: i for i, c in enumerate(self.cells)}
        n = len(self.cells)
        self.left = np.full(n, -1, dtype=np.int64)
        self.right = np.full(n, -1, dtype=np.int64)
        self.up = np.full(n, -1, dtype=np.int64)
        self.down = np.full(n, -1, dtype=np.int64)
        for i, (col, row) in enumerate(self.cells):
            j = self.index.get((col - 1, row))
            if j is not None:
                self.left[i] = j
            j = self.index.get((col + 1, row))
            if j is not None:
                self.right[i] = j
            j = self.index.get((col, row - 1))
            if j is not None:
                self.up[i] = j
            j = self.index.get((col, row + 1))
            if j is not None:
                self.down[i] = j

    @property
    def n(self) -> int:
        return len(self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def __contains__(self, cell: Cell) -> bool:
        return cell in self.index


_MAP_CHARS = {
    ".": CellState.FREE,
    "#": CellState.KNOWN_OBSTACLE,
    "o": CellState.HIDDEN_OBSTACLE,
}


def load_map(text: str) -> World:
    """Parse the text map format into a World.

    Format: header line ``oarp-map v1 <width> <height> <cell_size_m>`` then
    exactly <height> rows of <width> characters ('.', '#', 'o').
    """
    lines = text.splitlines()
    if not lines:
        raise MapParseError("line 1: empty map file")
    header = lines[0].split()
    if len(header) != 5 or header[0] != "oarp-map" or header[1] != "v1":
        raise MapParseError("line 1: malformed header, expected "
                            "'oarp-map v1 <width> <height> <cell_size_m>'")
    try:
        width, height = int(header[2]), int(header[3])
        cell_size = float(header[4])
    except ValueError as exc:
        raise MapParseError(f"line 1: bad header numbers: {exc}") from None
    if width < 1 or height < 1 or cell_size <= 0:
        raise MapParseError("line 1: width/height must be >= 1 and cell size > 0")
    rows = lines[1:]
    if len(rows) < height:
        raise MapParseError(f"line {len(lines)}: expected {height} map rows, "
                            f"got {len(rows)}")
    grid = np.zeros((height, width), dtype=np.int8)
    for r in range(height):
        line = rows[r]
        if len(line) != width:
            raise MapParseError(f"line {r + 2}: row has {len(line)} characters, "
                                f"expected {width}")
        for c, ch in enumerate(line):
            try:
                grid[r, c] = _MAP_CHARS[ch]
            except KeyError:
                raise MapParseError(f"line {r + 2}, column {c + 1}: "
                                    f"unknown character {ch!r}") from None
    return World(width, height, cell_size, grid)


def dump_map(world: World) -> str:
    """Inverse of load_map (revealed obstacles are written as hidden)."""
    back = {CellState.FREE: ".", CellState.KNOWN_OBSTACLE: "#",
            CellState.HIDDEN_OBSTACLE: "o", CellState.REVEALED_OBSTACLE: "o"}
    lines = [f"oarp-map v1 {world.width} {world.height} {world.cell_size:g}"]
    for r in range(world.height):
        lines.append("".join(back[CellState(world.grid[r, c])]
                             for c in range(world.width)))
    return "\n".join(lines) + "\n"


_SCENARIO_KEYS = ("start_x", "start_y", "heading_deg", "v_max", "accel",
                  "omega_deg", "tool_w", "sensor_r", "seed")


@dataclass
class Scenario:
    start: Pose
    params: RobotParams
    seed: int


def load_scenario(text: str) -> Scenario:
    """Parse a ``key value`` per line scenario file."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MapParseError(f"line {lineno}: expected 'key value'")
        key, val = parts
        if key not in _SCENARIO_KEYS:
            raise MapParseError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = float(val)
        except ValueError:
            raise MapParseError(f"line {lineno}: bad number {val!r}") from None
    missing = [k for k in _SCENARIO_KEYS if k not in values]
    if missing:
        raise MapParseError(f"missing scenario keys: {', '.join(missing)}")
    start = Pose(values["start_x"], values["start_y"],
                 math.radians(values["heading_deg"]))
    params = RobotParams(
        tool_width=values["tool_w"],
        v_max=values["v_max"],
        accel=values["accel"],
        omega=math.radians(values["omega_deg"]),
        sensor_radius=values["sensor_r"],
    )
    return Scenario(start, params, int(values["seed"]))


def dump_scenario(sc: Scenario) -> str:
    lines = [
        f"start_x {sc.start.x:g}",
        f"start_y {sc.start.y:g}",
        f"heading_deg {math.degrees(sc.start.heading):g}",
        f"v_max {sc.params.v_max:g}",
        f"accel {sc.params.accel:g}",
        f"omega_deg {math.degrees(sc.params.omega):g}",
        f"tool_w {sc.params.tool_width:g}",
        f"sensor_r {sc.params.sensor_radius:g}",
        f"seed {sc.seed}",
    ]
    return "\n".join(lines) + "\n"


def extract_iop(world: World, include_hidden_as_free: bool = True) -> Iop:
    """Build the IOP over all cells currently believed free (row-major order)."""
    cells: list[Cell] = []
    for row in range(world.height):
        for col in range(world.width):
            s = world.grid[row, col]
            if s == CellState.FREE:
                cells.append((col, row))
            elif s == CellState.HIDDEN_OBSTACLE and include_hidden_as_free:
                cells.append((col, row))
    if not cells:
        raise NothingToCover("nothing to cover")
    return Iop(cells)


def sense(world: World, pose: Pose, params: RobotParams) -> list[Cell]:
    """Reveal hidden obstacle cells whose center is within sensor range.

    Mutates the world; returns the newly revealed cells.  Idempotent: cells
    already revealed are not returned again.
    """
    revealed: list[Cell] = []
    r = params.sensor_radius
    c0 = max(0, int((pose.x - r) / world.cell_size) - 1)
    c1 = min(world.width - 1, int((pose.x + r) / world.cell_size) + 1)
    r0 = max(0, int((pose.y - r) / world.cell_size) - 1)
    r1 = min(world.height - 1, int((pose.y + r) / world.cell_size) + 1)
    for row in range(r0, r1 + 1):
        for col in range(c0, c1 + 1):
            if world.grid[row, col] != CellState.HIDDEN_OBSTACLE:
                continue
            cx, cy = world.center((col, row))
            if math.hypot(cx - pose.x, cy - pose.y) <= r:
                world.grid[row, col] = CellState.REVEALED_OBSTACLE
                revealed.append((col, row))
    return revealed


def uncovered_region(iop: Iop, covered: set[Cell], revealed: set[Cell]) -> Iop | None:
    """IOP over remaining cells; None signals coverage complete."""
    remaining = [c for c in iop.cells if c not in covered and c not in revealed]
    if not remaining:
        return None
    return Iop(remaining)


def reachable_cells(world: World, start: Cell, believed: bool = True) -> set[Cell]:
    """Flood fill (4-connected) over free cells from start."""
    ok = world.believed_free if believed else world.truly_free
    if not world.in_bounds(start) or not ok(start):
        return set()
    seen = {start}
    stack = [start]
    while stack:
        col, row = stack.pop()
        for nb in ((col - 1, row), (col + 1, row), (col, row - 1), (col, row + 1)):
            if nb not in seen and world.in_bounds(nb) and ok(nb):
                seen.add(nb)
                stack.append(nb)
    return seen
