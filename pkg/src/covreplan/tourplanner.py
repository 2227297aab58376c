"""Transition planning and rank touring.

Given a set of ranks (and optionally retained sections of an earlier path),
build a generalized traveling-salesman instance whose sets are "traverse this
rank/section in one of its two directions", solve it with an adaptive
large-neighborhood search, and expand the tour into a drivable coverage path.

Coordinates are meters with x growing right and y growing down (matching map
row order); headings are radians in [0, 2pi) via atan2(dy, dx).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .rankplanner import Rank, RankSolution
from .worldmodel import Cell, Iop, Pose, RobotParams, World

SQRT2 = math.sqrt(2.0)


class Unreachable(RuntimeError):
    pass


class TourInfeasible(RuntimeError):
    pass


def motion_time(distance: float, params: RobotParams) -> float:
    """Point-to-point travel time with a stop at both ends: trapezoidal
    velocity profile, degenerating to triangular when the distance is too
    short to reach v_max."""
    if distance < 0:
        raise ValueError("negative distance")
    if distance == 0.0:
        return 0.0
    v, a = params.v_max, params.accel
    if distance >= v * v / a:
        return distance / v + v / a
    return 2.0 * math.sqrt(distance / a)


def turn_time(h_from: float, h_to: float, params: RobotParams) -> float:
    """In-place rotation through the smaller arc."""
    d = abs(h_to - h_from) % (2.0 * math.pi)
    if d > math.pi:
        d = 2.0 * math.pi - d
    return d / params.omega


def cell_center(cell: Cell, cell_size: float) -> tuple[float, float]:
    return ((cell[0] + 0.5) * cell_size, (cell[1] + 0.5) * cell_size)


def _heading(a: Cell, b: Cell) -> float:
    return math.atan2(b[1] - a[1], b[0] - a[0]) % (2.0 * math.pi)


# ---------------------------------------------------------------------------
# Transition planning
# ---------------------------------------------------------------------------

@dataclass
class TransitionPath:
    cells: tuple[Cell, ...]  # grid path, endpoints included
    segments: tuple[tuple[Cell, Cell, float], ...]  # maximal straight pieces
    time_cost: float


class TransitionPlanner:
    """Shortest 8-connected paths over the currently believed-free cells.

    One Dijkstra sweep per distinct source cell, memoized; edge weights are
    euclidean center distances, so returned paths are distance-optimal and
    the (small) turn costs are added afterwards.
    """

    def __init__(self, world: World):
        self.world = world
        cells = [(c, r) for r in range(world.height) for c in range(world.width)
                 if world.believed_free((c, r))]
        self.index = {c: i for i, c in enumerate(cells)}
        self.cells = cells
        n = len(cells)
        rows, cols, data = [], [], []
        for (c, r), i in self.index.items():
            for dc in (-1, 0, 1):
                for dr in (-1, 0, 1):
                    if dc == 0 and dr == 0:
                        continue
                    j = self.index.get((c + dc, r + dr))
                    if j is None:
                        continue
                    rows.append(i)
                    cols.append(j)
                    data.append(SQRT2 if dc and dr else 1.0)
        self.graph = csr_matrix((data, (rows, cols)), shape=(n, n))
        self._sources: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def _from(self, src: int) -> tuple[np.ndarray, np.ndarray]:
        hit = self._sources.get(src)
        if hit is None:
            dist, pred = dijkstra(self.graph, indices=src,
                                  return_predecessors=True)
            hit = (dist, pred)
            self._sources[src] = hit
        return hit

    def path_cells(self, src: Cell, dst: Cell) -> list[Cell] | None:
        i, j = self.index.get(src), self.index.get(dst)
        if i is None or j is None:
            return None
        dist, pred = self._from(i)
        if math.isinf(dist[j]):
            return None
        out = [dst]
        while j != i:
            j = pred[j]
            out.append(self.cells[j])
        out.reverse()
        return out

    def reachable(self, src: Cell, dst: Cell) -> bool:
        return self.path_cells(src, dst) is not None


def compress_segments(cells: list[Cell], cell_size: float
                      ) -> list[tuple[Cell, Cell, float]]:
    """Merge consecutive same-direction hops into maximal straight segments
    with euclidean length."""
    if len(cells) < 2:
        return []
    segs = []
    anchor = cells[0]
    direction = (cells[1][0] - cells[0][0], cells[1][1] - cells[0][1])
    prev = cells[1]
    for cur in cells[2:]:
        d = (cur[0] - prev[0], cur[1] - prev[1])
        if d != direction:
            segs.append((anchor, prev))
            anchor, direction = prev, d
        prev = cur
    segs.append((anchor, prev))
    out = []
    for a, b in segs:
        length = math.hypot(b[0] - a[0], b[1] - a[1]) * cell_size
        out.append((a, b, length))
    return out


def transition_time(cells: list[Cell], h_start: float, h_end: float,
                    params: RobotParams, cell_size: float) -> float:
    """Drive time along a grid path: per-segment motion plus every in-place
    turn, including initial and final heading alignment."""
    segs = compress_segments(cells, cell_size)
    if not segs:
        return turn_time(h_start, h_end, params)
    t = 0.0
    heading = h_start
    for a, b, length in segs:
        h = _heading(a, b)
        t += turn_time(heading, h, params) + motion_time(length, params)
        heading = h
    return t + turn_time(heading, h_end, params)


def plan_transition(world: World, frm: Pose, to: Pose, params: RobotParams,
                    planner: TransitionPlanner | None = None) -> TransitionPath:
    if planner is None:
        planner = TransitionPlanner(world)
    src = world.cell_at(frm.x, frm.y)
    dst = world.cell_at(to.x, to.y)
    cells = planner.path_cells(src, dst)
    if cells is None:
        raise Unreachable(f"no believed-free path {src} -> {dst}")
    t = transition_time(cells, frm.heading, to.heading, params,
                        world.cell_size)
    segs = tuple(compress_segments(cells, world.cell_size))
    return TransitionPath(tuple(cells), segs, t)


# ---------------------------------------------------------------------------
# Coverage paths
# ---------------------------------------------------------------------------

RANK_STEP = "rank"
TRANSITION_STEP = "transition"
DETOUR_STEP = "detour"


@dataclass
class PathStep:
    kind: str  # RANK_STEP / TRANSITION_STEP / DETOUR_STEP
    cells: tuple[Cell, ...]  # visited in order
    duration: float
    covers: bool
    rank: Rank | None = None
    reverse: bool = False

    @property
    def entry_heading(self) -> float:
        if len(self.cells) >= 2:
            return _heading(self.cells[0], self.cells[1])
        return 0.0

    @property
    def exit_heading(self) -> float:
        if len(self.cells) >= 2:
            return _heading(self.cells[-2], self.cells[-1])
        return 0.0


@dataclass
class CoveragePath:
    start: Pose
    steps: list[PathStep]
    unreachable: list[Rank] = field(default_factory=list)

    @property
    def cost(self) -> float:
        return sum(s.duration for s in self.steps)

    def rank_steps(self) -> list[PathStep]:
        return [s for s in self.steps if s.kind == RANK_STEP]

    def covered_cells(self) -> set[Cell]:
        out: set[Cell] = set()
        for s in self.steps:
            if s.covers:
                out.update(s.cells)
        return out


def rank_traversal_cells(rank: Rank, reverse: bool) -> tuple[Cell, ...]:
    return tuple(reversed(rank.cells)) if reverse else rank.cells


def rank_sweep_time(rank: Rank, params: RobotParams, cell_size: float) -> float:
    return motion_time((len(rank.cells) - 1) * cell_size, params)


# ---------------------------------------------------------------------------
# GTSP assembly
# ---------------------------------------------------------------------------

@dataclass
class Vertex:
    set_id: int
    entry_cell: Cell | None
    entry_heading: float
    exit_cell: Cell | None
    exit_heading: float
    internal_time: float
    payload: object = None  # Rank, section, or None for artificial vertices


@dataclass
class GtspInstance:
    sets: list[list[int]]  # vertex ids per set; sets[0]=start, sets[-1]=end
    vertices: list[Vertex]
    costs: np.ndarray  # directed, internal time charged on incoming edges
    excluded: list[Rank] = field(default_factory=list)


@dataclass
class Tour:
    vertex_ids: list[int]  # one per set, start first, end last
    total_cost: float


@dataclass
class Section:
    """A retained contiguous piece of an earlier path: rank traversals plus
    the transitions between them, reusable in either direction."""
    ranks: tuple[Rank, ...]
    reverses: tuple[bool, ...]


def _section_cells(sec: Section, reverse: bool) -> list[tuple[Rank, bool]]:
    items = list(zip(sec.ranks, sec.reverses))
    if reverse:
        items = [(r, not rv) for r, rv in reversed(items)]
    return items


def _section_internal_time(sec: Section, reverse: bool, planner: TransitionPlanner,
                           params: RobotParams, cell_size: float) -> float | None:
    items = _section_cells(sec, reverse)
    t = 0.0
    for idx, (rank, rv) in enumerate(items):
        cells = rank_traversal_cells(rank, rv)
        t += rank_sweep_time(rank, params, cell_size)
        if idx + 1 < len(items):
            nrank, nrv = items[idx + 1]
            ncells = rank_traversal_cells(nrank, nrv)
            hop = planner.path_cells(cells[-1], ncells[0])
            if hop is None:
                return None
            h_out = _heading(cells[-2], cells[-1]) if len(cells) > 1 else 0.0
            h_in = _heading(ncells[0], ncells[1]) if len(ncells) > 1 else h_out
            t += transition_time(hop, h_out, h_in, params, cell_size)
    return t


def retained_sections(old_path: CoveragePath, changed: set[RankPairLike],
                      unreachable: set) -> list[Section]:
    """Maximal contiguous subsequences of the old path's remaining rank
    traversals that are unchanged and still usable."""
    sections: list[Section] = []
    cur: list[tuple[Rank, bool]] = []
    for step in old_path.steps:
        if step.kind != RANK_STEP:
            continue
        ok = step.rank.pair not in changed and step.rank.pair not in unreachable
        if ok:
            cur.append((step.rank, step.reverse))
        elif cur:
            sections.append(Section(tuple(r for r, _ in cur),
                                    tuple(v for _, v in cur)))
            cur = []
    if cur:
        sections.append(Section(tuple(r for r, _ in cur),
                                tuple(v for _, v in cur)))
    return sections


RankPairLike = tuple  # (axis, first_cell, last_cell)


def build_gtsp(new_ranks: list[Rank], sections: list[Section], robot: Pose,
               world: World, params: RobotParams,
               planner: TransitionPlanner | None = None,
               end_cell: Cell | None = None) -> GtspInstance:
    """Two direction-vertices per rank and per retained section, an anchored
    start vertex, and a free (or depot) end vertex.  Ranks unreachable from
    the robot are excluded and reported."""
    if planner is None:
        planner = TransitionPlanner(world)
    l = world.cell_size
    start_cell = world.cell_at(robot.x, robot.y)

    vertices: list[Vertex] = []
    sets: list[list[int]] = []
    excluded: list[Rank] = []

    def add_set(vs: list[Vertex]) -> None:
        ids = []
        for v in vs:
            v.set_id = len(sets)
            ids.append(len(vertices))
            vertices.append(v)
        sets.append(ids)

    add_set([Vertex(0, None, robot.heading, start_cell, robot.heading, 0.0)])

    for rank in new_ranks:
        if not planner.reachable(start_cell, rank.first_cell):
            excluded.append(rank)
            continue
        pair = []
        sweep = rank_sweep_time(rank, params, l)
        for rv in (False, True):
            cells = rank_traversal_cells(rank, rv)
            if len(cells) > 1:
                h_in = _heading(cells[0], cells[1])
                h_out = _heading(cells[-2], cells[-1])
            else:
                h_in = h_out = 0.0
            pair.append(Vertex(0, cells[0], h_in, cells[-1], h_out, sweep,
                               payload=(rank, rv)))
        add_set(pair)

    for sec in sections:
        pair = []
        for rv in (False, True):
            items = _section_cells(sec, rv)
            first = rank_traversal_cells(*items[0])
            last = rank_traversal_cells(*items[-1])
            t = _section_internal_time(sec, rv, planner, params, l)
            if t is None:
                continue
            h_in = _heading(first[0], first[1]) if len(first) > 1 else 0.0
            h_out = _heading(last[-2], last[-1]) if len(last) > 1 else 0.0
            pair.append(Vertex(0, first[0], h_in, last[-1], h_out, t,
                               payload=(sec, rv)))
        if pair:
            add_set(pair)

    end = Vertex(0, end_cell, 0.0, end_cell, 0.0, 0.0)
    add_set([end])

    nv = len(vertices)
    costs = np.full((nv, nv), np.inf)
    for a, va in enumerate(vertices):
        for b, vb in enumerate(vertices):
            if a == b or va.set_id == vb.set_id:
                continue
            if vb.entry_cell is None:  # free end: zero incoming cost
                if end_cell is None:
                    costs[a, b] = 0.0
                    continue
            if va.exit_cell is None:
                continue
            target = vb.entry_cell
            hop = planner.path_cells(va.exit_cell, target)
            if hop is None:
                continue
            t = transition_time(hop, va.exit_heading, vb.entry_heading,
                                params, l)
            costs[a, b] = t + vb.internal_time
    # closing edge end -> start, cost 0 (makes the path a cycle formally)
    costs[sets[-1][0], sets[0][0]] = 0.0
    return GtspInstance(sets, vertices, costs, excluded)


# ---------------------------------------------------------------------------
# ALNS solver
# ---------------------------------------------------------------------------

COOLING = 0.9995
ITERS_PER_SECOND = 5000  # deadline -> deterministic iteration budget
MAX_ITERS = 60_000


def _tour_cost(inst: GtspInstance, order: list[int]) -> float:
    c = 0.0
    for a, b in zip(order, order[1:]):
        c += inst.costs[a, b]
    return c


def _greedy_tour(inst: GtspInstance) -> list[int] | None:
    """Nearest-neighbor construction over sets, best vertex per step."""
    start = inst.sets[0][0]
    end_ids = inst.sets[-1]
    order = [start]
    remaining = set(range(1, len(inst.sets) - 1))
    cur = start
    while remaining:
        best = None
        for si in remaining:
            for v in inst.sets[si]:
                c = inst.costs[cur, v]
                if math.isinf(c):
                    continue
                if best is None or c < best[0]:
                    best = (c, si, v)
        if best is None:
            return None
        _, si, v = best
        order.append(v)
        remaining.discard(si)
        cur = v
    ev = min(end_ids, key=lambda v: inst.costs[cur, v])
    if math.isinf(inst.costs[cur, ev]):
        return None
    order.append(ev)
    return order


def _best_insertion(inst: GtspInstance, order: list[int], set_ids: list[int],
                    si: int) -> tuple[float, int, int] | None:
    best = None
    for pos in range(1, len(order)):
        a, b = order[pos - 1], order[pos]
        for v in inst.sets[si]:
            delta = inst.costs[a, v] + inst.costs[v, b] - inst.costs[a, b]
            if math.isnan(delta) or math.isinf(delta):
                continue
            if best is None or delta < best[0]:
                best = (delta, pos, v)
    return best


def _best_vertices(inst: GtspInstance, order: list[int],
                   set_of: dict[int, int]) -> list[int]:
    """For a fixed set order, pick the jointly optimal vertex per set by a
    chain DP over positions (start and end vertices stay fixed)."""
    if len(order) <= 2:
        return order
    layers = [[order[0]]] + [inst.sets[set_of[v]] for v in order[1:-1]] \
        + [[order[-1]]]
    cost = {order[0]: 0.0}
    back: list[dict[int, int]] = [{}]
    for layer in layers[1:]:
        nxt: dict[int, float] = {}
        bk: dict[int, int] = {}
        for v in layer:
            cv, pv = math.inf, -1
            for u, cu in cost.items():
                c = cu + inst.costs[u, v]
                if c < cv:
                    cv, pv = c, u
            nxt[v] = cv
            bk[v] = pv
        cost, back = nxt, back + [bk]
    out = [order[-1]]
    for bk in reversed(back[1:]):
        out.append(bk[out[-1]])
    out.reverse()
    return out


def _local_improve(inst: GtspInstance, order: list[int],
                   set_of: dict[int, int]) -> list[int]:
    """Relocate each set to its cheapest position/vertex until no move helps."""
    improved = True
    while improved:
        improved = False
        refined = _best_vertices(inst, order, set_of)
        if _tour_cost(inst, refined) < _tour_cost(inst, order) - 1e-9:
            order = refined
            improved = True
            continue
        for pos in range(1, len(order) - 1):
            v = order[pos]
            si = set_of[v]
            trial = order[:pos] + order[pos + 1:]
            ins = _best_insertion(inst, trial, [], si)
            if ins is None:
                continue
            delta, at, u = ins
            old_delta = (inst.costs[order[pos - 1], v]
                         + inst.costs[v, order[pos + 1]]
                         - inst.costs[order[pos - 1], order[pos + 1]])
            if delta < old_delta - 1e-9:
                trial.insert(at, u)
                order = trial
                improved = True
                break
        if improved:
            continue
        base = _tour_cost(inst, order)
        for i in range(1, len(order) - 1):
            for j in range(i + 1, len(order) - 1):
                trial = order[:i] + order[i:j + 1][::-1] + order[j + 1:]
                # reversing flips the traversal direction: re-pick the best
                # vertex of each reversed set given its new neighbors
                for pos in range(i, j + 1):
                    a, b = trial[pos - 1], trial[pos + 1]
                    si = set_of[trial[pos]]
                    trial[pos] = min(inst.sets[si],
                                     key=lambda u: inst.costs[a, u]
                                     + inst.costs[u, b])
                c = _tour_cost(inst, trial)
                if c < base - 1e-9:
                    order = trial
                    improved = True
                    break
            if improved:
                break
    return order


def solve_gtsp(inst: GtspInstance, deadline: float = 1.0,
               seed: int = 0) -> Tour:
    """Adaptive large-neighborhood search with simulated-annealing acceptance.

    The iteration budget is derived from the deadline instead of polling the
    wall clock, keeping results reproducible for a fixed seed.
    """
    k = len(inst.sets)
    rng = random.Random(seed)
    greedy = _greedy_tour(inst)
    if greedy is None:
        raise TourInfeasible("no feasible tour: some set is unreachable")
    set_of = {v: s for s, ids in enumerate(inst.sets) for v in ids}
    if k <= 3:
        # at most one interior set: the set order is forced, so the chain DP
        # vertex choice is already exact
        refined = _best_vertices(inst, greedy, set_of)
        return Tour(refined, _tour_cost(inst, refined))

    cur = _local_improve(inst, greedy[:], set_of)
    cur_cost = _tour_cost(inst, cur)
    best, best_cost = cur[:], cur_cost
    temp = max(0.1 * cur_cost, 1e-6)
    iters = max(200, min(MAX_ITERS, int(deadline * ITERS_PER_SECOND)))
    if k > 12:
        # large instances: effort proportional to size, not to the deadline,
        # so frequent replans on big maps stay affordable
        iters = min(iters, 2000 + 100 * k)
    max_remove = max(1, min(6, math.ceil((k - 2) / 2)))
    stall = 0

    for _ in range(iters):
        order = cur[:]
        n_rm = rng.randint(1, max_remove)
        if rng.random() < 0.5:
            # contiguous segment removal
            lo = rng.randint(1, len(order) - 1 - n_rm) if len(order) - 1 - n_rm >= 1 else 1
            removed = order[lo:lo + n_rm]
            del order[lo:lo + n_rm]
        else:
            # worst-distance removal: drop the most expensive interior visits
            scored = []
            for pos in range(1, len(order) - 1):
                a, v, b = order[pos - 1], order[pos], order[pos + 1]
                scored.append((inst.costs[a, v] + inst.costs[v, b], pos))
            scored.sort(reverse=True)
            picks = sorted(pos for _, pos in scored[:n_rm])
            removed = [order[p] for p in picks]
            for p in reversed(picks):
                del order[p]
        rm_sets = [set_of[v] for v in removed]
        rng.shuffle(rm_sets)
        feasible = True
        if rng.random() < 0.8:
            for si in rm_sets:  # cheapest insertion
                ins = _best_insertion(inst, order, rm_sets, si)
                if ins is None:
                    feasible = False
                    break
                _, pos, v = ins
                order.insert(pos, v)
        else:
            for si in rm_sets:  # random position, best vertex there
                pos = rng.randint(1, len(order) - 1)
                a, b = order[pos - 1], order[pos]
                v = min(inst.sets[si],
                        key=lambda u: inst.costs[a, u] + inst.costs[u, b])
                order.insert(pos, v)
        temp *= COOLING
        if not feasible:
            continue
        cost = _tour_cost(inst, order)
        if math.isinf(cost):
            continue
        if k <= 24:  # cheap joint vertex re-choice for desk-scale instances
            order = _best_vertices(inst, order, set_of)
            cost = _tour_cost(inst, order)
        delta = cost - cur_cost
        if delta < 0 or rng.random() < math.exp(-delta / max(temp, 1e-12)):
            cur, cur_cost = order, cost
            if cost < best_cost - 1e-12:
                cur = _local_improve(inst, order, set_of)
                cur_cost = _tour_cost(inst, cur)
                if cur_cost < best_cost:
                    best, best_cost = cur[:], cur_cost
                stall = 0
        stall += 1
        if stall >= 800:
            # stagnation: restart from the incumbent; on small instances a
            # shuffled interior plus a full descent escapes deep local basins
            # (worth its quadratic cost only there)
            cur = best[:]
            if k <= 12:
                interior = cur[1:-1]
                rng.shuffle(interior)
                cur[1:-1] = interior
                cur = _local_improve(inst, cur, set_of)
                cur_cost = _tour_cost(inst, cur)
                if cur_cost < best_cost:
                    best, best_cost = cur[:], cur_cost
                temp = max(0.1 * cur_cost, 1e-6)
            else:
                cur_cost = best_cost
            stall = 0
    return Tour(best, best_cost)


# ---------------------------------------------------------------------------
# Tour expansion / TOUR-REPLAN
# ---------------------------------------------------------------------------

def expand_tour(inst: GtspInstance, tour: Tour, robot: Pose, world: World,
                params: RobotParams, planner: TransitionPlanner) -> CoveragePath:
    l = world.cell_size
    steps: list[PathStep] = []
    heading = robot.heading
    cur_cell = world.cell_at(robot.x, robot.y)
    for vid in tour.vertex_ids[1:]:
        v = inst.vertices[vid]
        if v.entry_cell is None:  # free end vertex
            break
        payload = v.payload
        items: list[tuple[Rank, bool]]
        if isinstance(payload[0], Section):
            items = _section_cells(payload[0], payload[1])
        else:
            items = [payload]
        for rank, rv in items:
            cells = rank_traversal_cells(rank, rv)
            hop = planner.path_cells(cur_cell, cells[0])
            if hop is None:
                raise Unreachable(f"tour expansion: {cur_cell} -> {cells[0]}")
            h_in = _heading(cells[0], cells[1]) if len(cells) > 1 else heading
            t = transition_time(hop, heading, h_in, params, l)
            steps.append(PathStep(TRANSITION_STEP, tuple(hop), t, False))
            sweep = rank_sweep_time(rank, params, l)
            steps.append(PathStep(RANK_STEP, cells, sweep, True, rank, rv))
            heading = _heading(cells[-2], cells[-1]) if len(cells) > 1 else h_in
            cur_cell = cells[-1]
    return CoveragePath(robot, steps, unreachable=list(inst.excluded))


def plan_tour(ranks: RankSolution, robot: Pose, world: World,
              params: RobotParams, deadline: float = 1.0, seed: int = 0,
              old_path: CoveragePath | None = None,
              planner: TransitionPlanner | None = None) -> CoveragePath:
    """Build a full coverage path visiting every rank of the solution.

    With an old path, unchanged remaining ranks are grouped into retained
    sections so the tour only reorders what actually changed.
    """
    if planner is None:
        planner = TransitionPlanner(world)
    if old_path is not None:
        old_pairs = {s.rank.pair for s in old_path.rank_steps()}
        sections = retained_sections(old_path, old_pairs - ranks.pairs(), set())
        in_sections = {r.pair for sec in sections for r in sec.ranks}
        new_ranks = [r for r in ranks.ranks if r.pair not in in_sections]
    else:
        new_ranks = list(ranks.ranks)
        sections = []
    inst = build_gtsp(new_ranks, sections, robot, world, params, planner)
    tour = solve_gtsp(inst, deadline, seed)
    return expand_tour(inst, tour, robot, world, params, planner)


def tour_replan(ranks: RankSolution, old_path: CoveragePath, robot: Pose,
                world: World, params: RobotParams, deadline: float = 1.0,
                seed: int = 0,
                planner: TransitionPlanner | None = None) -> CoveragePath:
    """Re-tour after a rank replan, reusing unchanged path sections."""
    return plan_tour(ranks, robot, world, params, deadline, seed,
                     old_path=old_path, planner=planner)
