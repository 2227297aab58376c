"""Rank optimization: build the orientation/endpoint models, replan ranks
under a new-rank budget, and account for endpoint changes.

Variable layout of every model built here (n = IOP cell count):
  x_H: 0..n-1, x_V: n..2n-1, y_L: 2n..3n-1, y_R: 3n..4n-1,
  y_T: 4n..5n-1, y_B: 5n..6n-1; extension variables follow.
Rank identity is the (axis, first-cell, last-cell) coordinate pair, which is
stable across regrids and is what "new rank" accounting compares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import lpsolve
from .flowgraphs import HORIZONTAL, VERTICAL, FlowMatrices, Run, build_flow_matrices, runs
from .lpsolve import EQ, GE, LE, LpModel, LpSolution, Status
from .worldmodel import Cell, Iop

RankPair = tuple[str, Cell, Cell]


class RankConsistencyError(RuntimeError):
    """Endpoint flags disagree with orientations (indicates a solver bug)."""


@dataclass(frozen=True)
class Rank:
    axis: str
    cells: tuple[Cell, ...]  # coordinates in axis order (left->right / top->bottom)

    @property
    def first_cell(self) -> Cell:
        return self.cells[0]

    @property
    def last_cell(self) -> Cell:
        return self.cells[-1]

    @property
    def pair(self) -> RankPair:
        return (self.axis, self.cells[0], self.cells[-1])

    def __len__(self) -> int:
        return len(self.cells)


@dataclass
class RankSolution:
    orientations: dict[Cell, str]  # H or V per cell
    y_l: set[Cell]
    y_r: set[Cell]
    y_t: set[Cell]
    y_b: set[Cell]
    ranks: list[Rank]
    m: int
    m_new: int | None = None  # vs. a reference solution, when applicable
    lp_integral: bool = True  # relaxation came back integral (no branching)

    def pairs(self) -> set[RankPair]:
        return {r.pair for r in self.ranks}

    def endpoint_flags(self, cell: Cell) -> tuple[bool, bool, bool, bool]:
        return (cell in self.y_l, cell in self.y_r,
                cell in self.y_t, cell in self.y_b)


@dataclass(frozen=True)
class EndpointDelta:
    alpha: int  # added endpoints
    beta: int  # extended endpoints
    beta_flags: frozenset[tuple[Cell, str]]  # (cell, one of L/R/T/B)

    @property
    def bound(self) -> float:
        return self.alpha + self.beta / 2.0


@dataclass(frozen=True)
class Budget:
    m_bar: int

    def __post_init__(self):
        if self.m_bar < 0:
            raise ValueError("rank budget must be >= 0")

    @property
    def epsilon(self) -> float:
        return 1.0 / (self.m_bar + 1)


# ---------------------------------------------------------------------------
# Model builders
# ---------------------------------------------------------------------------

def build_milp0(iop: Iop, flows: FlowMatrices) -> LpModel:
    """Rank-count minimization core: orientations, endpoint rows, one
    orientation per cell; objective = half the endpoint sum."""
    n = iop.n
    model = LpModel()
    for tag in ("xH", "xV"):
        for i in range(n):
            model.add_var(f"{tag}_{i}", 0.0, 1.0, 0.0, integer=True)
    for tag in ("yL", "yR", "yT", "yB"):
        for i in range(n):
            model.add_var(f"{tag}_{i}", 0.0, 1.0, 0.5, integer=True)

    def x_idx(i: int, axis: str) -> int:
        return i if axis == HORIZONTAL else n + i

    rows_and_y = (
        (flows.a_l, 2 * n, HORIZONTAL),
        (flows.a_r, 3 * n, HORIZONTAL),
        (flows.a_t, 4 * n, VERTICAL),
        (flows.a_b, 5 * n, VERTICAL),
    )
    for rows, y_base, axis in rows_and_y:
        for i in range(n):
            coeffs = [(x_idx(j, axis), c) for j, c in rows[i]]
            coeffs.append((y_base + i, -1.0))
            model.add_constraint(coeffs, LE, 0.0)
    for i in range(n):
        model.add_constraint([(i, 1.0), (n + i, 1.0)], EQ, 1.0)
    return model


def _run_pairs(run: Run) -> list[tuple[int, int]]:
    """All (start, end) position pairs within a run, self-pairs included."""
    L = len(run.cells)
    return [(a, b) for a in range(L) for b in range(a, L)]


def build_milp1(iop: Iop, flows: FlowMatrices, runs_h: list[Run],
                runs_v: list[Run], old: RankSolution, budget: Budget) -> LpModel:
    """Core model plus per-run endpoint matching and the new-rank budget.

    A matching variable exists for every ordered cell pair of a run; it is
    forced to 1 exactly when the solution contains a rank with those
    endpoints.  Pairs absent from the old solution count toward the budget.
    """
    n = iop.n
    model = build_milp0(iop, flows)
    eps = budget.epsilon
    old_pairs = old.pairs()
    new_terms: list[tuple[int, float]] = []
    pair_map: dict[RankPair, int] = {}

    for axis, run_list, y_first_base, y_second_base in (
            (HORIZONTAL, runs_h, 2 * n, 3 * n),
            (VERTICAL, runs_v, 4 * n, 5 * n)):
        for run in run_list:
            L = len(run.cells)
            zidx = {}
            for a, b in _run_pairs(run):
                ca = iop.cells[run.cells[a]]
                cb = iop.cells[run.cells[b]]
                is_old = (axis, ca, cb) in old_pairs
                obj = 0.0 if is_old else eps
                v = model.add_var(f"z{axis}_{run.cells[a]}_{run.cells[b]}",
                                  0.0, 1.0, obj, integer=True)
                zidx[(a, b)] = v
                pair_map[(axis, ca, cb)] = v
                if not is_old:
                    new_terms.append((v, 1.0))
            for a in range(L):
                i = run.cells[a]
                # start-endpoint matching: sum over ends at-or-after a
                coeffs = [(zidx[(a, b)], 1.0) for b in range(a, L)]
                coeffs.append((y_first_base + i, -1.0))
                model.add_constraint(coeffs, EQ, 0.0)
                # end-endpoint matching: sum over starts at-or-before a
                coeffs = [(zidx[(b, a)], 1.0) for b in range(a + 1)]
                coeffs.append((y_second_base + i, -1.0))
                model.add_constraint(coeffs, EQ, 0.0)
                # interval cover: the chosen pairs partition the cells that
                # take this axis, which rules out overlapping tie solutions
                coeffs = [(zidx[(s, e)], 1.0)
                          for s in range(a + 1) for e in range(a, L) if s <= e]
                x = i if axis == HORIZONTAL else n + i
                coeffs.append((x, -1.0))
                model.add_constraint(coeffs, EQ, 0.0)

    if new_terms:
        model.add_constraint(list(new_terms), LE, float(budget.m_bar))
    model.z_pairs = pair_map
    return model


def restrict_endpoints(old: RankSolution, iop: Iop) -> tuple[set[Cell], ...]:
    """Old endpoint flags restricted to cells surviving in the new IOP."""
    keep = set(iop.cells)
    return (old.y_l & keep, old.y_r & keep, old.y_t & keep, old.y_b & keep)


def build_milp2(iop: Iop, flows: FlowMatrices,
                old_flags: tuple[set[Cell], set[Cell], set[Cell], set[Cell]],
                budget: Budget) -> LpModel:
    """Core model plus extended-endpoint variables; the budget is enforced on
    the added/extended endpoint bound rather than the exact new-rank count."""
    n = iop.n
    model = build_milp0(iop, flows)
    eps = budget.epsilon
    bar_l, bar_r, bar_t, bar_b = old_flags
    budget_terms: list[tuple[int, float]] = []
    beta_rows: list[tuple[int, float, int, int]] = []

    groups = (
        ("bL", bar_l, 2 * n, HORIZONTAL),
        ("bR", bar_r, 3 * n, HORIZONTAL),
        ("bT", bar_t, 4 * n, VERTICAL),
        ("bB", bar_b, 5 * n, VERTICAL),
    )
    for tag, bar, y_base, axis in groups:
        for i in range(n):
            cell = iop.cells[i]
            was = 1.0 if cell in bar else 0.0
            if was == 0.0:
                # added endpoint: contributes to alpha
                model.obj[y_base + i] += eps
                budget_terms.append((y_base + i, 1.0))
        for i in range(n):
            cell = iop.cells[i]
            was = 1.0 if cell in bar else 0.0
            b = model.add_var(f"{tag}_{i}", 0.0, 1.0, eps / 2.0, integer=True)
            budget_terms.append((b, 0.5))
            x = i if axis == HORIZONTAL else n + i
            # beta >= was*(1 - y) + (x - 1)
            model.add_constraint([(b, 1.0), (y_base + i, was), (x, -1.0)],
                                 GE, was - 1.0)
            beta_rows.append((b, was, y_base + i, x))

    model.add_constraint(budget_terms, LE, float(budget.m_bar))
    _add_flag_cut_rows(iop, model)
    model.beta_rows = beta_rows
    return model


def _add_flag_cut_rows(iop: Iop, model: LpModel) -> None:
    """Upper bounds that let an endpoint flag appear only where a rank truly
    starts or ends: at an orientation boundary, or at a deliberate split whose
    partner flag is set on the neighbor.  Without these, a budget row can make
    it profitable to raise a flag mid-rank, which breaks endpoint parity.
    """
    n = iop.n
    groups = (
        (2 * n, iop.left, 3 * n, 0),   # start flag <-> end flag on left (H)
        (3 * n, iop.right, 2 * n, 0),  # end flag <-> start flag on right (H)
        (4 * n, iop.up, 5 * n, n),     # start flag <-> end flag above (V)
        (5 * n, iop.down, 4 * n, n),   # end flag <-> start flag below (V)
    )
    for y_base, nbr, partner_base, x_base in groups:
        for i in range(n):
            model.add_constraint([(y_base + i, 1.0), (x_base + i, -1.0)],
                                 LE, 0.0)
            j = int(nbr[i])
            if j >= 0:
                model.add_constraint(
                    [(y_base + i, 1.0), (x_base + i, -1.0),
                     (x_base + j, 1.0), (partner_base + j, -1.0)], LE, 0.0)


# ---------------------------------------------------------------------------
# Extraction and accounting
# ---------------------------------------------------------------------------

def _flag(values: np.ndarray, idx: int) -> bool:
    return values[idx] > 0.5


def extract_ranks(iop: Iop, values: np.ndarray) -> RankSolution:
    """Read ranks from integral orientation/endpoint values.

    Cuts each axis run at flagged endpoints and never re-merges across a
    flagged endpoint pair, preserving deliberately split ranks.
    """
    n = iop.n
    orient: dict[Cell, str] = {}
    for i in range(n):
        xh, xv = values[i], values[n + i]
        if abs(xh + xv - 1.0) > 1e-4:
            raise RankConsistencyError(f"cell {iop.cells[i]}: orientation sum "
                                       f"{xh + xv:.3f} != 1")
        orient[iop.cells[i]] = HORIZONTAL if xh > 0.5 else VERTICAL

    flag_sets = {k: set() for k in ("L", "R", "T", "B")}
    bases = {"L": 2 * n, "R": 3 * n, "T": 4 * n, "B": 5 * n}
    for k, base in bases.items():
        for i in range(n):
            if _flag(values, base + i):
                flag_sets[k].add(iop.cells[i])

    ranks: list[Rank] = []
    for axis, first_k, second_k in ((HORIZONTAL, "L", "R"), (VERTICAL, "T", "B")):
        first, second = flag_sets[first_k], flag_sets[second_k]
        for run in runs(iop, axis):
            open_cells: list[Cell] | None = None
            for idx in run.cells:
                cell = iop.cells[idx]
                if orient[cell] != axis:
                    if open_cells is not None:
                        raise RankConsistencyError(
                            f"run on {axis}: rank open at {cell} but "
                            f"orientation flips")
                    continue
                if open_cells is None:
                    if cell not in first:
                        raise RankConsistencyError(
                            f"{axis} segment starts at {cell} without a "
                            f"start-endpoint flag")
                    open_cells = [cell]
                else:
                    if cell in first:
                        raise RankConsistencyError(
                            f"unexpected start-endpoint flag inside rank at {cell}")
                    open_cells.append(cell)
                if cell in second:
                    ranks.append(Rank(axis, tuple(open_cells)))
                    open_cells = None
            if open_cells is not None:
                raise RankConsistencyError(
                    f"{axis} run ends with an unclosed rank at {open_cells[-1]}")

    total_flags = sum(len(s) for s in flag_sets.values())
    if total_flags % 2 != 0 or len(ranks) != total_flags // 2:
        raise RankConsistencyError(
            f"endpoint parity violation: {total_flags} flags for "
            f"{len(ranks)} ranks")
    return RankSolution(orient, flag_sets["L"], flag_sets["R"],
                        flag_sets["T"], flag_sets["B"], ranks, len(ranks))


def solution_from_orientations(iop: Iop, orient: dict[Cell, str],
                               splits: set[tuple[Cell, Cell]] | None = None
                               ) -> RankSolution:
    """Build a RankSolution by maximal merging of same-oriented neighbors,
    optionally cutting between the given adjacent cell pairs."""
    splits = splits or set()
    ranks: list[Rank] = []
    for axis in (HORIZONTAL, VERTICAL):
        for run in runs(iop, axis):
            open_cells: list[Cell] = []
            for idx in run.cells:
                cell = iop.cells[idx]
                if orient[cell] != axis:
                    if open_cells:
                        ranks.append(Rank(axis, tuple(open_cells)))
                        open_cells = []
                    continue
                if open_cells and (open_cells[-1], cell) in splits:
                    ranks.append(Rank(axis, tuple(open_cells)))
                    open_cells = []
                open_cells.append(cell)
            if open_cells:
                ranks.append(Rank(axis, tuple(open_cells)))
    y_l, y_r, y_t, y_b = set(), set(), set(), set()
    for r in ranks:
        if r.axis == HORIZONTAL:
            y_l.add(r.first_cell)
            y_r.add(r.last_cell)
        else:
            y_t.add(r.first_cell)
            y_b.add(r.last_cell)
    return RankSolution(dict(orient), y_l, y_r, y_t, y_b, ranks, len(ranks))


def solution_from_ranks(ranks: list[Rank]) -> RankSolution:
    """Reassemble a RankSolution from bare ranks (e.g. the remaining ranks of
    a partially executed path) so it can serve as a replanning reference."""
    orient: dict[Cell, str] = {}
    y_l, y_r, y_t, y_b = set(), set(), set(), set()
    for r in ranks:
        for c in r.cells:
            orient[c] = r.axis
        if r.axis == HORIZONTAL:
            y_l.add(r.first_cell)
            y_r.add(r.last_cell)
        else:
            y_t.add(r.first_cell)
            y_b.add(r.last_cell)
    return RankSolution(orient, y_l, y_r, y_t, y_b, list(ranks), len(ranks))


def exact_new_ranks(new: RankSolution, old: RankSolution) -> int:
    """Count of new-solution ranks whose endpoint-pair identity is not in old."""
    old_pairs = old.pairs()
    return sum(1 for r in new.ranks if r.pair not in old_pairs)


def compute_endpoint_delta(new: RankSolution, old: RankSolution,
                           iop: Iop) -> EndpointDelta:
    """Added/extended endpoint counts of new vs. old (restricted to iop cells)."""
    bar_l, bar_r, bar_t, bar_b = restrict_endpoints(old, iop)
    alpha = 0
    beta_flags: set[tuple[Cell, str]] = set()
    groups = (
        ("L", bar_l, new.y_l, HORIZONTAL),
        ("R", bar_r, new.y_r, HORIZONTAL),
        ("T", bar_t, new.y_t, VERTICAL),
        ("B", bar_b, new.y_b, VERTICAL),
    )
    for tag, bar, now, axis in groups:
        for cell in iop.cells:
            was, is_now = cell in bar, cell in now
            if is_now and not was:
                alpha += 1
            elif was and not is_now and new.orientations[cell] == axis:
                beta_flags.add((cell, tag))
    return EndpointDelta(alpha, len(beta_flags), frozenset(beta_flags))


# ---------------------------------------------------------------------------
# Warm starts
# ---------------------------------------------------------------------------

def heuristic_solution(iop: Iop, old: RankSolution | None = None) -> RankSolution:
    """Quick feasible rank plan used to crash-start the solver: keep the
    reference orientation where one exists (cutting at reference endpoints so
    those ranks keep their identity), otherwise orient each cell along the
    longer straight segment through it."""
    h_len: dict[Cell, int] = {}
    v_len: dict[Cell, int] = {}
    for axis, table in ((HORIZONTAL, h_len), (VERTICAL, v_len)):
        for run in runs(iop, axis):
            for idx in run.cells:
                table[iop.cells[idx]] = len(run.cells)
    orient: dict[Cell, str] = {}
    for cell in iop.cells:
        if old is not None and cell in old.orientations:
            orient[cell] = old.orientations[cell]
        else:
            orient[cell] = HORIZONTAL if h_len[cell] >= v_len[cell] else VERTICAL
    splits: set[tuple[Cell, Cell]] = set()
    if old is not None:
        in_iop = set(iop.cells)
        for r in old.ranks:
            last = r.last_cell
            if last not in in_iop:
                continue
            nxt = ((last[0] + 1, last[1]) if r.axis == HORIZONTAL
                   else (last[0], last[1] + 1))
            if nxt in in_iop and orient.get(nxt) == r.axis:
                splits.add((last, nxt))
    return solution_from_orientations(iop, orient, splits)


def warm_values(iop: Iop, model: LpModel, sol: RankSolution) -> np.ndarray:
    """Vectorize a rank plan onto the model's variable layout (unknown
    extension variables default to zero; matching variables are filled when
    the model advertises them via z_pairs)."""
    n = iop.n
    index = {c: i for i, c in enumerate(iop.cells)}
    w = np.zeros(model.nvars)
    for cell, ax in sol.orientations.items():
        i = index[cell]
        w[i if ax == HORIZONTAL else n + i] = 1.0
    for base, flag_set in ((2 * n, sol.y_l), (3 * n, sol.y_r),
                           (4 * n, sol.y_t), (5 * n, sol.y_b)):
        for cell in flag_set:
            w[base + index[cell]] = 1.0
    z_pairs = getattr(model, "z_pairs", None)
    if z_pairs:
        for r in sol.ranks:
            v = z_pairs.get(r.pair)
            if v is not None:
                w[v] = 1.0
    for b, was, y_idx, x_idx in getattr(model, "beta_rows", ()):
        w[b] = max(0.0, was * (1.0 - w[y_idx]) + w[x_idx] - 1.0)
    return w


# ---------------------------------------------------------------------------
# Solving
# ---------------------------------------------------------------------------

@dataclass
class SolveStats:
    lp_integral: bool = True
    lp_calls: int = 0
    bnb_calls: int = 0


def solve_rank_model(model: LpModel, deadline: float | None = None,
                     stats: SolveStats | None = None,
                     warm: np.ndarray | None = None) -> LpSolution:
    """LP relaxation first; branch and bound only when fractional."""
    sol = lpsolve.solve_lp(model, deadline, warm=warm)
    if stats is not None:
        stats.lp_calls += 1
    if sol.status is Status.OPTIMAL and not sol.is_integral:
        if stats is not None:
            stats.lp_integral = False
            stats.bnb_calls += 1
        sol = lpsolve.solve_integral(model, deadline)
    return sol


LP_EXACT_LIMIT = 200  # cells; larger regions use the min-cut reduction


def mincut_ranks(iop: Iop,
                 prefer: dict[Cell, str] | None = None) -> RankSolution:
    """Exact minimum-rank plan via a minimum s-t cut.

    The rank count equals the number of segment starts: a cell starts a rank
    when it is oriented along an axis and its predecessor on that axis is
    absent or oriented the other way.  With one binary per cell (horizontal =
    source side) every such penalty is a submodular pairwise or unary term,
    so the minimum is a min-cut of a small directed graph.

    When orientation preferences are given, real penalties are scaled up and
    a unit penalty is charged per dispreferred cell, so the result has the
    minimum rank count and, among those, the fewest preference violations.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import breadth_first_order, maximum_flow

    n = iop.n
    src, snk = n, n + 1
    scale = n + 1 if prefer else 1
    rows: list[int] = []
    cols: list[int] = []
    caps: list[int] = []
    for i in range(n):
        left, up = int(iop.left[i]), int(iop.up[i])
        # horizontal rank start at i: cut i -> (left | sink)
        rows.append(i)
        cols.append(left if left >= 0 else snk)
        caps.append(scale)
        # vertical rank start at i: cut (up | source) -> i
        rows.append(up if up >= 0 else src)
        cols.append(i)
        caps.append(scale)
        want = None if prefer is None else prefer.get(iop.cells[i])
        if want == HORIZONTAL:  # penalize landing on the sink (vertical) side
            rows.append(src)
            cols.append(i)
            caps.append(1)
        elif want == VERTICAL:
            rows.append(i)
            cols.append(snk)
            caps.append(1)
    graph = csr_matrix((np.array(caps, dtype=np.int32), (rows, cols)),
                       shape=(n + 2, n + 2))
    graph.sum_duplicates()
    flow = maximum_flow(graph, src, snk)
    residual = graph - flow.flow
    residual.data = (residual.data > 0).astype(np.int32)
    residual.eliminate_zeros()
    reach = set(breadth_first_order(residual, src,
                                    return_predecessors=False).tolist())
    orient = {iop.cells[i]: HORIZONTAL if i in reach else VERTICAL
              for i in range(n)}
    out = solution_from_orientations(iop, orient)
    if out.m != flow.flow_value // scale:
        raise RankConsistencyError(
            f"min-cut value {flow.flow_value // scale} disagrees with "
            f"extracted rank count {out.m}")
    return out


def plan_ranks(iop: Iop, deadline: float | None = None) -> RankSolution:
    """Minimum-rank plan of a region from scratch (no replanning reference)."""
    if iop.n > LP_EXACT_LIMIT:
        return mincut_ranks(iop)
    flows = build_flow_matrices(iop)
    model = build_milp0(iop, flows)
    stats = SolveStats()
    warm = warm_values(iop, model, heuristic_solution(iop))
    sol = solve_rank_model(model, deadline, stats, warm=warm)
    if sol.status is not Status.OPTIMAL:
        raise RuntimeError(f"rank planning failed: {sol.status.value}")
    out = extract_ranks(iop, sol.values)
    out.lp_integral = stats.lp_integral
    return out


MILP1, MILP2 = "MILP1", "MILP2"


def _old_pair_tiling(rank: Rank, old_pairs: set[RankPair]) -> list[Rank] | None:
    """Split a rank into two or more old ranks covering it exactly, if such a
    tiling exists (fewest pieces); otherwise None."""
    cells = rank.cells
    L = len(cells)
    starts_at: dict[int, list[int]] = {}
    pos = {c: k for k, c in enumerate(cells)}
    for axis, first, last in old_pairs:
        if axis == rank.axis and first in pos and last in pos:
            a, b = pos[first], pos[last]
            if a <= b:
                starts_at.setdefault(a, []).append(b)
    best = [math.inf] * (L + 1)
    parent = [-1] * (L + 1)
    best[0] = 0
    for a in range(L):
        if math.isinf(best[a]):
            continue
        for b in sorted(starts_at.get(a, ())):
            if best[a] + 1 < best[b + 1]:
                best[b + 1] = best[a] + 1
                parent[b + 1] = a
    if math.isinf(best[L]) or best[L] < 2:
        return None
    bounds = []
    at = L
    while at > 0:
        bounds.append((parent[at], at - 1))
        at = parent[at]
    return [Rank(rank.axis, cells[a:b + 1]) for a, b in reversed(bounds)]


def _replan_large(iop: Iop, old: RankSolution, budget: Budget,
                  variant: str) -> RankSolution | None:
    """Budgeted replanning for regions too large for the exact model: take
    the minimum-rank plan biased toward old orientations, then, if the
    new-rank budget is exceeded, re-split ranks that are exact concatenations
    of old ranks (cheapest extra-rank cost first) until the budget holds."""
    sol = mincut_ranks(iop, prefer=old.orientations)
    old_pairs = old.pairs()

    def over_budget(s: RankSolution) -> bool:
        if variant == MILP2:
            return compute_endpoint_delta(s, old, iop).bound > budget.m_bar
        return exact_new_ranks(s, old) > budget.m_bar

    if over_budget(sol):
        options = []
        for idx, r in enumerate(sol.ranks):
            if r.pair in old_pairs:
                continue
            tiling = _old_pair_tiling(r, old_pairs)
            if tiling is not None:
                options.append((len(tiling) - 1, idx, r, tiling))
        options.sort(key=lambda o: (o[0], o[1]))
        ranks = list(sol.ranks)
        for _, _, target, tiling in options:
            at = ranks.index(target)
            ranks[at:at + 1] = tiling
            sol = solution_from_ranks(ranks)
            if not over_budget(sol):
                break
        if over_budget(sol):
            return None
    sol.m_new = exact_new_ranks(sol, old)
    return sol


def rank_replan(iop_remaining: Iop, old: RankSolution, budget: Budget,
                variant: str = MILP1, deadline: float | None = None,
                stats: SolveStats | None = None) -> RankSolution | None:
    """Replan ranks for the remaining region with at most budget.m_bar new
    ranks; returns None (empty outcome) when infeasible or out of time."""
    if iop_remaining.n > LP_EXACT_LIMIT:
        return _replan_large(iop_remaining, old, budget, variant)
    flows = build_flow_matrices(iop_remaining)
    if variant == MILP1:
        runs_h = runs(iop_remaining, HORIZONTAL)
        runs_v = runs(iop_remaining, VERTICAL)
        model = build_milp1(iop_remaining, flows, runs_h, runs_v, old, budget)
    elif variant == MILP2:
        old_flags = restrict_endpoints(old, iop_remaining)
        model = build_milp2(iop_remaining, flows, old_flags, budget)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    local = stats or SolveStats()
    warm = warm_values(iop_remaining, model,
                       heuristic_solution(iop_remaining, old))
    sol = solve_rank_model(model, deadline, local, warm=warm)
    if sol.status is not Status.OPTIMAL:
        return None
    out = extract_ranks(iop_remaining, sol.values)
    out.m_new = exact_new_ranks(out, old)
    out.lp_integral = local.lp_integral
    if out.m_new > budget.m_bar:
        raise RankConsistencyError(
            f"replan produced m_new={out.m_new} above budget {budget.m_bar}")
    return out
