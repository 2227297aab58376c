"""Exhaustive reference solvers for small instances.

These intentionally avoid the LP machinery: rank counting enumerates every
orientation assignment directly, replanning enumerates every partition of the
region into straight segments, and touring enumerates visit orders over sets.
They exist to pin down ground truth for tests, not for production use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .flowgraphs import HORIZONTAL, VERTICAL, runs
from .rankplanner import Rank, RankPair, RankSolution, solution_from_orientations
from .worldmodel import Cell, Iop

MAX_ORIENTATION_CELLS = 20
MAX_REPLAN_CELLS = 12
MAX_CANDIDATES = 2 ** 24


class OracleTooLarge(ValueError):
    pass


@dataclass
class OracleResult:
    optimum: float | None
    witness: object
    enumerated: int
    feasible: bool = True


def brute_force_min_ranks(iop: Iop) -> OracleResult:
    """Minimum rank count by vectorized enumeration of all 2^n orientation
    assignments (bit i set = cell i horizontal)."""
    n = iop.n
    if n > MAX_ORIENTATION_CELLS:
        raise OracleTooLarge(f"{n} cells exceeds the {MAX_ORIENTATION_CELLS}"
                             " cell enumeration limit")
    total = 1 << n
    masks = np.arange(total, dtype=np.uint32)
    m_counts = np.zeros(total, dtype=np.int16)
    for i in range(n):
        h = ((masks >> np.uint32(i)) & np.uint32(1)).astype(np.int16)
        left = iop.left[i]
        if left >= 0:
            lh = ((masks >> np.uint32(left)) & np.uint32(1)).astype(np.int16)
            m_counts += h * (1 - lh)  # horizontal run head
        else:
            m_counts += h
        up = iop.up[i]
        if up >= 0:
            uh = ((masks >> np.uint32(up)) & np.uint32(1)).astype(np.int16)
            m_counts += (1 - h) * uh  # vertical run head
        else:
            m_counts += 1 - h
    best = int(masks[np.argmin(m_counts)])
    orient = {iop.cells[i]: (HORIZONTAL if (best >> i) & 1 else VERTICAL)
              for i in range(n)}
    witness = solution_from_orientations(iop, orient)
    return OracleResult(int(m_counts.min()), witness, total)


def _straight_pieces(iop: Iop) -> list[tuple[int, str, tuple[int, ...]]]:
    """Every contiguous straight cell sequence, as (bitmask, axis, indices)."""
    pieces = []
    for axis in (HORIZONTAL, VERTICAL):
        for run in runs(iop, axis):
            L = len(run.cells)
            for a in range(L):
                mask = 0
                for b in range(a, L):
                    mask |= 1 << run.cells[b]
                    pieces.append((mask, axis, tuple(run.cells[a:b + 1])))
    return pieces


def brute_force_replan(iop: Iop, old: RankSolution,
                       m_bar: int) -> OracleResult:
    """Best achievable (rank count, new-rank count) under the budget, by
    exhaustive search over every partition of the region into straight
    segments; equivalent to enumerating orientations plus all run splits.

    The witness minimizes total ranks first, new ranks second.  feasible is
    False when no partition fits the budget.
    """
    n = iop.n
    if n > MAX_REPLAN_CELLS:
        raise OracleTooLarge(f"{n} cells exceeds the {MAX_REPLAN_CELLS}"
                             " cell replanning limit")
    pieces = _straight_pieces(iop)
    if len(pieces) * (1 << n) > MAX_CANDIDATES:
        raise OracleTooLarge("candidate space exceeds the enumeration cap")
    old_pairs = old.pairs()
    cap = min(m_bar, n)

    # piece lists keyed by their lowest uncovered cell index
    by_low: list[list[tuple[int, int, object]]] = [[] for _ in range(n)]
    for mask, axis, idxs in pieces:
        low = min(idxs)
        cells = tuple(iop.cells[i] for i in idxs)
        is_new = (axis, cells[0], cells[-1]) not in old_pairs
        by_low[low].append((mask, int(is_new), Rank(axis, cells)))

    full = (1 << n) - 1
    INF = n + 1
    # dp[mask][j] = fewest pieces covering mask with exactly j new ones
    dp: dict[int, list[int]] = {0: [0] + [INF] * cap}
    choice: dict[tuple[int, int], tuple[int, int, Rank]] = {}
    enumerated = 0
    order = sorted(range(1 << n), key=lambda s: bin(s).count("1"))
    for covered in order:
        row = dp.get(covered)
        if row is None:
            continue
        if covered == full:
            continue
        low = next(i for i in range(n) if not covered >> i & 1)
        for pmask, is_new, rank in by_low[low]:
            if pmask & covered:
                continue
            enumerated += 1
            nxt = covered | pmask
            nrow = dp.setdefault(nxt, [INF] * (cap + 1))
            for j in range(cap + 1 - is_new):
                if row[j] >= INF:
                    continue
                cand = row[j] + 1
                if cand < nrow[j + is_new]:
                    nrow[j + is_new] = cand
                    choice[(nxt, j + is_new)] = (covered, j, rank)

    final = dp.get(full)
    if final is None or min(final) >= INF:
        return OracleResult(None, None, enumerated, feasible=False)
    best_m, best_j = min((final[j], j) for j in range(cap + 1)
                         if final[j] < INF)
    # backtrack the witness partition
    ranks: list[Rank] = []
    state = (full, best_j)
    while state[0]:
        prev_mask, prev_j, rank = choice[state]
        ranks.append(rank)
        state = (prev_mask, prev_j)
    orient = {c: r.axis for r in ranks for c in r.cells}
    witness = _solution_from_partition(iop, ranks, orient)
    witness.m_new = best_j
    return OracleResult(best_m, witness, enumerated)


def _solution_from_partition(iop: Iop, ranks: list[Rank],
                             orient: dict[Cell, str]) -> RankSolution:
    y_l, y_r, y_t, y_b = set(), set(), set(), set()
    ordered = sorted(ranks, key=lambda r: (r.axis, r.cells[0][1], r.cells[0][0]))
    for r in ordered:
        if r.axis == HORIZONTAL:
            y_l.add(r.first_cell)
            y_r.add(r.last_cell)
        else:
            y_t.add(r.first_cell)
            y_b.add(r.last_cell)
    return RankSolution(dict(orient), y_l, y_r, y_t, y_b, ordered, len(ordered))


# ---------------------------------------------------------------------------
# Touring
# ---------------------------------------------------------------------------

MAX_TOUR_SETS = 8


def brute_force_gtsp(cost, sets: list[list[int]], start: int,
                     end_set: list[int]) -> OracleResult:
    """Cheapest visit-each-set-once path from start to a vertex of end_set.

    cost[a][b] is the directed edge cost (a 2-D array or nested sequence).
    Exhausts every visit order and vertex choice via a subset/last-vertex
    sweep that dominates the naive permutation enumeration.
    """
    k = len(sets)
    if k > MAX_TOUR_SETS:
        raise OracleTooLarge(f"{k} sets exceeds the {MAX_TOUR_SETS} set limit")
    verts = [v for s in sets for v in s]
    set_of = {v: si for si, s in enumerate(sets) for v in s}
    INF = float("inf")
    # best[(subset, v)] = cheapest cost from start covering subset, ending at v
    best: dict[tuple[int, int], float] = {}
    parent: dict[tuple[int, int], int | None] = {}
    enumerated = 0
    for si, s in enumerate(sets):
        for v in s:
            enumerated += 1
            key = (1 << si, v)
            best[key] = cost[start][v]
            parent[key] = None
    for subset in range(1, 1 << k):
        for v in verts:
            si = set_of[v]
            if not subset >> si & 1:
                continue
            cur = best.get((subset, v), INF)
            if cur == INF:
                continue
            for w in verts:
                sj = set_of[w]
                if subset >> sj & 1:
                    continue
                enumerated += 1
                cand = cur + cost[v][w]
                key = (subset | 1 << sj, w)
                if cand < best.get(key, INF):
                    best[key] = cand
                    parent[key] = v
    full = (1 << k) - 1
    end_best, end_v, last_v = INF, None, None
    for v in verts:
        c = best.get((full, v), INF)
        if c == INF:
            continue
        for e in end_set:
            enumerated += 1
            cand = c + cost[v][e]
            if cand < end_best:
                end_best, end_v, last_v = cand, e, v
    if end_v is None:
        return OracleResult(None, None, enumerated, feasible=False)
    path = [end_v, last_v]
    subset, v = full, last_v
    while parent[(subset, v)] is not None:
        p = parent[(subset, v)]
        subset ^= 1 << set_of[v]
        v = p
        path.append(v)
    path.append(start)
    path.reverse()
    return OracleResult(float(end_best), path, enumerated)


def check_approx_bound(m_new: int, delta_bound: float) -> bool:
    """The exact new-rank count never exceeds the endpoint-change bound."""
    return m_new <= delta_bound + 1e-9
