"""Anytime replanning controller.

When newly revealed obstacles block the remaining path, walk the encounters
in driving order.  Each encounter's lead time tau buys a rank budget through
the runtime estimator; the first encounter whose budgeted rank replan
succeeds gets a full re-tour, while everything before it is patched with a
greedy local detour.  If every encounter fails, the whole path is patched
greedily — the robot never has to stop and wait.
"""

from __future__ import annotations

import csv
import io
import math
import time as _time
from dataclasses import dataclass, field

import numpy as np

from .rankplanner import (Budget, MILP1, Rank, RankSolution, mincut_ranks,
                          rank_replan, solution_from_ranks, SolveStats)
from .tourplanner import (CoveragePath, DETOUR_STEP, PathStep, RANK_STEP,
                          TRANSITION_STEP, TransitionPlanner, plan_tour,
                          rank_sweep_time, transition_time, tour_replan,
                          Unreachable, _heading)
from .worldmodel import Cell, Iop, Pose, RobotParams, World, uncovered_region

MAX_BUDGET_SCAN = 10_000


# ---------------------------------------------------------------------------
# Runtime estimation
# ---------------------------------------------------------------------------

@dataclass
class RuntimeEstimator:
    gtsp_coeffs: np.ndarray  # highest-degree first, np.polyval order
    t_avg: float  # transition-planning seconds per rank
    samples: list[tuple[int, float]]
    safety_factor: float = 1.0
    linear_fallback: bool = False  # too few samples for the cubic

    def raw(self, m: int) -> float:
        """Estimated replan seconds for a tour of m sets, made nondecreasing
        in m by a running max (least-squares cubics can dip locally)."""
        m = int(m)
        cache = self.__dict__.get("_raw_cache")
        if cache is None:
            v0 = self.t_avg * 0 + float(np.polyval(self.gtsp_coeffs, 0))
            cache = self.__dict__["_raw_cache"] = [max(0.0, v0)]
        while len(cache) <= m:
            i = len(cache)
            v = self.t_avg * i + float(np.polyval(self.gtsp_coeffs, i))
            cache.append(max(cache[-1], v))
        return cache[m]

    def estimate(self, m: int) -> float:
        return self.safety_factor * self.raw(m)


def fit_estimator(samples: list[tuple[int, float]], t_avg: float,
                  safety_factor: float = 1.0) -> RuntimeEstimator:
    """Least-squares cubic over (tour size, solver seconds) samples; degrades
    to a linear fit below 4 samples."""
    if t_avg <= 0:
        raise ValueError("t_avg must be positive")
    if not samples:
        raise ValueError("no estimator samples")
    ms = np.array([m for m, _ in samples], dtype=float)
    ts = np.array([t for _, t in samples], dtype=float)
    if len(samples) >= 4:
        deg, fallback = 3, False
    else:
        deg, fallback = min(1, len(samples) - 1), True
    coeffs = np.polyfit(ms, ts, deg)
    return RuntimeEstimator(coeffs, t_avg, list(samples), safety_factor,
                            linear_fallback=fallback)


def invert_estimator(est: RuntimeEstimator, tau: float) -> int:
    """Largest m with safety_factor * T-hat(m) <= tau, by upward scan."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if est.estimate(0) > tau:
        return 0
    m = 0
    while m < MAX_BUDGET_SCAN and est.estimate(m + 1) <= tau:
        m += 1
    return m


def dump_samples(samples: list[tuple[int, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["m", "seconds"])
    for m, t in samples:
        w.writerow([m, repr(t)])
    return buf.getvalue()


def load_samples(text: str) -> list[tuple[int, float]]:
    rows = list(csv.reader(io.StringIO(text)))
    out = []
    for row in rows[1:]:
        if not row:
            continue
        out.append((int(row[0]), float(row[1])))
    return out


# ---------------------------------------------------------------------------
# Encounters
# ---------------------------------------------------------------------------

@dataclass
class Encounter:
    index: int  # 1-based, in driving order
    step_index: int
    cell_start: int  # first blocked cell position within the step
    cell_end: int  # last blocked cell position (inclusive)
    blocked_cells: tuple[Cell, ...]
    tau: float  # drive seconds until the robot reaches the blocked interval
    path_position: float  # same clock, kept for ordering/reporting


def _cell_entry_times(step: PathStep) -> list[float]:
    """Entry time offsets of each cell of a step, spreading the step duration
    over its hops (uniform per unit grid distance)."""
    cells = step.cells
    if len(cells) <= 1:
        return [0.0] * len(cells)
    dists = [math.hypot(b[0] - a[0], b[1] - a[1])
             for a, b in zip(cells, cells[1:])]
    total = sum(dists) or 1.0
    acc, out = 0.0, [0.0]
    for d in dists:
        acc += d
        out.append(step.duration * acc / total)
    return out


def enumerate_encounters(path: CoveragePath,
                         revealed: set[Cell]) -> list[Encounter]:
    """One encounter per maximal contiguous blocked interval along the path,
    in driving order, with the lead time tau to reach it."""
    out: list[Encounter] = []
    clock = 0.0
    for si, step in enumerate(path.steps):
        entries = _cell_entry_times(step)
        i = 0
        while i < len(step.cells):
            if step.cells[i] in revealed:
                j = i
                while j + 1 < len(step.cells) and step.cells[j + 1] in revealed:
                    j += 1
                tau = clock + entries[i]
                out.append(Encounter(len(out) + 1, si, i, j,
                                     step.cells[i:j + 1], tau, tau))
                i = j + 1
            else:
                i += 1
        clock += step.duration
    return out


# ---------------------------------------------------------------------------
# Greedy detour patching
# ---------------------------------------------------------------------------

def _pose_before(path: CoveragePath, step_index: int,
                 world: World) -> tuple[Cell, float]:
    """Cell and heading at the start of the given step."""
    for s in reversed(path.steps[:step_index]):
        if len(s.cells) >= 1:
            h = s.exit_heading if len(s.cells) > 1 else 0.0
            return s.cells[-1], h
    return world.cell_at(path.start.x, path.start.y), path.start.heading


def greedy_detour(path: CoveragePath, enc: Encounter, world: World,
                  params: RobotParams,
                  planner: TransitionPlanner | None = None) -> CoveragePath:
    """Patch one blocked interval locally: drive around the obstacle on the
    shorter believed-free side and resume the interrupted step.  No
    optimization; cost and coverage bookkeeping are updated in place.

    When the obstacle seals the way forward, the unreachable remainder is
    dropped from the path and recorded on path.unreachable.
    """
    if planner is None:
        planner = TransitionPlanner(world)
    l = world.cell_size
    step = path.steps[enc.step_index]
    prefix = step.cells[:enc.cell_start]
    suffix = step.cells[enc.cell_end + 1:]
    new_steps: list[PathStep] = []
    leftover: list[Rank] = []

    def sub_rank(cells: tuple[Cell, ...]) -> Rank | None:
        if step.kind != RANK_STEP or step.rank is None:
            return None
        ordered = tuple(reversed(cells)) if step.reverse else cells
        return Rank(step.rank.axis, ordered)

    if prefix:
        dur = _prorate(step, prefix)
        new_steps.append(PathStep(step.kind, prefix, dur, step.covers,
                                  sub_rank(prefix), step.reverse))
    if suffix:
        hop = None
        if prefix:
            hop = planner.path_cells(prefix[-1], suffix[0])
            h_out = _heading(prefix[-2], prefix[-1]) if len(prefix) > 1 else 0.0
        else:
            src, h_out = _pose_before(path, enc.step_index, world)
            hop = planner.path_cells(src, suffix[0])
        if hop is None:
            r = sub_rank(suffix)
            if r is not None:
                leftover.append(r)
            suffix = ()
        else:
            h_in = _heading(suffix[0], suffix[1]) if len(suffix) > 1 else h_out
            t = transition_time(hop, h_out, h_in, params, l)
            covers = step.kind != TRANSITION_STEP
            new_steps.append(PathStep(DETOUR_STEP, tuple(hop), t, covers))
            dur = _prorate(step, suffix)
            new_steps.append(PathStep(step.kind, suffix, dur, step.covers,
                                      sub_rank(suffix), step.reverse))

    steps = path.steps[:enc.step_index] + new_steps \
        + path.steps[enc.step_index + 1:]
    out = CoveragePath(path.start, steps,
                       unreachable=path.unreachable + leftover)
    return out


def _prorate(step: PathStep, cells: tuple[Cell, ...]) -> float:
    """Duration share of a cell subsequence, by grid distance."""
    def dist(cs):
        return sum(math.hypot(b[0] - a[0], b[1] - a[1])
                   for a, b in zip(cs, cs[1:]))
    whole = dist(step.cells)
    if whole == 0.0:
        return 0.0
    return step.duration * dist(cells) / whole


def patch_all(path: CoveragePath, revealed: set[Cell], world: World,
              params: RobotParams,
              planner: TransitionPlanner | None = None,
              max_rounds: int = 10_000) -> tuple[CoveragePath, int]:
    """Apply greedy detours until no step crosses a revealed obstacle.
    Returns the patched path and the number of patches applied."""
    if planner is None:
        planner = TransitionPlanner(world)
    n = 0
    for _ in range(max_rounds):
        encs = enumerate_encounters(path, revealed)
        if not encs:
            return path, n
        path = greedy_detour(path, encs[0], world, params, planner)
        n += 1
    raise RuntimeError("greedy patching did not converge")


# ---------------------------------------------------------------------------
# OARP-Replan controller
# ---------------------------------------------------------------------------

@dataclass
class ReplanReport:
    chosen_encounter: int | None = None
    m_bar: int = 0
    m_total: int = 0
    m_new: int = 0
    m_old: int = 0
    m_initial: int = 0
    gtsp_sets: int = 0
    planned_in: float = 0.0
    tau: float = 0.0
    gd_fallbacks: int = 0
    lp_integral: bool = True
    m_opt: int = 0  # from-scratch minimum ranks of the replanned region


def _prefix_steps(path: CoveragePath, enc: Encounter) -> list[PathStep]:
    """Steps driven before reaching the encounter's blocked interval, with the
    hit step truncated just before it."""
    steps = list(path.steps[:enc.step_index])
    step = path.steps[enc.step_index]
    prefix = step.cells[:enc.cell_start]
    if prefix:
        r = None
        if step.kind == RANK_STEP and step.rank is not None:
            ordered = tuple(reversed(prefix)) if step.reverse else prefix
            r = Rank(step.rank.axis, ordered)
        steps.append(PathStep(step.kind, prefix, _prorate(step, prefix),
                              step.covers, r, step.reverse))
    return steps


def oarp_replan(world: World, iop: Iop, path: CoveragePath,
                estimator: RuntimeEstimator, revealed: set[Cell],
                covered: set[Cell], params: RobotParams,
                variant: str = MILP1, seed: int = 0,
                m_initial: int = 0,
                injected_time: bool = False) -> tuple[CoveragePath, ReplanReport]:
    """Budgeted anytime replan of a blocked path (see module docstring).

    planned_in is wall-clock seconds unless injected_time is set, in which
    case the estimator's own prediction for the realized tour size is charged
    instead, which keeps simulations bit-reproducible.
    """
    report = ReplanReport(m_initial=m_initial)
    planner = TransitionPlanner(world)
    work = path
    t0 = _time.perf_counter()

    encs = enumerate_encounters(work, revealed)
    idx = 0
    while idx < len(encs):
        enc = enumerate_encounters(work, revealed)
        if not enc:
            break
        enc = enc[0]
        idx += 1
        tau = enc.tau
        m_bar = invert_estimator(estimator, tau)
        prefix = _prefix_steps(work, enc)
        pre_covered = set(covered)
        for s in prefix:
            if s.covers:
                pre_covered.update(s.cells)
        region = uncovered_region(iop, pre_covered, revealed)
        if region is None:
            # nothing left to cover beyond the prefix: drop the rest
            out = CoveragePath(work.start, prefix, unreachable=work.unreachable)
            report.planned_in = _time.perf_counter() - t0
            return out, report
        old = solution_from_ranks(
            [s.rank for s in work.rank_steps() if s.rank is not None])
        stats = SolveStats()
        sol = rank_replan(region, old, Budget(m_bar), variant, stats=stats)
        if sol is None:
            work = greedy_detour(work, enc, world, params, planner)
            report.gd_fallbacks += 1
            continue

        if prefix:
            anchor = prefix[-1].cells[-1]
            heading = prefix[-1].exit_heading if len(prefix[-1].cells) > 1 \
                else work.start.heading
        else:
            anchor = world.cell_at(work.start.x, work.start.y)
            heading = work.start.heading
        cx, cy = world.center(anchor)
        pose = Pose(cx, cy, heading)
        remainder = CoveragePath(pose, work.steps[enc.step_index + 1:])
        # the stop window tau can be huge; past ~1s more search buys nothing
        new_tail = tour_replan(sol, remainder, pose, world, params,
                               deadline=min(0.2, max(tau, 0.1)), seed=seed,
                               planner=planner)
        out = CoveragePath(work.start, prefix + new_tail.steps,
                           unreachable=work.unreachable + new_tail.unreachable)
        report.chosen_encounter = idx
        report.m_bar = m_bar
        report.m_total = sol.m
        report.m_new = sol.m_new or 0
        report.m_old = sol.m - (sol.m_new or 0)
        report.m_opt = mincut_ranks(region).m
        report.tau = tau
        report.lp_integral = stats.lp_integral
        report.gtsp_sets = _count_gtsp_sets(new_tail, sol)
        report.planned_in = (estimator.raw(report.gtsp_sets)
                            if injected_time else _time.perf_counter() - t0)
        return out, report

    # every encounter refused a budgeted replan: pure greedy patching
    work, extra = patch_all(work, revealed, world, params, planner)
    report.planned_in = 0.0 if injected_time else _time.perf_counter() - t0
    return work, report


def _count_gtsp_sets(tail: CoveragePath, sol: RankSolution) -> int:
    """Tour size proxy for the estimator: sets actually toured plus the two
    artificial endpoints."""
    return len(tail.rank_steps()) + 2
