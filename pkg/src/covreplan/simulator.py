"""Deterministic closed-loop simulation of coverage with hidden obstacles.

The robot drives the planned path cell by cell; at every cell entry the
radial sensor reveals nearby hidden obstacles, and when a revelation blocks
the remaining path the selected replanner is invoked.  Time is fully
simulated: drive time from the kinematic model, stop time charged when
planning takes longer than the lead time to the relevant encounter.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .anytime import (ReplanReport, RuntimeEstimator, enumerate_encounters,
                      oarp_replan, patch_all)
from .rankplanner import MILP1 as VARIANT_MILP1
from .rankplanner import MILP2 as VARIANT_MILP2
from .rankplanner import plan_ranks
from .tourplanner import CoveragePath, PathStep, TransitionPlanner, plan_tour
from .worldmodel import (Cell, CellState, Iop, Pose, RobotParams, Scenario,
                         World, extract_iop, reachable_cells, sense,
                         uncovered_region)

GD_ONLY = "gd"
MILP1 = "milp1"
MILP2 = "milp2"
OFFLINE = "offline"
VARIANTS = (GD_ONLY, MILP1, MILP2, OFFLINE)

MAX_REPLANS = 500
FINAL_SWEEP_ROUNDS = 8


def min_stop_time(transition_time: float, gtsp_time: float,
                  tau: float) -> float:
    """Unavoidable stoppage when planning outlasts the drive to the
    encounter."""
    if min(transition_time, gtsp_time, tau) < 0:
        raise ValueError("negative time")
    return max(0.0, transition_time + gtsp_time - tau)


@dataclass
class Metrics:
    drive_time: float = 0.0
    stop_time: float = 0.0
    replans: int = 0
    gd_fallbacks: int = 0
    covered_fraction: float = 0.0
    m_totals: list[int] = field(default_factory=list)
    reports: list[ReplanReport] = field(default_factory=list)

    @property
    def total_cost(self) -> float:
        return self.drive_time + self.stop_time


@dataclass
class Trial:
    world: World
    scenario: Scenario
    variant: str
    estimator: RuntimeEstimator
    injected_schedule: bool = True  # simulate solver time via the estimator
    plan_deadline: float = 1.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")


def _cell_entry_deltas(step: PathStep) -> list[float]:
    cells = step.cells
    if len(cells) <= 1:
        return [step.duration] * len(cells)
    dists = [math.hypot(b[0] - a[0], b[1] - a[1])
             for a, b in zip(cells, cells[1:])]
    total = sum(dists) or 1.0
    return [0.0] + [step.duration * d / total for d in dists]


def _remaining_path(path: CoveragePath, si: int, ci: int, pose: Pose,
                    duration_left: float) -> CoveragePath:
    """Path from the robot's current cell onward."""
    step = path.steps[si]
    rest = step.cells[ci:]
    steps: list[PathStep] = []
    if len(rest) >= 1:
        steps.append(PathStep(step.kind, rest, duration_left, step.covers,
                              step.rank, step.reverse))
    steps.extend(path.steps[si + 1:])
    return CoveragePath(pose, steps, unreachable=list(path.unreachable))


def run_trial(trial: Trial) -> Metrics:
    world = trial.world.copy()
    scen = trial.scenario
    params = scen.params
    metrics = Metrics()

    if trial.variant == OFFLINE:
        # plan on the fully known map: reveal everything up front
        for r in range(world.height):
            for c in range(world.width):
                if world.grid[r, c] == CellState.HIDDEN_OBSTACLE:
                    world.grid[r, c] = CellState.REVEALED_OBSTACLE

    pose = scen.start
    covered: set[Cell] = set()
    revealed: set[Cell] = set()
    # obstacles visible from the start position are known before planning
    revealed.update(sense(world, pose, params))

    iop = extract_iop(world)
    sol = plan_ranks(iop)
    path = plan_tour(sol, pose, world, params,
                     deadline=trial.plan_deadline, seed=scen.seed)
    m_initial = sol.m

    guard = 0
    while True:
        path = _drive(trial, world, iop, path, pose, covered, revealed,
                      metrics, m_initial)
        if path is None:
            break
        guard += 1
        if guard > MAX_REPLANS:
            raise RuntimeError("replan livelock: no progress after "
                               f"{MAX_REPLANS} replans")

    # sweep up any reachable cells the greedy patches had to skip
    start_cell = world.cell_at(scen.start.x, scen.start.y)
    for _ in range(FINAL_SWEEP_ROUNDS):
        missing = _reachable_uncovered(world, iop, covered, revealed,
                                       start_cell)
        if not missing:
            break
        region = uncovered_region(iop, covered, revealed)
        if region is None:
            break
        sub = Iop(sorted(missing))
        sweep_sol = plan_ranks(sub)
        cx, cy = world.center(start_cell)
        sweep = plan_tour(sweep_sol, Pose(cx, cy, 0.0), world, params,
                          deadline=0.5, seed=scen.seed + 1)
        metrics.replans += 1
        done = _drive(trial, world, iop, sweep, Pose(cx, cy, 0.0), covered,
                      revealed, metrics, m_initial)
        if done is not None:
            # a sweep triggering further replans is handled like the main path
            while done is not None:
                done = _drive(trial, world, iop, done, pose, covered,
                              revealed, metrics, m_initial)

    metrics.covered_fraction = _covered_fraction(world, iop, covered,
                                                 start_cell)
    return metrics


def _drive(trial: Trial, world: World, iop: Iop, path: CoveragePath,
           pose: Pose, covered: set[Cell], revealed: set[Cell],
           metrics: Metrics, m_initial: int) -> CoveragePath | None:
    """Advance along the path until done (None) or a replan produced a new
    path (returned for the caller to continue on)."""
    params = trial.scenario.params
    for si, step in enumerate(path.steps):
        deltas = _cell_entry_deltas(step)
        acc = 0.0
        for ci, cell in enumerate(step.cells):
            metrics.drive_time += deltas[ci]
            acc += deltas[ci]
            if step.covers:
                covered.add(cell)
            cx, cy = world.center(cell)
            here = Pose(cx, cy, 0.0)
            new = sense(world, here, params)
            if not new:
                continue
            revealed.update(new)
            remaining = _remaining_path(path, si, ci, here,
                                        step.duration - acc)
            if not _blocked(remaining, revealed):
                continue
            return _replan(trial, world, iop, remaining, covered, revealed,
                           metrics, m_initial)
    return None


def _blocked(path: CoveragePath, revealed: set[Cell]) -> bool:
    for step in path.steps:
        for c in step.cells:
            if c in revealed:
                return True
    return False


def _replan(trial: Trial, world: World, iop: Iop, remaining: CoveragePath,
            covered: set[Cell], revealed: set[Cell], metrics: Metrics,
            m_initial: int) -> CoveragePath:
    params = trial.scenario.params
    if trial.variant in (GD_ONLY, OFFLINE):
        patched, n = patch_all(remaining, revealed, world, params)
        metrics.gd_fallbacks += n
        metrics.replans += 1
        return patched
    variant = VARIANT_MILP1 if trial.variant == MILP1 else VARIANT_MILP2
    new_path, report = oarp_replan(
        world, iop, remaining, trial.estimator, revealed, covered, params,
        variant=variant, seed=trial.scenario.seed,
        m_initial=m_initial, injected_time=trial.injected_schedule)
    metrics.replans += 1
    metrics.gd_fallbacks += report.gd_fallbacks
    metrics.reports.append(report)
    if report.chosen_encounter is not None:
        metrics.m_totals.append(report.m_total)
        metrics.stop_time += max(0.0, report.planned_in - report.tau)
    return new_path


def _true_free_reachable(world: World, iop: Iop, start: Cell) -> set[Cell]:
    reach = reachable_cells(world, start, believed=False)
    return {c for c in iop.cells if world.truly_free(c)} & reach


def _reachable_uncovered(world: World, iop: Iop, covered: set[Cell],
                         revealed: set[Cell], start: Cell) -> set[Cell]:
    want = _true_free_reachable(world, iop, start)
    return want - covered - revealed


def _covered_fraction(world: World, iop: Iop, covered: set[Cell],
                      start: Cell) -> float:
    want = _true_free_reachable(world, iop, start)
    if not want:
        return 1.0
    return len(covered & want) / len(want)


def verify_coverage(covered: set[Cell], iop: Iop, world: World,
                    start: Cell) -> tuple[list[Cell], list[Cell]]:
    """(missing reachable cells, unreachable pocket cells); coverage is
    complete exactly when the first list is empty."""
    truly = {c for c in iop.cells if world.truly_free(c)}
    reach = reachable_cells(world, start, believed=False)
    missing = sorted(truly & reach - covered)
    pockets = sorted(truly - reach)
    return missing, pockets


# ---------------------------------------------------------------------------
# Metrics output
# ---------------------------------------------------------------------------

CSV_HEADER = ["trial", "variant", "seed", "drive_s", "stop_s", "total_s",
              "replans", "gd_fallbacks", "covered_fraction"]


def metrics_rows(name: str, variant: str, seed: int,
                 metrics: Metrics) -> list[str]:
    return [name, variant, str(seed),
            f"{metrics.drive_time:.6f}", f"{metrics.stop_time:.6f}",
            f"{metrics.total_cost:.6f}", str(metrics.replans),
            str(metrics.gd_fallbacks), f"{metrics.covered_fraction:.6f}"]


def write_metrics_csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()
