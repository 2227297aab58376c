"""Command-line front end: plan, simulate, benchmark, gen-clutter,
fit-estimator."""

from __future__ import annotations

import argparse
import math
import random
import sys
import time
from pathlib import Path

from . import __version__
from .anytime import dump_samples, fit_estimator, load_samples
from .rankplanner import plan_ranks
from .simulator import (GD_ONLY, MILP1, MILP2, OFFLINE, Metrics, Trial,
                        VARIANTS, metrics_rows, run_trial, write_metrics_csv)
from .svgout import render_svg
from .tourplanner import GtspInstance, Vertex, plan_tour, solve_gtsp
from .worldmodel import (CellState, MapParseError, Scenario, World, dump_map,
                         extract_iop, load_map, load_scenario, reachable_cells)


def _read(path: str) -> str:
    return Path(path).read_text()


def _load_world_scenario(args) -> tuple[World, Scenario]:
    world = load_map(_read(args.map))
    scen = load_scenario(_read(args.scenario))
    if getattr(args, "seed", None) is not None:
        scen = Scenario(scen.start, scen.params, args.seed)
    return world, scen


# ---------------------------------------------------------------------------
# Clutter generation
# ---------------------------------------------------------------------------

def generate_clutter(world: World, fraction: float, seed: int,
                     max_tries: int = 200_000) -> World:
    """Derived map with hidden rectangular obstacles (1-4 cells per side)
    occupying the requested fraction of the base map's free area.  Placements
    that would disconnect the remaining free space are rejected, so every
    generated map stays coverable.  Deterministic per seed."""
    rng = random.Random(seed)
    out = world.copy()
    free = [(c, r) for r in range(out.height) for c in range(out.width)
            if out.grid[r, c] == CellState.FREE]
    target = round(fraction * len(free))
    placed = 0
    tries = 0
    while placed < target and tries < max_tries:
        tries += 1
        need = target - placed
        w = rng.randint(1, 4)
        h = rng.randint(1, 4)
        if w * h > need:
            continue
        c0 = rng.randrange(0, out.width - w + 1)
        r0 = rng.randrange(0, out.height - h + 1)
        block = [(c, r) for r in range(r0, r0 + h) for c in range(c0, c0 + w)]
        if any(out.grid[r, c] != CellState.FREE for c, r in block):
            continue
        for c, r in block:
            out.grid[r, c] = CellState.HIDDEN_OBSTACLE
        remaining = [cell for cell in free
                     if out.grid[cell[1], cell[0]] == CellState.FREE]
        if remaining and len(reachable_cells(out, remaining[0],
                                             believed=False)) != len(remaining):
            for c, r in block:  # would disconnect the free space: undo
                out.grid[r, c] = CellState.FREE
            continue
        placed += w * h
    if placed < target:
        raise RuntimeError(f"could not place {target} clutter cells "
                           f"(placed {placed})")
    return out


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_plan(args) -> int:
    world, scen = _load_world_scenario(args)
    iop = extract_iop(world)
    sol = plan_ranks(iop)
    path = plan_tour(sol, scen.start, world, scen.params,
                     deadline=args.deadline, seed=scen.seed)
    print(f"cells={iop.n} ranks={sol.m} drive_cost={path.cost:.2f}s "
          f"steps={len(path.steps)}")
    if args.out:
        Path(args.out).write_text(render_svg(world, path))
        print(f"wrote {args.out}")
    return 0


def cmd_simulate(args) -> int:
    world, scen = _load_world_scenario(args)
    est = _estimator_from_args(args)
    trial = Trial(world, scen, args.variant, est,
                  injected_schedule=not args.measured)
    metrics = run_trial(trial)
    name = Path(args.map).stem
    csv_text = write_metrics_csv(
        [metrics_rows(name, args.variant, scen.seed, metrics)])
    if args.out_csv:
        Path(args.out_csv).write_text(csv_text)
    sys.stdout.write(csv_text)
    if args.out_svg:
        Path(args.out_svg).write_text(render_svg(world))
        print(f"wrote {args.out_svg}")
    return 0


def cmd_benchmark(args) -> int:
    world, scen = _load_world_scenario(args)
    est = _estimator_from_args(args)
    variants = args.variants.split(",")
    for v in variants:
        if v not in VARIANTS:
            print(f"unknown variant {v!r}", file=sys.stderr)
            return 2
    rows = []
    sums: dict[str, float] = {v: 0.0 for v in variants}
    for t in range(args.trials):
        seed = scen.seed + t
        cluttered = generate_clutter(world, args.clutter, seed) \
            if args.clutter > 0 else world
        for v in variants:
            tscen = Scenario(scen.start, scen.params, seed)
            metrics = run_trial(Trial(cluttered, tscen, v, est,
                                      injected_schedule=True))
            rows.append(metrics_rows(f"trial{t}", v, seed, metrics))
            sums[v] += metrics.total_cost
    csv_text = write_metrics_csv(rows)
    if args.out:
        Path(args.out).write_text(csv_text)
    sys.stdout.write(csv_text)
    for v in variants:
        print(f"mean_total_s {v} {sums[v] / args.trials:.2f}")
    return 0


def cmd_gen_clutter(args) -> int:
    world = load_map(_read(args.map))
    out = generate_clutter(world, args.clutter, args.seed)
    text = dump_map(out)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_fit_estimator(args) -> int:
    if args.samples:
        samples = load_samples(_read(args.samples))
    else:
        samples = _measure_samples(args.max_size, args.seed)
    est = fit_estimator(samples, t_avg=args.t_avg)
    if args.out:
        Path(args.out).write_text(dump_samples(samples))
        print(f"wrote {args.out}")
    coeffs = " ".join(f"{c:.6e}" for c in est.gtsp_coeffs)
    kind = "linear" if est.linear_fallback else "cubic"
    print(f"samples={len(samples)} fit={kind} coeffs=[{coeffs}] "
          f"t_avg={est.t_avg}")
    return 0


def _measure_samples(max_size: int, seed: int) -> list[tuple[int, float]]:
    """Time the tour solver on synthetic geometric instances of growing
    size."""
    rng = random.Random(seed)
    samples = []
    for k in range(2, max_size + 1):
        nv = 2 * k + 2
        pts = [(rng.uniform(0, 40), rng.uniform(0, 40)) for _ in range(nv)]
        import numpy as np
        costs = np.zeros((nv, nv))
        for a in range(nv):
            for b in range(nv):
                costs[a][b] = math.dist(pts[a], pts[b])
        costs[:, nv - 1] = 0.0
        costs[nv - 1, 0] = 0.0
        sets = [[0]] + [[2 * i + 1, 2 * i + 2] for i in range(k)] + [[nv - 1]]
        vertices = [Vertex(si, None, 0.0, None, 0.0, 0.0)
                    for si, s in enumerate(sets) for _ in s]
        inst = GtspInstance(sets, vertices, costs)
        t0 = time.perf_counter()
        solve_gtsp(inst, deadline=1.0, seed=seed + k)
        samples.append((k, time.perf_counter() - t0))
    return samples


def _estimator_from_args(args):
    if getattr(args, "estimator", None):
        samples = load_samples(_read(args.estimator))
    else:
        # conservative built-in profile: mildly cubic solver time
        samples = [(2, 0.02), (5, 0.1), (10, 0.5), (20, 2.2), (40, 12.0)]
    return fit_estimator(samples, t_avg=0.01,
                         safety_factor=getattr(args, "safety_factor", 1.0))


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="covreplan",
                                description="Coverage path replanning toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True)

    sp = sub.add_parser("plan", help="plan a coverage path")
    sp.add_argument("map")
    sp.add_argument("scenario")
    sp.add_argument("--out", help="SVG output path")
    sp.add_argument("--deadline", type=float, default=1.0)
    sp.set_defaults(func=cmd_plan)

    ss = sub.add_parser("simulate", help="run one closed-loop trial")
    ss.add_argument("map")
    ss.add_argument("scenario")
    ss.add_argument("--variant", choices=VARIANTS, default=MILP1)
    ss.add_argument("--seed", type=int)
    ss.add_argument("--estimator", help="estimator samples CSV")
    ss.add_argument("--safety-factor", type=float, default=1.0,
                    dest="safety_factor")
    ss.add_argument("--measured", action="store_true",
                    help="charge wall-clock planning time instead of the "
                         "deterministic injected schedule")
    ss.add_argument("--out-csv")
    ss.add_argument("--out-svg")
    ss.set_defaults(func=cmd_simulate)

    sb = sub.add_parser("benchmark", help="sweep seeds and variants")
    sb.add_argument("map")
    sb.add_argument("scenario")
    sb.add_argument("--variants", default="gd,milp1,milp2")
    sb.add_argument("--trials", type=int, default=5)
    sb.add_argument("--clutter", type=float, default=0.10)
    sb.add_argument("--seed", type=int)
    sb.add_argument("--estimator")
    sb.add_argument("--safety-factor", type=float, default=1.0,
                    dest="safety_factor")
    sb.add_argument("--out", help="aggregate CSV path")
    sb.set_defaults(func=cmd_benchmark)

    sg = sub.add_parser("gen-clutter", help="derive a cluttered map")
    sg.add_argument("map")
    sg.add_argument("--clutter", type=float, default=0.10)
    sg.add_argument("--seed", type=int, default=0)
    sg.add_argument("--out")
    sg.set_defaults(func=cmd_gen_clutter)

    sf = sub.add_parser("fit-estimator", help="fit the runtime estimator")
    sf.add_argument("--samples", help="existing samples CSV")
    sf.add_argument("--max-size", type=int, default=12, dest="max_size")
    sf.add_argument("--seed", type=int, default=0)
    sf.add_argument("--t-avg", type=float, default=0.01, dest="t_avg")
    sf.add_argument("--out", help="write samples CSV here")
    sf.set_defaults(func=cmd_fit_estimator)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MapParseError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except RuntimeError as e:
        print(f"failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
