"""Touring: motion models, transition planning, and the set-tour search."""

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_map_text
from covreplan.flowgraphs import HORIZONTAL, VERTICAL
from covreplan.oracle import brute_force_gtsp
from covreplan.rankplanner import Rank, plan_ranks, solution_from_ranks
from covreplan.tourplanner import (GtspInstance, Section, TourInfeasible,
                                   TransitionPlanner, Vertex,
                                   compress_segments, motion_time, plan_tour,
                                   rank_sweep_time, retained_sections,
                                   solve_gtsp, transition_time, turn_time)
from covreplan.worldmodel import (Iop, Pose, RobotParams, extract_iop,
                                  load_map)


class TestMotionTime:
    def test_zero(self, robot_params):
        assert motion_time(0.0, robot_params) == 0.0

    def test_negative_rejected(self, robot_params):
        with pytest.raises(ValueError):
            motion_time(-1.0, robot_params)

    @given(st.floats(min_value=1e-6, max_value=1e4),
           st.floats(min_value=0.1, max_value=5.0),
           st.floats(min_value=0.1, max_value=5.0))
    @settings(max_examples=300, deadline=None)
    def test_closed_forms(self, d, v, a):
        p = RobotParams(0.8, v, a, 1.0, 5.0)
        t = motion_time(d, p)
        if d >= v * v / a:
            assert t == pytest.approx(d / v + v / a, abs=1e-9)
        else:
            assert t == pytest.approx(2.0 * math.sqrt(d / a), abs=1e-9)

    def test_continuity_at_profile_switch(self, robot_params):
        d = robot_params.v_max ** 2 / robot_params.accel
        lo = motion_time(d * (1 - 1e-9), robot_params)
        hi = motion_time(d * (1 + 1e-9), robot_params)
        assert hi == pytest.approx(lo, rel=1e-6)


class TestTurnTime:
    def test_quarter_turn(self, robot_params):
        assert (turn_time(0.0, math.pi / 2, robot_params)
                == pytest.approx(math.pi / 2 / robot_params.omega))

    def test_takes_shorter_arc(self, robot_params):
        long_way = 1.5 * math.pi
        assert (turn_time(0.0, long_way, robot_params)
                == pytest.approx(0.5 * math.pi / robot_params.omega))

    def test_symmetric(self, robot_params):
        a, b = 0.3, 2.9
        assert turn_time(a, b, robot_params) == turn_time(b, a, robot_params)


class TestCompressSegments:
    def test_straight_line(self):
        cells = [(0, 0), (1, 0), (2, 0), (3, 0)]
        assert compress_segments(cells, 2.0) == [((0, 0), (3, 0), 6.0)]

    def test_corner_splits(self):
        cells = [(0, 0), (1, 0), (1, 1)]
        segs = compress_segments(cells, 1.0)
        assert segs == [((0, 0), (1, 0), 1.0), ((1, 0), (1, 1), 1.0)]

    def test_diagonal_length(self):
        segs = compress_segments([(0, 0), (1, 1), (2, 2)], 1.0)
        assert segs == [((0, 0), (2, 2), pytest.approx(2 * math.sqrt(2)))]

    def test_short_inputs(self):
        assert compress_segments([], 1.0) == []
        assert compress_segments([(0, 0)], 1.0) == []


class TestTransitionTime:
    def test_pure_rotation(self, robot_params):
        t = transition_time([(0, 0)], 0.0, math.pi, robot_params, 1.0)
        assert t == pytest.approx(math.pi / robot_params.omega)

    def test_straight_hop(self, robot_params):
        # aligned entry and exit: no turning, just the drive
        t = transition_time([(0, 0), (1, 0), (2, 0)], 0.0, 0.0,
                            robot_params, 1.0)
        assert t == pytest.approx(motion_time(2.0, robot_params))

    def test_turns_charged_at_corners(self, robot_params):
        t = transition_time([(0, 0), (1, 0), (1, 1)], 0.0, math.pi / 2,
                            robot_params, 1.0)
        expect = (motion_time(1.0, robot_params) * 2
                  + turn_time(0.0, math.pi / 2, robot_params))
        assert t == pytest.approx(expect)


class TestTransitionPlanner:
    def world_with_wall(self):
        rows = ["....",
                ".##.",
                "...."]
        return load_map(make_map_text(rows))

    def test_routes_around_obstacles(self):
        planner = TransitionPlanner(self.world_with_wall())
        path = planner.path_cells((0, 1), (3, 1))
        assert path is not None
        assert path[0] == (0, 1) and path[-1] == (3, 1)
        assert not any(c in {(1, 1), (2, 1)} for c in path)
        for a, b in zip(path, path[1:]):
            assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) == 1

    def test_unreachable_returns_none(self):
        rows = [".#.",
                ".#.",
                ".#."]
        planner = TransitionPlanner(load_map(make_map_text(rows)))
        assert planner.path_cells((0, 0), (2, 0)) is None
        assert not planner.reachable((0, 0), (2, 2))

    def test_obstacle_cell_is_not_a_valid_endpoint(self):
        planner = TransitionPlanner(self.world_with_wall())
        assert planner.path_cells((0, 0), (1, 1)) is None

    def test_distance_optimal(self):
        # around a 2-wide wall: diagonal, straight, diagonal
        planner = TransitionPlanner(self.world_with_wall())
        path = planner.path_cells((0, 1), (3, 1))
        dist = sum(math.hypot(b[0] - a[0], b[1] - a[1])
                   for a, b in zip(path, path[1:]))
        assert dist == pytest.approx(1.0 + 2.0 * math.sqrt(2))


def random_instance(rng, k_mid):
    """A random metric-free directed instance with k_mid interior sets."""
    sets, vid = [[0]], 1
    for _ in range(k_mid):
        size = rng.randint(1, 3)
        sets.append(list(range(vid, vid + size)))
        vid += size
    sets.append([vid])
    nv = vid + 1
    costs = np.array([[rng.uniform(1.0, 50.0) for _ in range(nv)]
                      for _ in range(nv)])
    vertices = [Vertex(0, (0, 0), 0.0, (0, 0), 0.0, 0.0) for _ in range(nv)]
    for si, ids in enumerate(sets):
        for v in ids:
            vertices[v].set_id = si
    return GtspInstance(sets, vertices, costs)


class TestSolveGtsp:
    def test_matches_oracle_on_small_instances(self):
        rng = random.Random(1234)
        for trial in range(25):
            k = rng.randint(1, 6)
            inst = random_instance(rng, k)
            tour = solve_gtsp(inst, deadline=1.0, seed=trial)
            want = brute_force_gtsp(inst.costs, inst.sets[1:-1], 0,
                                    inst.sets[-1])
            assert tour.total_cost <= want.optimum + 1e-6

    def test_tour_shape(self):
        rng = random.Random(9)
        inst = random_instance(rng, 5)
        tour = solve_gtsp(inst, deadline=0.2, seed=0)
        ids = tour.vertex_ids
        assert ids[0] == inst.sets[0][0] and ids[-1] == inst.sets[-1][0]
        visited = {inst.vertices[v].set_id for v in ids}
        assert visited == set(range(len(inst.sets)))
        assert tour.total_cost == pytest.approx(
            sum(inst.costs[a, b] for a, b in zip(ids, ids[1:])))

    def test_deterministic_for_fixed_seed(self):
        rng = random.Random(77)
        inst = random_instance(rng, 9)
        t1 = solve_gtsp(inst, deadline=0.3, seed=5)
        t2 = solve_gtsp(inst, deadline=0.3, seed=5)
        assert t1.vertex_ids == t2.vertex_ids
        assert t1.total_cost == t2.total_cost

    def test_infeasible_raises(self):
        inst = random_instance(random.Random(0), 2)
        inst.costs[:, inst.sets[1][0]] = np.inf
        inst.sets[1][:] = inst.sets[1][:1]
        with pytest.raises(TourInfeasible):
            solve_gtsp(inst, deadline=0.1, seed=0)


class TestPlanTour:
    def test_visits_every_rank(self, robot_params):
        world = load_map(make_map_text(["....", "....", "...."],
                                       cell_size=0.8))
        iop = extract_iop(world)
        sol = plan_ranks(iop)
        path = plan_tour(sol, Pose(0.4, 0.4, 0.0), world, robot_params,
                         deadline=0.3, seed=0)
        toured = {s.rank.pair for s in path.rank_steps()}
        assert toured == sol.pairs()
        assert path.covered_cells() >= set(iop.cells)
        assert path.cost > 0.0

    def test_deterministic(self, robot_params):
        world = load_map(make_map_text([".....", ".#...", "....."],
                                       cell_size=0.8))
        sol = plan_ranks(extract_iop(world))
        args = (sol, Pose(0.4, 0.4, 0.0), world, robot_params)
        p1 = plan_tour(*args, deadline=0.3, seed=3)
        p2 = plan_tour(*args, deadline=0.3, seed=3)
        assert [s.cells for s in p1.steps] == [s.cells for s in p2.steps]
        assert p1.cost == p2.cost

    def test_unreachable_ranks_are_reported(self, robot_params):
        # the right column is walled off but believed free
        world = load_map(make_map_text(["..#.", "..#.", "..#."],
                                       cell_size=0.8))
        iop = extract_iop(world)
        sol = plan_ranks(iop)
        path = plan_tour(sol, Pose(0.4, 0.4, 0.0), world, robot_params,
                         deadline=0.2, seed=0)
        missed = {c for r in path.unreachable for c in r.cells}
        assert missed == {(3, 0), (3, 1), (3, 2)}


class TestRetainedSections:
    def test_splits_at_changed_ranks(self, robot_params):
        world = load_map(make_map_text(["....", "....", "...."],
                                       cell_size=0.8))
        sol = plan_ranks(extract_iop(world))
        path = plan_tour(sol, Pose(0.4, 0.4, 0.0), world, robot_params,
                         deadline=0.2, seed=0)
        order = [s.rank for s in path.rank_steps()]
        changed = {order[1].pair}
        secs = retained_sections(path, changed, set())
        kept = [r for sec in secs for r in sec.ranks]
        assert [r.pair for r in kept] == [order[0].pair, order[2].pair]
        assert len(secs) == 2

    def test_contiguous_ranks_stay_together(self, robot_params):
        world = load_map(make_map_text(["....", "....", "...."],
                                       cell_size=0.8))
        sol = plan_ranks(extract_iop(world))
        path = plan_tour(sol, Pose(0.4, 0.4, 0.0), world, robot_params,
                         deadline=0.2, seed=0)
        secs = retained_sections(path, set(), set())
        assert len(secs) == 1
        assert len(secs[0].ranks) == len(path.rank_steps())


def test_rank_sweep_time_matches_motion_model(robot_params):
    rank = Rank(HORIZONTAL, tuple((c, 0) for c in range(5)))
    assert (rank_sweep_time(rank, robot_params, 0.8)
            == pytest.approx(motion_time(4 * 0.8, robot_params)))
