"""Sanity checks for the exhaustive reference solvers themselves.

The oracles pin down ground truth for the rest of the suite, so their own
tests lean on hand-countable instances and internal consistency properties.
"""

import random

import pytest

from conftest import rand_polyomino
from covreplan.flowgraphs import HORIZONTAL, VERTICAL
from covreplan.oracle import (OracleTooLarge, brute_force_gtsp,
                              brute_force_min_ranks, brute_force_replan,
                              check_approx_bound)
from covreplan.rankplanner import Rank, solution_from_ranks
from covreplan.worldmodel import Iop


class TestMinRanks:
    def test_single_cell(self):
        assert brute_force_min_ranks(Iop([(0, 0)])).optimum == 1

    def test_straight_line(self):
        assert brute_force_min_ranks(
            Iop([(c, 0) for c in range(6)])).optimum == 1

    def test_square_takes_one_per_row(self):
        for k in (2, 3, 4):
            iop = Iop([(c, r) for r in range(k) for c in range(k)])
            assert brute_force_min_ranks(iop).optimum == k

    def test_plus_pentomino(self):
        # one straight segment through the middle, two leftovers
        iop = Iop([(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)])
        assert brute_force_min_ranks(iop).optimum == 3

    def test_l_shape(self):
        # a 1-wide L is two straight segments
        iop = Iop([(0, 0), (0, 1), (0, 2), (1, 2), (2, 2)])
        assert brute_force_min_ranks(iop).optimum == 2

    def test_witness_is_consistent(self):
        rng = random.Random(11)
        for _ in range(15):
            iop = Iop(rand_polyomino(rng, rng.randint(1, 14)))
            res = brute_force_min_ranks(iop)
            w = res.witness
            assert w.m == res.optimum == len(w.ranks)
            covered = [c for r in w.ranks for c in r.cells]
            assert sorted(covered) == sorted(iop.cells)

    def test_size_limit(self):
        with pytest.raises(OracleTooLarge):
            brute_force_min_ranks(Iop([(c, 0) for c in range(21)]))


class TestReplan:
    def test_unchanged_region_costs_nothing_new(self):
        old = solution_from_ranks([Rank(HORIZONTAL, ((0, 0), (1, 0), (2, 0)))])
        iop = Iop([(0, 0), (1, 0), (2, 0)])
        res = brute_force_replan(iop, old, m_bar=0)
        assert res.feasible and res.optimum == 1
        assert res.witness.m_new == 0

    def test_shrunken_rank_needs_budget(self):
        # the old 3-cell rank lost its tail: any cover of what is left uses
        # at least one rank with a fresh endpoint pair
        old = solution_from_ranks([Rank(HORIZONTAL, ((0, 0), (1, 0), (2, 0)))])
        iop = Iop([(0, 0), (1, 0)])
        assert not brute_force_replan(iop, old, m_bar=0).feasible
        res = brute_force_replan(iop, old, m_bar=1)
        assert res.feasible and res.optimum == 1 and res.witness.m_new == 1

    def test_prefers_fewer_new_ranks_on_ties(self):
        # two old vertical ranks survive intact next to one fresh cell
        old = solution_from_ranks([Rank(VERTICAL, ((0, 0), (0, 1))),
                                   Rank(VERTICAL, ((1, 0), (1, 1)))])
        iop = Iop([(0, 0), (0, 1), (1, 0), (1, 1)])
        res = brute_force_replan(iop, old, m_bar=2)
        assert res.optimum == 2 and res.witness.m_new == 0

    def test_unbounded_budget_matches_min_ranks(self):
        rng = random.Random(23)
        for _ in range(12):
            cells = rand_polyomino(rng, rng.randint(1, 9))
            iop = Iop(cells)
            old = solution_from_ranks([Rank(HORIZONTAL, (c,)) for c in cells])
            res = brute_force_replan(iop, old, m_bar=iop.n)
            assert res.optimum == brute_force_min_ranks(iop).optimum

    def test_witness_partitions_the_region(self):
        rng = random.Random(5)
        for _ in range(10):
            cells = rand_polyomino(rng, rng.randint(2, 10))
            iop = Iop(cells)
            old = solution_from_ranks([Rank(VERTICAL, (c,)) for c in cells])
            res = brute_force_replan(iop, old, m_bar=iop.n)
            covered = [c for r in res.witness.ranks for c in r.cells]
            assert sorted(covered) == sorted(iop.cells)

    def test_size_limit(self):
        cells = [(c, 0) for c in range(13)]
        old = solution_from_ranks([Rank(HORIZONTAL, tuple(cells))])
        with pytest.raises(OracleTooLarge):
            brute_force_replan(Iop(cells), old, m_bar=1)


class TestGtsp:
    def test_single_set(self):
        cost = [[0.0, 2.0, 9.0],
                [9.0, 0.0, 3.0],
                [9.0, 9.0, 0.0]]
        res = brute_force_gtsp(cost, [[1]], start=0, end_set=[2])
        assert res.optimum == pytest.approx(5.0)
        assert res.witness == [0, 1, 2]

    def test_picks_cheaper_vertex_inside_set(self):
        # set {1, 2}: going through 2 is cheaper overall
        cost = [[0.0, 5.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 0.0, 0.0]]
        res = brute_force_gtsp(cost, [[1, 2]], start=0, end_set=[3])
        assert res.optimum == pytest.approx(2.0)
        assert res.witness == [0, 2, 3]

    def test_order_matters(self):
        # 0 -> a -> b -> end is forced to be the cheap direction
        cost = [[0, 1, 10, 0],
                [0, 0, 1, 10],
                [0, 10, 0, 1],
                [0, 0, 0, 0]]
        res = brute_force_gtsp(cost, [[1], [2]], start=0, end_set=[3])
        assert res.optimum == pytest.approx(3.0)
        assert res.witness == [0, 1, 2, 3]

    def test_visits_each_set_once(self):
        rng = random.Random(7)
        for _ in range(10):
            k = rng.randint(1, 5)
            sets, vid = [], 1
            for _ in range(k):
                size = rng.randint(1, 3)
                sets.append(list(range(vid, vid + size)))
                vid += size
            end = [vid]
            nv = vid + 1
            cost = [[rng.uniform(0.0, 9.0) for _ in range(nv)]
                    for _ in range(nv)]
            res = brute_force_gtsp(cost, sets, start=0, end_set=end)
            path = res.witness
            assert path[0] == 0 and path[-1] == end[0]
            mids = path[1:-1]
            assert len(mids) == k
            for s in sets:
                assert len(set(mids) & set(s)) == 1
            total = sum(cost[a][b] for a, b in zip(path, path[1:]))
            assert res.optimum == pytest.approx(total)

    def test_size_limit(self):
        cost = [[0.0] * 11 for _ in range(11)]
        with pytest.raises(OracleTooLarge):
            brute_force_gtsp(cost, [[i] for i in range(1, 10)],
                             start=0, end_set=[10])


def test_check_approx_bound():
    assert check_approx_bound(2, 2.0)
    assert check_approx_bound(2, 2.5)
    assert not check_approx_bound(3, 2.5)
