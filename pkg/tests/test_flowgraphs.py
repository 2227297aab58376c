import random

import pytest

from conftest import rand_polyomino
from covreplan.flowgraphs import (HORIZONTAL, VERTICAL, build_flow_matrices,
                                  runs)
from covreplan.worldmodel import Iop


class TestRuns:
    def test_rectangle_rows_and_columns(self):
        iop = Iop([(c, r) for r in range(2) for c in range(3)])
        hruns = runs(iop, HORIZONTAL)
        vruns = runs(iop, VERTICAL)
        assert [len(r.cells) for r in hruns] == [3, 3]
        assert [len(r.cells) for r in vruns] == [2, 2, 2]

    def test_axis_order(self):
        iop = Iop([(0, 0), (1, 0), (2, 0)])
        (run,) = runs(iop, HORIZONTAL)
        assert [iop.cells[i] for i in run.cells] == [(0, 0), (1, 0), (2, 0)]

    def test_singletons(self):
        iop = Iop([(0, 0), (2, 0)])  # gap between the two cells
        assert [len(r.cells) for r in runs(iop, HORIZONTAL)] == [1, 1]

    def test_unknown_axis_raises(self):
        with pytest.raises(ValueError):
            runs(Iop([(0, 0)]), "D")

    def test_partition_property(self):
        rng = random.Random(3)
        for _ in range(20):
            iop = Iop(rand_polyomino(rng, rng.randint(1, 18)))
            for axis in (HORIZONTAL, VERTICAL):
                seen = [i for run in runs(iop, axis) for i in run.cells]
                assert sorted(seen) == list(range(iop.n))


class TestFlowMatrices:
    def test_border_and_interior_rows(self):
        iop = Iop([(0, 0), (1, 0)])
        i = {c: k for k, c in enumerate(iop.cells)}
        flows = build_flow_matrices(iop)
        # (0,0) has no left neighbor: bare coefficient
        assert flows.a_l[i[(0, 0)]] == [(i[(0, 0)], 1.0)]
        # (1,0) subtracts its left neighbor's orientation
        assert flows.a_l[i[(1, 0)]] == [(i[(1, 0)], 1.0), (i[(0, 0)], -1.0)]
        # both lack vertical neighbors
        assert flows.a_t[i[(0, 0)]] == [(i[(0, 0)], 1.0)]
        assert flows.a_b[i[(1, 0)]] == [(i[(1, 0)], 1.0)]

    def test_row_counts_match_cells(self):
        iop = Iop([(c, r) for r in range(3) for c in range(4)])
        flows = build_flow_matrices(iop)
        for rows_ in (flows.a_l, flows.a_r, flows.a_t, flows.a_b):
            assert len(rows_) == iop.n
