"""Command-line interface and clutter generation."""

import math

import pytest

from conftest import make_map_text
from covreplan.cli import generate_clutter, main
from covreplan.worldmodel import (CellState, Pose, RobotParams, Scenario,
                                  dump_map, dump_scenario, load_map,
                                  reachable_cells)


def scenario_text(seed=0):
    params = RobotParams(tool_width=0.8, v_max=1.0, accel=0.5,
                         omega=math.radians(30.0), sensor_radius=5.6)
    return dump_scenario(Scenario(Pose(0.4, 0.4, 0.0), params, seed))


@pytest.fixture
def map_file(tmp_path):
    p = tmp_path / "map.txt"
    p.write_text(make_map_text(["." * 8] * 6, cell_size=0.8))
    return p


@pytest.fixture
def scenario_file(tmp_path):
    p = tmp_path / "scen.txt"
    p.write_text(scenario_text())
    return p


class TestGenerateClutter:
    def base(self, w=20, h=20):
        return load_map(make_map_text(["." * w] * h, cell_size=0.8))

    def test_returns_a_new_world(self):
        world = self.base()
        out = generate_clutter(world, 0.10, seed=0)
        assert out is not world
        assert (world.grid == CellState.FREE).all()  # input untouched

    def test_hits_the_requested_fraction(self):
        world = self.base()
        out = generate_clutter(world, 0.10, seed=1)
        hidden = int((out.grid == CellState.HIDDEN_OBSTACLE).sum())
        assert hidden == round(0.10 * world.width * world.height)

    def test_free_space_stays_connected(self):
        out = generate_clutter(self.base(), 0.15, seed=2)
        free = [(c, r) for r in range(out.height) for c in range(out.width)
                if out.grid[r, c] == CellState.FREE]
        reach = reachable_cells(out, free[0], believed=False)
        assert reach == set(free)

    def test_deterministic_per_seed(self):
        a = generate_clutter(self.base(), 0.10, seed=7)
        b = generate_clutter(self.base(), 0.10, seed=7)
        c = generate_clutter(self.base(), 0.10, seed=8)
        assert (a.grid == b.grid).all()
        assert not (a.grid == c.grid).all()

    def test_zero_fraction_is_a_plain_copy(self):
        out = generate_clutter(self.base(), 0.0, seed=0)
        assert (out.grid == CellState.FREE).all()


class TestCliCommands:
    def test_plan(self, map_file, scenario_file, capsys):
        rc = main(["plan", str(map_file), str(scenario_file)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "cells=48" in out and "ranks=" in out

    def test_plan_writes_svg(self, map_file, scenario_file, tmp_path, capsys):
        svg = tmp_path / "plan.svg"
        rc = main(["plan", str(map_file), str(scenario_file),
                   "--out", str(svg)])
        assert rc == 0
        assert svg.read_text().startswith("<svg")

    def test_simulate_writes_csv(self, tmp_path, scenario_file, capsys):
        m = tmp_path / "map.txt"
        m.write_text(make_map_text(["......",
                                    "..o...",
                                    "......",
                                    "......"], cell_size=0.8))
        out_csv = tmp_path / "metrics.csv"
        rc = main(["simulate", str(m), str(scenario_file),
                   "--variant", "milp1", "--out-csv", str(out_csv)])
        assert rc == 0
        lines = out_csv.read_text().strip().splitlines()
        assert lines[0].startswith("trial,variant,seed")
        assert lines[1].split(",")[1] == "milp1"

    def test_simulate_repeats_are_byte_identical(self, tmp_path,
                                                 scenario_file, capsys):
        m = tmp_path / "map.txt"
        m.write_text(make_map_text(["......",
                                    "..o...",
                                    "...o..",
                                    "......"], cell_size=0.8))
        outs = []
        for _ in range(2):
            rc = main(["simulate", str(m), str(scenario_file),
                       "--variant", "milp1"])
            assert rc == 0
            outs.append(capsys.readouterr().out)
        assert outs[0] == outs[1]

    def test_gen_clutter_round_trips(self, map_file, tmp_path, capsys):
        out = tmp_path / "cluttered.txt"
        rc = main(["gen-clutter", str(map_file), "--clutter", "0.1",
                   "--seed", "3", "--out", str(out)])
        assert rc == 0
        world = load_map(out.read_text())
        assert int((world.grid == CellState.HIDDEN_OBSTACLE).sum()) == 5

    def test_missing_file_is_an_error(self, scenario_file, capsys):
        rc = main(["plan", "/nonexistent/map.txt", str(scenario_file)])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_malformed_map_is_an_error(self, tmp_path, scenario_file, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("not a map\n")
        rc = main(["plan", str(bad), str(scenario_file)])
        assert rc == 1

    def test_fit_estimator_from_samples(self, tmp_path, capsys):
        samples = tmp_path / "samples.csv"
        samples.write_text("m,seconds\n2,0.01\n5,0.1\n10,0.6\n20,3.0\n")
        rc = main(["fit-estimator", "--samples", str(samples)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "samples=4" in out and "fit=cubic" in out

    def test_benchmark_small(self, tmp_path, scenario_file, capsys):
        m = tmp_path / "map.txt"
        m.write_text(make_map_text(["." * 8] * 8, cell_size=0.8))
        rc = main(["benchmark", str(m), str(scenario_file),
                   "--variants", "gd", "--trials", "1", "--clutter", "0.05"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "mean_total_s gd" in out

    def test_unknown_benchmark_variant(self, map_file, scenario_file, capsys):
        rc = main(["benchmark", str(map_file), str(scenario_file),
                   "--variants", "warp", "--trials", "1"])
        assert rc == 2
