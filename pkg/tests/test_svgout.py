"""SVG rendering output."""

import xml.etree.ElementTree as ET

from conftest import make_map_text
from covreplan.rankplanner import plan_ranks
from covreplan.svgout import SCALE, render_svg
from covreplan.tourplanner import plan_tour
from covreplan.worldmodel import Pose, extract_iop, load_map


def small_world():
    return load_map(make_map_text(["....",
                                   ".#o.",
                                   "...."], cell_size=0.8))


def test_world_only_render_is_valid_xml():
    svg = render_svg(small_world())
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert root.get("width") == str(4 * SCALE)
    assert root.get("height") == str(3 * SCALE)


def test_obstacles_are_drawn():
    svg = render_svg(small_world())
    # one known (dark) and one hidden (yellow) obstacle cell
    assert svg.count('fill="#33373d"') == 1
    assert svg.count('fill="#e8b84b"') == 1


def test_path_and_start_marker(robot_params):
    world = small_world()
    sol = plan_ranks(extract_iop(world))
    path = plan_tour(sol, Pose(0.4, 0.4, 0.0), world, robot_params,
                     deadline=0.2, seed=0)
    svg = render_svg(world, path)
    assert "<polyline" in svg
    assert "<circle" in svg
    ET.fromstring(svg)  # well formed


def test_covered_cells_layer():
    world = small_world()
    svg = render_svg(world, covered={(0, 0), (1, 0)})
    assert svg.count('fill="#bfe3bf"') == 2


def test_render_is_deterministic():
    world = small_world()
    assert render_svg(world, covered={(2, 0)}) \
        == render_svg(world, covered={(2, 0)})
