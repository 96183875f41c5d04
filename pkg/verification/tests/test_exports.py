# verification/tests/test_exports.py
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from laminations.tests.fixtures import S03, complete_tracks, theta_track
from laminations.tracks import TrainTrack
from noebeling.geometry import PLPath3, Point3
from noebeling.grid import Box, grid_of_cover, uniform_cover
from noebeling.surds import SQRT2
from verification.exports import (
    ExportError, diagram_graph, diameter_frame, grid_scene_frame, lattice_segment_count, track_diagram,
    write_diagram,
)


def nesting_document(diameters):
    return {'checks': [
        {'name': 'measure-00', 'data': {'track': 'standard-a', 'diameters': diameters, 'degenerate_at': None}},
        {'name': 'other', 'data': {}},
    ]}


class DiameterTests(SimpleTestCase):
    def test_frame(self):
        frame = diameter_frame(nesting_document(['2', '3/2', '1/2']))
        self.assertEqual(list(frame['step']), [0, 1, 2])
        self.assertEqual(list(frame['value']), [2.0, 1.5, 0.5])
        self.assertTrue(frame['value'].is_monotonic_decreasing)

    def test_unknown_measure(self):
        with self.assertRaises(ExportError):
            diameter_frame(nesting_document(['1']), measure='measure-99')


class DiagramTests(SimpleTestCase):
    def test_theta(self):
        diagram = track_diagram(theta_track())
        self.assertEqual(len(diagram['nodes']), 2)
        self.assertEqual(len(diagram['edges']), 3)
        self.assertEqual(diagram['edges'][0]['kind'], 'LARGE')
        self.assertEqual(diagram['edges'][1]['source_slot'], 'S1')
        graph = diagram_graph(diagram)
        self.assertEqual((graph.number_of_nodes(), graph.number_of_edges()), (2, 3))

    def test_circle(self):
        diagram = track_diagram(TrainTrack.circle(S03, 1, 2, name='loop'))
        self.assertEqual(diagram['nodes'], [])
        self.assertEqual(len(diagram['edges']), 1)
        self.assertNotIn('source', diagram['edges'][0])

    def test_svg_is_reproducible(self):
        with tempfile.TemporaryDirectory() as tmp:
            json_path, svg_path = write_diagram(complete_tracks()[0], Path(tmp) / 'one')
            first = svg_path.read_text()
            _, again = write_diagram(complete_tracks()[0], Path(tmp) / 'two')
            self.assertTrue(first.lstrip().startswith('<?xml'))
            self.assertEqual(first, again.read_text())
            self.assertEqual(json_path.name, 'standard-a.json')


class GridSceneTests(SimpleTestCase):
    def test_uniform_level_one(self):
        grid = grid_of_cover(uniform_cover(1))
        frame = grid_scene_frame(grid)
        self.assertEqual(len(frame), 54)
        self.assertEqual(lattice_segment_count(1, Box.unit()), 54)
        self.assertEqual(lattice_segment_count(2, Box.unit()), 3 * 4 * 25)

    def test_paths_follow_the_grid(self):
        grid = grid_of_cover(uniform_cover(1))
        path = PLPath3.through([Point3(SQRT2 / 8, SQRT2 / 8, SQRT2 / 8), Point3(SQRT2 / 5, SQRT2 / 6, SQRT2 / 7)])
        frame = grid_scene_frame(grid, [('f', path)])
        rows = frame[frame['kind'] == 'path']
        self.assertEqual(len(rows), 1)
        self.assertAlmostEqual(rows.iloc[0]['x0'], 2 ** 0.5 / 8)
