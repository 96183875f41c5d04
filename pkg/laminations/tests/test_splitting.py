# laminations/tests/test_splitting.py
import tempfile
from fractions import Fraction
from pathlib import Path

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from laminations.cones import check_carrying, cone_contains, extreme_rays, image_rays
from laminations.splitting import (
    DEGENERATE, Member, Partition, PartitionError, PartitionSequence, Side, SplitError, SplitMove,
    central_pieces, central_split, dump_sequence, full_splits, generate_partition_sequence, identity_matrix,
    nesting_diameters, partition_move, split, split_toward, verify_partition_properties,
)
from laminations.standard import standard_partition
from laminations.tracks import TrackClass, classify_track, large_branches, loads_tracks, region_census, validate_track

from .fixtures import complete_tracks, dumbbell_track, standard_family, theta_track

coefficients = st.lists(st.integers(min_value=1, max_value=20), min_size=1, max_size=40)

# measures on standard-a: loops 0-4, stems 5-9, chain edges 10 and 11
BALANCED = (2, 1, 2, 1, 2, 4, 2, 4, 2, 4, 2, 2)  # w_A = w_C at branch 5
GENERIC = (5, 1, 7, 1, 4, 10, 2, 14, 2, 8, 8, 6)


def positive_measure(track, weights):
    rays = extreme_rays(track)
    weights = (weights * len(rays))[:len(rays)]
    return tuple(sum(c * r[i] for c, r in zip(weights, rays)) for i in range(track.num_branches))


class SplitTests(SimpleTestCase):
    def test_only_large_branches_split(self):
        with self.assertRaises(SplitError):
            split(theta_track(), SplitMove(1, Side.LEFT))

    def test_children_are_carried(self):
        track = complete_tracks()[0]
        for branch in large_branches(track):
            for side in Side:
                child, matrix = split(track, SplitMove(branch, side))
                self.assertTrue(validate_track(child))
                self.assertEqual(region_census(child), region_census(track))
                check_carrying(track, child, matrix)
                self.assertEqual(child.num_branches, track.num_branches)

    def test_standard_tracks_have_three_large_branches(self):
        for track in complete_tracks():
            self.assertEqual(large_branches(track), (5, 7, 9))

    def test_full_splits(self):
        for track in complete_tracks():
            results = full_splits(track)
            self.assertEqual(len(results), 2 ** len(large_branches(track)))
            self.assertEqual(len({tuple(fs.moves) for fs in results}), len(results))
            self.assertTrue(any(fs.kind is TrackClass.COMPLETE for fs in results))
            for fs in results:
                self.assertEqual([m.branch for m in fs.moves], list(large_branches(track)))
                check_carrying(track, fs.track, [list(row) for row in fs.matrix])
                self.assertIs(classify_track(fs.track).kind, fs.kind)
                self.assertEqual(fs.kept, fs.kind is not TrackClass.OTHER)

    def test_central_split_of_a_standard_track(self):
        track = complete_tracks()[0]
        for branch in large_branches(track):
            common, matrix = central_split(track, branch)
            self.assertEqual((common.num_switches, common.num_branches), (6, 9))
            check_carrying(track, common, matrix)

    def test_central_split_with_two_components(self):
        pieces = central_pieces(dumbbell_track(), 10)
        self.assertEqual([p.name for p, _ in pieces], ['dumbbell/C10.0', 'dumbbell/C10.1'])
        with self.assertRaises(SplitError):
            central_split(dumbbell_track(), 10)

    def test_measure_must_be_positive(self):
        track = complete_tracks()[0]
        with self.assertRaises(SplitError):
            split_toward(track, (0,) * track.num_branches)
        with self.assertRaises(SplitError):
            split_toward(track, (1,) * track.num_branches)

    def test_split_toward_carries_the_measure(self):
        step = split_toward(complete_tracks()[0], GENERIC)
        self.assertFalse(step.degenerate)
        self.assertEqual(step.moves, (SplitMove(5, Side.RIGHT), SplitMove(7, Side.LEFT), SplitMove(9, Side.RIGHT)))
        self.assertEqual(tuple(sum(a * b for a, b in zip(row, step.weights)) for row in step.matrix), GENERIC)
        self.assertTrue(all(v > 0 for v in step.weights))

    def test_degenerate_measure(self):
        track = complete_tracks()[0]
        step = split_toward(track, BALANCED)
        self.assertTrue(step.degenerate)
        self.assertEqual(step.move, DEGENERATE)
        self.assertEqual(step.moves, ())
        shared = sorted({r for piece, matrix in step.common for r in image_rays(matrix, extreme_rays(piece))})
        self.assertTrue(cone_contains(shared, BALANCED))
        run = nesting_diameters(track, BALANCED, 15)
        self.assertEqual(run.degenerate_at, 1)
        self.assertEqual(len(run.diameters), 1)


class NestingTests(SimpleTestCase):
    @settings(max_examples=8, deadline=None)
    @given(st.integers(min_value=0, max_value=2), coefficients)
    def test_diameters_never_grow(self, index, weights):
        track = complete_tracks()[index]
        run = nesting_diameters(track, positive_measure(track, weights), 6)
        self.assertTrue(run.nonincreasing, run.diameters)
        if run.degenerate_at is None:
            self.assertEqual(len(run.diameters), 6)

    def test_diameters_decay(self):
        for track in complete_tracks():
            run = nesting_diameters(track, positive_measure(track, [997, 641, 313, 859, 127, 571]), 15)
            self.assertTrue(run.nonincreasing, run.diameters)
            if run.degenerate_at is None:
                self.assertLess(run.ratio, Fraction(1, 100), (track.name, [float(d) for d in run.diameters]))

    def test_length_must_be_positive(self):
        track = complete_tracks()[0]
        with self.assertRaises(SplitError):
            nesting_diameters(track, positive_measure(track, [1]), 0)


class PartitionTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.p0 = standard_partition(standard_family())
        cls.sequence = generate_partition_sequence(cls.p0, 1)

    def test_standard_partition(self):
        self.assertEqual(len(self.p0.complete), 3)
        self.assertEqual(len(self.p0.nearly_complete), 3)
        self.assertEqual(self.p0.depth, 0)
        self.assertTrue(self.p0.assumptions)

    def test_complete_move(self):
        target = self.p0.complete[0]
        branch = large_branches(target.track)[0]
        kinds = [classify_track(split(target.track, SplitMove(branch, side))[0]).kind for side in Side]
        kept = kinds.count(TrackClass.COMPLETE)
        sigma = 0
        if kept == 2:
            sigma = int(classify_track(central_split(target.track, branch)[0]).kind is TrackClass.NEARLY_COMPLETE)
        moved = partition_move(self.p0, target.name, branch)
        self.assertEqual(len(moved.complete), len(self.p0.complete) - 1 + kept)
        self.assertEqual(len(moved.nearly_complete), len(self.p0.nearly_complete) + sigma)
        self.assertNotIn(target, moved.complete)
        with self.assertRaises(PartitionError):
            partition_move(self.p0, 'nowhere', branch)
        with self.assertRaises(PartitionError):
            partition_move(self.p0, target.name, 0)

    def test_nearly_complete_move(self):
        target = self.p0.nearly_complete[0]
        branch = large_branches(target.track)[0]
        kinds = [classify_track(split(target.track, SplitMove(branch, side))[0]).kind for side in Side]
        moved = partition_move(self.p0, target.name, branch)
        self.assertEqual(moved.complete, self.p0.complete)
        self.assertEqual(len(moved.nearly_complete),
                         len(self.p0.nearly_complete) - 1 + kinds.count(TrackClass.NEARLY_COMPLETE))
        self.assertNotIn(target, moved.nearly_complete)

    def test_complete_move_without_a_connected_common_subtrack(self):
        track = dumbbell_track()
        root = Member('dumbbell', track, TrackClass.COMPLETE, 0,
                      tuple(map(tuple, identity_matrix(track.num_branches))))
        moved = partition_move(Partition((root,), ()), 'dumbbell', 10)
        self.assertEqual([m.name for m in moved.complete], ['dumbbell/L10', 'dumbbell/R10'])
        self.assertEqual(moved.nearly_complete, ())

    def test_depth_one_properties(self):
        self.assertEqual(self.sequence.depth, 1)
        self.assertFalse(self.sequence.truncated)
        report = verify_partition_properties(self.sequence)
        self.assertTrue(report.ok, [str(v) for v in report.violations])
        self.assertGreater(report.checked['subdivision'], 0)
        self.assertGreater(report.checked['full-splits'], 0)

    def test_depth_two_properties(self):
        sequence = generate_partition_sequence(self.p0, 2)
        self.assertEqual(sequence.depth, 2)
        report = verify_partition_properties(sequence)
        self.assertTrue(report.ok, [str(v) for v in report.violations[:5]])
        self.assertEqual(set(report.checked), {'subdivision', 'adjacency', 'full-splits', 'disjointness'})

    def test_depth_three_generation(self):
        sequence = generate_partition_sequence(self.p0, 3)
        self.assertEqual(sequence.depth, 3)
        self.assertFalse(sequence.truncated)
        for k, partition in enumerate(sequence.partitions):
            self.assertEqual(partition.depth, k)
            self.assertTrue(all(m.complete for m in partition.complete))
            self.assertTrue(all(m.kind is TrackClass.NEARLY_COMPLETE for m in partition.nearly_complete))
        for before, after in zip(sequence.partitions, sequence.partitions[1:]):
            self.assertGreaterEqual(len(after.complete), len(before.complete))

    def test_missing_member_breaks_subdivision(self):
        broken = Partition(self.p0.complete[1:], self.p0.nearly_complete, 0, self.p0.assumptions)
        report = verify_partition_properties(PartitionSequence([broken, self.sequence.partitions[1]]))
        self.assertFalse(report.ok)
        lost = {v.member for v in report.violations if v.property == 'subdivision'}
        self.assertTrue(lost)
        self.assertTrue(all(name.startswith(self.p0.complete[0].name + '/') for name in lost))

    def test_missing_parent_breaks_adjacency(self):
        sigma = self.p0.nearly_complete[0]
        others = tuple(m for m in self.p0.complete if m.chart != sigma.chart)
        report = verify_partition_properties(PartitionSequence([Partition(others, (sigma,), 0)]))
        violations = [v for v in report.violations if v.property == 'adjacency']
        self.assertEqual([v.member for v in violations], [sigma.name])

    def test_member_cap_truncates(self):
        sequence = generate_partition_sequence(self.p0, 2, max_tracks=3)
        self.assertTrue(sequence.truncated)
        self.assertEqual(sequence.depth, 0)

    def test_member_cap_stops_every_later_depth(self):
        cap = len(self.sequence.partitions[1]) - 1
        sequence = generate_partition_sequence(self.p0, 3, max_tracks=cap)
        self.assertTrue(sequence.truncated)
        self.assertEqual(sequence.depth, 0)
        self.assertEqual(len([line for line in sequence.log if 'truncated' in line]), 1)

    def test_dump_sequence(self):
        with tempfile.TemporaryDirectory() as folder:
            written = dump_sequence(self.sequence, folder)
            names = sorted(path.name for path in written)
            self.assertEqual(names, ['depth-0.tracks', 'depth-1.tracks', 'moves.log'])
            records = loads_tracks((Path(folder) / 'depth-1.tracks').read_text())
            self.assertEqual(len(records), len(self.sequence.partitions[1]))
