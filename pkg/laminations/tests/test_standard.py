# laminations/tests/test_standard.py
import tempfile
from itertools import product
from pathlib import Path

from django.test import SimpleTestCase

from laminations.standard import (
    CROSS_CHART_ASSUMPTION, STANDARD_FILE, STANDARD_PANTS, FamilyError, Pants, PantsDecomposition,
    build_standard_family, check_chart_faces, load_standard_family, mirror_closed, standard_partition,
    standard_track, write_family,
)
from laminations.tracks import TrackClass, TrackError, canonical_key, classify_track, is_isomorphic, subtrack

from .fixtures import standard_family


class PantsTests(SimpleTestCase):
    def test_chain_decomposition(self):
        self.assertEqual(STANDARD_PANTS.validate(), [])
        self.assertEqual([p.name for p in STANDARD_PANTS.outer()], ['P1', 'P3'])

    def test_broken_decomposition(self):
        broken = PantsDecomposition(('c1',), (Pants('P1', (1, 2), ('c1',)), Pants('P2', (3, 4), ('c1',))))
        self.assertTrue(broken.validate())


class FamilyTests(SimpleTestCase):
    def test_shipped_family(self):
        family = standard_family()
        self.assertEqual(len(family.complete), 3)
        self.assertEqual(len(family.nearly_complete), 3)
        for record in family.nearly_complete:
            self.assertIs(record.declared, TrackClass.NEARLY_COMPLETE)
            self.assertEqual(family.parent_of(record).name, record.parent)

    def test_builder_reproduces_the_shipped_family(self):
        built = build_standard_family()
        shipped = standard_family()
        self.assertEqual({canonical_key(r.track) for r in built.records()},
                         {canonical_key(r.track) for r in shipped.records()})
        self.assertEqual(built.twists, {'standard-a': (0, 0, 0), 'standard-b': (0, 1, 1), 'standard-c': (1, 0, 1)})
        self.assertEqual([r.name for r in built.nearly_complete], ['standard-a-1', 'standard-a-3', 'standard-b-1'])

    def test_chain_twists(self):
        tracks = {twist: standard_track(STANDARD_PANTS, twist) for twist in product((0, 1), repeat=3)}
        complete = {t for t, track in tracks.items() if classify_track(track).kind is TrackClass.COMPLETE}
        self.assertEqual(set(tracks) - complete, {(0, 0, 1), (1, 1, 0)})
        self.assertEqual(len({canonical_key(tracks[t]) for t in complete}), 3)
        self.assertTrue(is_isomorphic(tracks[(0, 0, 0)], tracks[(0, 1, 0)]))
        with self.assertRaises(FamilyError):
            standard_track(STANDARD_PANTS, (0, 1))

    def test_only_small_slot_lollipops_can_be_dropped(self):
        track = standard_family().complete[0].track
        for loop in (0, 2, 4):
            with self.assertRaises(TrackError):
                subtrack(track, [loop])

    def test_mirror_closed(self):
        self.assertTrue(mirror_closed(standard_family()))

    def test_chart_faces(self):
        for record in standard_family().complete:
            self.assertEqual(check_chart_faces(record.track), [])

    def test_written_family_reloads_with_digests(self):
        with tempfile.TemporaryDirectory() as folder:
            written = write_family(build_standard_family(), folder)
            self.assertTrue(any(path.suffix == '.cert' for path in written))
            manifest = Path(folder) / 'standard_s05.manifest'
            self.assertEqual(len(manifest.read_text().split()[-1]), 16)
            family = load_standard_family(Path(folder) / STANDARD_FILE.name, manifest)
            self.assertEqual(len(family.complete), 3)

    def test_corrupted_family_is_rejected(self):
        text = STANDARD_FILE.read_text().replace('track standard-a complete', 'track standard-a nearly-complete')
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder) / 'broken.tracks'
            path.write_text(text)
            with self.assertRaises(FamilyError) as caught:
                load_standard_family(path)
            self.assertTrue(caught.exception.problems)

    def test_manifest_mismatch_is_rejected(self):
        with tempfile.TemporaryDirectory() as folder:
            manifest = Path(folder) / 'short.manifest'
            manifest.write_text('manifest 1\ncomplete 2\nnearly-complete 3\n')
            with self.assertRaises(FamilyError):
                load_standard_family(STANDARD_FILE, manifest)

    def test_unparseable_family(self):
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder) / 'garbage.tracks'
            path.write_text('not a track file\n')
            with self.assertRaises(FamilyError):
                load_standard_family(path)


class StandardPartitionTests(SimpleTestCase):
    def test_charts(self):
        partition = standard_partition(standard_family())
        self.assertEqual([m.chart for m in partition.complete], [0, 1, 2])
        self.assertEqual(partition.assumptions, (CROSS_CHART_ASSUMPTION,))
        for sigma in partition.nearly_complete:
            self.assertEqual(len(sigma.chart_rays[0]), 12)
