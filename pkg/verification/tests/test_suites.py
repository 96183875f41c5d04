# verification/tests/test_suites.py
import tempfile

import numpy as np
from django.test import SimpleTestCase

from laminations.tests.fixtures import complete_tracks, nearly_complete_tracks
from laminations.tracks import TrackClass
from verification.config import RunConfig
from verification.suites import (
    NESTING_DECAY, Workspace, census_checks, claim_run, filling_deep_subtracks, filling_proper_subtracks, nesting_run,
    noebeling_run, path_oracle, random_measure, random_recurrent_track, ray_oracle, run_tasks, split_identities,
    task_seeds,
)


def workspace(tmp, **options):
    options.setdefault('depth', 0)
    options.setdefault('out', tmp)
    return Workspace(RunConfig.from_options('verify', options))


class PoolTests(SimpleTestCase):
    def test_results_keep_item_order(self):
        items = [-4, 3, -2, 1, -7, 6]
        self.assertEqual(run_tasks(abs, items), [4, 3, 2, 1, 7, 6])
        self.assertEqual(run_tasks(abs, items, workers=2), [4, 3, 2, 1, 7, 6])

    def test_seeds(self):
        self.assertEqual(task_seeds(0, 'claims', 5), task_seeds(0, 'claims', 5))
        self.assertNotEqual(task_seeds(0, 'claims', 5), task_seeds(1, 'claims', 5))
        self.assertNotEqual(task_seeds(0, 'claims', 5), task_seeds(0, 'oracles', 5))
        self.assertEqual(task_seeds(0, 'claims', 8)[:5], task_seeds(0, 'claims', 5))


class WorkspaceTests(SimpleTestCase):
    def test_depth_zero_tracks(self):
        with tempfile.TemporaryDirectory() as tmp:
            ws = workspace(tmp)
            self.assertEqual(len(ws.tracks(0, TrackClass.COMPLETE)), 3)
            self.assertEqual(len(ws.tracks(0, TrackClass.NEARLY_COMPLETE)), 3)

    def test_census_of_the_family(self):
        with tempfile.TemporaryDirectory() as tmp:
            checks = census_checks(workspace(tmp))
        self.assertEqual(len(checks), 6)
        self.assertTrue(all(c.passed for c in checks), [c.detail for c in checks if not c.passed])
        self.assertEqual(checks[0].anchor, 'five once-punctured monogons and one triangle')
        self.assertEqual(checks[-1].anchor, 'four once-punctured monogons and one once-punctured bigon')


class KeyLemmaTaskTests(SimpleTestCase):
    def test_nearly_complete_tracks(self):
        for track in nearly_complete_tracks():
            self.assertEqual(filling_proper_subtracks(track), [])

    def test_complete_track(self):
        self.assertEqual(filling_deep_subtracks(complete_tracks()[0]), [])


class ConeIdentityTaskTests(SimpleTestCase):
    def test_standard_tracks(self):
        for track in complete_tracks():
            count, failures = split_identities(track)
            self.assertGreater(count, 0)
            self.assertEqual(failures, [])


class NestingTaskTests(SimpleTestCase):
    def test_short_run(self):
        track = complete_tracks()[0]
        weights = random_measure(np.random.default_rng(5), track)
        self.assertTrue(all(w > 0 for w in weights))
        run, error = nesting_run((track, weights, 4))
        self.assertIsNone(error)
        self.assertLessEqual(len(run.diameters), 4)
        self.assertTrue(run.nonincreasing)

    def test_random_measures_decay(self):
        tracks = complete_tracks()
        for index, seed in enumerate(task_seeds(0, 'nesting', 6)):
            track = tracks[index % len(tracks)]
            run, error = nesting_run((track, random_measure(np.random.default_rng(seed), track), 15))
            self.assertIsNone(error)
            self.assertTrue(run.nonincreasing, run.diameters)
            if run.degenerate_at is None:
                self.assertEqual(len(run.diameters), 15)
                self.assertLess(run.ratio, NESTING_DECAY, (track.name, float(run.ratio)))

    def test_bad_measure(self):
        track = complete_tracks()[0]
        run, error = nesting_run((track, (1,) * track.num_branches, 3))
        self.assertIsNone(run)
        self.assertIn('switch conditions', error)


class OracleTaskTests(SimpleTestCase):
    def test_random_tracks_agree_with_brute_force(self):
        pool = complete_tracks() + nearly_complete_tracks()
        for seed in range(3):
            track = random_recurrent_track(np.random.default_rng(seed), pool)
            self.assertLessEqual(track.num_branches, 12)
            branches, rays, same = ray_oracle(track)
            self.assertTrue(same)
            self.assertGreater(rays, 0)

    def test_path_oracle_is_deterministic(self):
        self.assertEqual(path_oracle(11), path_oracle(11))
        for seed in range(5):
            certified, witness = path_oracle(seed)
            self.assertFalse(certified and witness)


class NoebelingTaskTests(SimpleTestCase):
    def test_one_path(self):
        problems, avoided, named = noebeling_run((17, 3))
        self.assertEqual(problems, [])
        self.assertEqual(len(avoided), 10)
        self.assertTrue(all(ok for _, _, ok in avoided))
        self.assertEqual([name for name, _ in named], ['f', 'g1', 'g2', 'g3'])
        # the cube centre sits at squared distance 1/8 from the level-1 grid
        self.assertEqual(avoided[0][0], 4)


class ClaimTaskTests(SimpleTestCase):
    def test_uniform_covers(self):
        for level, inside in ((1, 8), (2, 64)):
            pairs, loops, cubes, disconnected = claim_run(('uniform', level))
            self.assertGreater(pairs, 0)
            self.assertEqual(cubes, inside)
            self.assertEqual(loops, [])
            self.assertEqual(disconnected, [])

    def test_random_covers(self):
        for seed in task_seeds(0, 'claims', 5):
            _, loops, _, disconnected = claim_run(('random', seed))
            self.assertEqual((loops, disconnected), ([], []))
