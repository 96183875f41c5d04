# verification/tests/test_config.py
from pathlib import Path

from django.conf import settings
from django.test import SimpleTestCase, override_settings

from verification.config import ALL, SUITES, ConfigError, RunConfig


class RunConfigTests(SimpleTestCase):
    def test_defaults(self):
        config = RunConfig.from_options('verify', {'suite': None, 'depth': None, 'out': None})
        self.assertEqual(config.suite, ALL)
        self.assertEqual(config.suites, SUITES)
        self.assertEqual((config.depth, config.length, config.n_max, config.seed), (3, 15, 10, 0))
        self.assertEqual(config.out, Path(settings.TRACKLAB['REPORT_DIR']))
        self.assertTrue(config.record)

    def test_single_suite(self):
        config = RunConfig.from_options('verify', {'suite': 'census', 'depth': 1, 'no_record': True})
        self.assertEqual(config.suites, ('census',))
        self.assertFalse(config.record)

    def test_limits_above_the_caps(self):
        for options in ({'depth': 4}, {'length': 16}, {'n_max': 11}, {'workers': 9}, {'depth': -1},
                        {'seed': -5}, {'suite': 'everything'}):
            with self.subTest(options=options), self.assertRaises(ConfigError):
                RunConfig.from_options('verify', options)

    @override_settings(TRACKLAB=dict(settings.TRACKLAB, MAX_DEPTH=5))
    def test_caps_come_from_settings(self):
        self.assertEqual(RunConfig.from_options('verify', {'depth': 5}).depth, 5)

    def test_header_leaves_out_workers_and_directories(self):
        config = RunConfig.from_options('verify', {'suite': 'claims', 'workers': 4, 'out': '/tmp/x', 'seed': 7})
        header = config.header()
        self.assertEqual(header['seed'], 7)
        self.assertNotIn('workers', header)
        self.assertEqual(header['family'], 'standard_s05.tracks')
