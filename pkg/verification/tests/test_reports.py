# verification/tests/test_reports.py
import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from verification.reports import ReportError, dumps_report, load_report_json, parse_report, write_report
from verification.suites import ANCHORS, Check

HEADER = {'suite': 'census', 'seed': 3, 'depth': 0, 'length': 15, 'n_max': 10, 'family': 'standard_s05.tracks'}


def sample_checks():
    return [
        Check('census', 'family/standard-a', True, ANCHORS['complete-census'], 'punctured-monogon x5, triangle x1'),
        Check('census', 'family/standard-a-1', False, ANCHORS['nearly-complete-census'], 'said "no"'),
    ]


class ReportFormatTests(SimpleTestCase):
    def test_lines(self):
        text = dumps_report(HEADER, sample_checks())
        lines = text.splitlines()
        self.assertEqual(lines[0], '# tracklab verification report')
        self.assertIn('seed=3', lines[1])
        self.assertEqual(lines[2], 'CHECK suite=census name=family/standard-a status=PASS '
                                   'anchor="five once-punctured monogons and one triangle" '
                                   'detail="punctured-monogon x5, triangle x1"')
        self.assertEqual(lines[-1], 'SUMMARY checks=2 passed=1 failed=1')

    def test_parse_back(self):
        parsed = parse_report(dumps_report(HEADER, sample_checks()))
        self.assertEqual([p['status'] for p in parsed], ['PASS', 'FAIL'])
        self.assertEqual(parsed[1]['anchor'], 'four once-punctured monogons and one once-punctured bigon')
        self.assertEqual(parsed[1]['detail'], "said 'no'")

    def test_malformed_line(self):
        with self.assertRaises(ReportError):
            parse_report('CHECK suite=census\n')

    def test_anchor_strings_are_exact(self):
        self.assertEqual(ANCHORS['key-lemma-i'], r'no proper subtrack of $\sigma$ is filling')
        self.assertEqual(ANCHORS['cone-identity'], r'P(\eta_L) \cap P(\eta_R) = P(\sigma)')
        self.assertEqual(ANCHORS['boundary-grid'], r'$\partial V\cap \Gamma$ is connected (and non-empty)')
        self.assertEqual(ANCHORS['nesting'], r'full $\lambda$--splitting sequence')


class WriteReportTests(SimpleTestCase):
    def test_text_and_json_twin(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_report(tmp, 'census', HEADER, sample_checks())
            self.assertEqual(path, Path(tmp) / 'census.report')
            document = load_report_json(Path(tmp) / 'census.json')
            self.assertFalse(document['passed'])
            self.assertEqual(document['header']['seed'], 3)
            self.assertEqual(len(document['checks']), 2)
            again = write_report(tmp, 'census', HEADER, sample_checks())
            self.assertEqual(again.read_text(), path.read_text())
            json.loads((Path(tmp) / 'census.json').read_text())

    def test_missing_json(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ReportError):
                load_report_json(Path(tmp) / 'nesting.json')
