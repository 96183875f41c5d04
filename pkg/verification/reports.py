# verification/reports.py
import json
import logging
import re
from pathlib import Path

from .models import CheckResult

logger = logging.getLogger(__name__)

REPORT_TITLE = '# tracklab verification report'
CHECK_LINE = re.compile(
    r'^CHECK suite=(?P<suite>\S+) name=(?P<name>\S+) status=(?P<status>PASS|FAIL) '
    r'anchor="(?P<anchor>[^"]*)" detail="(?P<detail>.*)"$'
)


class ReportError(ValueError):
    pass


def _quoted(text):
    return str(text).replace('"', "'").replace('\n', ' ')


def check_line(check):
    return (f'CHECK suite={check.suite} name={check.name.replace(" ", "_")} status={check.status} '
            f'anchor="{_quoted(check.anchor)}" detail="{_quoted(check.detail)}"')


def dumps_report(header, checks):
    passed = sum(1 for c in checks if c.passed)
    lines = [REPORT_TITLE, '# ' + ' '.join(f"{k}={v}" for k, v in header.items())]
    lines += [check_line(c) for c in checks]
    lines.append(f"SUMMARY checks={len(checks)} passed={passed} failed={len(checks) - passed}")
    return '\n'.join(lines) + '\n'


def dumps_report_json(header, checks):
    document = {
        'header': header,
        'checks': [
            {'suite': c.suite, 'name': c.name, 'status': c.status, 'anchor': c.anchor,
             'detail': c.detail, 'data': c.data}
            for c in checks
        ],
        'passed': all(c.passed for c in checks),
    }
    return json.dumps(document, indent=2, sort_keys=True) + '\n'


def write_report(out, name, header, checks):
    """Write ``<out>/<name>.report`` and its ``.json`` twin; returns the text report's path."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    header = dict(header, suite=name)
    path = out / f"{name}.report"
    path.write_text(dumps_report(header, checks))
    (out / f"{name}.json").write_text(dumps_report_json(header, checks))
    logger.info('wrote %s (%d checks)', path, len(checks))
    return path


def load_report_json(path):
    path = Path(path)
    if not path.exists():
        raise ReportError(f"{path} not found; run verify first")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ReportError(f"{path}: {exc}") from exc


def parse_report(text):
    """The ``CHECK`` lines of a text report as dicts."""
    found = []
    for line in text.splitlines():
        if line.startswith('CHECK '):
            match = CHECK_LINE.match(line)
            if not match:
                raise ReportError(f"malformed check line: {line}")
            found.append(match.groupdict())
    return found


# ========================
#  DATABASE RECORDS
# ========================
def record_checks(run, checks):
    CheckResult.objects.bulk_create([
        CheckResult(run=run, suite=c.suite, name=c.name, anchor=c.anchor, passed=c.passed, detail=c.detail)
        for c in checks
    ])
