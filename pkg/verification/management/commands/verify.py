# verification/management/commands/verify.py
import logging

from django.core.management.base import BaseCommand, CommandError

from verification.config import ALL, SUITES, ConfigError, RunConfig
from verification.models import VerificationRun
from verification.reports import record_checks, write_report
from verification.suites import INPUT_ERRORS, Workspace, run_suite

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Run verification suites and write <out>/<suite>.report with a .json twin. Exit 0 pass, 1 fail, 2 usage.'

    def add_arguments(self, parser):
        parser.add_argument('--suite', default=ALL, help=f"one of {', '.join(SUITES + (ALL,))}")
        parser.add_argument('--depth', type=int, default=None, help='partition depth (hard cap TRACKLAB_MAX_DEPTH)')
        parser.add_argument('--length', type=int, default=None, help='steps per nesting sequence')
        parser.add_argument('--n-max', type=int, default=None, help='largest n for the approximating paths')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--workers', type=int, default=1)
        parser.add_argument('--out', default=None, help='report directory (default TRACKLAB REPORT_DIR)')
        parser.add_argument('--family', default=None, help='standard family data file')
        parser.add_argument('--no-record', action='store_true', help='do not store the run in the database')

    def handle(self, *args, **options):
        try:
            config = RunConfig.from_options('verify', options)
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=2)

        run = None
        if config.record:
            run = VerificationRun.objects.create(
                suite=config.suite, seed=config.seed, depth=config.depth, length=config.length,
                n_max=config.n_max, workers=config.workers,
            )

        ws = Workspace(config)
        everything, written = [], None
        try:
            for suite in config.suites:
                checks = run_suite(ws, suite)
                written = write_report(config.out, suite, config.header(), checks)
                everything += checks
                for check in checks:
                    line = f"{check.status} {suite}/{check.name}: {check.detail}"
                    self.stdout.write(self.style.SUCCESS(line) if check.passed else self.style.ERROR(line))
        except INPUT_ERRORS as exc:
            logger.error('verify stopped on bad input: %s', exc)
            for problem in getattr(exc, 'problems', []):
                self.stderr.write(f"  {problem}")
            if run:
                run.finish('ERROR', message=str(exc))
            raise CommandError(str(exc), returncode=2)

        if config.suite == ALL:
            written = write_report(config.out, ALL, config.header(), everything)
        failed = [c for c in everything if not c.passed]
        if run:
            record_checks(run, everything)
            run.finish('FAILED' if failed else 'PASSED', written, f"{len(failed)} of {len(everything)} checks failed")

        if failed:
            raise CommandError(f"{len(failed)} of {len(everything)} checks failed; see {written}", returncode=1)
        self.stdout.write(self.style.SUCCESS(f"all {len(everything)} checks passed; report {written}"))
