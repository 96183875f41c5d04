# laminations/management/commands/build_standard_family.py
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from laminations.standard import (
    DATA_DIR, FamilyError, build_standard_family, load_standard_family, mirror_closed, write_family,
)
from laminations.tracks import canonical_key

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Build the standard train tracks of S_0,5 and write the data file, manifest and certificates.'

    def add_arguments(self, parser):
        parser.add_argument('--out', default=str(DATA_DIR), help='directory for the family files')
        parser.add_argument('--check', action='store_true',
                            help='compare the shipped family with a fresh build and write nothing')
        parser.add_argument('--no-certificates', action='store_true', help='skip the LP certificate files')

    def handle(self, *args, **options):
        built = build_standard_family()
        if not mirror_closed(built):
            raise CommandError('the built family is not closed under mirroring', returncode=1)

        if options['check']:
            try:
                shipped = load_standard_family()
            except FamilyError as exc:
                for problem in exc.problems:
                    self.stderr.write(f"  {problem}")
                raise CommandError(str(exc), returncode=2)
            fresh = {canonical_key(r.track) for r in built.records()}
            stored = {canonical_key(r.track) for r in shipped.records()}
            if fresh != stored:
                raise CommandError(
                    f"shipped family differs from the builder: {len(stored - fresh)} stale, "
                    f"{len(fresh - stored)} missing", returncode=1)
            self.stdout.write(self.style.SUCCESS(
                f"standard family OK: {len(built.complete)} complete, {len(built.nearly_complete)} nearly complete"))
            return

        written = write_family(built, Path(options['out']), certificates=not options['no_certificates'])
        logger.info('wrote %d files to %s', len(written), options['out'])
        self.stdout.write(self.style.SUCCESS(
            f"wrote {len(built.complete)} complete and {len(built.nearly_complete)} nearly complete tracks "
            f"({len(written)} files) to {options['out']}"))
