# verification/management/commands/export.py
import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from laminations.tracks import TrackError, loads_tracks
from noebeling.geometry import PathError, loads_paths
from noebeling.grid import Box, CoverError, grid_of_cover, loads_cover, uniform_cover
from verification.exports import (
    ExportError, diameter_frame, grid_scene_frame, lattice_segment_count, write_diagram,
)
from verification.reports import ReportError, load_report_json

logger = logging.getLogger(__name__)

KINDS = ('diameters', 'diagram', 'grid')


def _read(path):
    path = Path(path)
    if not path.exists():
        raise ExportError(f"{path} not found")
    return path.read_text()


class Command(BaseCommand):
    help = 'Export plot data from verification artifacts: diameter series, track diagrams, grid scenes.'

    def add_arguments(self, parser):
        parser.add_argument('kind', choices=KINDS)
        parser.add_argument('--source', default=None, help='report directory of an earlier verify run')
        parser.add_argument('--out', default=None, help='output directory (default: the source directory)')
        parser.add_argument('--measure', default=None, help='diameters: only this nesting check')
        parser.add_argument('--tracks', default=None, help='diagram: a .tracks file (default: the standard family)')
        parser.add_argument('--track', default=None, help='diagram: only the track with this name')
        parser.add_argument('--cover', default=None, help='grid: a cover file')
        parser.add_argument('--level', type=int, default=None, help='grid: use the uniform cover of this level')
        parser.add_argument('--paths', default=None, help='grid: a paths file to draw over the grid')

    def handle(self, *args, **options):
        source = Path(options['source'] or settings.TRACKLAB['REPORT_DIR'])
        out = Path(options['out'] or source)
        try:
            written = getattr(self, f"export_{options['kind']}")(source, out, options)
        except (ExportError, ReportError, TrackError, CoverError, PathError) as exc:
            logger.error('export %s failed: %s', options['kind'], exc)
            raise CommandError(str(exc), returncode=2)
        for path in written:
            self.stdout.write(self.style.SUCCESS(f"wrote {path}"))

    # ── Diameter series ────────────────────────────────────
    def export_diameters(self, source, out, options):
        document = load_report_json(source / 'nesting.json')
        frame = diameter_frame(document, options['measure'])
        out.mkdir(parents=True, exist_ok=True)
        path = out / 'diameters.csv'
        frame.to_csv(path, index=False)
        return [path]

    # ── Track diagrams ──────────────────────────────────────
    def export_diagram(self, source, out, options):
        records = loads_tracks(_read(options['tracks'] or settings.TRACKLAB['STANDARD_FAMILY']))
        if options['track']:
            records = [r for r in records if r.name == options['track']]
            if not records:
                raise ExportError(f"no track named {options['track']!r}")
        written = []
        for record in records:
            written.extend(write_diagram(record.track, out))
        return written

    # ── Grid scenes ─────────────────────────────────────────
    def export_grid(self, source, out, options):
        box = Box.from_setting(settings.TRACKLAB['BOUNDING_BOX'])
        if options['level'] is not None:
            cover = uniform_cover(options['level'], box)
        else:
            cover = loads_cover(_read(options['cover'] or source / 'noebeling.cover'))
        named = []
        paths_file = options['paths'] or (None if options['cover'] or options['level'] is not None
                                          else source / 'noebeling.paths')
        if paths_file:
            named = loads_paths(_read(paths_file))
        grid = grid_of_cover(cover)
        frame = grid_scene_frame(grid, named)
        if options['level'] is not None:
            expected = lattice_segment_count(grid.level, cover.box)
            found = int((frame['kind'] == 'grid').sum())
            logger.info('grid scene: %d segments, lattice formula %d', found, expected)
            if found != expected:
                raise ExportError(f"uniform grid has {found} segments, the lattice has {expected}")
        out.mkdir(parents=True, exist_ok=True)
        path = out / 'grid.csv'
        frame.to_csv(path, index=False)
        return [path]
