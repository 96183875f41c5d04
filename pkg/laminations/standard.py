# laminations/standard.py
"""
Standard train tracks of the five-punctured sphere.

Every puncture carries a lollipop: a stem ending in a loop around it. The
chain switches X, Y and Z sit in the pants P1, P2 and P3 and are joined by
two chain edges across the pants curves. Each chain switch holds the stem of
one lollipop in its large slot (punctures 1, 3 and 5); the outer switches
hold the second lollipop of their pants and a chain edge in their small
slots. The twist label says, per chain switch, which small slot the chain
edge takes.
"""
import logging
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

from .cones import (
    ConeError, MeasureCone, dumps_certificate, extreme_rays, image_rays, interior_point,
    is_recurrent, is_transversely_recurrent, support,
)
from .splitting import Member, Partition, identity_matrix
from .tracks import (
    LARGE, S05, SMALL_LEFT, SMALL_RIGHT, TrackClass, TrackError, TrackRecord, TrainTrack,
    canonical_digest, canonical_key, classify_track, dumps_tracks, enumerate_subtracks,
    loads_tracks, subtrack, validate_track,
)

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent / 'data'
STANDARD_FILE = DATA_DIR / 'standard_s05.tracks'
MANIFEST_FILE = DATA_DIR / 'standard_s05.manifest'
MANIFEST_VERSION = 1

CROSS_CHART_ASSUMPTION = (
    'disjointness between the polyhedra of different standard tracks is assumed, not checked'
)


class FamilyError(ValueError):

    def __init__(self, message, problems=()):
        super().__init__(message)
        self.problems = list(problems)


# ========================
#  PANTS DECOMPOSITION
# ========================
@dataclass(frozen=True)
class Pants:
    name: str
    punctures: tuple
    curves: tuple

    @property
    def boundary(self):
        return len(self.punctures) + len(self.curves)


@dataclass(frozen=True)
class PantsDecomposition:
    curves: tuple
    pants: tuple
    genus: int = 0
    punctures: int = 5

    def validate(self):
        problems = []
        if len(self.curves) != 3 * self.genus - 3 + self.punctures:
            problems.append(f"{len(self.curves)} curves, expected {3 * self.genus - 3 + self.punctures}")
        if len(self.pants) != 2 * self.genus - 2 + self.punctures:
            problems.append(f"{len(self.pants)} pants, expected {2 * self.genus - 2 + self.punctures}")
        for piece in self.pants:
            if piece.boundary != 3:
                problems.append(f"{piece.name} has {piece.boundary} boundary components")
        for curve in self.curves:
            sides = sum(piece.curves.count(curve) for piece in self.pants)
            if sides != 2:
                problems.append(f"curve {curve} bounds {sides} pants sides")
        holes = sorted(p for piece in self.pants for p in piece.punctures)
        if holes != list(range(1, self.punctures + 1)):
            problems.append(f"punctures {holes} are not each used once")
        return problems

    def outer(self):
        return [piece for piece in self.pants if len(piece.punctures) == 2]

    def middle(self):
        return [piece for piece in self.pants if len(piece.punctures) == 1]


STANDARD_PANTS = PantsDecomposition(
    curves=('c1', 'c2'),
    pants=(
        Pants('P1', (1, 2), ('c1',)),
        Pants('P2', (3,), ('c1', 'c2')),
        Pants('P3', (4, 5), ('c2',)),
    ),
)


# ========================
#  BUILDER
# ========================
def _smalls(flipped):
    return (SMALL_RIGHT, SMALL_LEFT) if flipped else (SMALL_LEFT, SMALL_RIGHT)


def standard_track(pants, twist, name=''):
    """
    The lollipop chain of ``pants`` with one twist bit per chain switch.

    A set bit at X or Z moves the chain edge to ``S1``; at Y it puts the
    edge towards Z in ``S1``.
    """
    problems = pants.validate()
    if problems or len(pants.outer()) != 2 or len(pants.middle()) != 1:
        raise FamilyError('only the chain decomposition of the five-punctured sphere is supported', problems)
    if len(twist) != 3:
        raise FamilyError(f"twist {twist!r} needs one bit per chain switch")
    first, last = pants.outer()
    middle = pants.middle()[0]
    lollipops = list(first.punctures) + list(middle.punctures) + list(last.punctures)
    x, y, z = 5, 6, 7
    x_stem, x_edge = _smalls(twist[0])
    y_left, y_right = _smalls(twist[1])
    z_stem, z_edge = _smalls(twist[2])
    branches, punctures = [], {}
    for i in range(5):
        branches.append(((i, SMALL_LEFT), (i, SMALL_RIGHT)))
        punctures[(i, SMALL_RIGHT)] = 1
    stems = [(x, LARGE), (x, x_stem), (y, LARGE), (z, z_stem), (z, LARGE)]
    for i, attach in enumerate(stems):
        branches.append(((i, LARGE), attach))
    branches.append(((x, x_edge), (y, y_left)))
    branches.append(((y, y_right), (z, z_edge)))
    logger.debug('standard track %s: lollipops %s, twist %s', name, lollipops, twist)
    return TrainTrack.build(S05, 8, branches, punctures, name)


@dataclass
class StandardTrackFamily:
    complete: list
    nearly_complete: list  # TrackRecords with parent and dropped branches
    pants: PantsDecomposition = STANDARD_PANTS
    twists: dict = field(default_factory=dict)

    def parent_of(self, record):
        for parent in self.complete:
            if parent.name == record.parent:
                return parent
        raise FamilyError(f"{record.name}: unknown parent {record.parent!r}")

    def records(self):
        return list(self.complete) + list(self.nearly_complete)


def build_standard_family(pants=STANDARD_PANTS):
    """Every twist of the chain switches, kept when complete and new up to isomorphism."""
    twists = {}
    complete, keys = [], set()
    for twist in product((0, 1), repeat=3):
        name = f"standard-{chr(ord('a') + len(complete))}"
        track = standard_track(pants, twist, name)
        key = canonical_key(track)
        if key in keys or classify_track(track).kind is not TrackClass.COMPLETE:
            continue
        keys.add(key)
        complete.append(TrackRecord(name, track, TrackClass.COMPLETE))
        twists[name] = twist

    sigmas, seen = [], set()
    for record in complete:
        for loop in range(5):
            try:
                piece = subtrack(record.track, [loop]).track
            except TrackError:
                continue
            key = canonical_key(piece)
            if key in seen or classify_track(piece).kind is not TrackClass.NEARLY_COMPLETE:
                continue
            seen.add(key)
            sigmas.append(TrackRecord(f"{record.name}-{loop}", piece, TrackClass.NEARLY_COMPLETE,
                                      record.name, (loop,)))
    logger.info('built %d complete and %d nearly complete standard tracks', len(complete), len(sigmas))
    return StandardTrackFamily(complete, sigmas, pants, twists)


def dumps_family(family):
    lines = dumps_tracks(family.complete).splitlines()
    for record in family.nearly_complete:
        drops = ' '.join(str(b) for b in record.dropped)
        lines.append(f"subtrack {record.name} of {record.parent} drop {drops} nearly-complete")
    return '\n'.join(lines) + '\n'


def dumps_manifest(family, digests=True):
    lines = [f"manifest {MANIFEST_VERSION}", f"complete {len(family.complete)}",
             f"nearly-complete {len(family.nearly_complete)}"]
    for record in family.records():
        line = f"track {record.name} {record.declared.value}"
        if digests:
            line += f" {canonical_digest(record.track)}"
        lines.append(line)
    return '\n'.join(lines) + '\n'


def write_family(family, directory=DATA_DIR, certificates=True):
    """Write the data file, its manifest and one certificate pair per track."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = [directory / STANDARD_FILE.name, directory / MANIFEST_FILE.name]
    written[0].write_text(dumps_family(family))
    written[1].write_text(dumps_manifest(family))
    if certificates:
        folder = directory / 'certificates'
        folder.mkdir(exist_ok=True)
        for record in family.records():
            for label, result in (('recurrence', is_recurrent(record.track)),
                                  ('transverse', is_transversely_recurrent(record.track))):
                path = folder / f"{record.name}.{label}.cert"
                path.write_text(dumps_certificate(result.certificate))
                written.append(path)
    return written


# ========================
#  LOADING
# ========================
def _check_manifest(family, text):
    problems = []
    lines = [line.split() for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != ['manifest', str(MANIFEST_VERSION)]:
        return ['manifest header missing']
    counts = {line[0]: int(line[1]) for line in lines[1:] if line[0] in ('complete', 'nearly-complete')}
    if counts.get('complete') != len(family.complete):
        problems.append(f"manifest lists {counts.get('complete')} complete tracks, file has {len(family.complete)}")
    if counts.get('nearly-complete') != len(family.nearly_complete):
        problems.append(f"manifest lists {counts.get('nearly-complete')} nearly complete tracks, "
                        f"file has {len(family.nearly_complete)}")
    by_name = {record.name: record for record in family.records()}
    for line in lines[1:]:
        if line[0] != 'track':
            continue
        record = by_name.get(line[1])
        if record is None:
            problems.append(f"manifest names unknown track {line[1]}")
            continue
        if record.declared is None or record.declared.value != line[2]:
            problems.append(f"{line[1]}: manifest class {line[2]} differs from the data file")
        if len(line) > 3 and line[3] != canonical_digest(record.track):
            problems.append(f"{line[1]}: canonical digest differs from the manifest")
    return problems


def check_face_relation(parent, record):
    """The subtrack's cone must be the face of the parent cone supported on its branches."""
    piece = subtrack(parent.track, record.dropped)
    rays = image_rays(piece.inclusion, extreme_rays(piece.track))
    cone = MeasureCone(parent.track)
    branches = frozenset(piece.branches)
    if not rays or support(interior_point(rays)) != branches:
        return f"{record.name}: image cone is not supported on its branches"
    if branches not in cone.faces:
        return f"{record.name}: branches {sorted(branches)} are not a face of {parent.name}"
    if sorted(cone.faces[branches]) != rays:
        return f"{record.name}: face rays of {parent.name} differ from the subtrack's image"
    return None


def load_standard_family(path=STANDARD_FILE, manifest=None):
    """Parse, validate and classify the family; any mismatch rejects the load."""
    path = Path(path)
    try:
        records = loads_tracks(path.read_text())
    except TrackError as exc:
        raise FamilyError(f"{path.name}: {exc}") from None
    problems = []
    keys = {}
    for record in records:
        report = validate_track(record.track)
        if not report:
            problems.append(str(report))
            continue
        kind = classify_track(record.track).kind
        if record.declared is not None and kind is not record.declared:
            problems.append(f"{record.name}: declared {record.declared.value}, classifies {kind.value}")
        key = canonical_key(record.track)
        if key in keys:
            problems.append(f"{record.name}: duplicate canonical form of {keys[key]}")
        keys.setdefault(key, record.name)
    family = StandardTrackFamily(
        [r for r in records if r.parent is None and r.declared is TrackClass.COMPLETE],
        [r for r in records if r.parent is not None],
    )
    stray = [r.name for r in records if r.parent is None and r.declared is not TrackClass.COMPLETE]
    if stray:
        problems.append(f"top-level tracks must be declared complete: {', '.join(stray)}")
    if not problems:
        for record in family.nearly_complete:
            issue = check_face_relation(family.parent_of(record), record)
            if issue:
                problems.append(issue)
    manifest = MANIFEST_FILE if manifest is None and path == STANDARD_FILE else manifest
    if manifest is not None and Path(manifest).exists():
        problems += _check_manifest(family, Path(manifest).read_text())
    if problems:
        logger.error('standard family %s rejected: %s', path.name, problems)
        raise FamilyError(f"{path.name} rejected with {len(problems)} problems", problems)
    logger.info('loaded %d complete and %d nearly complete tracks from %s',
                len(family.complete), len(family.nearly_complete), path.name)
    return family


def mirror_closed(family):
    """Whether mirroring maps the family onto itself up to canonical form."""
    keys = {canonical_key(r.track) for r in family.records()}
    return all(canonical_key(r.track.mirror()) in keys for r in family.records())


# ========================
#  STANDARD PARTITION
# ========================
def check_chart_faces(track):
    """Every recurrent subtrack's cone is the face of ``track`` on its branch set."""
    cone = MeasureCone(track)
    problems, seen = [], {}
    for piece in enumerate_subtracks(track):
        if not piece.connected or not is_recurrent(piece.track):
            continue
        rays = image_rays(piece.inclusion, extreme_rays(piece.track))
        pattern = support(interior_point(rays))
        if pattern != piece.branches or sorted(cone.faces.get(pattern, ())) != rays:
            problems.append(f"subtrack on {sorted(piece.branches)} is not a face of {track.name}")
        if pattern in seen:
            problems.append(f"subtracks on {sorted(seen[pattern])} and {sorted(piece.branches)} share an interior")
        seen[pattern] = piece.branches
    return problems


def standard_partition(family, check_faces=True):
    """Depth-0 partition: every complete track is its own chart."""
    complete = []
    for index, record in enumerate(family.complete):
        if check_faces:
            problems = check_chart_faces(record.track)
            if problems:
                raise FamilyError(f"{record.name}: face structure violated", problems)
        complete.append(Member(
            record.name, record.track, TrackClass.COMPLETE, index,
            tuple(map(tuple, identity_matrix(record.track.num_branches))),
        ))
    faces = {}
    for index, record in enumerate(family.complete):
        for loop in range(record.track.num_branches):
            try:
                piece = subtrack(record.track, [loop])
            except TrackError:
                continue
            if piece.connected:
                faces.setdefault(canonical_key(piece.track), index)
    sigmas = []
    for record in family.nearly_complete:
        if canonical_key(record.track) not in faces:
            raise FamilyError(f"{record.name} is not a face of any complete standard track")
        parent = family.parent_of(record)
        chart = next(i for i, r in enumerate(family.complete) if r.name == parent.name)
        piece = subtrack(parent.track, record.dropped)
        sigmas.append(Member(
            record.name, record.track, TrackClass.NEARLY_COMPLETE, chart,
            tuple(map(tuple, piece.inclusion)),
        ))
    try:
        for member in complete + sigmas:
            member.chart_rays
    except ConeError as exc:
        raise FamilyError(f"standard partition has a degenerate cone: {exc}") from None
    return Partition(tuple(complete), tuple(sigmas), 0, (CROSS_CHART_ASSUMPTION,))
