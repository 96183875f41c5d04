# laminations/tracks.py
"""
Train tracks on punctured spheres, stored as trivalent ribbon graphs.

Every switch has three slots in counterclockwise order: LARGE, SMALL_LEFT and
SMALL_RIGHT. The corner from SMALL_LEFT to SMALL_RIGHT is the cusp of the
switch; the two other corners are smooth. A dart is a ``(switch, slot)`` pair
and names one branch end. Faces are boundary walks of the ribbon graph.
"""
import hashlib
import logging
from collections import Counter, deque
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import cached_property

import networkx as nx

logger = logging.getLogger(__name__)

LARGE, SMALL_LEFT, SMALL_RIGHT = 0, 1, 2
SLOT_NAMES = ('L', 'S1', 'S2')

# Pseudo-darts naming the two sides of a smooth closed curve.
CIRCLE_SIDES = ((-1, 0), (-1, 1))

MAX_ENUMERATION_BRANCHES = 16


class TrackError(ValueError):
    pass


class TrackFormatError(TrackError):
    pass


# ========================
#  SURFACES
# ========================
@dataclass(frozen=True)
class Surface:
    genus: int = 0
    punctures: int = 5

    @property
    def complexity(self):
        return 3 * self.genus - 3 + self.punctures

    @property
    def euler_characteristic(self):
        return 2 - 2 * self.genus - self.punctures

    def __str__(self):
        return f"S_{self.genus},{self.punctures}"


S05 = Surface(0, 5)


# ========================
#  FACES & CENSUS
# ========================
@dataclass(frozen=True)
class Face:
    darts: tuple
    cusps: int
    punctures: int
    sides: tuple  # branch sequences of the smooth sides between consecutive cusps

    @property
    def label(self):
        return face_label(self.cusps, self.punctures)

    @property
    def euler_contribution(self):
        return 1 - self.punctures - Fraction(self.cusps, 2)


def face_label(cusps, punctures):
    if (cusps, punctures) == (3, 0):
        return 'triangle'
    if (cusps, punctures) == (1, 1):
        return 'punctured-monogon'
    if (cusps, punctures) == (2, 1):
        return 'punctured-bigon'
    return 'other'


COMPLETE_CENSUS = Counter({'punctured-monogon': 5, 'triangle': 1})
NEARLY_COMPLETE_CENSUS = Counter({'punctured-monogon': 4, 'punctured-bigon': 1})


@dataclass(frozen=True)
class RegionCensus:
    surface: Surface
    faces: tuple  # sorted (cusps, punctures) pairs
    switches: int

    @property
    def labels(self):
        return Counter(face_label(k, m) for k, m in self.faces)

    @property
    def euler_sum(self):
        return sum((1 - m - Fraction(k, 2) for k, m in self.faces), Fraction(0))

    @property
    def total_cusps(self):
        return sum(k for k, _ in self.faces)

    @property
    def holds(self):
        return (self.euler_sum == self.surface.euler_characteristic
                and self.total_cusps == self.switches)

    @property
    def is_complete(self):
        return self.labels == COMPLETE_CENSUS

    @property
    def is_nearly_complete(self):
        return self.labels == NEARLY_COMPLETE_CENSUS

    def __str__(self):
        return ', '.join(f"{label} x{count}" for label, count in sorted(self.labels.items()))


# ========================
#  TRAIN TRACKS
# ========================
@dataclass(frozen=True)
class TrainTrack:
    surface: Surface
    num_switches: int
    branches: tuple  # ((dart, dart), ...); () for the branch of a smooth circle
    face_punctures: tuple = ()  # ((dart, count), ...), one dart per punctured face
    name: str = field(default='', compare=False)

    @classmethod
    def build(cls, surface, num_switches, branches, face_punctures=(), name=''):
        branches = tuple(tuple(tuple(end) for end in branch) for branch in branches)
        if isinstance(face_punctures, dict):
            face_punctures = face_punctures.items()
        punctures = {}
        for dart, count in face_punctures:
            if count:
                punctures[tuple(dart)] = punctures.get(tuple(dart), 0) + int(count)
        return cls(surface, int(num_switches), branches, tuple(sorted(punctures.items())), name)

    @classmethod
    def circle(cls, surface, inside, outside, name=''):
        return cls.build(surface, 0, [()], {CIRCLE_SIDES[0]: inside, CIRCLE_SIDES[1]: outside}, name)

    def __str__(self):
        label = self.name or 'track'
        return f"{label} ({self.num_switches} switches, {self.num_branches} branches on {self.surface})"

    @property
    def num_branches(self):
        return len(self.branches)

    @property
    def is_circle(self):
        return self.num_switches == 0 and self.branches == ((),)

    @cached_property
    def occupants(self):
        """dart -> (branch, end); later ends win on a doubly used slot."""
        table = {}
        for index, branch in enumerate(self.branches):
            for end, dart in enumerate(branch):
                table[dart] = (index, end)
        return table

    def end_of(self, dart):
        return self.occupants[dart]

    def opposite(self, dart):
        branch, end = self.occupants[dart]
        return self.branches[branch][1 - end]

    def slot_branch(self, switch, slot):
        return self.occupants[(switch, slot)][0]

    @cached_property
    def faces(self):
        if self.is_circle:
            counts = dict(self.face_punctures)
            return tuple(
                Face((side,), 0, counts.get(side, 0), ((0,),)) for side in CIRCLE_SIDES
            )
        if len(self.occupants) != 3 * self.num_switches:
            raise TrackError(f"{self}: faces need every slot used exactly once")
        counts = dict(self.face_punctures)
        seen = set()
        faces = []
        for start in sorted(self.occupants):
            if start in seen:
                continue
            darts, cusp_after = [], []
            dart = start
            while dart not in seen:
                seen.add(dart)
                darts.append(dart)
                arrive = self.opposite(dart)
                cusp_after.append(arrive[1] == SMALL_LEFT)
                dart = (arrive[0], (arrive[1] + 1) % 3)
            if dart != start:
                raise TrackError(f"{self}: boundary walk from {start} does not close up")
            faces.append(Face(
                tuple(darts),
                sum(cusp_after),
                sum(counts.get(d, 0) for d in darts),
                self._sides(darts, cusp_after),
            ))
        return tuple(faces)

    def _sides(self, darts, cusp_after):
        walk = [self.occupants[d][0] for d in darts]
        if not any(cusp_after):
            return (tuple(walk),)
        first = cusp_after.index(True)
        order = list(range(first + 1, len(walk))) + list(range(first + 1))
        sides, current = [], []
        for i in order:
            current.append(walk[i])
            if cusp_after[i]:
                sides.append(tuple(current))
                current = []
        return tuple(sides)

    @cached_property
    def face_index(self):
        """dart -> index of the face whose boundary walk leaves along it."""
        return {dart: i for i, face in enumerate(self.faces) for dart in face.darts}

    def mirror(self):
        """The same track seen from the other side of the surface."""
        if self.is_circle:
            counts = dict(self.face_punctures)
            return TrainTrack.build(self.surface, 0, [()], {
                CIRCLE_SIDES[0]: counts.get(CIRCLE_SIDES[1], 0),
                CIRCLE_SIDES[1]: counts.get(CIRCLE_SIDES[0], 0),
            }, name=self.name)
        branches = [tuple(_swap(end) for end in branch) for branch in self.branches]
        # A face of the mirror walks the same corners backwards; its walk
        # leaves along the opposite ends of the original walk.
        punctures = {_swap(self.opposite(dart)): count for dart, count in self.face_punctures}
        return TrainTrack.build(self.surface, self.num_switches, branches, punctures,
                                name=f"{self.name}~" if self.name else '')


def _swap(dart):
    switch, slot = dart
    return (switch, {LARGE: LARGE, SMALL_LEFT: SMALL_RIGHT, SMALL_RIGHT: SMALL_LEFT}[slot])


# ========================
#  VALIDATION
# ========================
@dataclass(frozen=True)
class Problem:
    code: str
    message: str
    witness: object = None


@dataclass(frozen=True)
class ValidationReport:
    track_name: str
    problems: tuple = ()

    @property
    def ok(self):
        return not self.problems

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return f"{self.track_name}: valid"
        return f"{self.track_name}: " + '; '.join(p.message for p in self.problems)


def validate_track(t):
    """Check every structural invariant of ``t`` and report each violation."""
    problems = []
    name = t.name or 'track'

    if t.num_switches == 0:
        if t.branches != ((),):
            problems.append(Problem('circle-shape', 'a switchless track must be one smooth circle'))
            return ValidationReport(name, tuple(problems))
        counts = dict(t.face_punctures)
        stray = [d for d in counts if d not in CIRCLE_SIDES]
        if stray:
            problems.append(Problem('face-unknown', f"puncture key {stray[0]} is not a circle side", stray[0]))
        if t.surface.genus:
            problems.append(Problem('genus-mismatch', 'a circle only fills out a genus 0 surface', t.surface.genus))
        _check_totals(t, problems)
        return ValidationReport(name, tuple(problems))

    used = Counter()
    for index, branch in enumerate(t.branches):
        if len(branch) != 2:
            problems.append(Problem('branch-ends', f"branch {index} has {len(branch)} ends", index))
            continue
        for end, dart in enumerate(branch):
            switch, slot = dart
            if not (0 <= switch < t.num_switches and slot in (LARGE, SMALL_LEFT, SMALL_RIGHT)):
                problems.append(Problem('bad-end', f"branch {index} end {end} names {dart}", (index, end)))
                continue
            used[dart] += 1
    for switch in range(t.num_switches):
        for slot in range(3):
            dart = (switch, slot)
            if used[dart] == 0:
                problems.append(Problem(
                    'slot-unused', f"slot {SLOT_NAMES[slot]} of switch {switch} is unused", dart))
            elif used[dart] > 1:
                problems.append(Problem(
                    'slot-double-use', f"slot {SLOT_NAMES[slot]} of switch {switch} is used {used[dart]} times", dart))
    if problems:
        return ValidationReport(name, tuple(problems))

    components = switch_components(t)
    if len(components) > 1:
        problems.append(Problem('disconnected', f"track has {len(components)} components", len(components)))
        return ValidationReport(name, tuple(problems))

    try:
        faces = t.faces
    except TrackError as exc:
        problems.append(Problem('faces', str(exc)))
        return ValidationReport(name, tuple(problems))

    twice_genus = 2 - t.num_switches + t.num_branches - len(faces)
    if twice_genus != 2 * t.surface.genus:
        problems.append(Problem(
            'genus-mismatch',
            f"ribbon genus {Fraction(twice_genus, 2)} differs from surface genus {t.surface.genus}",
            Fraction(twice_genus, 2)))

    face_of = t.face_index
    seen_faces = {}
    for dart, count in t.face_punctures:
        if dart not in face_of:
            problems.append(Problem('face-unknown', f"puncture key {dart} is not a dart", dart))
            continue
        if count < 0:
            problems.append(Problem('face-negative', f"negative puncture count at {dart}", dart))
        face = face_of[dart]
        if face in seen_faces:
            problems.append(Problem(
                'face-duplicate', f"darts {seen_faces[face]} and {dart} name the same face", (seen_faces[face], dart)))
        seen_faces[face] = dart

    _check_totals(t, problems)
    return ValidationReport(name, tuple(problems))


def _check_totals(t, problems):
    total = sum(count for _, count in t.face_punctures)
    if total != t.surface.punctures:
        problems.append(Problem(
            'puncture-sum', f"faces carry {total} punctures, surface has {t.surface.punctures}", total))
        return
    census = region_census(t)
    if census.euler_sum != t.surface.euler_characteristic:
        problems.append(Problem(
            'euler-mismatch',
            f"face contributions sum to {census.euler_sum}, expected {t.surface.euler_characteristic}",
            census.euler_sum))
    if census.total_cusps != t.num_switches:
        problems.append(Problem(
            'cusp-count', f"{census.total_cusps} cusps for {t.num_switches} switches", census.total_cusps))


def switch_components(t):
    graph = nx.Graph()
    graph.add_nodes_from(range(t.num_switches))
    graph.add_edges_from((branch[0][0], branch[1][0]) for branch in t.branches if branch)
    return sorted(sorted(c) for c in nx.connected_components(graph))


def region_census(t):
    return RegionCensus(
        t.surface,
        tuple(sorted((face.cusps, face.punctures) for face in t.faces)),
        t.num_switches,
    )


# ========================
#  BRANCHES
# ========================
class BranchKind(str, Enum):
    LARGE = 'LARGE'
    SMALL = 'SMALL'
    MIXED = 'MIXED'


def classify_branches(t):
    kinds = {}
    for index, branch in enumerate(t.branches):
        large_ends = sum(1 for dart in branch if dart[1] == LARGE)
        if branch and large_ends == 2:
            kinds[index] = BranchKind.LARGE
        elif large_ends == 0:
            kinds[index] = BranchKind.SMALL
        else:
            kinds[index] = BranchKind.MIXED
    return kinds


def large_branches(t):
    return tuple(b for b, kind in sorted(classify_branches(t).items()) if kind is BranchKind.LARGE)


# ========================
#  SUBTRACKS
# ========================
@dataclass(frozen=True)
class Subtrack:
    branches: frozenset  # parent branches carried
    components: tuple  # one TrainTrack per connected component
    inclusions: tuple  # per component: parent-by-component carrying matrix
    parent: TrainTrack = field(compare=False, repr=False, default=None)
    deletions: int = field(compare=False, default=None)  # fewest branches deleted to reach it

    @property
    def connected(self):
        return len(self.components) == 1

    @property
    def track(self):
        if not self.connected:
            raise TrackError(f"subtrack on {sorted(self.branches)} has {len(self.components)} components")
        return self.components[0]

    @property
    def inclusion(self):
        self.track
        return self.inclusions[0]

    @property
    def dropped(self):
        return frozenset(range(self.parent.num_branches)) - self.branches if self.parent else frozenset()

    @property
    def is_proper(self):
        return bool(self.dropped)


def trim(t, keep):
    """Delete dead ends recursively; None unless every bivalent switch is smoothable."""
    keep = set(keep)
    while True:
        used = Counter(dart[0] for b in keep for dart in t.branches[b])
        dead = [b for b in keep if any(used[dart[0]] == 1 for dart in t.branches[b])]
        if not dead:
            break
        keep.difference_update(dead)
    if not keep:
        return None
    slots = {}
    for b in keep:
        for switch, slot in t.branches[b]:
            slots.setdefault(switch, set()).add(slot)
    for switch, used_slots in slots.items():
        if len(used_slots) == 2 and LARGE not in used_slots:
            return None
    return frozenset(keep)


def _merged_regions(t, kept):
    """Union the faces of ``t`` across every branch outside ``kept``."""
    parent = list(range(len(t.faces)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    face_of = t.face_index
    for b, branch in enumerate(t.branches):
        if b in kept or not branch:
            continue
        left, right = find(face_of[branch[0]]), find(face_of[branch[1]])
        if left != right:
            parent[max(left, right)] = min(left, right)
    totals = Counter()
    for i, face in enumerate(t.faces):
        totals[find(i)] += face.punctures
    return find, totals


def materialize(t, kept):
    """Smooth the bivalent switches of the branch set ``kept`` into a Subtrack."""
    kept = frozenset(kept)
    used = {dart for b in kept for dart in t.branches[b]}
    trivalent = sorted({s for s, _ in used if all((s, k) in used for k in range(3))})
    trivalent_set = set(trivalent)

    pieces, visited = [], set()
    for switch in trivalent:
        for slot in range(3):
            start = (switch, slot)
            if start in visited:
                continue
            path, dart = [], start
            while True:
                branch, end = t.end_of(dart)
                path.append(branch)
                far = t.branches[branch][1 - end]
                if far[0] in trivalent_set:
                    break
                dart = next((far[0], k) for k in range(3) if k != far[1] and (far[0], k) in used)
            visited.update((start, far))
            pieces.append((start, far, tuple(path)))

    covered = {b for _, _, path in pieces for b in path}
    circles = []
    remaining = sorted(kept - covered)
    while remaining:
        first = t.branches[remaining[0]][0]
        path, dart = [], first
        while True:
            branch, end = t.end_of(dart)
            path.append(branch)
            far = t.branches[branch][1 - end]
            dart = next((far[0], k) for k in range(3) if k != far[1] and (far[0], k) in used)
            if dart == first:
                break
        circles.append(tuple(path))
        remaining = [b for b in remaining if b not in path]

    # connected components among trivalent switches
    graph = nx.Graph()
    graph.add_nodes_from(trivalent)
    graph.add_edges_from((start[0], far[0]) for start, far, _ in pieces)
    groups = {}
    for piece in pieces:
        groups.setdefault(min(nx.node_connected_component(graph, piece[0][0])), []).append(piece)

    components, inclusions = [], []
    for root in sorted(groups):
        track, inclusion = _component_track(t, groups[root])
        if track is None:
            return None
        components.append(track)
        inclusions.append(inclusion)
    for path in circles:
        find_region, totals = _merged_regions(t, set(path))
        regions = sorted({find_region(i) for i in range(len(t.faces))})
        if len(regions) != 2:
            return None
        track = TrainTrack.circle(t.surface, totals[regions[0]], totals[regions[1]])
        inclusion = tuple((path.count(b),) for b in range(t.num_branches))
        components.append(track)
        inclusions.append(inclusion)
    return Subtrack(kept, tuple(components), tuple(inclusions), parent=t)


def _component_track(t, pieces):
    switches = sorted({p[0][0] for p in pieces} | {p[1][0] for p in pieces})
    renumber = {s: i for i, s in enumerate(switches)}
    branches = [((renumber[a[0]], a[1]), (renumber[b[0]], b[1])) for a, b, _ in pieces]
    carried = {b for _, _, path in pieces for b in path}
    find_region, totals = _merged_regions(t, carried)
    bare = TrainTrack.build(t.surface, len(switches), branches)
    if len(bare.occupants) != 3 * len(switches):
        return None, None
    punctures = {}
    claimed = set()
    try:
        faces = bare.faces
    except TrackError:
        return None, None
    for face in faces:
        switch, slot = face.darts[0]
        region = find_region(t.face_index[(switches[switch], slot)])
        if region in claimed:
            return None, None
        claimed.add(region)
        punctures[face.darts[0]] = totals[region]
    track = TrainTrack.build(t.surface, len(switches), branches, punctures)
    if not validate_track(track):
        return None, None
    inclusion = tuple(
        tuple(path.count(b) for _, _, path in pieces) for b in range(t.num_branches)
    )
    return track, inclusion


def subtrack(t, drop):
    """The subtrack left after deleting the branches ``drop`` and trimming."""
    kept = trim(t, set(range(t.num_branches)) - set(drop))
    result = materialize(t, kept) if kept is not None else None
    if result is None:
        raise TrackError(f"dropping {sorted(drop)} from {t} leaves no valid subtrack")
    return replace(result, deletions=len(set(drop)))


def enumerate_subtracks(t, proper=False):
    """Every valid subtrack reachable by trimming a nonempty branch subset."""
    if t.num_branches > MAX_ENUMERATION_BRANCHES:
        raise TrackError(f"{t} has too many branches to enumerate subsets")
    found = {}
    width = t.num_branches
    # largest kept sets first, so each subtrack records its fewest deletions
    for mask in sorted(range(1, 1 << width), key=lambda m: (-m.bit_count(), m)):
        kept = trim(t, {b for b in range(width) if mask >> b & 1})
        if kept is None or kept in found:
            continue
        piece = materialize(t, kept)
        found[kept] = replace(piece, deletions=width - mask.bit_count()) if piece else None
    results = [s for s in found.values() if s is not None]
    if proper:
        results = [s for s in results if s.is_proper]
    logger.debug('%s: %d subtracks', t, len(results))
    return tuple(sorted(results, key=lambda s: (len(s.branches), sorted(s.branches))))


# ========================
#  FILLING & CLASSIFICATION
# ========================
@dataclass(frozen=True)
class FillingWitness:
    reason: str
    face: int = None
    punctures: int = None


def is_filling(t):
    if isinstance(t, Subtrack):
        if not t.connected:
            return False, FillingWitness('disconnected')
        t = t.track
    if t.surface.genus:
        raise TrackError('filling is only decided on genus 0 surfaces')
    for index, face in enumerate(t.faces):
        if face.punctures >= 2:
            return False, FillingWitness('punctures', index, face.punctures)
    return True, None


class TrackClass(str, Enum):
    COMPLETE = 'complete'
    NEARLY_COMPLETE = 'nearly-complete'
    OTHER = 'other'


@dataclass(frozen=True)
class Classification:
    kind: TrackClass
    census: RegionCensus
    recurrence: object
    transverse_recurrence: object
    cone_dim: int = None

    @property
    def birecurrent(self):
        return self.recurrence.holds and self.transverse_recurrence.holds


def classify_track(t):
    from .cones import cone_dim, is_recurrent, is_transversely_recurrent

    census = region_census(t)
    recurrence = is_recurrent(t)
    transverse = is_transversely_recurrent(t)
    dim = cone_dim(t) if recurrence.holds else None
    kind = TrackClass.OTHER
    if recurrence.holds and transverse.holds:
        if census.is_complete:
            kind = TrackClass.COMPLETE
        elif census.is_nearly_complete and dim == 3:
            kind = TrackClass.NEARLY_COMPLETE
    return Classification(kind, census, recurrence, transverse, dim)


# ========================
#  CANONICAL FORM
# ========================
def canonical_key(t):
    """Lexicographically least breadth-first slot encoding over all start switches."""
    if t.is_circle:
        return ('circle', tuple(sorted(face.punctures for face in t.faces)))
    if len(switch_components(t)) != 1:
        raise TrackError('canonical form needs a connected track')
    counts = dict(t.face_punctures)
    best = None
    for start in range(t.num_switches):
        order = {start: 0}
        queue = deque([start])
        while queue:
            switch = queue.popleft()
            for slot in range(3):
                other = t.opposite((switch, slot))[0]
                if other not in order:
                    order[other] = len(order)
                    queue.append(other)
        by_label = sorted(order, key=order.get)
        table = tuple(
            tuple((order[t.opposite((s, slot))[0]], t.opposite((s, slot))[1]) for slot in range(3))
            for s in by_label
        )
        faces = tuple(sorted(
            (min((order[s], slot) for s, slot in face.darts), sum(counts.get(d, 0) for d in face.darts))
            for face in t.faces
        ))
        key = (table, faces)
        if best is None or key < best:
            best = key
    return (t.num_switches, t.num_branches) + best


def is_isomorphic(s, t):
    return s.surface == t.surface and canonical_key(s) == canonical_key(t)


def canonical_digest(t):
    """Short stable hash of the canonical key, used in manifests and dumps."""
    return hashlib.sha1(repr(canonical_key(t)).encode()).hexdigest()[:16]


# ========================
#  TEXT FORMAT
# ========================
FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrackRecord:
    name: str
    track: TrainTrack
    declared: TrackClass = None
    parent: str = None
    dropped: tuple = ()
    line: int = 0


def _parse_dart(token, line):
    try:
        switch, slot = token.split('.')
        return int(switch), SLOT_NAMES.index(slot)
    except ValueError:
        raise TrackFormatError(f"line {line}: bad dart {token!r}") from None


def _parse_class(tokens, line):
    if not tokens:
        return None
    try:
        return TrackClass(tokens[0])
    except ValueError:
        raise TrackFormatError(f"line {line}: unknown classification {tokens[0]!r}") from None


def loads_tracks(text):
    """Parse a ``.tracks`` document into records (structure only, no validation)."""
    records, surface, current = [], None, None
    named = {}
    lines = text.splitlines()
    if not lines or lines[0].split() != ['tracks', str(FORMAT_VERSION)]:
        raise TrackFormatError(f"missing header 'tracks {FORMAT_VERSION}'")
    for number, raw in enumerate(lines[1:], start=2):
        tokens = raw.split('#')[0].split()
        if not tokens:
            continue
        keyword, args = tokens[0], tokens[1:]
        if keyword == 'surface':
            if len(args) != 2:
                raise TrackFormatError(f"line {number}: surface needs genus and punctures")
            surface = Surface(int(args[0]), int(args[1]))
        elif keyword == 'track':
            if surface is None or current is not None or not args:
                raise TrackFormatError(f"line {number}: misplaced track block")
            current = {'name': args[0], 'declared': _parse_class(args[1:], number),
                       'slots': {}, 'faces': {}, 'circle': None, 'line': number}
        elif keyword == 'switch':
            if current is None or len(args) != 4:
                raise TrackFormatError(f"line {number}: switch needs an id and three branch ends")
            switch = int(args[0])
            for slot, ref in enumerate(args[1:]):
                try:
                    branch, end = (int(part) for part in ref.split('.'))
                except ValueError:
                    raise TrackFormatError(f"line {number}: bad branch end {ref!r}") from None
                if (branch, end) in current['slots'] or end not in (0, 1):
                    raise TrackFormatError(f"line {number}: branch end {ref} listed twice or invalid")
                current['slots'][(branch, end)] = (switch, slot)
        elif keyword == 'face':
            if current is None or len(args) != 2:
                raise TrackFormatError(f"line {number}: face needs a dart and a puncture count")
            current['faces'][_parse_dart(args[0], number)] = int(args[1])
        elif keyword == 'circle':
            if current is None or len(args) != 2:
                raise TrackFormatError(f"line {number}: circle needs two puncture counts")
            current['circle'] = (int(args[0]), int(args[1]))
        elif keyword == 'end':
            if current is None:
                raise TrackFormatError(f"line {number}: 'end' outside a track block")
            record = _finish_block(surface, current)
            named[record.name] = record
            records.append(record)
            current = None
        elif keyword == 'subtrack':
            if len(args) < 4 or args[1] != 'of' or args[3] != 'drop':
                raise TrackFormatError(f"line {number}: expected 'subtrack NAME of PARENT drop B...'")
            parent = named.get(args[2])
            if parent is None:
                raise TrackFormatError(f"line {number}: unknown parent {args[2]!r}")
            dropped, rest = [], args[4:]
            while rest and rest[0].isdigit():
                dropped.append(int(rest.pop(0)))
            try:
                piece = subtrack(parent.track, dropped)
                track = piece.track
            except TrackError as exc:
                raise TrackFormatError(f"line {number}: {exc}") from None
            record = TrackRecord(args[0], _renamed(track, args[0]), _parse_class(rest, number),
                                 parent.name, tuple(dropped), number)
            named[record.name] = record
            records.append(record)
        else:
            raise TrackFormatError(f"line {number}: unknown keyword {keyword!r}")
    if current is not None:
        raise TrackFormatError(f"track block {current['name']!r} is not closed")
    return records


def _renamed(track, name):
    return TrainTrack(track.surface, track.num_switches, track.branches, track.face_punctures, name)


def _finish_block(surface, block):
    if block['circle'] is not None:
        track = TrainTrack.circle(surface, *block['circle'], name=block['name'])
        return TrackRecord(block['name'], track, block['declared'], line=block['line'])
    ends = block['slots']
    count = 1 + max((b for b, _ in ends), default=-1)
    branches = []
    for b in range(count):
        if (b, 0) not in ends or (b, 1) not in ends:
            raise TrackFormatError(f"track {block['name']!r}: branch {b} is missing an end")
        branches.append((ends[(b, 0)], ends[(b, 1)]))
    switches = 1 + max((s for s, _ in ends.values()), default=-1)
    track = TrainTrack.build(surface, switches, branches, block['faces'], name=block['name'])
    return TrackRecord(block['name'], track, block['declared'], line=block['line'])


def dumps_tracks(records, notes=None):
    """Write records back out; subtracks are written as full track blocks.

    ``notes`` maps a record name to a comment line written above its block.
    """
    notes = notes or {}
    records = list(records)
    if not records:
        return f"tracks {FORMAT_VERSION}\n"
    surface = records[0].track.surface
    out = [f"tracks {FORMAT_VERSION}", f"surface {surface.genus} {surface.punctures}"]
    for record in records:
        t = record.track
        if record.name in notes:
            out.append(f"# {notes[record.name]}")
        header = f"track {record.name}"
        if record.declared is not None:
            header += f" {record.declared.value}"
        out.append(header)
        if t.is_circle:
            counts = dict(t.face_punctures)
            out.append(f"circle {counts.get(CIRCLE_SIDES[0], 0)} {counts.get(CIRCLE_SIDES[1], 0)}")
        else:
            for switch in range(t.num_switches):
                refs = ['{}.{}'.format(*t.end_of((switch, slot))) for slot in range(3)]
                out.append(f"switch {switch} {' '.join(refs)}")
            for dart, count in t.face_punctures:
                out.append(f"face {dart[0]}.{SLOT_NAMES[dart[1]]} {count}")
        out.append('end')
    return '\n'.join(out) + '\n'
