# laminations/splitting.py
"""
Split moves, full splits, measure-following splitting sequences and the
train track partitions built from them.

Let ``b`` be a large branch from ``(u, L)`` to ``(v, L)``. With ``b`` drawn
left to right, the branches ``A = (u, S1)`` and ``C = (v, S2)`` lie above it
and ``B = (u, S2)``, ``D = (v, S1)`` below it. The LEFT split keeps the
measures with ``w_A >= w_C``: the diagonal runs from the switch of ``A``
down to the switch of ``D``. The RIGHT split keeps ``w_C >= w_A``. The
diagonal reuses the index of ``b``, so every other branch keeps its index.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import product
from pathlib import Path

from .cones import (
    compose, cone_contains, extreme_rays, image_rays, interior_point, projective_diameter,
    relative_interior_contains, relative_interiors_meet, support, switch_matrix,
)
from .exact import mat_vec, rank, solve_nonnegative
from .tracks import (
    LARGE, SMALL_LEFT, SMALL_RIGHT, BranchKind, TrackClass, TrackError, TrackRecord, TrainTrack,
    canonical_digest, canonical_key, classify_branches, classify_track, dumps_tracks, large_branches,
    subtrack,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_TRACKS = 100_000


class SplitError(ValueError):
    pass


class PartitionError(ValueError):
    pass


class Side(str, Enum):
    LEFT = 'L'
    RIGHT = 'R'


DEGENERATE = 'DEGENERATE'


@dataclass(frozen=True)
class SplitMove:
    branch: int
    side: Side

    def __str__(self):
        return f"{self.side.value}{self.branch}"


# ========================
#  SPLITS
# ========================
def identity_matrix(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def split(t, move):
    """The child of ``t`` split at ``move.branch`` with its carrying matrix."""
    b = move.branch
    if classify_branches(t).get(b) is not BranchKind.LARGE:
        raise SplitError(f"branch {b} is not large in {t}")
    (u, _), (v, _) = t.branches[b]
    A = t.slot_branch(u, SMALL_LEFT)
    B = t.slot_branch(u, SMALL_RIGHT)
    C = t.slot_branch(v, SMALL_RIGHT)
    D = t.slot_branch(v, SMALL_LEFT)
    if move.side is Side.LEFT:
        remap = {
            (u, SMALL_LEFT): (u, LARGE), (v, SMALL_RIGHT): (u, SMALL_RIGHT),
            (v, SMALL_LEFT): (v, LARGE), (u, SMALL_RIGHT): (v, SMALL_RIGHT),
        }
        diagonal = ((u, SMALL_LEFT), (v, SMALL_LEFT))
        carried = (B, C)
    else:
        remap = {(v, SMALL_RIGHT): (u, LARGE), (u, SMALL_RIGHT): (v, LARGE)}
        diagonal = ((u, SMALL_RIGHT), (v, SMALL_RIGHT))
        carried = (A, D)

    branches = [
        diagonal if i == b else tuple(remap.get(dart, dart) for dart in branch)
        for i, branch in enumerate(t.branches)
    ]
    matrix = identity_matrix(t.num_branches)
    for x in carried:
        matrix[b][x] += 1

    bare = TrainTrack.build(t.surface, t.num_switches, branches)
    punctures, claimed = {}, set()
    for face in bare.faces:
        parents = {
            t.face_index[t.branches[x][end]]
            for x, end in (bare.end_of(dart) for dart in face.darts) if x != b
        }
        if len(parents) != 1 or parents & claimed:
            raise SplitError(f"split {move} of {t} does not match faces one to one")
        claimed |= parents
        punctures[face.darts[0]] = t.faces[parents.pop()].punctures
    name = f"{t.name}/{move}" if t.name else ''
    return TrainTrack.build(t.surface, t.num_switches, branches, punctures, name), matrix


def central_pieces(t, branch):
    """The common subtrack of both splits at ``branch``, one ``(track, matrix)`` per component."""
    child, matrix = split(t, SplitMove(branch, Side.LEFT))
    try:
        piece = subtrack(child, [branch])
    except TrackError as exc:
        raise SplitError(f"central split of {t} at {branch}: {exc}") from None
    pieces = []
    for index, (track, inclusion) in enumerate(zip(piece.components, piece.inclusions)):
        name = f"{t.name}/C{branch}" if t.name else ''
        if name and not piece.connected:
            name += f".{index}"
        track = TrainTrack(track.surface, track.num_switches, track.branches, track.face_punctures, name)
        pieces.append((track, compose(matrix, inclusion)))
    return pieces


def central_split(t, branch):
    """The common subtrack of both splits at ``branch``: a split child minus its diagonal."""
    pieces = central_pieces(t, branch)
    if len(pieces) != 1:
        raise SplitError(f"central split of {t} at {branch} has {len(pieces)} components")
    return pieces[0]


# ========================
#  FULL SPLITS
# ========================
@dataclass(frozen=True)
class FullSplit:
    moves: tuple
    track: TrainTrack
    matrix: tuple
    kind: TrackClass

    @property
    def kept(self):
        return self.kind in (TrackClass.COMPLETE, TrackClass.NEARLY_COMPLETE)


def split_in_sequence(t, moves):
    """Apply ``moves`` one after another, composing the carrying matrices."""
    matrix = identity_matrix(t.num_branches)
    for move in moves:
        t, step = split(t, move)
        matrix = compose(matrix, step)
    return t, matrix


def full_splits(t):
    """Every side assignment over the large branches of ``t``, split in branch order."""
    larges = large_branches(t)
    results = []
    for sides in product((Side.LEFT, Side.RIGHT), repeat=len(larges)):
        moves = tuple(SplitMove(b, side) for b, side in zip(larges, sides))
        try:
            child, matrix = split_in_sequence(t, moves)
        except SplitError as exc:
            logger.warning('full split %s of %s skipped: %s', ' '.join(map(str, moves)), t, exc)
            continue
        results.append(FullSplit(moves, child, tuple(map(tuple, matrix)), classify_track(child).kind))
    return results


# ========================
#  MEASURE-FOLLOWING SPLITS
# ========================
@dataclass(frozen=True)
class SplitStep:
    moves: tuple
    track: TrainTrack
    matrix: tuple  # carries the new track into the old one
    weights: tuple  # the followed measure in the new track's coordinates
    degenerate: bool = False
    common: tuple = ()  # (track, matrix) per component of the common subtrack when degenerate

    @property
    def move(self):
        return DEGENERATE if self.degenerate else self.moves


def _check_measure(t, w):
    w = tuple(Fraction(v) for v in w)
    if len(w) != t.num_branches or any(v <= 0 for v in w):
        raise SplitError(f"measure {w} is not strictly positive on {t}")
    if any(v != 0 for v in mat_vec(switch_matrix(t), w)):
        raise SplitError(f"measure {w} violates the switch conditions of {t}")
    return w


def split_toward(t, w):
    """Full split of ``t`` choosing at each large branch the side that carries ``w``."""
    w = _check_measure(t, w)
    current, weights = t, w
    matrix = identity_matrix(t.num_branches)
    moves = []
    for b in large_branches(t):
        if classify_branches(current).get(b) is not BranchKind.LARGE:
            raise SplitError(f"branch {b} stopped being large after {moves}")
        options = {}
        for side in Side:
            child, step = split(current, SplitMove(b, side))
            solved = solve_nonnegative(step, weights)
            if solved.feasible:
                options[side] = (child, step, solved.point)
        if not options:
            raise SplitError(f"neither split of {current} at {b} carries {weights}")
        if len(options) == 2:
            common = tuple(
                (piece, tuple(map(tuple, compose(matrix, inclusion))))
                for piece, inclusion in central_pieces(current, b)
            )
            return SplitStep(tuple(moves), current, tuple(map(tuple, matrix)), weights, True, common)
        side, (current, step, weights) = next(iter(options.items()))
        matrix = compose(matrix, step)
        moves.append(SplitMove(b, side))
    return SplitStep(tuple(moves), current, tuple(map(tuple, matrix)), tuple(weights))


@dataclass
class NestingRun:
    diameters: list
    moves: list = field(default_factory=list)
    degenerate_at: int = None

    @property
    def nonincreasing(self):
        return all(a >= b for a, b in zip(self.diameters, self.diameters[1:]))

    @property
    def ratio(self):
        if not self.diameters or self.diameters[0] == 0:
            return None
        return self.diameters[-1] / self.diameters[0]


def nesting_diameters(t0, w, length):
    """Projective diameters of the cones along the full splitting sequence following ``w``."""
    if length < 1:
        raise SplitError('length must be at least 1')
    weights = _check_measure(t0, w)
    run = NestingRun([projective_diameter(extreme_rays(t0))])
    current, chart = t0, identity_matrix(t0.num_branches)
    while len(run.diameters) < length:
        step = split_toward(current, weights)
        if step.degenerate:
            run.degenerate_at = len(run.diameters)
            logger.info('measure %s is degenerate after %d steps', w, run.degenerate_at)
            break
        chart = compose(chart, step.matrix)
        current, weights = step.track, step.weights
        run.moves.append(step.moves)
        run.diameters.append(projective_diameter(image_rays(chart, extreme_rays(current))))
    return run


# ========================
#  PARTITIONS
# ========================
@dataclass(frozen=True, eq=False)
class Member:
    name: str
    track: TrainTrack
    kind: TrackClass
    chart: int  # index of the root standard track whose coordinates we use
    chart_matrix: tuple
    history: tuple = ()

    @cached_property
    def key(self):
        return canonical_key(self.track)

    @cached_property
    def chart_rays(self):
        return tuple(image_rays(self.chart_matrix, extreme_rays(self.track)))

    @cached_property
    def point(self):
        return interior_point(self.chart_rays)

    @cached_property
    def identity(self):
        return (self.chart, self.key, self.chart_rays)

    @property
    def complete(self):
        return self.kind is TrackClass.COMPLETE

    def child(self, suffix, track, matrix, kind):
        return Member(
            f"{self.name}/{suffix}", track, kind, self.chart,
            tuple(map(tuple, compose(self.chart_matrix, matrix))), self.history + (suffix,),
        )


@dataclass(frozen=True)
class Partition:
    complete: tuple
    nearly_complete: tuple
    depth: int = 0
    assumptions: tuple = ()

    @property
    def members(self):
        return self.complete + self.nearly_complete

    def __len__(self):
        return len(self.complete) + len(self.nearly_complete)

    def find(self, name):
        for member in self.members:
            if member.name == name:
                return member
        raise PartitionError(f"no member named {name!r}")


def _complete_move(eta, branch):
    """Children of a complete member split at ``branch``: (complete, nearly complete, log)."""
    children = {}
    for side in Side:
        track, matrix = split(eta.track, SplitMove(branch, side))
        kind = classify_track(track).kind
        children[side] = eta.child(f"{side.value}{branch}", track, matrix, kind)
    complete = [c for c in children.values() if c.complete]
    if not complete:
        raise PartitionError(f"no complete child of {eta.name} at {branch}")
    sigmas = []
    if len(complete) == 2:
        try:
            pieces = central_pieces(eta.track, branch)
        except SplitError as exc:
            logger.warning('no common subtrack for %s at %d: %s', eta.name, branch, exc)
            pieces = ()
        if len(pieces) == 1:
            track, matrix = pieces[0]
            kind = classify_track(track).kind
            if kind is TrackClass.NEARLY_COMPLETE:
                sigmas.append(eta.child(f"C{branch}", track, matrix, kind))
            found = f"sigma {kind.value}"
        else:
            found = f"common subtrack has {len(pieces)} components, no sigma"
        note = f"complete move {eta.name} at {branch}: both children complete, {found}"
    else:
        note = f"complete move {eta.name} at {branch}: kept {complete[0].history[-1]}"
    return complete, sigmas, note


def _nearly_complete_move(sigma, branch):
    kept = []
    for side in Side:
        track, matrix = split(sigma.track, SplitMove(branch, side))
        kind = classify_track(track).kind
        if kind is TrackClass.NEARLY_COMPLETE:
            kept.append(sigma.child(f"{side.value}{branch}", track, matrix, kind))
    if not kept:
        raise PartitionError(f"no nearly complete child of {sigma.name} at {branch}")
    note = f"nearly complete move {sigma.name} at {branch}: kept {' '.join(m.history[-1] for m in kept)}"
    return kept, note


def partition_move(p, target, branch):
    """One complete or nearly complete splitting move on the member named ``target``."""
    member = p.find(target)
    if branch not in large_branches(member.track):
        raise PartitionError(f"branch {branch} is not large in {target}")
    if member.complete:
        complete, sigmas, note = _complete_move(member, branch)
        new_complete = tuple(m for m in p.complete if m is not member) + tuple(complete)
        new_sigma = p.nearly_complete + tuple(sigmas)
    else:
        kept, note = _nearly_complete_move(member, branch)
        new_complete = p.complete
        new_sigma = tuple(m for m in p.nearly_complete if m is not member) + tuple(kept)
    logger.debug(note)
    return Partition(new_complete, new_sigma, p.depth, p.assumptions)


@dataclass
class PartitionSequence:
    partitions: list
    log: list = field(default_factory=list)
    truncated: bool = False

    @property
    def depth(self):
        return len(self.partitions) - 1


def _dedup(members):
    seen, kept = set(), []
    for member in members:
        if member.identity not in seen:
            seen.add(member.identity)
            kept.append(member)
    return kept


def _split_all(member, move, log):
    pending = [member]
    for b in large_branches(member.track):
        following = []
        for m in pending:
            if b not in large_branches(m.track):
                log.append(f"{m.name}: branch {b} no longer large, left as is")
                following.append(m)
                continue
            result = move(m, b)
            following.extend(result[0])
            if len(result) == 3:
                yield from result[1]
            log.append(result[-1])
        pending = following
    for m in pending:
        yield m


def generate_partition_sequence(p0, depth, max_tracks=DEFAULT_MAX_TRACKS):
    """
    Apply the two-phase procedure ``depth`` times: every complete member is
    split along all its large branches in turn, then every nearly complete
    member present at the start of the step is split the same way.
    """
    sequence = PartitionSequence([p0])
    current = p0
    for k in range(depth):
        complete, fresh = [], []
        for eta in current.complete:
            for m in _split_all(eta, _complete_move, sequence.log):
                (complete if m.complete else fresh).append(m)
            if len(complete) + len(fresh) > max_tracks:
                break
        sigmas = []
        if len(complete) + len(fresh) <= max_tracks:
            for sigma in current.nearly_complete:
                sigmas.extend(_split_all(sigma, _nearly_complete_move, sequence.log))
        following = Partition(tuple(_dedup(complete)), tuple(_dedup(sigmas + fresh)), k + 1, p0.assumptions)
        if len(complete) + len(fresh) > max_tracks or len(following) > max_tracks:
            sequence.truncated = True
            sequence.log.append(f"depth {k + 1}: truncated past {max_tracks} members")
            logger.warning('partition sequence truncated at depth %d', k + 1)
            break
        sequence.partitions.append(following)
        sequence.log.append(f"depth {k + 1}: {len(following.complete)} complete, "
                            f"{len(following.nearly_complete)} nearly complete")
        current = following
    return sequence


# ========================
#  PROPERTY CHECKS
# ========================
@dataclass(frozen=True)
class Violation:
    property: str
    depth: int
    member: str
    detail: str

    def __str__(self):
        return f"{self.property} at depth {self.depth}: {self.member}: {self.detail}"


@dataclass
class PartitionReport:
    violations: list = field(default_factory=list)
    checked: dict = field(default_factory=dict)
    assumptions: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def count(self, name):
        self.checked[name] = self.checked.get(name, 0) + 1


def _contains_member(outer, inner):
    return (support(outer.point) == support(inner.point)
            and all(cone_contains(outer.chart_rays, r) for r in inner.chart_rays)
            and relative_interior_contains(outer.chart_rays, inner.point))


def check_subdivision(sequence, report):
    for k, partition in enumerate(sequence.partitions[1:], start=1):
        for tau in partition.members:
            report.count('subdivision')
            for j in range(k):
                containers = [
                    eta for eta in sequence.partitions[j].members
                    if eta.chart == tau.chart and _contains_member(eta, tau)
                ]
                if len(containers) != 1:
                    report.violations.append(Violation(
                        'subdivision', k, tau.name, f"{len(containers)} containers at depth {j}"))
                elif tau.complete and not containers[0].complete:
                    report.violations.append(Violation(
                        'subdivision', k, tau.name, f"complete member inside {containers[0].name}"))


def check_adjacency(sequence, report):
    for k, partition in enumerate(sequence.partitions):
        for sigma in partition.nearly_complete:
            report.count('adjacency')
            if rank(list(sigma.chart_rays), len(sigma.point)) != 3:
                report.violations.append(Violation('adjacency', k, sigma.name, 'cone is not 3-dimensional'))
                continue
            p = sigma.point
            neighbours = [
                eta.name for eta in partition.complete
                if eta.chart == sigma.chart
                and cone_contains(eta.chart_rays, p)
                and not relative_interior_contains(eta.chart_rays, p)
            ]
            on_chart_boundary = any(v == 0 for v in p)
            needed = 1 if on_chart_boundary else 2
            if on_chart_boundary:
                report.assumptions.append(
                    f"{sigma.name}: lies on the boundary of chart {sigma.chart}; "
                    f"its neighbour in the adjacent chart is assumed")
            if len(neighbours) < needed:
                report.violations.append(Violation(
                    'adjacency', k, sigma.name, f"{len(neighbours)} complete neighbours, need {needed}"))


def check_full_splits(sequence, report):
    for k, partition in enumerate(sequence.partitions[:-1]):
        following = {m.identity for m in sequence.partitions[k + 1].members}
        for member in partition.members:
            for fs in full_splits(member.track):
                if not fs.kept:
                    continue
                report.count('full-splits')
                chart_matrix = compose(member.chart_matrix, fs.matrix)
                identity = (member.chart, canonical_key(fs.track),
                            tuple(image_rays(chart_matrix, extreme_rays(fs.track))))
                if identity not in following:
                    moves = ' '.join(map(str, fs.moves))
                    report.violations.append(Violation(
                        'full-splits', k, member.name, f"full split {moves} missing at depth {k + 1}"))


def check_disjointness(sequence, report):
    for k, partition in enumerate(sequence.partitions):
        members = partition.members
        for i, first in enumerate(members):
            for second in members[i + 1:]:
                if first.chart != second.chart or support(first.point) != support(second.point):
                    continue
                report.count('disjointness')
                if relative_interiors_meet(first.chart_rays, second.chart_rays):
                    report.violations.append(Violation(
                        'disjointness', k, first.name, f"interior meets {second.name}"))


def verify_partition_properties(sequence):
    report = PartitionReport(assumptions=list(sequence.partitions[0].assumptions))
    check_subdivision(sequence, report)
    check_adjacency(sequence, report)
    check_full_splits(sequence, report)
    check_disjointness(sequence, report)
    logger.info('partition properties: %d violations over %s', len(report.violations), report.checked)
    return report


# ========================
#  DUMPS
# ========================
def dump_sequence(sequence, directory):
    """Write ``depth-<k>.tracks`` for every depth plus ``moves.log``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for partition in sequence.partitions:
        records = [TrackRecord(m.name, m.track, m.kind) for m in partition.members]
        notes = {m.name: f"chart {m.chart} key {canonical_digest(m.track)}" for m in partition.members}
        path = directory / f"depth-{partition.depth}.tracks"
        path.write_text(dumps_tracks(records, notes))
        written.append(path)
    log = directory / 'moves.log'
    log.write_text('\n'.join(sequence.log + (['TRUNCATED'] if sequence.truncated else [])) + '\n')
    written.append(log)
    return written
