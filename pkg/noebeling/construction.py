# noebeling/construction.py
"""
Approximating a certified path by paths that hug the grid.

``partition_path`` cuts ``[0, 1]`` into I-blocks, each mapped into one open
cube of the cover, and J-blocks around the places where the path moves
between cubes, each mapped into one cover element. ``approximate_path``
replaces every block by a path near the grid inside the same cube or
element: J-blocks become short hops across a corner of the shared face,
I-blocks become grid routes on the cube boundary pushed slightly inward.
Everything the construction promises is checked again afterwards.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .geometry import PathError, PLPath3, Point3, certify_path, segment_sqdist
from .grid import CoverError, grid_of_cover, route_on_boundary
from .surds import QRootTwo, rational_between

logger = logging.getLogger(__name__)


# ========================
#  PARTITION
# ========================
@dataclass(frozen=True)
class Block:
    kind: str
    start: Fraction
    end: Fraction
    cubes: tuple
    element: object = None
    crossing: QRootTwo = None

    @property
    def cube(self):
        return self.cubes[-1]

    def __str__(self):
        where = self.element if self.kind == 'J' else self.cube
        return f"{self.kind}[{self.start}, {self.end}] in {where}"


@dataclass(frozen=True)
class PathPartition:
    blocks: tuple
    level: int

    @property
    def cubes(self):
        return [b.cube for b in self.blocks if b.kind == 'I']

    @property
    def hops(self):
        return [b for b in self.blocks if b.kind == 'J']


def _critical_params(path, level):
    """Parameters where the path meets a lattice plane of the finest level."""
    scale = 2 ** level
    found = set()
    for t0, t1, start, end in path.segments():
        direction = end - start
        for k in range(3):
            if not direction[k]:
                if (start[k] * scale).is_rational and (start[k] * scale).a.denominator == 1:
                    raise PathError(f"segment at t={t0} runs inside a lattice plane")
                continue
            lo, hi = sorted((start[k] * scale, end[k] * scale))
            first = lo.floor() if lo.is_rational and lo.a.denominator == 1 else lo.floor() + 1
            for plane in range(first, hi.floor() + 1):
                tau = (Fraction(plane, scale) - start[k]) / direction[k]
                found.add(t0 + (t1 - t0) * tau)
    return sorted(found)


def _holds_cell(cube, cell, level):
    lo, hi = cube.units(level)
    return all(2 * a <= c - 1 and c + 1 <= 2 * b for c, a, b in zip(cell, lo, hi))


def _step(cover, prev, cube, point):
    """Cost and element of passing from ``prev`` to ``cube`` through ``point``."""
    if prev == cube and cube.contains(point):
        return 0, None
    for pair in cover.pairs_with(prev):
        if cube in pair.cubes and pair.contains(point):
            return 1, pair
    return None


def _end_element(cover, cube, point):
    return next((pair for pair in cover.pairs_with(cube) if pair.contains(point)), None)


def partition_path(path, cover, grid=None):
    """Split ``[0, 1]`` into blocks that each map into a cube or a cover element."""
    grid = grid or grid_of_cover(cover)
    level = grid.level
    critical = _critical_params(path, level)
    breaks = sorted({QRootTwo(0), QRootTwo(1), *critical})
    intervals = list(zip(breaks, breaks[1:]))

    candidates = []
    for a, b in intervals:
        middle = (a + b) / 2
        cell = grid.point_cell(path.at(middle))
        found = [v for v in cover.maximal_cubes if _holds_cell(v, cell, level)]
        if not found:
            raise PathError(f"parameter {middle} is not covered by a maximal cube")
        candidates.append(found)

    first_point, last_point = path.at(0), path.at(1)
    start_on_face = bool(critical) and critical[0] == 0
    end_on_face = bool(critical) and critical[-1] == 1

    # cheapest cube assignment; each move between cubes costs one J-block
    table = [{}]
    for cube in candidates[0]:
        if start_on_face:
            pair = _end_element(cover, cube, first_point)
            if pair is not None:
                table[0][cube] = (1, None, pair)
        else:
            table[0][cube] = (0, None, None)
    for i in range(1, len(intervals)):
        point = path.at(intervals[i][0])
        row = {}
        for cube in candidates[i]:
            for prev, (cost, _, _) in table[i - 1].items():
                step = _step(cover, prev, cube, point)
                if step is None:
                    continue
                total = cost + step[0]
                if cube not in row or total < row[cube][0]:
                    row[cube] = (total, prev, step[1])
        if not row:
            raise PathError(f"no cover element carries the path across t={intervals[i][0]}")
        table.append(row)

    finals = []
    for cube, (cost, _, _) in table[-1].items():
        if end_on_face:
            pair = _end_element(cover, cube, last_point)
            if pair is not None:
                finals.append((cost + 1, cube, pair))
        else:
            finals.append((cost, cube, None))
    if not finals:
        raise PathError('no cover element holds the end of the path')
    _, cube, end_pair = min(finals, key=lambda item: item[0])

    chosen, moves = [cube], []
    for i in range(len(intervals) - 1, 0, -1):
        _, prev, pair = table[i][chosen[-1]]
        moves.append(pair)
        chosen.append(prev)
    chosen.reverse()
    moves.reverse()
    start_pair = table[0][chosen[0]][2]

    hops = []
    if start_pair is not None:
        _, right = intervals[0]
        hops.append(Block('J', Fraction(0), rational_between(0, right / 3), (chosen[0], chosen[0]),
                          start_pair, QRootTwo(0)))
    for i, pair in enumerate(moves, start=1):
        if pair is None:
            continue
        a_prev, at = intervals[i - 1]
        _, a_next = intervals[i]
        s = rational_between(at - (at - a_prev) / 3, at)
        t = rational_between(at, at + (a_next - at) / 3)
        hops.append(Block('J', s, t, (chosen[i - 1], chosen[i]), pair, at))
    if end_pair is not None:
        left, _ = intervals[-1]
        hops.append(Block('J', rational_between(1 - (1 - left) / 3, 1), Fraction(1),
                          (chosen[-1], chosen[-1]), end_pair, QRootTwo(1)))

    blocks, cursor = [], Fraction(0)
    for hop in hops:
        if hop.start > cursor:
            blocks.append(Block('I', cursor, hop.start, (hop.cubes[0],)))
        blocks.append(hop)
        cursor = hop.end
    if cursor < 1:
        blocks.append(Block('I', cursor, Fraction(1), (chosen[-1],)))
    logger.debug('partitioned path into %d blocks (%d hops)', len(blocks), len(hops))
    return PathPartition(tuple(blocks), level)


def check_blocks(path, partition):
    """Re-derive block membership from the path; returns a list of problems."""
    problems = []
    blocks = partition.blocks
    if not blocks or blocks[0].start != 0 or blocks[-1].end != 1:
        problems.append('blocks do not cover [0, 1]')
    for before, after in zip(blocks, blocks[1:]):
        if before.end != after.start:
            problems.append(f"gap or overlap between {before} and {after}")
    for block in blocks:
        if block.start >= block.end:
            problems.append(f"{block} is empty")
            continue
        region = block.element if block.kind == 'J' else block.cube
        for point in path.points_between(block.start, block.end):
            if not region.contains(point):
                problems.append(f"{block}: {point.token()} escapes")
                break
    return problems


# ========================
#  APPROXIMATION
# ========================
def offset_for(level, n):
    """Inward offset coefficient: anchors sit ``offset * sqrt 2`` from the grid along each axis."""
    if n < 1:
        raise PathError(f"n must be a positive integer, got {n}")
    return Fraction(1, 2 ** (level + n + 1))


def anchor(grid, cube, vertex, offset):
    """The point near grid vertex ``vertex`` pushed into ``cube``; all coordinates irrational."""
    lo, hi = cube.units(grid.level)
    base = grid.vertex_point(vertex)
    coords = []
    for v, a, b, c in zip(vertex, lo, hi, base):
        if not 2 * a <= v <= 2 * b:
            raise PathError(f"vertex {vertex} is not on {cube}")
        coords.append(QRootTwo(c, -offset if v == 2 * b else offset))
    return Point3(*coords)


def _face_vertex(grid, pair):
    for corner in pair.face_corners():
        vertex = grid.vertex_of(corner)
        if vertex in grid:
            return vertex
    raise CoverError(f"no corner of the face of {pair} lies on the grid")


def _cube_vertex(grid, cube):
    for corner in cube.corners():
        vertex = grid.vertex_of(corner)
        if vertex in grid:
            return vertex
    raise CoverError(f"no corner of {cube} lies on the grid")


@dataclass
class ApproximationReport:
    n: int
    certification: object = None
    far_segments: list = field(default_factory=list)
    escapes: list = field(default_factory=list)
    max_vertex_sqdist: QRootTwo = None

    @property
    def holds(self):
        return bool(self.certification) and not self.far_segments and not self.escapes


@dataclass(frozen=True)
class Approximation:
    path: PLPath3
    partition: PathPartition
    offset: Fraction
    report: ApproximationReport


def approximate_path(path, cover, n, grid=None, partition=None):
    """Build g_n for ``path`` and check it: certified, near the grid, and block-wise in the same elements."""
    grid = grid or grid_of_cover(cover)
    partition = partition or partition_path(path, cover, grid)
    offset = offset_for(grid.level, n)
    blocks = partition.blocks

    hops = {}
    for index, block in enumerate(blocks):
        if block.kind == 'J':
            vertex = _face_vertex(grid, block.element)
            hops[index] = (vertex, anchor(grid, block.cubes[0], vertex, offset),
                           anchor(grid, block.cubes[1], vertex, offset))

    placed = []
    for index, block in enumerate(blocks):
        if block.kind == 'J':
            _, p, q = hops[index]
            placed.append((block.start, p))
            placed.append((block.end, q))
            continue
        before, after = hops.get(index - 1), hops.get(index + 1)
        if before and after:
            route = route_on_boundary(grid, block.cube, before[0], after[0])
        elif before or after:
            route = [(before or after)[0]]
        else:
            route = [_cube_vertex(grid, block.cube)]
        points = [anchor(grid, block.cube, vertex, offset) for vertex in route]
        if len(points) == 1:
            points = points * 2
        last = len(points) - 1
        span = block.end - block.start
        placed.extend((block.start + span * i / last, point) for i, point in enumerate(points))

    params, vertices = [], []
    for t, point in placed:
        if params and params[-1] == t:
            if vertices[-1] != point:
                raise PathError(f"pieces disagree at t={t}")
            continue
        params.append(t)
        vertices.append(point)
    approximation = PLPath3(tuple(params), tuple(vertices))
    report = check_approximation(approximation, partition, grid, n)
    if not report.holds:
        logger.warning('approximation for n=%d failed its checks', n)
    return Approximation(approximation, partition, offset, report)


def check_approximation(path, partition, grid, n):
    """Independent checks of an approximating path."""
    report = ApproximationReport(n)
    report.certification = certify_path(path)
    radius_sq = Fraction(1, n * n)
    for index, (_, _, start, end) in enumerate(path.segments()):
        if grid.segment_near(start, end, radius_sq) is None:
            report.far_segments.append(index)
    report.escapes = check_blocks(path, partition)
    report.max_vertex_sqdist = max(grid.sqdist(v) for v in path.vertices)
    return report


def approximation_family(path, cover, ns, grid=None):
    grid = grid or grid_of_cover(cover)
    partition = partition_path(path, cover, grid)
    return {n: approximate_path(path, cover, n, grid, partition) for n in ns}


# ========================
#  LOCAL FINITENESS
# ========================
@dataclass
class SampleCheck:
    sample: Point3
    sqdist: QRootTwo
    threshold: int
    checked: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def holds(self):
        return not self.violations


@dataclass
class LocalFinitenessReport:
    samples: list = field(default_factory=list)

    @property
    def holds(self):
        return all(s.holds for s in self.samples)


def threshold_for(sqdist):
    """``ceil(1/d) + 1`` for ``d = sqrt(sqdist)``, computed exactly."""
    guess = max(1, math.ceil(1 / math.sqrt(float(sqdist))))
    while guess > 1 and (guess - 1) ** 2 * sqdist >= 1:
        guess -= 1
    while guess * guess * sqdist < 1:
        guess += 1
    return guess + 1


def keeps_away(sample, sqdist, start, end, n):
    """Whether the segment stays at distance at least ``d - 1/n`` from ``sample``."""
    c = Fraction(1, n)
    gap = sqdist + c * c - segment_sqdist(sample, start, end)
    if gap <= 0:
        return True
    return 4 * c * c * sqdist >= gap * gap


def local_finiteness_report(paths, samples, cover, grid=None):
    """``paths`` maps n to g_n; every sample gets its threshold and the avoidance checks above it."""
    grid = grid or grid_of_cover(cover)
    report = LocalFinitenessReport()
    for sample in samples:
        sqdist = grid.sqdist(sample)
        if not sqdist:
            raise PathError(f"sample {sample.token()} lies on the grid")
        check = SampleCheck(sample, sqdist, threshold_for(sqdist))
        for n, path in sorted(paths.items()):
            if n < check.threshold:
                continue
            check.checked.append(n)
            for index, (_, _, start, end) in enumerate(path.segments()):
                if not keeps_away(sample, sqdist, start, end, n):
                    check.violations.append((n, index))
                    break
        report.samples.append(check)
    return report
