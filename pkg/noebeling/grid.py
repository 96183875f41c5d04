# noebeling/grid.py
"""
Dyadic cube-pair covers and the grid left over by them.

Cells of the grid are indexed by doubled integer coordinates at the finest
level ``M`` of the cover: an even coordinate ``c`` is the plane ``c/2 * 2^-M``,
an odd one the open interval between its neighbours. Every open cover
element is a union of such cells, so a cell belongs to the grid exactly when
its centre lies in no cover element.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product

import networkx as nx
import numpy as np

from .surds import ZERO, QRootTwo

logger = logging.getLogger(__name__)

AXES = 'xyz'


class CoverError(ValueError):
    pass


def _unit(axis):
    return tuple(int(k == axis) for k in range(3))


# ========================
#  BOXES AND CUBES
# ========================
@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(Fraction(v) for v in self.lo)
        hi = tuple(Fraction(v) for v in self.hi)
        if len(lo) != 3 or len(hi) != 3 or any(a >= b for a, b in zip(lo, hi)):
            raise CoverError(f"bad bounding box {lo}..{hi}")
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)

    @classmethod
    def unit(cls):
        return cls((0, 0, 0), (1, 1, 1))

    @classmethod
    def from_setting(cls, value):
        if value is None:
            return cls.unit()
        lo, hi = value
        return cls(tuple(lo), tuple(hi))

    def is_dyadic(self, level):
        scale = 2 ** level
        return all((v * scale).denominator == 1 for v in self.lo + self.hi)

    def contains(self, point):
        return all(lo <= c <= hi for lo, c, hi in zip(self.lo, point, self.hi))

    def contains_cube(self, cube):
        lo, hi = cube.bounds()
        return all(a <= b for a, b in zip(self.lo, lo)) and all(a <= b for a, b in zip(hi, self.hi))

    def token(self):
        return ' '.join(str(v) for v in self.lo + self.hi)


@dataclass(frozen=True, order=True)
class DiadicCube:
    """The open cube with corner ``corner * 2^-level`` and side ``2^-level``."""
    level: int
    corner: tuple

    @property
    def side(self):
        return Fraction(1, 2 ** self.level)

    def bounds(self):
        return (tuple(c * self.side for c in self.corner),
                tuple((c + 1) * self.side for c in self.corner))

    def units(self, level):
        """Integer bounds in multiples of ``2^-level``."""
        scale = 2 ** (level - self.level)
        return (tuple(c * scale for c in self.corner), tuple((c + 1) * scale for c in self.corner))

    def contains_cube(self, other):
        if other.level < self.level:
            return False
        shift = other.level - self.level
        return all(c >> shift == s for c, s in zip(other.corner, self.corner))

    def contains(self, point):
        lo, hi = self.bounds()
        return all(a < c < b for a, c, b in zip(lo, point, hi))

    def corners(self):
        lo, hi = self.bounds()
        return [tuple(hi[k] if bit else lo[k] for k, bit in enumerate(bits))
                for bits in product((0, 1), repeat=3)]

    def __str__(self):
        return f"cube(level={self.level}, corner={self.corner})"


@dataclass(frozen=True, order=True)
class CubePair:
    """Interior of the union of the cube at ``corner`` and its neighbour along ``axis``."""
    level: int
    corner: tuple
    axis: int

    def __post_init__(self):
        if self.axis not in (0, 1, 2):
            raise CoverError(f"axis must be 0, 1 or 2, got {self.axis}")
        if self.level < 0:
            raise CoverError(f"negative level {self.level}")
        object.__setattr__(self, 'corner', tuple(int(c) for c in self.corner))

    @property
    def cubes(self):
        step = _unit(self.axis)
        return (DiadicCube(self.level, self.corner),
                DiadicCube(self.level, tuple(c + e for c, e in zip(self.corner, step))))

    def units(self, level):
        scale = 2 ** (level - self.level)
        step = _unit(self.axis)
        return (tuple(c * scale for c in self.corner),
                tuple((c + 1 + e) * scale for c, e in zip(self.corner, step)))

    def bounds(self):
        side = Fraction(1, 2 ** self.level)
        lo, hi = self.units(self.level)
        return tuple(v * side for v in lo), tuple(v * side for v in hi)

    def contains(self, point):
        lo, hi = self.bounds()
        return all(a < c < b for a, c, b in zip(lo, point, hi))

    def contains_pair(self, other):
        level = max(self.level, other.level)
        lo, hi = self.units(level)
        olo, ohi = other.units(level)
        return all(a <= c and d <= b for a, b, c, d in zip(lo, hi, olo, ohi))

    def face_corners(self):
        """Corners of the common face, in cyclic order around its square loop."""
        lo, hi = self.bounds()
        plane = lo[self.axis] + Fraction(1, 2 ** self.level)
        u, v = (k for k in range(3) if k != self.axis)
        corners = []
        for a, b in ((lo[u], lo[v]), (hi[u], lo[v]), (hi[u], hi[v]), (lo[u], hi[v])):
            point = [None] * 3
            point[self.axis], point[u], point[v] = plane, a, b
            corners.append(tuple(point))
        return corners

    def loop_cells(self, level):
        """Doubled-coordinate cells of the boundary of the common face."""
        lo, hi = self.units(level)
        scale = 2 ** (level - self.level)
        plane = 2 * (lo[self.axis] + scale)
        u, v = (k for k in range(3) if k != self.axis)
        cells = []
        for a in range(2 * lo[u], 2 * hi[u] + 1):
            for b in range(2 * lo[v], 2 * hi[v] + 1):
                if a in (2 * lo[u], 2 * hi[u]) or b in (2 * lo[v], 2 * hi[v]):
                    cell = [0] * 3
                    cell[self.axis], cell[u], cell[v] = plane, a, b
                    cells.append(tuple(cell))
        return cells

    def token(self):
        return f"pair {self.level} {' '.join(map(str, self.corner))} {AXES[self.axis]}"

    def __str__(self):
        return f"pair(level={self.level}, corner={self.corner}, axis={AXES[self.axis]})"


# ========================
#  COVERS
# ========================
class CubePairCover:
    def __init__(self, pairs, box=None):
        self.box = box or Box.unit()
        self.pairs = tuple(sorted(set(pairs)))
        self.validate()

    def validate(self):
        # equal-sized boxes never contain each other properly
        levels = sorted({p.level for p in self.pairs})
        by_level = {level: [p for p in self.pairs if p.level == level] for level in levels}
        for i, coarse in enumerate(levels):
            for outer, inner in product(by_level[coarse], (p for fine in levels[i + 1:] for p in by_level[fine])):
                if outer.contains_pair(inner):
                    raise CoverError(f"{inner} is properly contained in {outer}")

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def finest(self):
        return max((p.level for p in self.pairs), default=0)

    @cached_property
    def cubes(self):
        return sorted(self._cube_set)

    @cached_property
    def _cube_set(self):
        return frozenset(cube for pair in self.pairs for cube in pair.cubes)

    def is_maximal(self, cube):
        if cube not in self._cube_set:
            return False
        for level in range(cube.level - 1, -1, -1):
            shift = cube.level - level
            if DiadicCube(level, tuple(c >> shift for c in cube.corner)) in self._cube_set:
                return False
        return True

    @cached_property
    def maximal_cubes(self):
        return [cube for cube in self.cubes if self.is_maximal(cube)]

    @cached_property
    def _pairs_by_cube(self):
        index = {}
        for pair in self.pairs:
            for cube in pair.cubes:
                index.setdefault(cube, []).append(pair)
        return index

    def pairs_with(self, cube):
        return self._pairs_by_cube.get(cube, [])

    def elements_containing(self, point):
        return [pair for pair in self.pairs if pair.contains(point)]

    def covers(self, point):
        return any(pair.contains(point) for pair in self.pairs)


def uniform_cover(level, box=None):
    """All adjacent pairs of ``level``-cubes meeting ``box``, one cube of margin included."""
    box = box or Box.unit()
    if not box.is_dyadic(level):
        raise CoverError(f"bounding box is not aligned to level {level}")
    scale = 2 ** level
    ranges = [range(int(lo * scale) - 1, int(hi * scale) + 1) for lo, hi in zip(box.lo, box.hi)]
    pairs = []
    for corner in product(*ranges):
        for axis in range(3):
            if corner[axis] + 1 in ranges[axis]:
                pairs.append(CubePair(level, corner, axis))
    logger.debug('uniform cover at level %d: %d pairs', level, len(pairs))
    return CubePairCover(pairs, box)


def random_cover(rng, box=None, levels=(1, 2, 3), count=12):
    """Random pairs inside ``box``; pairs swallowed by a larger one are dropped."""
    box = box or Box.unit()
    drawn = set()
    for _ in range(count):
        level = int(rng.choice(levels))
        axis = int(rng.integers(3))
        scale = 2 ** level
        corner = []
        for k in range(3):
            lo, hi = int(box.lo[k] * scale), int(box.hi[k] * scale)
            top = hi - (2 if k == axis else 1)
            if top < lo:
                break
            corner.append(int(rng.integers(lo, top + 1)))
        else:
            drawn.add(CubePair(level, tuple(corner), axis))
    kept = [p for p in drawn if not any(q != p and q.contains_pair(p) for q in drawn)]
    return CubePairCover(kept, box)


# ========================
#  GRID COMPLEX
# ========================
def cell_bounds(cell, level):
    """Closed real bounds of a doubled-coordinate cell."""
    side = Fraction(1, 2 ** level)
    lo = tuple(Fraction(c - (c % 2), 2) * side for c in cell)
    hi = tuple(Fraction(c + (c % 2), 2) * side for c in cell)
    return lo, hi


def cell_dim(cell):
    return sum(c % 2 for c in cell)


def cell_faces(cell):
    for k, c in enumerate(cell):
        if c % 2:
            for step in (-1, 1):
                yield cell[:k] + (c + step,) + cell[k + 1:]


def box_sqdist(point, lo, hi):
    total = ZERO
    for c, a, b in zip(point, lo, hi):
        if c < a:
            total += (a - c) * (a - c)
        elif c > b:
            total += (c - b) * (c - b)
    return total


class GridComplex:
    """The closed set of cells of the bounding box that no cover element touches."""

    def __init__(self, cover, level=None):
        self.cover = cover
        self.box = cover.box
        self.level = max(cover.finest, level or 0)
        if not self.box.is_dyadic(self.level):
            raise CoverError(f"bounding box is not aligned to level {self.level}")
        scale = 2 ** self.level
        self.origin = tuple(int(2 * v * scale) for v in self.box.lo)
        top = tuple(int(2 * v * scale) for v in self.box.hi)
        shape = tuple(t - o + 1 for o, t in zip(self.origin, top))
        covered = np.zeros(shape, dtype=bool)
        for pair in cover:
            lo, hi = pair.units(self.level)
            index = []
            for k in range(3):
                start = max(2 * lo[k] + 1 - self.origin[k], 0)
                stop = min(2 * hi[k] - self.origin[k], shape[k])
                index.append(slice(start, max(start, stop)))
            covered[tuple(index)] = True
        self.mask = ~covered
        logger.debug('grid at level %d: %d of %d cells', self.level, int(self.mask.sum()), self.mask.size)

    # ---- cells
    def __contains__(self, cell):
        index = tuple(c - o for c, o in zip(cell, self.origin))
        if any(i < 0 or i >= n for i, n in zip(index, self.mask.shape)):
            return False
        return bool(self.mask[index])

    def in_box(self, cell):
        index = tuple(c - o for c, o in zip(cell, self.origin))
        return all(0 <= i < n for i, n in zip(index, self.mask.shape))

    @cached_property
    def cells(self):
        return [tuple(int(v) + o for v, o in zip(index, self.origin)) for index in np.argwhere(self.mask)]

    def cells_of_dim(self, dim):
        return [cell for cell in self.cells if cell_dim(cell) == dim]

    def is_closed(self):
        return all(face in self for cell in self.cells for face in cell_faces(cell))

    def bounds(self, cell):
        return cell_bounds(cell, self.level)

    def segments(self):
        """The 1-cells as pairs of endpoint coordinates."""
        return [self.bounds(cell) for cell in self.cells_of_dim(1)]

    def point_cell(self, point):
        """The doubled-coordinate cell whose relative interior holds ``point``."""
        scale = 2 ** self.level
        cell = []
        for c in point:
            scaled = QRootTwo.coerce(c) * scale
            floor = scaled.floor()
            cell.append(2 * floor if scaled == floor else 2 * floor + 1)
        return tuple(cell)

    def contains_point(self, point):
        return self.point_cell(point) in self

    # ---- distances
    @cached_property
    def _float_bounds(self):
        lows, highs = [], []
        for cell in self.cells:
            lo, hi = self.bounds(cell)
            lows.append([float(v) for v in lo])
            highs.append([float(v) for v in hi])
        return np.array(lows, dtype=float).reshape(-1, 3), np.array(highs, dtype=float).reshape(-1, 3)

    def _float_sqdist(self, point):
        lows, highs = self._float_bounds
        p = np.array(point.as_floats())
        gap = np.maximum(np.maximum(lows - p, 0.0), p - highs)
        return (gap * gap).sum(axis=1)

    def _candidates(self, point, slack=1e-9):
        distances = self._float_sqdist(point)
        if not len(distances):
            return [], distances
        best = distances.min()
        limit = best * (1 + slack) + 1e-15
        return [self.cells[i] for i in np.flatnonzero(distances <= limit)], distances

    def sqdist(self, point):
        """Exact squared distance from ``point`` to the grid."""
        if not self.cells:
            raise CoverError('the grid is empty')
        candidates, _ = self._candidates(point)
        return min(box_sqdist(point, *self.bounds(cell)) for cell in candidates)

    def segment_near(self, start, end, radius_sq):
        """A single cell within ``sqrt(radius_sq)`` of both ends of a segment, or None."""
        if not self.cells:
            return None
        limit = float(radius_sq) * (1 + 1e-9) + 1e-15
        near_start = self._float_sqdist(start) <= limit
        near_end = self._float_sqdist(end) <= limit
        for i in np.flatnonzero(near_start & near_end):
            lo, hi = self.bounds(self.cells[i])
            if box_sqdist(start, lo, hi) <= radius_sq and box_sqdist(end, lo, hi) <= radius_sq:
                return self.cells[i]
        return None

    # ---- cube boundaries
    def boundary_cells(self, cube):
        lo, hi = cube.units(self.level)
        ranges = [range(2 * a, 2 * b + 1) for a, b in zip(lo, hi)]
        cells = []
        for cell in product(*ranges):
            on_boundary = any(c in (2 * a, 2 * b) for c, a, b in zip(cell, lo, hi))
            if on_boundary:
                if not self.in_box(cell):
                    raise CoverError(f"{cube} leaves the bounding box")
                if cell in self:
                    cells.append(cell)
        return cells

    def boundary_graph(self, cube):
        graph = nx.Graph()
        cells = self.boundary_cells(cube)
        graph.add_nodes_from(cells)
        present = set(cells)
        for cell in cells:
            graph.add_edges_from((cell, face) for face in cell_faces(cell) if face in present)
        return graph

    def boundary_skeleton(self, cube):
        """Vertices and edges of the grid on the boundary of ``cube``."""
        graph = nx.Graph()
        cells = self.boundary_cells(cube)
        graph.add_nodes_from(cell for cell in cells if cell_dim(cell) == 0)
        for cell in cells:
            if cell_dim(cell) == 1:
                graph.add_edge(*cell_faces(cell))
        return graph

    def vertex_of(self, corner):
        scale = 2 ** self.level
        return tuple(int(2 * c * scale) for c in corner)

    def vertex_point(self, vertex):
        side = Fraction(1, 2 ** (self.level + 1))
        return tuple(c * side for c in vertex)


def grid_of_cover(cover, level=None):
    return GridComplex(cover, level)


# ========================
#  CLAIMS
# ========================
@dataclass(frozen=True)
class LoopViolation:
    pair: CubePair
    cell: tuple

    def __str__(self):
        return f"{self.pair}: loop cell {self.cell} is covered"


def square_loop_violations(grid):
    """Pairs whose common-face loop is not contained in the grid."""
    violations = []
    for pair in grid.cover:
        for cell in pair.loop_cells(grid.level):
            if grid.in_box(cell) and cell not in grid:
                violations.append(LoopViolation(pair, cell))
                break
    return violations


def boundary_grid_connected(cube, cover, grid=None):
    """Whether the grid part of the boundary of a maximal cube is non-empty and connected."""
    if not cover.is_maximal(cube):
        raise CoverError(f"{cube} is not a maximal cube of the cover")
    grid = grid or grid_of_cover(cover)
    graph = grid.boundary_graph(cube)
    connected = graph.number_of_nodes() > 0 and nx.is_connected(graph)
    logger.debug('%s: %d boundary cells, connected=%s', cube, graph.number_of_nodes(), connected)
    return connected


def route_on_boundary(grid, cube, start, end):
    """Shortest vertex route from ``start`` to ``end`` along grid edges on the boundary of ``cube``."""
    graph = grid.boundary_skeleton(cube)
    if start not in graph or end not in graph:
        raise CoverError(f"route endpoints {start}, {end} are not grid vertices on {cube}")
    try:
        return nx.shortest_path(graph, start, end)
    except nx.NetworkXNoPath as exc:
        raise CoverError(f"no grid route on {cube} from {start} to {end}") from exc


# ========================
#  TEXT FORMAT
# ========================
COVER_HEADER = 'cover 1'


def dumps_cover(cover):
    lines = [COVER_HEADER, f"box {cover.box.token()}"]
    lines.extend(pair.token() for pair in cover)
    return '\n'.join(lines) + '\n'


def loads_cover(text):
    lines = [(n, line.split('#', 1)[0].strip()) for n, line in enumerate(text.splitlines(), 1)]
    lines = [(n, line) for n, line in lines if line]
    if not lines or lines[0][1] != COVER_HEADER:
        raise CoverError(f"missing '{COVER_HEADER}' header")
    box, pairs = None, []
    for n, line in lines[1:]:
        words = line.split()
        try:
            if words[0] == 'box' and len(words) == 7:
                values = [Fraction(w) for w in words[1:]]
                box = Box(tuple(values[:3]), tuple(values[3:]))
            elif words[0] == 'pair' and len(words) == 6:
                if words[5] not in tuple(AXES):
                    raise CoverError(f"unknown axis {words[5]!r}")
                pairs.append(CubePair(int(words[1]), tuple(int(w) for w in words[2:5]), AXES.index(words[5])))
            else:
                raise CoverError(f"unexpected {words[0]!r}")
        except (ValueError, ZeroDivisionError) as exc:
            raise CoverError(f"line {n}: {exc}") from exc
    return CubePairCover(pairs, box)


