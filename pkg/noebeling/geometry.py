# noebeling/geometry.py
"""
Points and piecewise-linear paths in Q(sqrt 2)^3, and the exact test that a
path stays inside the curve of points with at most one rational coordinate.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .surds import ONE, ZERO, QRootTwo, SurdFormatError, rational_between

logger = logging.getLogger(__name__)


class PathError(ValueError):
    pass


# ========================
#  POINTS
# ========================
@dataclass(frozen=True)
class Point3:
    x: QRootTwo
    y: QRootTwo
    z: QRootTwo

    def __post_init__(self):
        for name in ('x', 'y', 'z'):
            object.__setattr__(self, name, QRootTwo.coerce(getattr(self, name)))

    @classmethod
    def of(cls, *coords):
        if len(coords) == 1:
            coords = tuple(coords[0])
        if len(coords) != 3:
            raise PathError(f"a point needs 3 coordinates, got {len(coords)}")
        return cls(*coords)

    @property
    def coords(self):
        return (self.x, self.y, self.z)

    def __getitem__(self, axis):
        return self.coords[axis]

    def __iter__(self):
        return iter(self.coords)

    def __add__(self, other):
        return Point3(*(a + b for a, b in zip(self, other)))

    def __sub__(self, other):
        return Point3(*(a - b for a, b in zip(self, other)))

    def scale(self, factor):
        return Point3(*(factor * a for a in self))

    @property
    def rational_count(self):
        return sum(1 for c in self if c.is_rational)

    @property
    def in_curve(self):
        return self.rational_count <= 1

    def as_floats(self):
        return tuple(float(c) for c in self)

    def token(self):
        return ' '.join(c.token() for c in self)


def sqnorm(vector):
    return sum((c * c for c in vector), ZERO)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), ZERO)


def segment_sqdist(point, start, end):
    """Exact squared distance from ``point`` to the closed segment ``[start, end]``."""
    direction = end - start
    length = sqnorm(direction)
    if not length:
        return sqnorm(point - start)
    t = dot(point - start, direction) / length
    if t < 0:
        t = ZERO
    elif t > 1:
        t = ONE
    return sqnorm(point - (start + direction.scale(t)))


# ========================
#  PATHS
# ========================
@dataclass(frozen=True)
class PLPath3:
    params: tuple
    vertices: tuple

    def __post_init__(self):
        params = tuple(Fraction(t) for t in self.params)
        vertices = tuple(v if isinstance(v, Point3) else Point3.of(v) for v in self.vertices)
        if len(params) != len(vertices):
            raise PathError(f"{len(params)} parameters for {len(vertices)} vertices")
        if len(params) < 2:
            raise PathError('a path needs at least two vertices; use PLPath3.constant')
        if params[0] != 0 or params[-1] != 1:
            raise PathError(f"parameters must run from 0 to 1, got {params[0]}..{params[-1]}")
        if any(b <= a for a, b in zip(params, params[1:])):
            raise PathError('parameters must be strictly increasing')
        object.__setattr__(self, 'params', params)
        object.__setattr__(self, 'vertices', vertices)

    @classmethod
    def constant(cls, point):
        return cls((0, 1), (point, point))

    @classmethod
    def through(cls, points):
        """Evenly parametrised path through ``points``."""
        points = list(points)
        if len(points) == 1:
            return cls.constant(points[0])
        last = len(points) - 1
        return cls(tuple(Fraction(i, last) for i in range(len(points))), points)

    def segments(self):
        for i in range(len(self.vertices) - 1):
            yield (self.params[i], self.params[i + 1], self.vertices[i], self.vertices[i + 1])

    def at(self, t):
        t = QRootTwo.coerce(t)
        if t < 0 or t > 1:
            raise PathError(f"parameter {t} outside [0, 1]")
        for t0, t1, start, end in self.segments():
            if t <= t1:
                local = (t - t0) / (t1 - t0)
                return start + (end - start).scale(local)
        return self.vertices[-1]

    def points_between(self, s, t):
        """The vertices of the restriction to ``[s, t]``: both ends and every breakpoint inside."""
        inner = [v for p, v in zip(self.params, self.vertices) if s < p < t]
        return [self.at(s)] + inner + [self.at(t)]


# ========================
#  CERTIFICATION
# ========================
@dataclass(frozen=True)
class Witness:
    segment: int
    t: QRootTwo
    pair: tuple

    def __str__(self):
        return f"segment {self.segment} at t={self.t} coordinates {self.pair} rational"


@dataclass(frozen=True)
class Certification:
    certified: bool
    witness: Witness = None

    def __bool__(self):
        return self.certified


def _pair_violation(start, direction, i, j):
    """A local parameter in [0, 1] where coordinates ``i`` and ``j`` are both rational, or None."""
    p_i, p_j = start[i], start[j]
    d_i, d_j = direction[i], direction[j]
    if p_i.is_rational and p_j.is_rational:
        return ZERO
    if not d_i and not d_j:
        return None
    if not d_i or not d_j:
        fixed, moving, d_moving = (p_i, p_j, d_j) if not d_i else (p_j, p_i, d_i)
        if not fixed.is_rational:
            return None
        # the moving coordinate sweeps an interval, which holds rationals
        lo, hi = sorted((moving, moving + d_moving))
        return (rational_between(lo, hi) - moving) / d_moving

    # c_i d_j - c_j d_i = p_i d_j - p_j d_i, split into rational and sqrt 2 parts
    k = p_i * d_j - p_j * d_i
    r_i, s_i, r_j, s_j = d_i.a, d_i.b, d_j.a, d_j.b
    det = r_i * s_j - r_j * s_i
    if det != 0:
        c_i = (-k.a * s_i + k.b * r_i) / det
        tau = (c_i - p_i) / d_i
        return tau if 0 <= tau <= 1 else None

    # d_j is a rational multiple of d_i: solutions form a dense family or none
    if not (k / d_i).is_rational:
        return None
    lo, hi = sorted((p_i, p_i + d_i))
    return (rational_between(lo, hi) - p_i) / d_i


def certify_path(path):
    """Decide exactly whether every point of ``path`` has at most one rational coordinate."""
    for index, (t0, t1, start, end) in enumerate(path.segments()):
        direction = end - start
        for i, j in combinations(range(3), 2):
            tau = _pair_violation(start, direction, i, j)
            if tau is not None:
                witness = Witness(index, t0 + (t1 - t0) * tau, (i + 1, j + 1))
                logger.debug('path rejected: %s', witness)
                return Certification(False, witness)
    return Certification(True)


def sample_refute(path, samples=10_000, rng=None, max_denominator=64):
    """
    Look for points with two rational coordinates by sampling rational
    targets. Only ever finds violations; a miss proves nothing.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    segments = list(path.segments())
    for _ in range(samples):
        index = int(rng.integers(len(segments)))
        t0, t1, start, end = segments[index]
        direction = end - start
        i, j = (int(v) for v in rng.choice(3, size=2, replace=False))
        if direction[i]:
            lo, hi = sorted((float(start[i]), float(end[i])))
            denominator = int(rng.integers(1, max_denominator + 1))
            numerator = int(np.floor(rng.uniform(lo, hi) * denominator))
            tau = (Fraction(numerator, denominator) - start[i]) / direction[i]
        else:
            tau = QRootTwo(Fraction(int(rng.integers(0, max_denominator + 1)), max_denominator))
        if tau < 0 or tau > 1:
            continue
        point = start + direction.scale(tau)
        if point[i].is_rational and point[j].is_rational:
            return Witness(index, t0 + (t1 - t0) * tau, tuple(sorted((i + 1, j + 1))))
    return None


# ========================
#  RANDOM PATHS
# ========================
def random_coord(rng, lo=Fraction(0), hi=Fraction(1), denominator=64):
    """A coordinate in ``(lo, hi)`` with a nonzero sqrt 2 part."""
    while True:
        a = Fraction(int(rng.integers(0, denominator + 1)), denominator)
        b = Fraction(int(rng.integers(-denominator, denominator + 1)), 2 * denominator)
        value = QRootTwo(lo + (hi - lo) * a, b * (hi - lo) / 4)
        if value.b and lo < value < hi:
            return value


def random_point(rng, lo=Fraction(0), hi=Fraction(1)):
    return Point3(*(random_coord(rng, lo, hi) for _ in range(3)))


def random_segment(rng, denominator=8):
    """A short segment with small coefficients, so rational hits are common."""
    def coord():
        return QRootTwo(Fraction(int(rng.integers(-denominator, denominator + 1)), denominator),
                        Fraction(int(rng.integers(-2, 3)), denominator) if rng.random() < 0.7 else 0)
    return PLPath3.through([Point3(coord(), coord(), coord()), Point3(coord(), coord(), coord())])


def random_certified_path(rng, vertices=4, lo=Fraction(0), hi=Fraction(1), attempts=200):
    """
    A random path inside ``(lo, hi)^3`` that certifies by construction.

    Every segment moves all coordinates by rational multiples of one surd,
    so a pair of coordinates can only turn rational together when the
    sqrt 2 parts at the segment start are proportional to the move; the
    moves are drawn so that no pair is.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    width = hi - lo
    steps = max(vertices - 1, 1)

    def target():
        return [lo + width / 4 + width / 2 * Fraction(int(rng.integers(0, 65)), 64) for _ in range(3)]

    def sign():
        return 1 if rng.random() < 0.5 else -1

    rational = target()
    surd = [sign() * width / 32 * Fraction(int(rng.integers(1, 33)), 32) for _ in range(3)]
    points = [Point3(*(QRootTwo(a, b) for a, b in zip(rational, surd)))]
    for _ in range(vertices - 1):
        for _ in range(attempts):
            goal = target()
            move = [g - a for g, a in zip(goal, rational)]
            cross = [surd[i] * move[j] - surd[j] * move[i] for i, j in combinations(range(3), 2)]
            if all(move) and all(cross):
                break
        else:
            raise PathError(f"no admissible segment found in {attempts} draws")
        beta = sign() * Fraction(int(rng.integers(1, 17)), 16 * 32 * steps)
        rational = goal
        surd = [b + beta * m for b, m in zip(surd, move)]
        points.append(Point3(*(QRootTwo(a, b) for a, b in zip(rational, surd))))
    path = PLPath3.through(points)
    result = certify_path(path)
    if not result:
        raise PathError(f"constructed path is not certified: {result.witness}")
    return path


# ========================
#  TEXT FORMAT
# ========================
PATHS_HEADER = 'paths 1'


def dumps_paths(named_paths):
    lines = [PATHS_HEADER]
    for name, path in named_paths:
        lines.append(f"path {name}")
        for t, v in zip(path.params, path.vertices):
            lines.append(f"vertex {t} {v.token()}")
        lines.append('end')
    return '\n'.join(lines) + '\n'


def loads_paths(text):
    """Parse a ``paths 1`` document into ``[(name, PLPath3)]``."""
    lines = [(n, line.split('#', 1)[0].strip()) for n, line in enumerate(text.splitlines(), 1)]
    lines = [(n, line) for n, line in lines if line]
    if not lines or lines[0][1] != PATHS_HEADER:
        raise PathError(f"missing '{PATHS_HEADER}' header")
    result, name, params, vertices = [], None, [], []
    for n, line in lines[1:]:
        words = line.split()
        try:
            if words[0] == 'path' and name is None and len(words) == 2:
                name, params, vertices = words[1], [], []
            elif words[0] == 'vertex' and name is not None and len(words) == 5:
                params.append(Fraction(words[1]))
                vertices.append(Point3(*(QRootTwo.parse(w) for w in words[2:])))
            elif words[0] == 'end' and name is not None:
                result.append((name, PLPath3(tuple(params), tuple(vertices))))
                name = None
            else:
                raise PathError(f"unexpected {words[0]!r}")
        except (PathError, SurdFormatError, ValueError, ZeroDivisionError) as exc:
            raise PathError(f"line {n}: {exc}") from exc
    if name is not None:
        raise PathError(f"path {name} is missing 'end'")
    return result
