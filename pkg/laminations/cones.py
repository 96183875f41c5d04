# laminations/cones.py
"""
Measure cones of train tracks.

The cone of a track is ``C = {w : A w = 0, w >= 0}`` where ``A`` carries one
switch condition per switch. Extreme rays come from a double description
over the rationals; membership and recurrence questions go through the
exact phase-one simplex in ``exact``.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations

import sympy

from .exact import (
    dot, feasible_or_certificate, mat_mul, mat_vec, nullspace, primitive, rank, verify_farkas,
    verify_point,
)
from .tracks import LARGE

logger = logging.getLogger(__name__)


class ConeError(ValueError):
    pass


# ========================
#  CERTIFICATES
# ========================
CERTIFICATE_VERSION = 1


@dataclass(frozen=True)
class Certificate:
    """A feasibility question ``A x = b, x >= 0`` with the evidence that settles it."""
    kind: str
    A: tuple
    b: tuple
    feasible: bool
    vector: tuple  # a feasible x, or a Farkas vector y

    def verify(self):
        if self.feasible:
            return verify_point(self.A, self.b, self.vector)
        return verify_farkas(self.A, self.b, self.vector)


def _solve(kind, A, b):
    A = tuple(tuple(Fraction(v) for v in row) for row in A)
    b = tuple(Fraction(v) for v in b)
    result = feasible_or_certificate(A, b)
    vector = result.point if result.feasible else result.certificate
    return Certificate(kind, A, b, result.feasible, tuple(Fraction(v) for v in vector))


def _format(value):
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def dumps_certificate(cert):
    rows = len(cert.A)
    cols = len(cert.A[0]) if rows else len(cert.vector) if cert.feasible else 0
    lines = [
        f"certificate {CERTIFICATE_VERSION}",
        f"kind {cert.kind}",
        f"matrix {rows} {cols}",
    ]
    lines += [' '.join(_format(v) for v in row) for row in cert.A]
    lines.append('rhs ' + ' '.join(_format(v) for v in cert.b))
    lines.append(('point ' if cert.feasible else 'farkas ') + ' '.join(_format(v) for v in cert.vector))
    return '\n'.join(lines) + '\n'


def loads_certificate(text):
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    try:
        if lines[0] != f"certificate {CERTIFICATE_VERSION}":
            raise ConeError(f"unsupported certificate header {lines[0]!r}")
        kind = lines[1].split(maxsplit=1)[1]
        _, rows, cols = lines[2].split()
        rows = int(rows)
        A = tuple(tuple(Fraction(v) for v in lines[3 + i].split()) for i in range(rows))
        rhs = lines[3 + rows].split()
        evidence = lines[4 + rows].split()
    except (IndexError, ValueError) as exc:
        raise ConeError(f"malformed certificate: {exc}") from None
    if rhs[0] != 'rhs' or evidence[0] not in ('point', 'farkas'):
        raise ConeError('malformed certificate: expected rhs and point/farkas lines')
    if any(len(row) != int(cols) for row in A):
        raise ConeError('malformed certificate: ragged matrix')
    return Certificate(kind, A, tuple(Fraction(v) for v in rhs[1:]), evidence[0] == 'point',
                       tuple(Fraction(v) for v in evidence[1:]))


# ========================
#  SWITCH CONDITIONS
# ========================
def switch_matrix(t):
    """One row per switch: large-slot weight minus the small-slot weights."""
    rows = [[0] * t.num_branches for _ in range(t.num_switches)]
    for index, branch in enumerate(t.branches):
        for switch, slot in branch:
            rows[switch][index] += 1 if slot == LARGE else -1
    return rows


@dataclass(frozen=True)
class RecurrenceResult:
    holds: bool
    certificate: Certificate
    weights: tuple = None  # strictly positive solution when ``holds``

    def __bool__(self):
        return self.holds


def is_recurrent(t):
    """Look for ``A w = 0`` with ``w >= 1``; ``w = 1 + z`` turns it into ``A z = -A 1``."""
    A = switch_matrix(t)
    E = t.num_branches
    if not A:
        cert = _solve('recurrence', [], [])
        return RecurrenceResult(True, cert, tuple(Fraction(1) for _ in range(E)))
    b = [-sum(row) for row in A]
    cert = _solve('recurrence', A, b)
    if not cert.feasible:
        logger.debug('%s is not recurrent', t)
        return RecurrenceResult(False, cert)
    return RecurrenceResult(True, cert, tuple(1 + z for z in cert.vector))


def face_inequalities(t):
    """
    Rows ``g`` with ``g . y <= 0`` for a tangential measure ``y``.

    Each face without punctures must be a cusped polygon in which no smooth
    side is longer than the other sides together; a side's length is the
    total of its branches, counted with multiplicity. A smooth unpunctured
    face has a single side, which is then forced to length zero. Punctured
    faces impose nothing.
    """
    rows = []
    for face in t.faces:
        if face.punctures:
            continue
        lengths = [[0] * t.num_branches for _ in face.sides]
        for i, side in enumerate(face.sides):
            for branch in side:
                lengths[i][branch] += 1
        for i in range(len(face.sides)):
            rows.append([
                lengths[i][j] - sum(lengths[k][j] for k in range(len(face.sides)) if k != i)
                for j in range(t.num_branches)
            ])
    return rows


def is_transversely_recurrent(t):
    """Look for ``y >= 1`` satisfying every face inequality, with slack ``s >= 0``."""
    G = face_inequalities(t)
    E = t.num_branches
    if not G:
        cert = _solve('transverse-recurrence', [], [])
        return RecurrenceResult(True, cert, tuple(Fraction(1) for _ in range(E)))
    A = [row + [1 if k == i else 0 for k in range(len(G))] for i, row in enumerate(G)]
    b = [-sum(row) for row in G]
    cert = _solve('transverse-recurrence', A, b)
    if not cert.feasible:
        logger.debug('%s is not transversely recurrent', t)
        return RecurrenceResult(False, cert)
    return RecurrenceResult(True, cert, tuple(1 + z for z in cert.vector[:E]))


def cone_dim(t):
    if not is_recurrent(t):
        raise ConeError(f"{t} is not recurrent; its interior is empty")
    A = switch_matrix(t)
    return t.num_branches - rank(A, t.num_branches)


# ========================
#  DOUBLE DESCRIPTION
# ========================
def polyhedral_rays(equalities, inequalities, n):
    """
    Extreme rays of ``{x : E x = 0, H x >= 0}`` as sorted primitive integer vectors.

    The cone must be pointed. Inequalities are inserted in the order given,
    starting from a simplicial cone on the first independent rows.
    """
    basis = nullspace([list(row) for row in equalities], n)
    d = len(basis)
    if d == 0:
        return []
    K = [list(col) for col in zip(*basis)]  # n x d
    H = [[Fraction(v) for v in row] for row in mat_mul(inequalities, K)]

    chosen, current = [], 0
    for i, row in enumerate(H):
        if rank([H[j] for j in chosen] + [row], d) > current:
            chosen.append(i)
            current += 1
            if current == d:
                break
    if current < d:
        raise ConeError('cone is not pointed')

    inverse = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in H[i]] for i in chosen]).inv()
    rays = []
    for j in range(d):
        column = tuple(Fraction(int(inverse[r, j].p), int(inverse[r, j].q)) for r in range(d))
        tight = frozenset(chosen[k] for k in range(d) if k != j)
        rays.append((column, tight))

    processed = set(chosen)
    for i, row in enumerate(H):
        if i in processed:
            continue
        positive, zero, negative = [], [], []
        for ray in rays:
            value = dot(row, ray[0])
            (positive if value > 0 else negative if value < 0 else zero).append((ray, value))
        new_rays = [ray for ray, _ in positive] + [(ray[0], ray[1] | {i}) for ray, _ in zero]
        everyone = [ray for ray, _ in positive + zero + negative]
        for (p, pv), (q, qv) in ((a, b) for a in positive for b in negative):
            common = p[1] & q[1]
            if len(common) < d - 2:
                continue
            if any(r is not p and r is not q and common <= r[1] for r in everyone):
                continue
            combined = tuple(pv * qc - qv * pc for pc, qc in zip(p[0], q[0]))
            new_rays.append((combined, common | {i}))
        rays = new_rays
        processed.add(i)

    found = set()
    for vector, _ in rays:
        x = [dot(k_row, vector) for k_row in K]
        if any(v != 0 for v in x):
            found.add(primitive(x))
    return sorted(found)


def extreme_rays(t):
    E = t.num_branches
    identity = [[int(i == j) for j in range(E)] for i in range(E)]
    return polyhedral_rays(switch_matrix(t), identity, E)


def brute_force_rays(t):
    """Rays found one support pattern at a time: a one-dimensional kernel of constant sign."""
    A = switch_matrix(t)
    E = t.num_branches
    found = set()
    for size in range(1, E + 1):
        for support in combinations(range(E), size):
            sub = [[row[j] for j in support] for row in A]
            kernel = nullspace(sub, size)
            if len(kernel) != 1:
                continue
            vector = kernel[0]
            if all(v > 0 for v in vector) or all(v < 0 for v in vector):
                full = [0] * E
                for j, v in zip(support, vector):
                    full[j] = abs(v)
                found.add(tuple(full))
    return sorted(found)


# ========================
#  MEMBERSHIP
# ========================
def _columns(generators):
    generators = [list(g) for g in generators]
    return [list(row) for row in zip(*generators)]


def cone_contains(generators, w):
    """Whether ``w`` is a nonnegative combination of ``generators``."""
    if not generators:
        return all(v == 0 for v in w)
    return _solve('membership', _columns(generators), w).feasible


def relative_interior_contains(generators, p):
    """Whether ``p`` is a strictly positive combination of every generator."""
    if not generators:
        return all(v == 0 for v in p)
    G = _columns(generators)
    ones = [sum(row) for row in G]
    A = [row + [-Fraction(pv)] for row, pv in zip(G, p)]
    return _solve('relative-interior', A, [-v for v in ones]).feasible


def relative_interiors_meet(first, second):
    """Whether the relative interiors of two generated cones share a point."""
    G1, G2 = _columns(first), _columns(second)
    A = [r1 + [-v for v in r2] for r1, r2 in zip(G1, G2)]
    b = [sum(r2) - sum(r1) for r1, r2 in zip(G1, G2)]
    return _solve('relative-interior-overlap', A, b).feasible


def interior_point(rays):
    if not rays:
        raise ConeError('no rays to average')
    return tuple(sum(column) for column in zip(*rays))


def support(vector):
    return frozenset(i for i, v in enumerate(vector) if v != 0)


# ========================
#  MEASURE CONES
# ========================
class MeasureCone:
    """The measure cone of one track, with its rays and its face lattice."""

    def __init__(self, track):
        self.track = track

    def __repr__(self):
        return f"MeasureCone({self.track.name or 'track'}, dim={self.dim})"

    @cached_property
    def matrix(self):
        return switch_matrix(self.track)

    @cached_property
    def rays(self):
        return extreme_rays(self.track)

    @cached_property
    def dim(self):
        return rank(self.rays, self.track.num_branches) if self.rays else 0

    @property
    def recurrent(self):
        return bool(self.rays) and len(support(interior_point(self.rays))) == self.track.num_branches

    def contains(self, w):
        return (all(v >= 0 for v in w)
                and all(v == 0 for v in mat_vec(self.matrix, w)))

    def interior_contains(self, w):
        return self.contains(w) and all(v > 0 for v in w)

    @cached_property
    def faces(self):
        """support pattern -> rays spanning the face with that support."""
        ray_supports = [(support(r), r) for r in self.rays]

        def closure(branches):
            members = tuple(r for s, r in ray_supports if s <= branches)
            return frozenset().union(*(support(r) for r in members)), members

        lattice = {frozenset(): ()}
        frontier = [frozenset()]
        while frontier:
            next_frontier = []
            for face in frontier:
                for s, _ in ray_supports:
                    key, members = closure(face | s)
                    if key not in lattice:
                        lattice[key] = members
                        next_frontier.append(key)
            frontier = next_frontier
        return lattice

    def face_dim(self, pattern):
        members = self.faces[frozenset(pattern)]
        return rank(list(members), self.track.num_branches) if members else 0

    def boundary_faces(self):
        """Faces other than the cone itself, largest first."""
        whole = frozenset(range(self.track.num_branches))
        proper = [key for key in self.faces if key != whole]
        return sorted(proper, key=lambda key: (-len(key), sorted(key)))


# ========================
#  CARRYING MATRICES
# ========================
def check_carrying(parent, child, matrix):
    """Raise ConeError unless ``matrix`` carries the child's cone into the parent's."""
    rows, cols = parent.num_branches, child.num_branches
    if len(matrix) != rows or any(len(row) != cols for row in matrix):
        raise ConeError(f"carrying matrix must be {rows} x {cols}")
    if any(v < 0 or Fraction(v).denominator != 1 for row in matrix for v in row):
        raise ConeError('carrying matrix must have nonnegative integer entries')
    A = switch_matrix(parent)
    for vector in nullspace(switch_matrix(child), cols):
        if any(v != 0 for v in mat_vec(A, mat_vec(matrix, vector))):
            raise ConeError('carrying matrix does not preserve the switch conditions')


def compose(*matrices):
    """Product of carrying matrices, outermost first."""
    result = matrices[0]
    for matrix in matrices[1:]:
        result = mat_mul(result, matrix)
    return [[int(v) for v in row] for row in result]


def image_rays(matrix, rays):
    return sorted({primitive(mat_vec(matrix, r)) for r in rays})


def projective_diameter(rays):
    """Largest L1 distance between rays scaled to coordinate sum one."""
    if not rays:
        raise ConeError('diameter of an empty ray list')
    points = []
    for r in rays:
        total = sum(Fraction(v) for v in r)
        if total <= 0:
            raise ConeError(f"ray {r} has no positive mass")
        points.append([Fraction(v) / total for v in r])
    best = Fraction(0)
    for p, q in combinations(points, 2):
        best = max(best, sum(abs(a - b) for a, b in zip(p, q)))
    return best


# ========================
#  CONE IDENTITIES
# ========================
@dataclass
class ConeIdentityReport:
    covers: bool
    intersection: bool = None  # None unless two children and a common subtrack were given
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def holds(self):
        return self.covers and self.intersection is not False


def facet_description(generators, n):
    """
    ``(equalities, normals)`` with ``cone(generators) = {x : N x = 0, h x >= 0}``.

    The normals are taken on a set of coordinates that is injective on the
    span of the generators, so they are exact on that span only.
    """
    generators = [list(g) for g in generators]
    if not generators:
        return [[int(i == j) for j in range(n)] for i in range(n)], []
    d = rank(generators, n)
    chosen = []
    for j in range(n):
        if rank([[g[k] for k in chosen + [j]] for g in generators]) > len(chosen):
            chosen.append(j)
            if len(chosen) == d:
                break
    coordinates = [[g[k] for k in chosen] for g in generators]
    normals = []
    for y in polyhedral_rays([], coordinates, d):
        h = [0] * n
        for k, v in zip(chosen, y):
            h[k] = v
        normals.append(tuple(h))
    equalities = [list(v) for v in nullspace(generators, n)]
    return equalities, normals


def _inner_facets(rays, normals):
    """Facet normals whose facet reaches the interior of the nonnegative orthant."""
    found = set()
    for h in normals:
        face = [g for g in rays if dot(h, g) == 0]
        if face and all(v > 0 for v in interior_point(face)):
            h = primitive(h)
            if next(v for v in h if v != 0) < 0:
                h = tuple(-v for v in h)
            found.add(h)
    return sorted(found)


def _cells(A, hyperplanes, n, dim):
    """Full-dimensional cells of the cone ``{A x = 0, x >= 0}`` cut by ``hyperplanes``."""
    identity = [[int(i == j) for j in range(n)] for i in range(n)]
    cells = [[]]
    for h in hyperplanes:
        following = []
        for rows in cells:
            for signed in (list(h), [-v for v in h]):
                rays = polyhedral_rays(A, identity + rows + [signed], n)
                if rays and rank(rays, n) == dim:
                    following.append(rows + [signed])
        cells = following
    return [polyhedral_rays(A, identity + rows, n) for rows in cells]


def _pieces(common):
    if common is None:
        return []
    if len(common) == 2 and hasattr(common[0], 'num_branches'):
        return [common]
    return list(common)


def verify_cone_identity(parent, children, common=None):
    """
    Decide that the child images cover the parent cone and, for two children,
    that they meet exactly in the image of ``common``.

    ``children`` are ``(track, carrying matrix)`` pairs; ``common`` is one
    pair or a list of them, one per component of a disconnected subtrack.
    Covering is decided on the cells cut out of the parent cone by the child
    facets that reach its interior: each cell lies inside a child or misses
    every child interior.
    """
    if not children:
        raise ConeError('cone identities need at least one child')
    pieces = _pieces(common)
    for child, matrix in list(children) + pieces:
        check_carrying(parent, child, matrix)

    E = parent.num_branches
    A = switch_matrix(parent)
    dim = len(nullspace(A, E))
    images = [image_rays(m, extreme_rays(c)) for c, m in children]
    report = ConeIdentityReport(covers=True)

    full = [rays for rays in images if rays and rank(rays, E) == dim]
    if len(full) < len(images):
        report.notes.append(f"{len(images) - len(full)} children have lower-dimensional images")
    descriptions = [facet_description(rays, E) for rays in images]
    hyperplanes = sorted({
        h for rays, (_, normals) in zip(images, descriptions) if rays in full
        for h in _inner_facets(rays, normals)
    })
    for cell in _cells(A, hyperplanes, E, dim):
        point = interior_point(cell)
        if not any(cone_contains(rays, point) for rays in full):
            report.covers = False
            report.witnesses.append(('uncovered', primitive(point)))

    if pieces and len(children) == 2:
        identity = [[int(i == j) for j in range(E)] for i in range(E)]
        (eq1, h1), (eq2, h2) = descriptions
        meet = polyhedral_rays(A + eq1 + eq2, identity + [list(h) for h in h1 + h2], E)
        shared = sorted({r for c, m in pieces for r in image_rays(m, extreme_rays(c))})
        report.intersection = True
        for r in meet:
            if not cone_contains(shared, r):
                report.intersection = False
                report.witnesses.append(('outside-common', r))
        for g in shared:
            if not cone_contains(meet, g):
                report.intersection = False
                report.witnesses.append(('common-not-shared', g))
    elif pieces:
        report.notes.append('the common image is compared for two children only')
    logger.debug('cone identity for %s: covers=%s intersection=%s', parent, report.covers, report.intersection)
    return report
