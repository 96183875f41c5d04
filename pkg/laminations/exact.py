# laminations/exact.py
"""
Exact rational linear algebra and feasibility.

``solve_nonnegative`` decides whether ``A x = b`` has a solution ``x >= 0``
with a phase-one simplex over ``Fraction`` using Bland's rule. When the
system is infeasible the final duals give a Farkas certificate ``y`` with
``A^T y >= 0`` and ``b . y < 0``.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import sympy

logger = logging.getLogger(__name__)


class LPError(ValueError):
    pass


# ========================
#  MATRIX HELPERS
# ========================
def fractions(rows):
    return [[Fraction(v) for v in row] for row in rows]


def _to_sympy(rows, ncols=None):
    rows = [list(row) for row in rows]
    if not rows:
        return sympy.zeros(0, ncols or 0)
    return sympy.Matrix([[sympy.Rational(Fraction(v).numerator, Fraction(v).denominator) for v in row]
                         for row in rows])


def _from_sympy(value):
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def rank(rows, ncols=None):
    if not rows:
        return 0
    return _to_sympy(rows, ncols).rank()


def nullspace(rows, ncols):
    """A basis of ``{x : rows x = 0}`` as primitive integer vectors."""
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]
    basis = _to_sympy(rows, ncols).nullspace()
    return [primitive([_from_sympy(v) for v in vector]) for vector in basis]


def mat_vec(rows, vector):
    return tuple(sum((Fraction(a) * b for a, b in zip(row, vector)), Fraction(0)) for row in rows)


def mat_mul(left, right):
    if not left:
        return []
    columns = list(zip(*right)) if right else []
    return [[sum((Fraction(a) * b for a, b in zip(row, col)), Fraction(0)) for col in columns] for row in left]


def transpose(rows, nrows_if_empty=0):
    if not rows:
        return [[] for _ in range(nrows_if_empty)]
    return [list(col) for col in zip(*rows)]


def dot(u, v):
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def primitive(vector):
    """Scale a rational vector to coprime integers, keeping its direction."""
    vector = [Fraction(v) for v in vector]
    denominator = 1
    for v in vector:
        denominator = lcm(denominator, v.denominator)
    ints = [int(v * denominator) for v in vector]
    divisor = 0
    for v in ints:
        divisor = gcd(divisor, v)
    if divisor == 0:
        return tuple(ints)
    return tuple(v // divisor for v in ints)


# ========================
#  PHASE-ONE SIMPLEX
# ========================
@dataclass(frozen=True)
class LPResult:
    feasible: bool
    point: tuple = None
    certificate: tuple = None
    pivots: int = 0

    def __bool__(self):
        return self.feasible


def solve_nonnegative(A, b):
    """Find ``x >= 0`` with ``A x = b`` or a Farkas certificate that none exists."""
    A = fractions(A)
    b = [Fraction(v) for v in b]
    m = len(A)
    if m != len(b):
        raise LPError(f"{m} rows against {len(b)} right-hand sides")
    n = len(A[0]) if m else 0
    if any(len(row) != n for row in A):
        raise LPError('ragged constraint matrix')
    if m == 0:
        return LPResult(True, tuple(Fraction(0) for _ in range(n)))

    signs = [(-1 if v < 0 else 1) for v in b]
    tableau = [
        [s * v for v in row] + [Fraction(int(i == k)) for k in range(m)]
        for i, (row, s) in enumerate(zip(A, signs))
    ]
    rhs = [s * v for s, v in zip(signs, b)]
    basis = list(range(n, n + m))
    width = n + m
    reduced = [-sum((tableau[i][j] for i in range(m)), Fraction(0)) if j < n else Fraction(0)
               for j in range(width)]

    pivots = 0
    while True:
        entering = next((j for j in range(width) if reduced[j] < 0), None)
        if entering is None:
            break
        leaving, best = None, None
        for i in range(m):
            if tableau[i][entering] > 0:
                ratio = rhs[i] / tableau[i][entering]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    leaving, best = i, ratio
        if leaving is None:
            raise LPError('phase-one objective is unbounded')
        _pivot(tableau, rhs, reduced, leaving, entering)
        basis[leaving] = entering
        pivots += 1

    objective = sum((rhs[i] for i in range(m) if basis[i] >= n), Fraction(0))
    logger.debug('phase one: %d x %d, %d pivots, objective %s', m, n, pivots, objective)
    if objective == 0:
        point = [Fraction(0)] * n
        for i, j in enumerate(basis):
            if j < n:
                point[j] = rhs[i]
        return LPResult(True, tuple(point), pivots=pivots)

    duals = [1 - reduced[n + i] for i in range(m)]
    certificate = primitive([-s * y for s, y in zip(signs, duals)])
    return LPResult(False, certificate=certificate, pivots=pivots)


def _pivot(tableau, rhs, reduced, row, col):
    factor = tableau[row][col]
    tableau[row] = [v / factor for v in tableau[row]]
    rhs[row] /= factor
    for i, other in enumerate(tableau):
        if i != row and other[col] != 0:
            scale = other[col]
            tableau[i] = [a - scale * p for a, p in zip(other, tableau[row])]
            rhs[i] -= scale * rhs[row]
    scale = reduced[col]
    if scale != 0:
        for j, p in enumerate(tableau[row]):
            reduced[j] -= scale * p


def verify_farkas(A, b, certificate):
    """True when ``certificate`` proves ``A x = b, x >= 0`` infeasible."""
    if certificate is None or len(certificate) != len(b):
        return False
    columns = transpose(fractions(A), 0)
    if any(dot(column, certificate) < 0 for column in columns):
        return False
    return dot(b, certificate) < 0


def verify_point(A, b, point):
    return (point is not None
            and all(v >= 0 for v in point)
            and mat_vec(A, point) == tuple(Fraction(v) for v in b))


def feasible_or_certificate(A, b):
    """Solve and check the answer independently before handing it back."""
    result = solve_nonnegative(A, b)
    if result.feasible and not verify_point(A, b, result.point):
        raise LPError('simplex returned a point that fails the constraints')
    if not result.feasible and not verify_farkas(A, b, result.certificate):
        raise LPError('simplex returned a certificate that does not certify')
    return result
