# noebeling/surds.py
"""
Exact arithmetic in Q(sqrt 2).

A ``QRootTwo`` is ``a + b*sqrt(2)`` with rational ``a`` and ``b``. The
representation is canonical, so a value is rational exactly when ``b == 0``.
"""
import math
from fractions import Fraction
from functools import total_ordering


class SurdFormatError(ValueError):
    pass


@total_ordering
class QRootTwo:
    __slots__ = ('a', 'b')

    def __init__(self, a=0, b=0):
        if isinstance(a, QRootTwo):
            if b:
                raise TypeError('cannot add a surd part to a QRootTwo')
            a, b = a.a, a.b
        object.__setattr__(self, 'a', Fraction(a))
        object.__setattr__(self, 'b', Fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError('QRootTwo is immutable')

    def __reduce__(self):
        return (QRootTwo, (self.a, self.b))

    @classmethod
    def coerce(cls, value):
        return value if isinstance(value, QRootTwo) else cls(value)

    @classmethod
    def parse(cls, token):
        """Read ``a:b`` (value ``a + b sqrt 2``) or a bare rational ``a``."""
        try:
            if ':' in token:
                a, b = token.split(':', 1)
                return cls(Fraction(a), Fraction(b))
            return cls(Fraction(token))
        except (ValueError, ZeroDivisionError) as exc:
            raise SurdFormatError(f"bad number {token!r}") from exc

    def token(self):
        return f"{self.a}:{self.b}"

    # ========================
    #  PREDICATES
    # ========================
    @property
    def is_rational(self):
        return self.b == 0

    def sign(self):
        a, b = self.a, self.b
        if a >= 0 and b >= 0:
            return 0 if a == 0 and b == 0 else 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: the larger of a^2 and 2 b^2 decides
        if a > 0:
            return 1 if a * a > 2 * b * b else -1
        return 1 if 2 * b * b > a * a else -1

    def conjugate(self):
        return QRootTwo(self.a, -self.b)

    def norm(self):
        return self.a * self.a - 2 * self.b * self.b

    # ========================
    #  ARITHMETIC
    # ========================
    def __add__(self, other):
        if not isinstance(other, (QRootTwo, int, Fraction)):
            return NotImplemented
        other = QRootTwo.coerce(other)
        return QRootTwo(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QRootTwo(-self.a, -self.b)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, (QRootTwo, int, Fraction)):
            return NotImplemented
        return self + (-QRootTwo.coerce(other))

    def __rsub__(self, other):
        return QRootTwo.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (QRootTwo, int, Fraction)):
            return NotImplemented
        other = QRootTwo.coerce(other)
        return QRootTwo(self.a * other.a + 2 * self.b * other.b,
                        self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (QRootTwo, int, Fraction)):
            return NotImplemented
        other = QRootTwo.coerce(other)
        norm = other.norm()
        if norm == 0:
            raise ZeroDivisionError('division by zero in Q(sqrt 2)')
        top = self * other.conjugate()
        return QRootTwo(top.a / norm, top.b / norm)

    def __rtruediv__(self, other):
        return QRootTwo.coerce(other) / self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # ========================
    #  ORDER AND CONVERSION
    # ========================
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QRootTwo):
            return self.a == other.a and self.b == other.b
        return NotImplemented

    def __lt__(self, other):
        if not isinstance(other, (QRootTwo, int, Fraction)):
            return NotImplemented
        return (self - other).sign() < 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(2)

    def floor(self):
        if self.b == 0:
            return math.floor(self.a)
        guess = math.floor(float(self))
        while guess > self:
            guess -= 1
        while guess + 1 <= self:
            guess += 1
        return guess

    def __repr__(self):
        if self.b == 0:
            return f"QRootTwo({self.a})"
        return f"QRootTwo({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*sqrt2"
        return f"{self.a}{'+' if self.b > 0 else '-'}{abs(self.b)}*sqrt2"


ZERO = QRootTwo(0)
ONE = QRootTwo(1)
SQRT2 = QRootTwo(0, 1)


def rational_between(lo, hi):
    """The coarsest dyadic rational strictly between ``lo`` and ``hi``."""
    lo, hi = QRootTwo.coerce(lo), QRootTwo.coerce(hi)
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    scale = 1
    while True:
        candidate = Fraction((lo * scale).floor() + 1, scale)
        if candidate < hi:
            return candidate
        scale *= 2
