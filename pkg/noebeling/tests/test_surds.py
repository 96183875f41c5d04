# noebeling/tests/test_surds.py
from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from noebeling.surds import SQRT2, QRootTwo, SurdFormatError, rational_between

small_fractions = st.fractions(min_value=-20, max_value=20, max_denominator=50)


class QRootTwoTests(SimpleTestCase):
    def test_rational_iff_no_surd_part(self):
        self.assertTrue(QRootTwo(Fraction(3, 4)).is_rational)
        self.assertFalse(QRootTwo(1, 1).is_rational)
        self.assertTrue((SQRT2 * SQRT2).is_rational)
        self.assertEqual(SQRT2 * SQRT2, 2)

    def test_sign_with_mixed_parts(self):
        self.assertEqual(QRootTwo(3, -2).sign(), 1)
        self.assertEqual(QRootTwo(-3, 2).sign(), -1)
        self.assertEqual(QRootTwo(1, -1).sign(), -1)
        self.assertEqual(QRootTwo(0, 0).sign(), 0)

    def test_order_against_rationals(self):
        self.assertTrue(Fraction(141, 100) < SQRT2 < Fraction(142, 100))
        self.assertGreater(QRootTwo(3, -2), 0)
        self.assertLess(QRootTwo(1, -1), 0)

    def test_division_uses_the_conjugate(self):
        x = QRootTwo(1, 1)
        self.assertEqual(x / x, 1)
        self.assertEqual(1 / x, QRootTwo(-1, 1))
        with self.assertRaises(ZeroDivisionError):
            x / 0

    def test_floor(self):
        self.assertEqual(SQRT2.floor(), 1)
        self.assertEqual((-SQRT2).floor(), -2)
        self.assertEqual(QRootTwo(3).floor(), 3)
        self.assertEqual(QRootTwo(Fraction(-1, 2)).floor(), -1)

    def test_parse_and_token(self):
        value = QRootTwo.parse('1/2:-3')
        self.assertEqual((value.a, value.b), (Fraction(1, 2), -3))
        self.assertEqual(QRootTwo.parse(value.token()), value)
        self.assertEqual(QRootTwo.parse('7'), 7)
        with self.assertRaises(SurdFormatError):
            QRootTwo.parse('seven')

    def test_equal_values_hash_alike(self):
        self.assertEqual(len({QRootTwo(2), 2, Fraction(2)}), 1)

    def test_immutable(self):
        with self.assertRaises(AttributeError):
            SQRT2.a = 1

    @given(small_fractions, small_fractions)
    def test_sign_agrees_with_floats(self, a, b):
        value = QRootTwo(a, b)
        approx = float(value)
        if abs(approx) > 1e-9:
            self.assertEqual(value.sign(), 1 if approx > 0 else -1)

    @given(small_fractions, small_fractions)
    def test_norm_is_product_with_conjugate(self, a, b):
        value = QRootTwo(a, b)
        self.assertEqual(value * value.conjugate(), value.norm())


class RationalBetweenTests(SimpleTestCase):
    def test_coarsest_dyadic(self):
        self.assertEqual(rational_between(SQRT2, QRootTwo(3, -1)), Fraction(3, 2))
        self.assertEqual(rational_between(0, 1), Fraction(1, 2))

    def test_empty_interval(self):
        with self.assertRaises(ValueError):
            rational_between(1, 1)

    @settings(max_examples=50)
    @given(small_fractions, small_fractions, st.fractions(min_value=Fraction(1, 1000), max_value=5))
    def test_strictly_inside(self, a, b, width):
        lo = QRootTwo(a, b)
        hi = lo + width
        found = rational_between(lo, hi)
        self.assertTrue(lo < found < hi)
