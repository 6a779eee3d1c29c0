r"""
tests/test_exact_ring.py

To run, open a terminal in the root project folder.
Activate your virtual environment if needed, and run one of the following commands:

    py tests\test_exact_ring.py
    python3 tests/test_exact_ring.py

This test suite verifies exact scalar arithmetic, parsing, printing and the
q -> 1 limit, with seeded random checks of the order and limit properties.
"""

import random
import unittest
import pathlib
import sys
from fractions import Fraction

from sympy import QQ

# For local imports, temporarily add project root to Python sys.path
PROJECT_ROOT = pathlib.Path(__file__).resolve().parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.append(str(PROJECT_ROOT))

from scripts.exact_ring import (  # noqa: E402
    FIELD,
    H,
    HP,
    HRING,
    Q,
    SINGULAR,
    V,
    NonPolynomialInH,
    PoleAtQ1,
    ScalarParseError,
    ZeroHasNoOrder,
    as_ratfunc,
    evaluate,
    format_scalar,
    limit_q1,
    order_at_q1,
    parse_scalar,
    q_power,
    ratfunc_arith,
    substitute_h,
    to_hpoly,
)


class TestParsing(unittest.TestCase):

    def test_parse_singular_entry(self):
        self.assertEqual(parse_scalar("h/(q - 1)"), SINGULAR)

    def test_parse_caret_power_and_v(self):
        self.assertEqual(parse_scalar("q^2 - v^4"), FIELD.zero)
        self.assertEqual(parse_scalar("2*h^2"), 2 * H**2)

    def test_parse_hpoly_target(self):
        self.assertEqual(parse_scalar("-2*h + 3", "hpoly"), -2 * HP + 3)

    def test_parse_rejects_foreign_symbols(self):
        for text in ("h $ 2", "x + 1", "import os", ""):
            with self.assertRaises(ScalarParseError):
                parse_scalar(text)

    def test_parse_rejects_division_by_zero(self):
        with self.assertRaises(ScalarParseError):
            parse_scalar("1/0")

    def test_hpoly_target_rejects_q(self):
        with self.assertRaises(NonPolynomialInH):
            parse_scalar("q*h", "hpoly")

    def test_format_parses_back(self):
        value = (Q**2 - 1 / Q) * H / (Q - 1)
        self.assertEqual(parse_scalar(format_scalar(value)), value)

    def test_format_uses_q_for_even_powers(self):
        self.assertEqual(format_scalar(Q), "q")
        self.assertEqual(format_scalar(V), "v")

    def test_format_bare_power_denominator(self):
        self.assertEqual(format_scalar(1 / H), "1/h")
        self.assertEqual(format_scalar(H / Q**2), "h/q^2")
        self.assertEqual(format_scalar(SINGULAR), "h/(q - 1)")

    def test_format_hpoly(self):
        self.assertEqual(format_scalar(HP**2 - 2 * HP), "h^2 - 2*h")


class TestArithmetic(unittest.TestCase):

    def test_cancellation_is_canonical(self):
        self.assertEqual((Q**2 - 1) / (Q - 1), Q + 1)

    def test_division_by_zero(self):
        with self.assertRaises(ZeroDivisionError):
            ratfunc_arith(Q, FIELD.zero, "div")

    def test_unknown_operation(self):
        with self.assertRaises(ValueError):
            ratfunc_arith(Q, Q, "pow")

    def test_q_power(self):
        self.assertEqual(q_power(-1), 1 / Q)
        self.assertEqual(q_power(3), V**6)

    def test_hpoly_to_ratfunc_and_back(self):
        value = 3 * HP**2 - HP
        self.assertEqual(to_hpoly(as_ratfunc(value)), value)

    def test_to_hpoly_rejects_q(self):
        with self.assertRaises(NonPolynomialInH):
            to_hpoly(Q * H)


class TestLimit(unittest.TestCase):

    def test_order_of_singular_entry(self):
        self.assertEqual(order_at_q1(SINGULAR), -1)
        self.assertEqual(order_at_q1((Q - 1) ** 2 * H), 2)
        self.assertEqual(order_at_q1(Q + 1), 0)

    def test_zero_has_no_order(self):
        with self.assertRaises(ZeroHasNoOrder):
            order_at_q1(FIELD.zero)

    def test_limit_of_finite_product(self):
        self.assertEqual(limit_q1(SINGULAR * (Q - 1)), HP)
        self.assertEqual(limit_q1(SINGULAR * (Q - 1 / Q)), 2 * HP)

    def test_symplectic_corner_scalar(self):
        # (h^2/(q-1)) (1/q + 1) (1 - q^-N) -> 2N h^2
        for size in (2, 4, 6):
            scalar = H**2 / (Q - 1) * (1 / Q + 1) * (1 - q_power(-size))
            self.assertEqual(limit_q1(scalar), 2 * size * HP**2)

    def test_pole_reports_order(self):
        with self.assertRaises(PoleAtQ1) as ctx:
            limit_q1(SINGULAR**2)
        self.assertEqual(ctx.exception.order, -2)

    def test_non_polynomial_limit(self):
        with self.assertRaises(NonPolynomialInH):
            limit_q1(Q / H)

    def test_limit_of_vanishing_value(self):
        self.assertEqual(limit_q1((Q - 1) * H), HRING.zero)


class TestSpecialization(unittest.TestCase):

    def test_substitute_h(self):
        self.assertEqual(substitute_h(SINGULAR, 0), FIELD.zero)
        self.assertEqual(substitute_h(HP**2 + HP, 2), HRING(6))

    def test_evaluate_exact(self):
        self.assertEqual(evaluate(SINGULAR, 2, 3), 1)
        self.assertEqual(evaluate(Q + H, Fraction(1, 2), 1), QQ(5, 4))

    def test_evaluate_at_pole(self):
        with self.assertRaises(ZeroDivisionError):
            evaluate(SINGULAR, 1, 1)


def random_poly(rng: random.Random):
    """A nonzero polynomial in v and h with small integer coefficients."""
    while True:
        poly = FIELD.zero
        for a in range(3):
            for b in range(3):
                poly += rng.randint(-3, 3) * V**a * H**b
        if poly:
            return poly


def random_function(rng: random.Random, allow_pole: bool = True):
    """A random scalar; without allow_pole its order at q=1 is at least 0 and its limit is in QQ[h]."""
    value = random_poly(rng) * (V - 1) ** rng.randint(0, 2)
    for _ in range(rng.randint(0, 2)):
        value /= V + rng.randint(1, 4)
    if allow_pole:
        value /= (V - 1) ** rng.randint(0, 2)
    return value


class TestProperties(unittest.TestCase):

    def setUp(self):
        self.rng = random.Random(2024)

    def test_order_of_product_is_additive(self):
        for _ in range(100):
            f, g = random_function(self.rng), random_function(self.rng)
            self.assertEqual(order_at_q1(f * g), order_at_q1(f) + order_at_q1(g))

    def test_order_of_sum_is_at_least_the_minimum(self):
        for _ in range(100):
            f, g = random_function(self.rng), random_function(self.rng)
            if f + g:
                self.assertGreaterEqual(order_at_q1(f + g), min(order_at_q1(f), order_at_q1(g)))

    def test_limit_is_a_ring_homomorphism(self):
        for _ in range(100):
            f = random_function(self.rng, allow_pole=False)
            g = random_function(self.rng, allow_pole=False)
            self.assertEqual(limit_q1(f + g), limit_q1(f) + limit_q1(g))
            self.assertEqual(limit_q1(f * g), limit_q1(f) * limit_q1(g))

    def test_limit_matches_nearby_values(self):
        eps = Fraction(1, 10**6)
        for _ in range(100):
            f = random_function(self.rng, allow_pole=False)
            h0 = self.rng.randint(-2, 2)
            expected = evaluate(limit_q1(f), 1, h0)
            for v0 in (1 + eps, 1 - eps):
                self.assertLess(abs(evaluate(f, v0, h0) - expected), QQ(1, 10**4))

    def test_format_parses_back_for_random_scalars(self):
        for _ in range(300):
            value = random_poly(self.rng) / random_poly(self.rng)
            self.assertEqual(parse_scalar(format_scalar(value)), value)


if __name__ == "__main__":
    unittest.main()
