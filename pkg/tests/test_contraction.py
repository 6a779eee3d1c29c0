r"""
tests/test_contraction.py

To run, open a terminal in the root project folder.
Activate your virtual environment if needed, and run one of the following commands:

    py tests\test_contraction.py
    python3 tests/test_contraction.py

This test suite verifies the singular maps, the q -> 1 contraction of
R-matrices and bilinear forms, and the GL(3) identities.
"""

import unittest
import pathlib
import sys

# For local imports, temporarily add project root to Python sys.path
PROJECT_ROOT = pathlib.Path(__file__).resolve().parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.append(str(PROJECT_ROOT))

from scripts.contraction import (  # noqa: E402
    ContractionMap,
    ContractionSingular,
    LinearMap,
    MapError,
    coefficient_1N,
    conjugate_by,
    contract_form,
    contract_r,
    cycle_map,
    check_equivalence_s,
    check_map_identities,
    gl3_map,
    pole_orders,
    standard_g,
)
from scripts.exact_ring import FIELD, H, HP, HRING, Q, SINGULAR, limit_q1, substitute_h  # noqa: E402
from scripts.golden import load_form_listing, load_r_listing  # noqa: E402
from scripts.rmatrix import HPOLY, RMatrix, SeriesSpec, build_r_A, build_r_BCD  # noqa: E402


def unit_diagonal(dimension):
    return {((i, j), (i, j)): 1 for i in range(1, dimension + 1) for j in range(1, dimension + 1)}


class TestMaps(unittest.TestCase):

    def test_gl3_singular_slots(self):
        self.assertEqual(gl3_map("g1").get(1, 2), SINGULAR)
        self.assertEqual(gl3_map("g2").get(2, 3), SINGULAR)
        self.assertEqual(gl3_map("g3").get(1, 3), SINGULAR)
        self.assertEqual(len(gl3_map("g1").entries), 4)

    def test_gl3_parameters(self):
        g = gl3_map("g3", {"alpha": 1, "gamma": 2})
        self.assertEqual(g.get(1, 2), FIELD(1))
        self.assertEqual(g.get(2, 3), FIELD(2))

    def test_parameter_validation(self):
        with self.assertRaises(MapError):
            gl3_map("g1", {"beta": H})
        with self.assertRaises(MapError):
            gl3_map("g1", {"beta": 1 / (Q - 1)})
        with self.assertRaises(MapError):
            gl3_map("g1", {"gamma": 1})
        with self.assertRaises(MapError):
            gl3_map("g4")

    def test_standard_g(self):
        g = standard_g(4)
        self.assertEqual(g.get(1, 4), SINGULAR)
        self.assertEqual(g.inverse().get(1, 4), -SINGULAR)
        with self.assertRaises(MapError):
            standard_g(1)

    def test_contraction_map_shape(self):
        with self.assertRaises(MapError):
            ContractionMap(2, {(1, 1): 1, (2, 2): 1, (2, 1): 1})
        with self.assertRaises(MapError):
            ContractionMap(2, {(1, 1): 2, (2, 2): 1})

    def test_cycle_map_has_order_three(self):
        s = cycle_map()
        self.assertEqual(s.compose(s).compose(s).entries, LinearMap.identity(3).entries)

    def test_json_reads_back(self):
        g = gl3_map("g2", {"alpha": 3})
        self.assertEqual(ContractionMap.from_json(g.to_json()), g)


class TestContractR(unittest.TestCase):

    def test_first_gl3_listing(self):
        result = contract_r(build_r_A(3), gl3_map("g1"))
        expected = unit_diagonal(3)
        expected.update({
            ((1, 1), (1, 2)): -HP,
            ((1, 1), (2, 1)): HP,
            ((1, 1), (2, 2)): HP**2,
            ((1, 2), (2, 2)): -HP,
            ((2, 1), (2, 2)): HP,
        })
        self.assertEqual(result, RMatrix(3, expected, HPOLY))
        self.assertEqual(result, load_r_listing("eq12"))

    def test_standard_map_n3_matches_g3(self):
        r_a3 = build_r_A(3)
        self.assertEqual(contract_r(r_a3, standard_g(3)), contract_r(r_a3, gl3_map("g3")))

    def test_standard_map_block(self):
        result = contract_r(build_r_A(5), standard_g(5))
        for i in (2, 3, 4):
            self.assertEqual(result.get((1, i), (i, 5)), -2 * HP)
            self.assertEqual(result.get((i, 1), (5, i)), 2 * HP)
        self.assertEqual(result.get((1, 1), (5, 5)), HP**2)
        self.assertEqual(result.specialize_h(0), RMatrix.identity(5, HPOLY))

    def test_identity_map_gives_plain_limit(self):
        result = contract_r(build_r_A(3), ContractionMap.identity(3))
        self.assertEqual(result, RMatrix.identity(3, HPOLY))

    def test_symplectic_rank_one(self):
        result = contract_r(build_r_BCD(SeriesSpec("C", 1)), standard_g(2))
        expected = unit_diagonal(2)
        expected.update({
            ((1, 1), (1, 2)): -2 * HP,
            ((1, 1), (2, 1)): 2 * HP,
            ((1, 1), (2, 2)): 4 * HP**2,
            ((1, 2), (2, 2)): -2 * HP,
            ((2, 1), (2, 2)): 2 * HP,
        })
        self.assertEqual(result, RMatrix(2, expected, HPOLY))

    def test_symplectic_corner(self):
        result = contract_r(build_r_BCD(SeriesSpec("C", 2)), standard_g(4))
        self.assertEqual(result.get((1, 1), (4, 4)), 8 * HP**2)
        self.assertEqual(limit_q1(coefficient_1N(build_r_BCD(SeriesSpec("C", 2)), standard_g(4))), 8 * HP**2)

    def test_orthogonal_series_are_obstructed(self):
        for spec in (SeriesSpec("B", 1), SeriesSpec("D", 2)):
            with self.assertRaises(ContractionSingular) as ctx:
                contract_r(build_r_BCD(spec), standard_g(spec.dimension))
            orders = [item["order"] for item in ctx.exception.offending]
            self.assertIn(-1, orders)
            self.assertEqual(ctx.exception.offending, sorted(ctx.exception.offending, key=lambda x: (x["row"], x["col"])))

    def test_obstruction_report(self):
        with self.assertRaises(ContractionSingular) as ctx:
            contract_r(build_r_BCD(SeriesSpec("D", 2)), standard_g(4))
        report = ctx.exception.report()
        self.assertTrue(report["obstruction"])
        self.assertTrue(all(isinstance(item["row"], list) for item in report["entries"]))

    def test_pole_orders(self):
        orders = pole_orders(build_r_A(3), standard_g(3))
        self.assertTrue(all(order >= 0 for order in orders.values()))
        self.assertEqual(min(pole_orders(build_r_BCD(SeriesSpec("D", 2)), standard_g(4)).values()), -1)
        self.assertEqual(limit_q1(coefficient_1N(build_r_A(3), standard_g(3))), HP**2)

    def test_functoriality(self):
        r_a3, g = build_r_A(3), gl3_map("g1")
        m = LinearMap(3, {(1, 1): 1, (2, 2): 1, (3, 3): 1, (2, 3): 2, (1, 3): -1})
        self.assertEqual(contract_r(r_a3, g.compose(m)), conjugate_by(contract_r(r_a3, g), m))

    def test_conjugate_by_needs_constant_map(self):
        with self.assertRaises(MapError):
            conjugate_by(RMatrix.identity(3, HPOLY), gl3_map("g1"))


class TestContractForm(unittest.TestCase):

    def test_rank_one_form(self):
        form = contract_form(standard_g(2), SeriesSpec("C", 1))
        self.assertEqual(form.entries, {(1, 2): HP ** 0, (2, 1): -(HP ** 0), (2, 2): -2 * HP})

    def test_forms_match_listings(self):
        for n in (1, 2, 3):
            spec = SeriesSpec("C", n)
            self.assertEqual(contract_form(standard_g(spec.dimension), spec), load_form_listing(n))

    def test_orthogonal_form_is_singular(self):
        with self.assertRaises(ContractionSingular):
            contract_form(standard_g(3), SeriesSpec("B", 1))

    def test_classical_form_at_h0(self):
        form = contract_form(standard_g(4), SeriesSpec("C", 2))
        classical = {key: substitute_h(value, 0) for key, value in form.entries.items()}
        self.assertEqual(
            {key: value for key, value in classical.items() if value},
            {(1, 4): HRING(1), (2, 3): HRING(1), (3, 2): HRING(-1), (4, 1): HRING(-1)},
        )
        self.assertEqual(form.get(4, 4), -4 * HP)


class TestIdentities(unittest.TestCase):

    def test_map_identities(self):
        report = check_map_identities()
        self.assertTrue(report["pass"], report["residuals"])

    def test_equivalence_by_cycle(self):
        report = check_equivalence_s()
        self.assertTrue(report["pass"], report["residuals"])


if __name__ == "__main__":
    unittest.main()
