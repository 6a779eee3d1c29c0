r"""
tests/test_rmatrix.py

To run, open a terminal in the root project folder.
Activate your virtual environment if needed, and run one of the following commands:

    py tests\test_rmatrix.py
    python3 tests/test_rmatrix.py

This test suite verifies the q-deformed R-matrices of the A, B, C and D
series and the RMatrix container.
"""

import unittest
import pathlib
import sys

# For local imports, temporarily add project root to Python sys.path
PROJECT_ROOT = pathlib.Path(__file__).resolve().parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.append(str(PROJECT_ROOT))

from scripts.exact_ring import FIELD, HP, Q, v_power  # noqa: E402
from scripts.rmatrix import (  # noqa: E402
    HPOLY,
    RATFUNC,
    RMatrix,
    RMatrixError,
    SeriesSpec,
    build_r,
    build_r_A,
    build_r_BCD,
    kron,
    tensor_embed,
    triple_index,
)


class TestSeriesSpec(unittest.TestCase):

    def test_dimensions(self):
        self.assertEqual(SeriesSpec("A", 2).dimension, 3)
        self.assertEqual(SeriesSpec("B", 2).dimension, 5)
        self.assertEqual(SeriesSpec("C", 2).dimension, 4)
        self.assertEqual(SeriesSpec("D", 3).dimension, 6)

    def test_rho_and_epsilon(self):
        self.assertEqual(SeriesSpec("C", 2).rho2(), (4, 2, -2, -4))
        self.assertEqual(SeriesSpec("C", 2).epsilon(), (1, 1, -1, -1))
        self.assertEqual(SeriesSpec("B", 1).rho2(), (1, 0, -1))
        self.assertEqual(SeriesSpec("D", 2).rho2(), (2, 0, 0, -2))
        self.assertEqual(SeriesSpec("D", 2).epsilon(), (1, 1, 1, 1))

    def test_for_dimension(self):
        self.assertEqual(SeriesSpec.for_dimension("C", 6), SeriesSpec("C", 3))
        with self.assertRaises(RMatrixError):
            SeriesSpec.for_dimension("B", 4)

    def test_invalid_family(self):
        with self.assertRaises(RMatrixError):
            SeriesSpec("E", 6)


class TestBuild(unittest.TestCase):

    def test_a_series_entries(self):
        matrix = build_r_A(3)
        self.assertEqual(matrix.nnz(), 12)
        self.assertEqual(matrix.get((1, 1), (1, 1)), Q)
        self.assertEqual(matrix.get((1, 2), (1, 2)), FIELD.one)
        self.assertEqual(matrix.get((2, 1), (1, 2)), Q - 1 / Q)
        self.assertEqual(matrix.get((1, 2), (2, 1)), FIELD.zero)

    def test_upper_orientation(self):
        matrix = build_r_A(2, orientation="upper")
        self.assertEqual(matrix.get((1, 2), (2, 1)), Q - 1 / Q)
        self.assertEqual(matrix, build_r_A(2).flip_conjugate())

    def test_a_series_needs_two_dimensions(self):
        with self.assertRaises(RMatrixError):
            build_r_A(1)

    def test_b_series_middle_term(self):
        matrix = build_r_BCD(SeriesSpec("B", 1))
        self.assertEqual(matrix.get((2, 2), (2, 2)), FIELD.one)
        self.assertEqual(matrix.get((1, 1), (1, 1)), Q)
        self.assertEqual(matrix.get((3, 1), (3, 1)), 1 / Q)

    def test_c_series_twisted_term(self):
        # -(q - 1/q) q^(rho_2 - rho_1) eps_2 eps_1 e_21 (x) e_34
        matrix = build_r_BCD(SeriesSpec("C", 2))
        self.assertEqual(matrix.get((2, 3), (1, 4)), -(Q - 1 / Q) * v_power(-2))

    def test_dispatch(self):
        self.assertEqual(build_r(SeriesSpec("A", 1)), build_r_A(2))
        self.assertEqual(build_r(SeriesSpec("C", 1)), build_r_BCD(SeriesSpec("C", 1)))


class TestRMatrix(unittest.TestCase):

    def test_zeros_are_dropped(self):
        matrix = RMatrix(2, {((1, 1), (1, 1)): 0, ((1, 2), (1, 2)): 1})
        self.assertEqual(matrix.nnz(), 1)

    def test_index_range(self):
        with self.assertRaises(RMatrixError):
            RMatrix(2, {((1, 3), (1, 1)): 1})

    def test_inverse(self):
        matrix = build_r_A(2)
        self.assertTrue((matrix @ matrix.inverse()).is_identity())

    def test_hpoly_inverse_stays_polynomial(self):
        matrix = RMatrix(2, {((1, 1), (1, 2)): HP, **{(p, p): 1 for p in [(1, 1), (1, 2), (2, 1), (2, 2)]}}, HPOLY)
        inverse = matrix.inverse()
        self.assertEqual(inverse.ring, HPOLY)
        self.assertEqual(inverse.get((1, 1), (1, 2)), -HP)

    def test_flip_conjugate_is_an_involution(self):
        matrix = build_r_BCD(SeriesSpec("C", 1))
        self.assertEqual(matrix.flip_conjugate().flip_conjugate(), matrix)

    def test_rhat_moves_rows(self):
        matrix = build_r_A(2)
        self.assertEqual(matrix.rhat().get((1, 2), (1, 2)), Q - 1 / Q)
        self.assertEqual(RMatrix.identity(2).rhat(), RMatrix.flip(2))

    def test_specialize_h(self):
        matrix = RMatrix(2, {((1, 1), (2, 2)): HP**2}, HPOLY)
        self.assertEqual(matrix.specialize_h(0).nnz(), 0)

    def test_json_reads_back(self):
        matrix = build_r_A(3)
        self.assertEqual(RMatrix.from_json(matrix.to_json()), matrix)

    def test_json_infers_hpoly(self):
        data = {"N": 2, "entries": [{"row": [1, 1], "col": [1, 2], "value": "-h"}]}
        matrix = RMatrix.from_json(data)
        self.assertEqual(matrix.ring, HPOLY)
        self.assertEqual(matrix.get((1, 1), (1, 2)), -HP)

    def test_json_rejects_bad_indices(self):
        with self.assertRaises(RMatrixError):
            RMatrix.from_json({"N": 2, "entries": [{"row": [1], "col": [1, 2], "value": "1"}]})

    def test_text_dump(self):
        lines = build_r_A(2).to_text().splitlines()
        self.assertEqual(lines[0], "R_1111 = q")
        self.assertEqual(len(lines), 5)

    def test_dense_limit(self):
        self.assertEqual(len(build_r_A(2).to_dense()), 4)
        with self.assertRaises(RMatrixError):
            build_r_A(5).to_dense()

    def test_ring_conversion(self):
        matrix = RMatrix.identity(2, HPOLY)
        self.assertEqual(matrix.as_ring(RATFUNC).ring, RATFUNC)
        self.assertEqual(matrix.as_ring(RATFUNC).as_ring(HPOLY), matrix)


class TestTensorHelpers(unittest.TestCase):

    def test_kron_shape(self):
        matrix = build_r_A(2).to_domain_matrix()
        self.assertEqual(kron(matrix, matrix).shape, (16, 16))

    def test_tensor_embed_identity(self):
        embedded = tensor_embed(RMatrix.identity(2), "13")
        self.assertEqual(embedded.shape, (8, 8))
        self.assertEqual(len(embedded.to_dod()), 8)

    def test_tensor_embed_single_entry_on_outer_legs(self):
        # e_12 (x) e_34 at N = 4, placed on factors 1 and 3
        size = 4
        single = RMatrix(size, {((1, 3), (2, 4)): 1})
        dod = tensor_embed(single, "13").to_dod()
        expected = {triple_index((1, m, 3), size): {triple_index((2, m, 4), size)} for m in range(1, size + 1)}
        self.assertEqual({row: set(cols) for row, cols in dod.items()}, expected)
        self.assertTrue(all(value == FIELD.one for cols in dod.values() for value in cols.values()))

    def test_tensor_embed_respects_products(self):
        matrix = build_r_A(2)
        product = tensor_embed(matrix, "12").matmul(tensor_embed(matrix.inverse(), "12"))
        self.assertEqual(product.to_dod(), tensor_embed(RMatrix.identity(2), "12").to_dod())

    def test_tensor_embed_bad_legs(self):
        with self.assertRaises(RMatrixError):
            tensor_embed(RMatrix.identity(2), "21")


if __name__ == "__main__":
    unittest.main()
