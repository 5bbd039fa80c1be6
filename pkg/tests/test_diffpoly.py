import unittest
from fractions import Fraction

from src.errors import StencilError, WindowOverflowError
from src.stencil.diffpoly import (
    H,
    H_INV,
    T,
    TAU,
    TAU_INV,
    X,
    DiffPoly,
    U,
    aux,
    grid_var,
    steps,
)
from src.stencil.sexpr import parse_sexpr, to_sexpr
from src.stencil.taylor import JX, JetPoly, jet


class TestDiffPoly(unittest.TestCase):

    def test_exact_cancellation(self):
        p = (U(1, 0) - U()) * TAU_INV
        self.assertTrue((p - p).is_zero())
        self.assertEqual(p * TAU, U(1, 0) - U())

    def test_rational_coefficients(self):
        p = U() / 3 + U() / 6
        self.assertEqual(p.coefficient(((grid_var(0, 0), 1),)), Fraction(1, 2))

    def test_division_by_step_monomial(self):
        self.assertEqual(U() / H, U() * H_INV)
        self.assertEqual(U() / (H * TAU), U() * steps(-1, -1))

    def test_division_by_grid_value_unsupported(self):
        with self.assertRaises(TypeError):
            U() / U(0, 1)

    def test_negative_power_only_on_steps(self):
        with self.assertRaises(StencilError):
            DiffPoly({((grid_var(0, 0), -1),): 1})

    def test_window_overflow(self):
        with self.assertRaises(WindowOverflowError):
            U(5, 0)

    def test_grid_extent(self):
        p = U(1, 0) * U(-1, 1) + U(0, -1) * X
        self.assertEqual(p.grid_extent(), (-1, 1, -1, 1))
        self.assertIsNone((T + H).grid_extent())

    def test_power_and_hash(self):
        p = (U() + U(0, 1)) ** 2
        q = U() ** 2 + 2 * U() * U(0, 1) + U(0, 1) ** 2
        self.assertEqual(p, q)
        self.assertEqual(hash(p), hash(q))

    def test_str(self):
        self.assertEqual(str(U(1, 0) - U()), "-U[0,0] + U[1,0]")
        self.assertEqual(str(DiffPoly.zero()), "0")


class TestSexpr(unittest.TestCase):

    def test_parse_documented_form(self):
        p = parse_sexpr("(+ (* 1/2 (^ U[1,0] 2) (^ h -1)) (* -1 U[0,0]))")
        self.assertEqual(p, U(1, 0) ** 2 * H_INV / 2 - U())

    def test_round_trip(self):
        for p in (U(1, -1) * T - X * H_INV / 7, (U() - U(0, -1)) ** 3 * steps(-3, 0), DiffPoly.zero()):
            self.assertEqual(parse_sexpr(to_sexpr(p)), p)

    def test_aux_and_minus(self):
        self.assertEqual(parse_sexpr("(* eps U[0,1])"), aux("eps") * U(0, 1))
        self.assertEqual(parse_sexpr("(- U[1,0] U[0,0])"), U(1, 0) - U())

    def test_jet_polynomials(self):
        self.assertEqual(parse_sexpr("(* 2 u[0,1] x)", JetPoly), jet(0, 1) * JX * 2)

    def test_rejects_bad_input(self):
        for text in ("(^ U[0,0] -1)", "(+ U[0,0]", "(% U[0,0])", ""):
            with self.subTest(text=text):
                with self.assertRaises(StencilError):
                    parse_sexpr(text)


if __name__ == "__main__":
    unittest.main()
