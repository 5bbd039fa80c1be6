import random
import unittest

from src.errors import InconsistentSchemeError, StencilError
from src.schemes.library import get_scheme, scheme_names
from src.stencil.diffpoly import H_INV, T, TAU_VAR, X, U, VarKind
from src.stencil.operators import Direction, diff_op
from src.stencil.taylor import (
    JetPoly,
    admits_limit,
    consistency_report,
    continuum_limit,
    continuum_residual,
    jet,
    taylor_expand,
)

TAU = JetPoly.variable(TAU_VAR)


class TestExpansion(unittest.TestCase):

    def test_upper_value(self):
        expected = jet() + TAU * jet(1, 0) + TAU ** 2 * jet(2, 0) / 2
        self.assertEqual(taylor_expand(U(1, 0), 2), expected)

    def test_difference_limit(self):
        self.assertEqual(continuum_limit(diff_op(U(), Direction.PLUS_H)), jet(0, 1))

    def test_continuum_residuals(self):
        self.assertEqual(continuum_residual("linear"), jet(2, 0) - jet(0, 2))
        self.assertEqual(continuum_residual("nonlinear"),
                         jet(2, 0) - jet(0, 2) - jet(0, 1) ** 2 * jet(0, 2))
        with self.assertRaises(StencilError):
            continuum_residual("bogus")


class TestProducts(unittest.TestCase):

    def test_expansion_respects_products(self):
        rng = random.Random(17)
        points = [(k, l) for k in (-1, 0, 1) for l in (-1, 0, 1)]
        order = 3

        def truncated(p):
            return p.select(lambda m: sum(e * (v.k + v.l) for v, e in m if v.kind == VarKind.JET) <= order)

        for trial in range(20):
            p = U(*rng.choice(points)) * rng.randint(-3, 3) + U(*rng.choice(points)) * T
            q = U(*rng.choice(points)) * U(*rng.choice(points)) * rng.randint(1, 4) + X
            with self.subTest(trial=trial):
                self.assertEqual(taylor_expand(p * q, order),
                                 truncated(taylor_expand(p, order) * taylor_expand(q, order)))


class TestConsistency(unittest.TestCase):

    def test_forward_difference_is_first_order(self):
        report = consistency_report(diff_op(U(), Direction.PLUS_H), jet(0, 1))
        self.assertTrue(report.consistent)
        self.assertEqual(report.orders(), (None, 1))

    def test_library_schemes_are_second_order(self):
        for name in scheme_names():
            scheme = get_scheme(name)
            with self.subTest(scheme=name):
                report = consistency_report(scheme.residual, scheme.target)
                self.assertTrue(report.consistent)
                self.assertEqual(report.orders(), (2, 2))

    def test_surviving_negative_powers(self):
        with self.assertRaises(InconsistentSchemeError):
            consistency_report(U() * H_INV, jet())


class TestAdmitsLimit(unittest.TestCase):

    def test_space_differences(self):
        self.assertTrue(admits_limit([diff_op(U(), Direction.PLUS_H)], jet(0, 1)))
        self.assertTrue(admits_limit([U(0, 1) - U(0, -1)], jet(0, 1)))

    def test_time_difference_does_not_reach_u_x(self):
        self.assertFalse(admits_limit([U(1, 0) - U(-1, 0)], jet(0, 1)))

    def test_empty_basis(self):
        self.assertFalse(admits_limit([], jet(0, 1)))


if __name__ == "__main__":
    unittest.main()
