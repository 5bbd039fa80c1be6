import unittest

from src.errors import AnsatzError
from src.schemes.ansatz import get_ansatz
from src.schemes.library import get_scheme
from src.stencil.conservation import AnsatzSpec, find_multipliers, solve_scheme_coefficients
from src.stencil.diffpoly import T, X, DiffPoly, U
from src.stencil.linsolve import same_span, span_contains
from src.stencil.taylor import JT, JX, admits_limit, consistency_report, continuum_residual, jet, pin_coefficients


class TestAnsatzSpec(unittest.TestCase):

    def test_dependent_basis_rejected(self):
        with self.assertRaises(AnsatzError):
            AnsatzSpec("bad", (U(), 2 * U()))

    def test_empty_basis_rejected(self):
        with self.assertRaises(AnsatzError):
            AnsatzSpec("empty", ())

    def test_unknown_name(self):
        with self.assertRaises(AnsatzError):
            get_ansatz("nope")


class TestFindMultipliers(unittest.TestCase):

    def test_linear_cross_five_point(self):
        found = find_multipliers(get_scheme("LinearCross").residual, get_ansatz("cross5_linear"))
        self.assertEqual(len(found), 2)
        self.assertTrue(same_span(found, [U(0, -1) - U(0, 1), U(-1, 0) - U(1, 0)]))

    def test_linear_cross_affine(self):
        found = find_multipliers(get_scheme("LinearCross").residual, get_ansatz("affine_tx"))
        self.assertTrue(same_span(found, [DiffPoly.constant(1), T, X]))

    def test_nonlinear_div2_affine_drops_x(self):
        found = find_multipliers(get_scheme("NonlinearDiv2").residual, get_ansatz("affine_tx"))
        self.assertTrue(same_span(found, [DiffPoly.constant(1), T]))

    def test_nine_point_scheme_has_energy_but_no_momentum_like_multiplier(self):
        found = find_multipliers(get_scheme("NonlinearNine3").residual, get_ansatz("nine_linear"))
        self.assertTrue(span_contains(found, U(1, 0) - U(-1, 0)))
        self.assertFalse(admits_limit(found, jet(0, 1)))

    def test_no_scaling_multiplier_on_cross_stencil(self):
        found = find_multipliers(get_scheme("LinearCross").residual, get_ansatz("cross5_coords"))
        self.assertTrue(found)
        self.assertFalse(admits_limit(found, JX * jet(0, 1) + JT * jet(1, 0)))

    def test_multipliers_pass_euler_check(self):
        scheme = get_scheme("LinearCross")
        for triple in scheme.triples:
            with self.subTest(triple=triple.tag):
                self.assertTrue(span_contains(
                    find_multipliers(scheme.residual, AnsatzSpec("single", (triple.multiplier,))),
                    triple.multiplier,
                ))


class TestSchemeSynthesis(unittest.TestCase):

    def test_constant_multiplier_keeps_every_divergence(self):
        ansatz = get_ansatz("div_nine_restricted")
        self.assertEqual(len(solve_scheme_coefficients(ansatz, DiffPoly.constant(1))), len(ansatz))

    def test_energy_multiplier_recovers_nine_point_scheme(self):
        scheme = get_scheme("NonlinearNine3")
        energy = scheme.triple("nonlinear_nine3.energy").multiplier
        family = solve_scheme_coefficients(get_ansatz("div_nine_restricted"), energy)
        self.assertTrue(span_contains(family, scheme.residual))
        pinned = pin_coefficients(family, scheme.target, through_degree=1)
        self.assertIsNotNone(pinned)
        report = consistency_report(pinned.residual, scheme.target)
        self.assertTrue(report.consistent)
        for order in report.orders():
            self.assertTrue(order is None or order >= 2)

    def test_second_order_cross_with_u_multiplier_has_no_consistent_member(self):
        family = solve_scheme_coefficients(get_ansatz("cross5_second_order"), U())
        self.assertTrue(family)
        self.assertIsNone(pin_coefficients(family, continuum_residual("linear")))


if __name__ == "__main__":
    unittest.main()
