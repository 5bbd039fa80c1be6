import unittest
from dataclasses import replace

from src.errors import UnknownSchemeError
from src.schemes.ansatz import get_ansatz
from src.schemes.library import StepperKind, get_scheme, scheme_names
from src.schemes.verify import (
    certified_triples,
    check_symmetries,
    describe_multipliers,
    expected_scaling_weight,
    scaling_weights,
    verify_conservation_identity,
)
from src.stencil.diffpoly import TAU
from src.stencil.operators import total_divergence


class TestLibrary(unittest.TestCase):

    def test_names(self):
        self.assertEqual(scheme_names(), ["LinearCross", "NonlinearDiv2", "NonlinearNine3", "NonlinearCross1"])
        self.assertEqual(get_scheme("NonlinearNine3").stepper, StepperKind.IMPLICIT_TRIDIAGONAL)
        kinds = {name: get_scheme(name).stepper.value for name in scheme_names()}
        self.assertEqual(kinds, {"LinearCross": "explicit_cross", "NonlinearDiv2": "explicit_cross",
                                 "NonlinearNine3": "implicit_tridiagonal", "NonlinearCross1": "explicit_cross"})
        self.assertFalse(StepperKind.IMPLICIT_TRIDIAGONAL.explicit)

    def test_unknown_scheme(self):
        with self.assertRaises(UnknownSchemeError):
            get_scheme("Leapfrog")
        with self.assertRaises(KeyError):
            get_scheme("Leapfrog")

    def test_triple_counts(self):
        counts = {name: len(get_scheme(name).triples) for name in scheme_names()}
        self.assertEqual(counts, {"LinearCross": 6, "NonlinearDiv2": 2, "NonlinearNine3": 3, "NonlinearCross1": 1})

    def test_x_dependence(self):
        scheme = get_scheme("LinearCross")
        self.assertFalse(scheme.triple("linear_cross.momentum").x_dependent)
        self.assertTrue(scheme.triple("linear_cross.angular_momentum").x_dependent)


class TestConservationIdentities(unittest.TestCase):

    def test_every_triple_is_certified(self):
        for name in scheme_names():
            with self.subTest(scheme=name):
                reports = verify_conservation_identity(get_scheme(name))
                self.assertTrue(all(r.certified for r in reports), [r.detail for r in reports])
                self.assertTrue(all(r.multiplier_ok for r in reports))

    def test_printed_forms_close(self):
        expected = {
            "LinearCross": ["linear_cross.momentum", "linear_cross.pseudomomentum", "linear_cross.energy",
                            "linear_cross.center_of_mass", "linear_cross.angular_momentum", "linear_cross.boost"],
            "NonlinearDiv2": ["nonlinear_div2.momentum", "nonlinear_div2.center_of_mass"],
            "NonlinearNine3": ["nonlinear_nine3.momentum", "nonlinear_nine3.energy", "nonlinear_nine3.center_of_mass"],
            "NonlinearCross1": ["nonlinear_cross1.pseudomomentum"],
        }
        for name, tags in expected.items():
            scheme = get_scheme(name)
            for tag in tags:
                with self.subTest(triple=tag):
                    t = scheme.triple(tag)
                    self.assertEqual(t.divergence(), t.multiplier * scheme.residual)

    def test_certified_triples_close(self):
        scheme = get_scheme("LinearCross")
        for t in certified_triples("LinearCross"):
            with self.subTest(triple=t.tag):
                self.assertEqual(total_divergence(t.density, t.flux), t.multiplier * scheme.residual)


class TestSymmetries(unittest.TestCase):

    def test_claims_match(self):
        for name in scheme_names():
            with self.subTest(scheme=name):
                self.assertTrue(all(c.ok for c in check_symmetries(get_scheme(name))))

    def test_stretch_only_for_linear_scheme(self):
        linear = {c.name: c for c in check_symmetries(get_scheme("LinearCross"))}
        nine = {c.name: c for c in check_symmetries(get_scheme("NonlinearNine3"))}
        self.assertTrue(linear["stretch"].holds)
        self.assertFalse(nine["stretch"].holds)
        self.assertTrue(nine["galilei"].holds)
        self.assertIsNone(linear["boost"].holds)
        self.assertIn("orthogonality", linear["boost"].detail)

    def test_scaling_weights(self):
        self.assertEqual(scaling_weights(get_scheme("LinearCross").residual, False), [-2])
        self.assertEqual(scaling_weights(get_scheme("NonlinearNine3").residual, True), [-1])

    def test_scaling_needs_the_expected_weight(self):
        scheme = get_scheme("LinearCross")
        self.assertEqual(expected_scaling_weight(scheme), -2)
        self.assertEqual(expected_scaling_weight(get_scheme("NonlinearCross1")), -1)
        rescaled = replace(scheme, residual=scheme.residual * TAU)
        check = {c.name: c for c in check_symmetries(rescaled)}["scaling"]
        self.assertFalse(check.holds)
        self.assertFalse(check.ok)


class TestMultiplierDescription(unittest.TestCase):

    def test_linear_cross_rows(self):
        rows = describe_multipliers(get_scheme("LinearCross"), get_ansatz("cross5_linear"))
        self.assertEqual(len(rows), 2)
        self.assertEqual(sorted(r.limit_degree for r in rows), [1, 1])
        self.assertFalse(any(r.vanishes_on_solutions for r in rows))

    def test_affine_rows(self):
        rows = describe_multipliers(get_scheme("LinearCross"), get_ansatz("affine_tx"))
        self.assertEqual(len(rows), 3)
        self.assertTrue(all(r.limit_degree == 0 for r in rows))


if __name__ == "__main__":
    unittest.main()
