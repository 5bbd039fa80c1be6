import random
import unittest
from fractions import Fraction

import numpy as np

from src.errors import SolverError
from src.kernels import CENTER, Kernel, relative_residual
from src.solver.grid import BoundaryCondition, Grid1D
from src.stencil.diffpoly import H_INV, T, TAU_INV, X, DiffPoly, U, VarKind, aux
from src.stencil.operators import Direction, diff_op


def naive(poly, layers, grid, n, t):
    """Term-by-term evaluation on the raw grid values, for comparison."""
    total = np.zeros(grid.M)
    magnitude = np.zeros(grid.M)
    for m, c in poly.terms.items():
        value = np.full(grid.M, float(c))
        for v, e in m:
            if v.kind == VarKind.GRID:
                value = value * np.roll(layers[n + v.k], -v.l) ** e
            elif v.kind == VarKind.T:
                value = value * t ** e
            elif v.kind == VarKind.X:
                value = value * grid.nodes ** e
            elif v.kind == VarKind.H:
                value = value * grid.h ** e
            elif v.kind == VarKind.TAU:
                value = value * grid.tau ** e
        total += value
        magnitude += np.abs(value)
    return total, magnitude


class TestKernel(unittest.TestCase):

    def setUp(self):
        self.grid = Grid1D(24, 1.0 / 24, 1.0 / 48)
        rng = np.random.default_rng(3)
        self.layers = {n: rng.uniform(1.0, 1.25, self.grid.M) for n in range(-1, 4)}

    def test_gauge_invariant_expression_drops_centre(self):
        kernel = Kernel(diff_op(U(), Direction.PLUS_TAU))
        self.assertTrue(all(term.center == 0 for term in kernel.terms))
        self.assertEqual(kernel.time_offsets, (0, 1))

    def test_matches_naive_evaluation(self):
        rng = random.Random(99)
        points = [(k, l) for k in (-1, 0, 1) for l in (-1, 0, 1)]
        factors = [DiffPoly.constant(1), T, X, H_INV, TAU_INV, X * H_INV]
        for trial in range(200):
            poly = DiffPoly.zero()
            for _ in range(4):
                term = DiffPoly.constant(Fraction(rng.randint(-9, 9), rng.randint(1, 5))) * rng.choice(factors)
                for _ in range(rng.randint(1, 3)):
                    term = term * U(*rng.choice(points))
                poly = poly + term
            with self.subTest(trial=trial):
                got = Kernel(poly).evaluate(self.layers.__getitem__, self.grid, 1, 0.3)
                want, scale = naive(poly, self.layers, self.grid, 1, 0.3)
                self.assertLessEqual(np.max(np.abs(got - want)), 1e-14 * max(np.max(scale), 1.0) * 8)

    def test_dirichlet_uses_boundary_values(self):
        grid = Grid1D(4, 0.2, 0.1, BoundaryCondition("dirichlet", 1.0, 2.0))
        layer = np.array([1.0, 1.0, 1.0, 1.0])
        values = Kernel(U(0, 1) - U()).evaluate(lambda n: layer, grid, 0, 0.0)
        np.testing.assert_allclose(values, [0.0, 0.0, 0.0, 1.0])

    def test_auxiliary_symbols_rejected(self):
        with self.assertRaises(SolverError):
            Kernel(aux("eps") * U())
        self.assertEqual(CENTER.name, "center")

    def test_relative_residual(self):
        self.assertEqual(relative_residual(np.zeros(3), np.zeros(3)), 0.0)
        self.assertEqual(relative_residual(np.array([1e-3]), np.array([2.0])), 5e-4)
        self.assertEqual(relative_residual(np.array([1.0]), np.array([0.0])), float("inf"))


if __name__ == "__main__":
    unittest.main()
