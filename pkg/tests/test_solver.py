import os
import tempfile
import unittest

import numpy as np

from src.config import load_config
from src.errors import NonFiniteStateError
from src.kernels import relative_residual
from src.schemes.library import get_scheme, scheme_names
from src.solver.grid import BoundaryCondition, Grid1D, SolutionState
from src.solver.initial import make_initial_data
from src.solver.io import export_trajectory, load_trajectory
from src.solver.steppers import init_state, integrate, run, step, step_residual


def periodic_grid(M: int) -> Grid1D:
    return Grid1D(M, 1.0 / M, 0.5 / M)


class TestStepping(unittest.TestCase):

    def test_zero_stays_zero(self):
        grid = periodic_grid(16)
        for name in scheme_names():
            with self.subTest(scheme=name):
                scheme = get_scheme(name)
                u0, v0 = make_initial_data("zero", grid)
                traj = integrate(scheme, grid, init_state(grid, u0, v0, scheme), 10)
                self.assertEqual(np.max(np.abs(traj.layers)), 0.0)

    def test_affine_profile_is_exact(self):
        M, a, b = 16, 0.3, -0.7
        h = 1.0 / (M + 1)
        bc = BoundaryCondition("dirichlet", a, a + b * (M + 1) * h)
        grid = Grid1D(M, h, h / 2, bc)
        for name in scheme_names():
            with self.subTest(scheme=name):
                scheme = get_scheme(name)
                u0, v0 = make_initial_data("affine", grid, a=a, b=b)
                traj = integrate(scheme, grid, init_state(grid, u0, v0, scheme), 20)
                np.testing.assert_allclose(traj.layers[-1], a + b * grid.nodes, atol=1e-12)

    def test_linear_travelling_wave(self):
        grid = periodic_grid(64)
        scheme = get_scheme("LinearCross")
        u0, v0 = make_initial_data("sine", grid)
        traj = integrate(scheme, grid, init_state(grid, u0, v0, scheme), 64)
        exact = np.sin(2 * np.pi * (grid.nodes - 0.5))
        self.assertLess(np.max(np.abs(traj.layers[-1] - exact)), 5e-3)

    def test_step_solves_the_residual(self):
        grid = periodic_grid(32)
        for name in scheme_names():
            with self.subTest(scheme=name):
                scheme = get_scheme(name)
                u0, v0 = make_initial_data("random_smooth", grid, seed=5)
                state = init_state(grid, u0, v0, scheme)
                for _ in range(20):
                    previous = state.prev
                    state = step(state, scheme, grid)
                    values, magnitude = step_residual(state, previous, scheme, grid)
                    self.assertLessEqual(relative_residual(values, magnitude), 1e-12)

    def test_stride(self):
        grid = periodic_grid(8)
        scheme = get_scheme("LinearCross")
        u0, v0 = make_initial_data("sine", grid)
        traj = integrate(scheme, grid, init_state(grid, u0, v0, scheme), 10, stride=5)
        self.assertEqual(list(traj.levels), [0, 5, 10])
        self.assertFalse(traj.contiguous)

    def test_non_finite_state(self):
        with self.assertRaises(NonFiniteStateError):
            SolutionState(1, np.zeros(4), np.array([0.0, np.nan, 0.0, 0.0]))

    def test_zero_steps_keeps_initial_layers(self):
        cfg = load_config(overrides={"scheme": "NonlinearNine3", "steps": "0", "M": "16"})
        traj = run(cfg)
        self.assertEqual(list(traj.levels), [0, 1])
        grid = periodic_grid(16)
        u0, v0 = make_initial_data("random_smooth", grid, seed=cfg.ic_seed)
        state = init_state(grid, u0, v0, get_scheme("NonlinearNine3"))
        np.testing.assert_array_equal(traj.layers, [state.prev, state.curr])

    def test_taylor_start_is_third_order(self):
        scheme = get_scheme("LinearCross")
        ratios = []
        for M in (64, 128, 256):
            grid = periodic_grid(M)
            u0, v0 = make_initial_data("sine", grid)
            state = init_state(grid, u0, v0, scheme)
            exact = np.sin(2 * np.pi * (grid.nodes - grid.tau))
            ratios.append(np.max(np.abs(state.curr - exact)) / grid.tau ** 3)
        # leading term tau^3 / 6 * (2 pi)^3
        for ratio in ratios:
            self.assertAlmostEqual(ratio, (2 * np.pi) ** 3 / 6, delta=2.0)

    def test_run_from_config(self):
        cfg = load_config(overrides={"scheme": "NonlinearNine3", "ic": "zero", "steps": "10", "M": "16"})
        traj = run(cfg)
        self.assertEqual(len(traj), 11)
        self.assertEqual(np.max(np.abs(traj.layers)), 0.0)


class TestTrajectoryFiles(unittest.TestCase):

    def setUp(self):
        cfg = load_config(overrides={"scheme": "LinearCross", "M": "12", "steps": "6", "ic_seed": "2"})
        self.traj = run(cfg)

    def test_binary(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = export_trajectory(self.traj, os.path.join(tmp, "run.bin"))
            loaded = load_trajectory(path, "LinearCross")
        np.testing.assert_array_equal(loaded.layers, self.traj.layers)
        np.testing.assert_array_equal(loaded.levels, self.traj.levels)
        self.assertEqual(loaded.grid.tau, self.traj.grid.tau)

    def test_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = export_trajectory(self.traj, os.path.join(tmp, "run.csv"))
            loaded = load_trajectory(path, "LinearCross")
        np.testing.assert_array_equal(loaded.layers, self.traj.layers)
        np.testing.assert_array_equal(loaded.levels, self.traj.levels)
        self.assertEqual(loaded.grid.h, self.traj.grid.h)
        self.assertEqual(loaded.grid.tau, self.traj.grid.tau)

    def test_csv_dirichlet_and_stride(self):
        cfg = load_config(overrides={"scheme": "LinearCross", "M": "13", "steps": "9", "stride": "3",
                                     "bc": "dirichlet", "ic": "gaussian"})
        traj = run(cfg)
        with tempfile.TemporaryDirectory() as tmp:
            path = export_trajectory(traj, os.path.join(tmp, "run.csv"))
            loaded = load_trajectory(path, "LinearCross", traj.grid.bc)
        np.testing.assert_array_equal(loaded.layers, traj.layers)
        self.assertEqual(list(loaded.levels), [0, 3, 6, 9])
        self.assertEqual(loaded.grid.h, traj.grid.h)
        self.assertEqual(loaded.grid.tau, traj.grid.tau)
        np.testing.assert_array_equal(loaded.grid.nodes, traj.grid.nodes)


if __name__ == "__main__":
    unittest.main()
