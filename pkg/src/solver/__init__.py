"""Grids, initial data and time stepping; import ``src.solver.steppers`` for the solver itself."""
from src.solver.grid import BoundaryCondition, Grid1D, SolutionState, Trajectory
from src.solver.initial import make_initial_data
from src.solver.tridiag import solve_tridiagonal, solve_tridiagonal_cyclic

__all__ = [
    "BoundaryCondition", "Grid1D", "SolutionState", "Trajectory", "make_initial_data",
    "solve_tridiagonal", "solve_tridiagonal_cyclic",
]
