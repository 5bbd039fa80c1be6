import contextlib
import io
import json
import os
import tempfile
import unittest

import pandas as pd

import app
from app import EXIT_ERROR, EXIT_OK, main
from src.stencil.diffpoly import U
from src.stencil.linsolve import same_span
from src.stencil.sexpr import parse_sexpr


def quiet(argv):
    with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
        return main(argv)


class TestCommandLine(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def test_verify_linear_scheme(self):
        path = os.path.join(self.tmp, "verify.json")
        self.assertEqual(quiet(["verify", "--scheme", "LinearCross", "--json", path]), EXIT_OK)
        with open(path) as fh:
            summary = json.load(fh)
        self.assertEqual(summary["scheme"], "LinearCross")
        self.assertEqual(len(summary["triples"]), 6)

    def test_simulate_zero_data(self):
        path = os.path.join(self.tmp, "x.csv")
        argv = ["simulate", "--scheme", "NonlinearNine3", "--ic", "zero", "--steps", "10", "--M", "16",
                "--out", path]
        self.assertEqual(quiet(argv), EXIT_OK)
        frame = pd.read_csv(path)
        self.assertEqual(frame["U"].abs().max(), 0.0)

    def test_unknown_config_key(self):
        self.assertEqual(quiet(["simulate", "--set", "bogus=1"]), EXIT_ERROR)

    def test_missing_config_file(self):
        argv = ["simulate", "--config", os.path.join(self.tmp, "absent.env")]
        self.assertEqual(quiet(argv), EXIT_ERROR)

    def test_multiplier_basis(self):
        path = os.path.join(self.tmp, "multipliers.csv")
        argv = ["multipliers", "--scheme", "LinearCross", "--ansatz", "cross5_linear", "--out", path]
        self.assertEqual(quiet(argv), EXIT_OK)
        basis = [parse_sexpr(text) for text in pd.read_csv(path)["sexpr"]]
        self.assertTrue(same_span(basis, [U(0, -1) - U(0, 1), U(-1, 0) - U(1, 0)]))

    def test_convergence_table(self):
        path = os.path.join(self.tmp, "orders.csv")
        argv = ["convergence", "--scheme", "LinearCross", "--ic", "sine", "--levels", "16,32,64",
                "--final-time", "0.25", "--out", path]
        self.assertEqual(quiet(argv), EXIT_OK)
        table = pd.read_csv(path)
        self.assertEqual(list(table["M"]), [16, 32, 64])
        self.assertGreater(table["order"].iloc[-1], 1.7)

    def test_audit_stored_trajectory(self):
        trajectory = os.path.join(self.tmp, "run.csv")
        self.assertEqual(quiet(["simulate", "--scheme", "LinearCross", "--M", "32", "--steps", "50",
                                "--out", trajectory]), EXIT_OK)
        argv = ["audit", "--scheme", "LinearCross", "--input", trajectory, "--out-dir", self.tmp]
        self.assertEqual(quiet(argv), EXIT_OK)
        drift = pd.read_csv(os.path.join(self.tmp, "LinearCross_audit_drift.csv"))
        self.assertEqual(drift["triple"].nunique(), 6)

    def test_handlers_are_documented(self):
        handlers = [getattr(app, name) for name in dir(app) if name.startswith("cmd_")] + [main]
        self.assertEqual(len(handlers), 7)
        for fn in handlers:
            self.assertTrue(fn.__doc__, fn.__name__)

    def test_order_for_every_scheme(self):
        self.assertEqual(quiet(["order", "--all"]), EXIT_OK)

    def test_audit_writes_reports(self):
        argv = ["audit", "--scheme", "LinearCross", "--M", "32", "--steps", "50", "--out-dir", self.tmp]
        self.assertEqual(quiet(argv), EXIT_OK)
        self.assertTrue(os.path.exists(os.path.join(self.tmp, "LinearCross_audit_drift.csv")))
        with open(os.path.join(self.tmp, "LinearCross_audit.json")) as fh:
            self.assertTrue(json.load(fh)["passed"])


if __name__ == "__main__":
    unittest.main()
