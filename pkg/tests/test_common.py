#!/usr/bin/env python

"""Tests for the `wentzell.common` module."""

import json
import math
import os
import tempfile
import unittest

import numpy as np
import pandas as pd

from wentzell import common
from wentzell.common import LinOp, Space


class TestCommon(unittest.TestCase):
    """Tests for the common.py module."""

    def setUp(self):
        """Set up test fixtures, if any."""
        self.tmpdir = tempfile.TemporaryDirectory()

    def tearDown(self):
        """Tear down test fixtures, if any."""
        self.tmpdir.cleanup()

    def test_as_matrix_scalar(self):
        A = common.as_matrix(3.0)
        self.assertEqual(A.shape, (1, 1))
        self.assertEqual(A.dtype, np.complex128)

    def test_as_matrix_rejects_nan(self):
        with self.assertRaises(ValueError):
            common.as_matrix([[1.0, np.nan]])

    def test_as_matrix_rejects_3d(self):
        with self.assertRaises(common.DimensionMismatch):
            common.as_matrix(np.zeros((2, 2, 2)))

    def test_solve_linear(self):
        A = np.array([[4.0, 1.0], [2.0, 3.0]])
        x = common.solve_linear(A, np.array([1.0, 2.0]))
        self.assertLess(np.abs(A @ x - [1.0, 2.0]).max(), 1e-14)

    def test_solve_linear_random(self):
        rng = np.random.default_rng(0)
        A = rng.standard_normal((50, 50)) + 1j * rng.standard_normal((50, 50))
        b = rng.standard_normal(50)
        x = common.solve_linear(A, b)
        scale = common.operator_norm(A) * np.abs(x).max()
        self.assertLess(np.abs(A @ x - b).max(), 1e-10 * scale)

    def test_solve_linear_singular(self):
        with self.assertRaises(common.SingularMatrix):
            common.solve_linear(np.array([[1.0, 2.0], [2.0, 4.0]]), np.ones(2))

    def test_singular_matrix_is_linalg_error(self):
        self.assertTrue(issubclass(common.SingularMatrix, np.linalg.LinAlgError))
        self.assertTrue(issubclass(common.SpectrumHit, common.ResolventPole))

    def test_solve_linear_shape(self):
        with self.assertRaises(common.DimensionMismatch):
            common.solve_linear(np.eye(3), np.ones(2))

    def test_inverse(self):
        A = np.array([[2.0, 1.0], [0.0, 1.0j]])
        self.assertLess(np.abs(common.inverse(A) @ A - np.eye(2)).max(), 1e-14)

    def test_operator_norm(self):
        A = np.array([[1.0, -2.0], [3.0, 0.5]])
        self.assertEqual(common.operator_norm(A), 3.5)
        self.assertAlmostEqual(common.operator_norm(A, "spectral"), np.linalg.norm(A, 2))
        self.assertEqual(common.operator_norm(np.zeros((0, 0))), 0.0)
        with self.assertRaises(ValueError):
            common.operator_norm(A, "frobenius")

    def test_matrix_exponential(self):
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        E = common.matrix_exponential(A, math.pi / 2)
        self.assertLess(np.abs(E - A).max(), 1e-12)
        self.assertLess(np.abs(common.matrix_exponential(A, 0.0) - np.eye(2)).max(), 1e-15)

    def test_matrix_exponential_semigroup_law(self):
        rng = np.random.default_rng(1)
        A = 0.5 * rng.standard_normal((6, 6))
        s, t = 0.3, 0.7
        E = common.matrix_exponential(A, s + t)
        product = common.matrix_exponential(A, s) @ common.matrix_exponential(A, t)
        self.assertLess(np.abs(E - product).max(), 1e-10 * common.operator_norm(E))

    def test_matrix_exponential_negative_time(self):
        with self.assertRaises(ValueError):
            common.matrix_exponential(np.eye(2), -1.0)

    def test_spectral_quantities(self):
        spectra = common.spectral_quantities(np.diag([1.0, -3.0]))
        self.assertTrue(spectra.converged)
        self.assertEqual(sorted(spectra.eigenvalues.real), [-3.0, 1.0])
        self.assertEqual(list(spectra.singular_values), [3.0, 1.0])

    def test_spectral_quantities_laplacian(self):
        m = 20
        h = 1.0 / (m + 1)
        off = np.ones(m - 1)
        T = (np.diag(-2.0 * np.ones(m)) + np.diag(off, 1) + np.diag(off, -1)) / h**2
        expected = [-4 / h**2 * math.sin(k * math.pi * h / 2) ** 2 for k in range(1, m + 1)]
        spectra = common.spectral_quantities(T)
        got = np.sort(spectra.eigenvalues.real)
        self.assertTrue(np.allclose(got, np.sort(expected), rtol=1e-10, atol=1e-9))
        self.assertLess(np.abs(spectra.eigenvalues.imag).max(), 1e-9)
        self.assertAlmostEqual(spectra.singular_values[0], -min(expected), places=8)

    def test_linop_composition(self):
        T = LinOp(np.ones((2, 3)), Space.FULL_GRID, Space.BOUNDARY)
        S = LinOp(np.eye(2), Space.BOUNDARY, Space.BOUNDARY)
        self.assertEqual((S @ T).shape, (2, 3))
        self.assertEqual((S @ T).domain, Space.FULL_GRID)
        with self.assertRaises(common.TagMismatch):
            T @ S
        with self.assertRaises(common.TagMismatch):
            S + T

    def test_linop_apply(self):
        S = LinOp(2 * np.eye(2), Space.BOUNDARY, Space.BOUNDARY)
        self.assertEqual(list(S @ np.ones(2)), [2.0, 2.0])
        self.assertEqual(list(S.scaled(0.5) @ np.ones(2)), [1.0, 1.0])

    def test_fit_loglog_slope(self):
        h = np.array([0.1, 0.05, 0.025])
        self.assertAlmostEqual(common.fit_loglog_slope(h, 3 * h**2), 2.0)
        self.assertIsNone(common.fit_loglog_slope(h, [1.0, 0.0, 1.0]))

    def test_convergence_table(self):
        table = common.ConvergenceTable(N=[11, 21, 41], h=[0.1, 0.05, 0.025], error=[1e-2, 2.5e-3, 6.25e-4])
        self.assertAlmostEqual(table.order, 2.0)
        self.assertIsInstance(table.to_frame(), pd.DataFrame)
        self.assertAlmostEqual(table.to_dict()["fitted_order"], 2.0)

    def test_to_jsonable(self):
        data = {
            "z": 1 + 2j,
            "nan": float("nan"),
            "inf": -math.inf,
            "space": Space.BOUNDARY,
            "array": np.array([1.0, 2.0]),
            "complex_array": np.array([1j]),
        }
        out = common.to_jsonable(data)
        self.assertEqual(out["z"], {"real": 1.0, "imag": 2.0})
        self.assertEqual(out["nan"], "nan")
        self.assertEqual(out["inf"], "-inf")
        self.assertEqual(out["space"], "Boundary")
        self.assertEqual(out["array"], [1.0, 2.0])
        self.assertEqual(out["complex_array"], {"real": [0.0], "imag": [1.0]})
        json.loads(common.dumps_report(data))

    def test_dumps_report_sorted(self):
        text = common.dumps_report({"b": 1, "a": 2})
        self.assertLess(text.index('"a"'), text.index('"b"'))

    def test_check_file_path(self):
        path = common.check_file_path(os.path.join(self.tmpdir.name, "sub", "report.json"))
        self.assertTrue(os.path.isdir(os.path.dirname(path)))
        with self.assertRaises(TypeError):
            common.check_file_path(42)

    def test_split_complex_columns(self):
        frame = pd.DataFrame({"k": [0, 1], "value": np.array([1 + 1j, 2 - 1j])})
        out = common.split_complex_columns(frame)
        self.assertEqual(list(out.columns), ["k", "value_real", "value_imag"])
        self.assertEqual(list(out["value_imag"]), [1.0, -1.0])


if __name__ == "__main__":
    unittest.main()
