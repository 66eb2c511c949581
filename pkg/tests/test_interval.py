#!/usr/bin/env python

"""Tests for the `wentzell.interval` module."""

import unittest
import warnings

import numpy as np

from wentzell import interval
from wentzell.common import BadDimensions, PositivityViolation, Space
from wentzell.interval import Grid, GridFunction, WentzellProblem, build_model


class TestInterval(unittest.TestCase):
    """Tests for the interval.py module."""

    def setUp(self):
        """Set up test fixtures, if any."""
        self.problem = WentzellProblem(beta=-1.0)

    def tearDown(self):
        """Tear down test fixtures, if any."""

    def test_grid(self):
        grid = Grid(5)
        self.assertEqual(grid.h, 0.25)
        self.assertEqual(list(grid.interior), [1, 2, 3])
        self.assertEqual(list(grid.boundary), [0, 4])
        with self.assertRaises(BadDimensions):
            Grid(4)

    def test_grid_vector_valued(self):
        grid = Grid(6, n=2)
        self.assertEqual(grid.size, 12)
        self.assertEqual(list(grid.boundary), [0, 1, 10, 11])
        self.assertEqual(len(grid.interior), 8)

    def test_grid_weights(self):
        grid = Grid(5)
        w = grid.weights(Space.FULL_GRID)
        self.assertEqual(w[0], 1.0)
        self.assertAlmostEqual(w[2], 0.5)
        self.assertEqual(len(grid.weights(Space.PRODUCT)), 5)

    def test_grid_function_trace(self):
        grid = Grid(5)
        f = GridFunction(np.arange(5.0), grid)
        self.assertEqual(list(f.trace().values), [0.0, 4.0])
        with self.assertRaises(BadDimensions):
            GridFunction(np.zeros(4), grid)

    def test_stencil_row(self):
        model = build_model(WentzellProblem(), 5)
        self.assertTrue(np.allclose(model.A_m.matrix[1].real, [16, -32, 16, 0, 0]))

    def test_difference_matrices_exact_on_quadratics(self):
        D1, D2 = interval.difference_matrices(11)
        s = np.linspace(0.0, 1.0, 11)
        self.assertLess(np.abs(D1 @ s**2 - 2 * s).max(), 1e-10)
        self.assertLess(np.abs(D2 @ s**2 - 2).max(), 1e-9)

    def test_feedback_rows(self):
        model = build_model(self.problem, 11)
        s = model.grid.nodes
        # B f = (f'(0), -f'(1)) for beta = -1
        Bf = model.B.matrix @ s**2
        self.assertLess(np.abs(Bf - [0.0, -2.0]).max(), 1e-10)

    def test_split_feedback_sum(self):
        model = build_model(WentzellProblem(beta=-1.0, gamma=2.0), 11)
        B = model.B0.matrix + model.C @ model.L.matrix
        self.assertTrue(np.array_equal(B, model.B.matrix))
        self.assertTrue(np.allclose(model.C, 2 * np.eye(2)))

    def test_tiers(self):
        self.assertTrue(build_model(self.problem, 11).exact_tier)
        self.assertTrue(build_model(self.problem, 11).conservative)
        general = build_model(WentzellProblem(a={"poly": [1.0, 0.5]}, b=1.0, beta=-1.0), 11)
        self.assertFalse(general.exact_tier)
        self.assertFalse(build_model(WentzellProblem(beta=-1.0, gamma=-1.0), 11).conservative)

    def test_positivity(self):
        with self.assertRaises(PositivityViolation):
            build_model(WentzellProblem(a=lambda s: s - 0.5), 11)
        with self.assertRaises(PositivityViolation):
            build_model(WentzellProblem(a="1+1j"), 11)

    def test_complex_string_coefficient(self):
        model = build_model(WentzellProblem(c="0+2j"), 7)
        self.assertAlmostEqual(model.A_m.matrix[3, 3], -72 + 2j, places=9)

    def test_shorthand_needs_scalar(self):
        with self.assertRaises(BadDimensions):
            build_model(WentzellProblem(n=2, beta=-1.0), 11)

    def test_vector_valued_model(self):
        problem = WentzellProblem(n=2, a=[1.0, 2.0], M0=[[-1, 0], [0, -1], [0, 0], [0, 0]])
        model = build_model(problem, 9)
        self.assertEqual(model.A_m.shape, (18, 18))
        self.assertEqual(model.B.shape, (4, 18))
        self.assertEqual(model.A0.shape, (14, 14))

    def test_integral_kernel(self):
        model = build_model(WentzellProblem(kernel=1.0), 11)
        # trapezoid rule integrates linear functions exactly
        self.assertLess(np.abs(model.B0.matrix @ model.grid.nodes - 0.5).max(), 1e-14)

    def test_generator_rows(self):
        model = build_model(self.problem, 11)
        G = interval.wentzell_generator(model).matrix
        self.assertTrue(np.array_equal(G[0], model.B.matrix[0]))
        self.assertTrue(np.array_equal(G[5], model.A_m.matrix[5]))
        self.assertLess(np.abs(G @ np.ones(11)).max(), 1e-10)

    def test_with_feedback(self):
        model = build_model(self.problem, 11)
        changed = interval.with_feedback(model, C=-np.eye(2))
        self.assertFalse(changed.conservative)
        self.assertTrue(np.allclose(changed.B.matrix - model.B.matrix, -model.L.matrix))
        with self.assertRaises(BadDimensions):
            interval.with_feedback(model, C=np.eye(3))

    def test_dirichlet_realization_eigenvalues(self):
        model = build_model(WentzellProblem(), 201)
        eig = np.sort(np.linalg.eigvals(model.A0.matrix).real)[::-1][:5]
        expected = -((np.arange(1, 6) * np.pi) ** 2)
        self.assertTrue(np.all(np.abs(eig - expected) / np.abs(expected) < 1e-3))

    def test_trace_full_row_rank(self):
        problem = WentzellProblem(n=2, a=[1.0, 2.0])
        model = build_model(problem, 9)
        self.assertEqual(np.linalg.matrix_rank(model.L.matrix), 4)

    def test_domain_basis(self):
        model = build_model(WentzellProblem(a={"poly": [1.0, 0.5]}, beta=-1.0, gamma=1.0), 21)
        basis = interval.wentzell_domain_basis(model, as_matrix=True)
        self.assertEqual(basis.shape, (21, 19))
        K = interval.constraint_matrix(model)
        scale = np.abs(model.A_m.matrix).sum(axis=1).max()
        self.assertLess(np.abs(K @ basis).max(), 1e-12 * scale)

    def test_domain_basis_degenerate(self):
        model = build_model(self.problem, 11)
        zero = interval.with_feedback(model, B0=model.D.matrix[model.grid.boundary], C=np.zeros((2, 2)))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            basis = interval.wentzell_domain_basis(zero)
        self.assertTrue(any(issubclass(w.category, interval.DegenerateConstraint) for w in caught))
        self.assertEqual(len(basis), 11)


if __name__ == "__main__":
    unittest.main()
