#!/usr/bin/env python

"""Tests for the `wentzell.perturbation` module."""

import unittest

import numpy as np

from wentzell import perturbation
from wentzell.disk import build_disk_model
from wentzell.interval import WentzellProblem, build_model


class TestPerturbation(unittest.TestCase):
    """Tests for the perturbation.py module."""

    def setUp(self):
        """Set up test fixtures, if any."""
        self.zeroth_order = build_model(WentzellProblem(beta=-1.0, p0={"poly": [0.0, 1.0]}), 51)
        self.first_order = build_model(WentzellProblem(beta=-1.0, p1=1.0), 51)

    def tearDown(self):
        """Tear down test fixtures, if any."""

    def test_dirichlet_identity_zeroth_order(self):
        for lam in (5.0, 10.0):
            for swap in (False, True):
                report = perturbation.dirichlet_identity_check(self.zeroth_order, lam, swap)
                self.assertLessEqual(report["residual_1"], 1e-10)
                self.assertLessEqual(report["residual_2"], 1e-10)
                self.assertEqual(report["verdict"], "PASS")

    def test_dirichlet_identity_first_order(self):
        for lam in (5.0, 10.0):
            report = perturbation.dirichlet_identity_check(self.first_order, lam)
            self.assertEqual(report["verdict"], "PASS")

    def test_dtn_difference(self):
        model = build_model(WentzellProblem(beta=-1.0, p0=1.0), 51)
        report = perturbation.dtn_difference_check(model, 5.0)
        self.assertLessEqual(report["residual"], 1e-9)
        self.assertGreater(report["difference_norm"], 0.0)
        self.assertEqual(report["dtn_shapes"], [[2, 2], [2, 2]])

    def test_dtn_difference_first_order(self):
        for lam in (5.0, 10.0):
            report = perturbation.dtn_difference_check(self.first_order, lam)
            self.assertEqual(report["verdict"], "PASS")

    def test_dtn_difference_without_perturbation(self):
        model = build_model(WentzellProblem(beta=-1.0), 21)
        report = perturbation.dtn_difference_check(model, 5.0)
        self.assertEqual(report["difference_norm"], 0.0)

    def test_split_feedback(self):
        model = build_model(WentzellProblem(beta=-1.0, gamma=2.0), 21)
        split = perturbation.split_feedback(model)
        self.assertTrue(np.allclose(split.B.matrix, model.B.matrix))
        f = np.cos(model.grid.nodes)
        self.assertTrue(np.allclose(split.apply(f), model.B.matrix @ f))
        other = perturbation.split_feedback(model, C=np.zeros((2, 2)))
        self.assertTrue(np.allclose(other.B.matrix, model.B0.matrix))

    def test_additivity_residual(self):
        model = build_model(WentzellProblem(beta=-1.0), 21)
        F1 = model.B0.matrix
        F2 = np.eye(2) @ model.L.matrix
        self.assertLess(perturbation.additivity_residual(model, F1, F2), 1e-12)

    def test_split_disk(self):
        disk = build_disk_model(K=64, beta=-1.0, gamma=0.0, q=1.0)
        for scenario in perturbation.SCENARIOS:
            result = perturbation.feedback_split_experiment(disk, scenario=scenario)
            self.assertEqual(result["model"], "disk")
            self.assertEqual(result["additivity_residual"], 0.0)
            self.assertEqual(result["verdict"], "PASS")

    def test_split_interval(self):
        model = build_model(WentzellProblem(beta=-1.0, gamma=-1.0), 41)
        result = perturbation.feedback_split_experiment(model, scenario="C_bounded")
        self.assertLessEqual(result["additivity_residual"], 1e-10)
        self.assertLessEqual(result["angle_difference"], 0.1)
        self.assertEqual(result["verdict"], "PASS")

    def test_unknown_scenario(self):
        with self.assertRaises(ValueError):
            perturbation.feedback_split_experiment(build_disk_model(K=8), scenario="C_small")

    def test_wrong_model(self):
        with self.assertRaises(TypeError):
            perturbation.feedback_split_experiment(WentzellProblem())


if __name__ == "__main__":
    unittest.main()
