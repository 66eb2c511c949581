#!/usr/bin/env python

"""Tests for the `wentzell.disk` module."""

import math
import unittest

import numpy as np

from wentzell import disk
from wentzell.common import BadParameters, BoundFails


class TestDisk(unittest.TestCase):
    """Tests for the disk.py module."""

    def setUp(self):
        """Set up test fixtures, if any."""
        self.model = disk.build_disk_model(K=256, beta=-1.0, gamma=0.0, q=1.0)

    def tearDown(self):
        """Tear down test fixtures, if any."""

    def test_symbols(self):
        K = self.model.K
        self.assertEqual(len(self.model.modes), 2 * K + 1)
        self.assertEqual(self.model.N_B[K + 2], -6.0)
        self.assertEqual(self.model.N_B[K - 2], -6.0)
        self.assertEqual(self.model.W[K - 3], 3.0)

    def test_bad_parameters(self):
        with self.assertRaises(BadParameters):
            disk.build_disk_model(K=0)
        with self.assertRaises(BadParameters):
            disk.build_disk_model(beta=1.0)
        with self.assertRaises(BadParameters):
            disk.build_disk_model(q=-1.0)
        with self.assertRaises(BadParameters):
            disk.build_disk_model(gamma=math.nan)

    def test_wq_identity(self):
        report = disk.disk_wq_identity_check(disk.build_disk_model(K=64))
        self.assertEqual(report["residual"], 0.0)
        self.assertTrue(report["literal_minus_W"])
        self.assertTrue(report["even_in_k"])
        self.assertEqual(report["verdict"], "PASS")

    def test_wq_identity_scaled(self):
        report = disk.disk_wq_identity_check(disk.build_disk_model(K=16, beta=-2.5))
        self.assertEqual(report["residual"], 0.0)
        self.assertFalse(report["literal_minus_W"])

    def test_relative_bound(self):
        report = disk.disk_relative_bound(self.model)
        table = report["table"]
        self.assertEqual(table["M_eps"][0], 0.0)
        self.assertIn(table["k_star"][0], (0, 1))
        self.assertAlmostEqual(table["M_eps"][1], 2.5)
        self.assertAlmostEqual(table["M_eps"][2], 25.0)
        for k_star, bound in zip(table["k_star"], table["k_star_bound"]):
            self.assertLessEqual(k_star, bound)
        self.assertEqual(report["verdict"], "PASS")

    def test_relative_bound_truncated(self):
        report = disk.disk_relative_bound(disk.build_disk_model(K=10, q=1.0), epsilons=[0.01])
        self.assertTrue(report["table"]["at_truncation"][0])
        self.assertEqual(report["verdict"], "INCONCLUSIVE")

    def test_relative_bound_fails_without_beltrami(self):
        with self.assertRaises(BoundFails):
            disk.disk_relative_bound(disk.build_disk_model(K=32, gamma=-1.0, q=0.0))

    def test_relative_bound_bad_epsilon(self):
        with self.assertRaises(BadParameters):
            disk.disk_relative_bound(self.model, epsilons=[0.0])

    def test_generation_report(self):
        report = disk.disk_generation_report(self.model, ts=(0.0, 1.0))
        self.assertEqual(report["angle"], math.pi / 2)
        self.assertEqual(report["spectral_abscissa"], 0.0)
        self.assertEqual(report["table"]["log_factor_t=1"][3], -12.0)
        self.assertTrue(np.all(report["table"]["log_factor_t=0"] == 0))
        self.assertTrue(report["factors_bounded_by_exp_t_gamma"])

    def test_generation_abscissa_is_gamma(self):
        report = disk.disk_generation_report(disk.build_disk_model(K=32, gamma=-1.0, q=0.5))
        self.assertEqual(report["spectral_abscissa"], -1.0)
        self.assertEqual(report["gamma"], -1.0)

    def test_generation_negative_time(self):
        with self.assertRaises(BadParameters):
            disk.disk_generation_report(self.model, ts=(-1.0,))


if __name__ == "__main__":
    unittest.main()
