#!/usr/bin/env python

"""Tests for the `wentzell.probes` module."""

import math
import unittest

import numpy as np

from wentzell import probes
from wentzell.common import AssumptionFailed, ConfigError, fit_loglog_slope
from wentzell.interval import WentzellProblem, build_model


class TestProbes(unittest.TestCase):
    """Tests for the probes.py module."""

    def setUp(self):
        """Set up test fixtures, if any."""
        self.canonical = WentzellProblem(beta=-1.0)

    def tearDown(self):
        """Tear down test fixtures, if any."""

    def test_hille_yosida_dirichlet_realization(self):
        model = build_model(WentzellProblem(), 101)
        report = probes.hille_yosida_probe(model.A0)
        self.assertEqual(len(report.lams), 41)
        self.assertAlmostEqual(report.lams[-1], 1e8)
        self.assertEqual(report.lambda0, 1.0)
        self.assertLessEqual(report.M, 1 + 1e-8)
        self.assertGreater(report.values[-1], 0.99)
        self.assertEqual(report.poles, [])

    def test_hille_yosida_scalar(self):
        report = probes.hille_yosida_probe([[-1.0]])
        self.assertLessEqual(report.M, 1.0)
        self.assertGreater(report.M, 0.99)
        self.assertAlmostEqual(report.M_alternative, report.M)

    def test_hille_yosida_dtn_spectral(self):
        # eigenvalues 0 and -2
        N = np.array([[-1.0, 1.0], [1.0, -1.0]])
        report = probes.hille_yosida_probe(N, norm="spectral")
        self.assertLess(abs(report.M - 1.0), 1e-9)
        self.assertEqual(report.lambda0, 1.0)

    def test_hille_yosida_pole(self):
        report = probes.hille_yosida_probe([[2.0]], lams=[1.0, 2.0, 3.0, 4.0])
        self.assertEqual(report.poles, [2.0])
        self.assertEqual(report.lambda0, 3.0)
        self.assertAlmostEqual(report.M, 3.0)

    def test_sector_real_negative(self):
        report = probes.sector_angle_estimate(np.diag([-1.0]))
        self.assertAlmostEqual(report.angle_estimate, math.pi / 2 - probes.ANGLE_STEP)
        self.assertIsNone(report.first_unbounded_theta)
        self.assertEqual(report.spectral_abscissa, -1.0)
        self.assertEqual(len(report.ray_table["theta_rad"]), 89)

    def test_sector_skew(self):
        report = probes.sector_angle_estimate(np.array([[0.0, 1.0], [-1.0, 0.0]]))
        self.assertLess(abs(report.angle_estimate - math.pi / 4), 0.03)

    def test_sector_skew_without_shift(self):
        report = probes.sector_angle_estimate(np.array([[0.0, 1.0], [-1.0, 0.0]]), shift=0.0)
        self.assertEqual(report.angle_estimate, 0.0)
        self.assertIsNotNone(report.first_unbounded_theta)

    def test_sector_dirichlet_realization(self):
        model = build_model(WentzellProblem(), 51)
        weights = np.full(49, math.sqrt(model.grid.h))
        report = probes.sector_angle_estimate(model.A0, weights=weights)
        self.assertGreaterEqual(report.angle_estimate, math.pi / 2 - 0.05)

    def test_relative_bound_derivative_feedback(self):
        model = build_model(self.canonical, 401)
        report = probes.relative_bound_probe(model.B.matrix[:, model.grid.interior], model.A0)
        self.assertEqual(report.verdict, "bound-0")
        self.assertLess(abs(report.slope + 0.5), 0.1)

    def test_relative_bound_integral_feedback(self):
        model = build_model(WentzellProblem(kernel=1.0), 401)
        report = probes.relative_bound_probe(model.B.matrix[:, model.grid.interior], model.A0)
        self.assertEqual(report.verdict, "bound-0")
        self.assertLess(abs(report.slope + 1.0), 0.15)

    def test_relative_bound_trace_only(self):
        model = build_model(WentzellProblem(gamma=-1.0), 51)
        report = probes.relative_bound_probe(model.B.matrix[:, model.grid.interior], model.A0)
        self.assertEqual(report.verdict, "bound-0 (vanishing)")
        self.assertIsNone(report.slope)

    def test_evolve_structure(self):
        model = build_model(self.canonical, 31)
        report = probes.evolve_and_structure_check(model, ts=(0.1, 1.0))
        self.assertTrue(report["conservative"])
        for row in report["checks"]:
            self.assertLessEqual(row["lower_left"], 1e-12 * row["norm"])
            self.assertLessEqual(row["conservation_error"], 1e-9)
        self.assertEqual(report["verdict"], "PASS")

    def test_evolve_long_time(self):
        model = build_model(self.canonical, 31)
        report = probes.evolve_and_structure_check(model, ts=(10.0,))
        row = report["checks"][0]
        self.assertLessEqual(row["lower_left"], 1e-12 * row["norm"])
        self.assertLessEqual(row["conservation_error"], 1e-9)
        self.assertEqual(report["verdict"], "PASS")

    def test_evolve_not_conservative(self):
        model = build_model(WentzellProblem(beta=-1.0, gamma=-1.0), 31)
        report = probes.evolve_and_structure_check(model, ts=(1.0,))
        self.assertFalse(report["conservative"])
        self.assertNotIn("conservation_error", report["checks"][0])

    def test_compactness_dirichlet_singular_values(self):
        report = probes.compactness_proxy(WentzellProblem(), lam=1.0, Ns=(51,), k=3)
        h = 1.0 / 50
        expected = [1 / (1 + 4 / h**2 * math.sin(k * math.pi * h / 2) ** 2) for k in (1, 2, 3)]
        rows = [i for i, name in enumerate(report["table"]["operator"]) if name == "A0"]
        got = [report["table"][f"sigma_{j}"][rows[0]] for j in (1, 2, 3)]
        self.assertTrue(np.allclose(got, expected, rtol=1e-10))
        self.assertIsNone(report["stabilization"]["A0"])

    def test_compactness_stabilization(self):
        report = probes.compactness_proxy(self.canonical, Ns=(201, 401))
        self.assertLess(report["stabilization"]["A0"], 0.05)
        self.assertLess(report["stabilization"]["N"], 0.05)
        self.assertLess(report["stabilization"]["generator"], 0.05)
        self.assertEqual(len(report["table"]["N"]), 6)

    def test_dirichlet_convergence(self):
        table = probes.dirichlet_convergence(WentzellProblem(), Ns=(51, 101, 201, 401))
        self.assertEqual(table.N, [51, 101, 201, 401])
        self.assertLess(abs(table.order - 2.0), 0.3)

    def test_dirichlet_self_convergence(self):
        problem = WentzellProblem(a={"poly": [1.0, 0.5]}, b=1.0)
        table = probes.dirichlet_convergence(problem, Ns=(26, 51, 101, 201))
        self.assertEqual(table.N, [26, 51, 101])
        self.assertGreaterEqual(table.order, 1.7)

    def test_dirichlet_self_convergence_needs_nested_grids(self):
        problem = WentzellProblem(a={"poly": [1.0, 0.5]}, b=1.0)
        with self.assertRaises(ConfigError):
            probes.dirichlet_convergence(problem, Ns=(50, 101))

    def test_dtn_convergence(self):
        table = probes.dtn_convergence(self.canonical, Ns=(26, 51, 101, 201))
        self.assertGreaterEqual(table.order, 1.7)

    def test_similarity_convergence(self):
        problem = WentzellProblem(a={"poly": [1.0, 0.5]}, b=1.0, beta=-1.0)
        table, verdict = probes.similarity_convergence(problem, Ns=(26, 51), samples=4)
        self.assertEqual(verdict, "PASS")
        self.assertIn("lifting_defect", table.to_frame().columns)

    def test_similarity_convergence_general_tier(self):
        problem = WentzellProblem(a={"poly": [1.0, 0.5]}, b=1.0, beta=-1.0)
        table, verdict = probes.similarity_convergence(problem, Ns=(51, 101, 201, 401), samples=4)
        self.assertEqual(verdict, "PASS")
        self.assertLessEqual(max(table.error), 1e-9)
        # the defect is normalized by ||D|| ~ h^-2
        defects = table.extra["lifting_defect"]
        self.assertTrue(all(a > b for a, b in zip(defects, defects[1:])))
        self.assertGreater(fit_loglog_slope(table.h, defects), 2.5)

    def test_theorem31_needs_grid(self):
        with self.assertRaises(ValueError):
            probes.theorem31_experiment(self.canonical)

    def test_theorem31_dirichlet_assumption(self):
        model = build_model(self.canonical, 5)
        with self.assertRaises(AssumptionFailed) as ctx:
            probes.theorem31_experiment(model, shift=-32.0)
        self.assertEqual(ctx.exception.assumption, "Dirichlet map")

    def test_theorem31_canonical(self):
        record = probes.theorem31_experiment(self.canonical, N=201)
        self.assertEqual(record.verdict, "PASS")
        for name in ("generator", "A0", "G0", "N"):
            self.assertGreaterEqual(record.angles[name], math.pi / 2 - 0.05)
        self.assertEqual(record.relative_bound.verdict, "bound-0")
        self.assertEqual(record.reference_angle, min(record.angles["A0"], record.angles["G0"]))

    def test_theorem31_trace_feedback(self):
        record = probes.theorem31_experiment(WentzellProblem(beta=0.0, gamma=-1.0), N=201)
        self.assertEqual(record.verdict, "PASS")
        self.assertGreaterEqual(record.angles["N"], math.pi / 2 - 0.05)
        self.assertEqual(record.relative_bound.verdict, "bound-0 (vanishing)")

    def test_theorem31_vector_valued(self):
        rng = np.random.default_rng(0)
        problem = WentzellProblem(
            n=2,
            a=lambda s: np.diag([1.0, 1.0 + s]),
            M0=rng.uniform(-0.5, 0.5, (4, 2)).tolist(),
            M1=rng.uniform(-0.5, 0.5, (4, 2)).tolist(),
            N0=rng.uniform(-0.5, 0.5, (4, 2)).tolist(),
            N1=rng.uniform(-0.5, 0.5, (4, 2)).tolist(),
        )
        record = probes.theorem31_experiment(problem, N=101)
        self.assertEqual(set(record.angles), {"generator", "A0", "G0", "N"})
        self.assertGreaterEqual(record.angles["A0"], math.pi / 2 - 0.05)
        passed = record.angles["generator"] >= record.reference_angle - record.tolerance and all(
            record.angles[name] >= record.min_angle for name in record.angles
        )
        self.assertEqual(record.verdict, "PASS" if passed else "FAIL")
        if record.verdict == "FAIL":
            self.assertTrue(record.minimizing_ray)


if __name__ == "__main__":
    unittest.main()
