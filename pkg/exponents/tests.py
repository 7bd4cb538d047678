from __future__ import annotations

import math

import numpy as np
from django.test import SimpleTestCase

from matcore.exceptions import DomainError, PreconditionError
from matcore.sampling import random_density

from .chain import LOG_2_SQRT3, appendix_a_report, mixture_threshold
from .utils import convex_hull_sc_lower, geometric_bounds_two, trivial_bounds

RHO = np.diag([0.5, 0.5])
SIGMA_1, SIGMA_2 = np.diag([0.25, 0.75]), np.diag([0.75, 0.25])


class TrivialBoundsTests(SimpleTestCase):
    def test_identical_states(self):
        bounds = trivial_bounds([RHO], [RHO], 0.4)
        self.assertAlmostEqual(float(bounds.direct_upper), 0.0, delta=1e-12)
        self.assertAlmostEqual(float(bounds.sc_lower), 0.4, delta=1e-12)

    def test_disjoint_alternative_is_dropped_by_min(self):
        rho = np.diag([1.0, 0.0])
        bounds = trivial_bounds([rho], [np.diag([0.0, 1.0]), np.diag([0.5, 0.5])], 1.0)
        self.assertTrue(bounds.direct_upper.is_finite)
        self.assertTrue(trivial_bounds([rho], [np.diag([0.0, 1.0])], 1.0).direct_upper.is_pos_inf)

    def test_requires_states(self):
        with self.assertRaises(PreconditionError):
            trivial_bounds([2 * RHO], [SIGMA_1], 0.5)
        with self.assertRaises(DomainError):
            trivial_bounds([], [SIGMA_1], 0.5)

    def test_hull_does_not_decrease_sc_bound(self):
        rng = np.random.default_rng(2)
        nulls = [random_density(rng, 2)]
        alts = [random_density(rng, 2) for _ in range(3)]
        trivial = trivial_bounds(nulls, alts, 0.6, points=128).sc_lower
        hull = convex_hull_sc_lower(nulls, alts, 0.6, points=20, rng=rng, alpha_points=128)
        self.assertGreaterEqual(float(hull), float(trivial) - 1e-12)


class GeometricBoundsTests(SimpleTestCase):
    def test_degenerate_pairs_reduce_to_single_pair(self):
        rng = np.random.default_rng(3)
        rho, sigma = random_density(rng, 2), random_density(rng, 2)
        report = geometric_bounds_two((rho, rho), (sigma, sigma), 0.3, grid=5, alpha_points=128)
        self.assertAlmostEqual(float(report.geometric_direct_upper), float(report.trivial_direct_upper), delta=1e-8)
        self.assertAlmostEqual(float(report.geometric_sc_lower), float(report.trivial_sc_lower), delta=1e-8)

    def test_commuting_alternatives_reach_mean_value(self):
        report = geometric_bounds_two((RHO, RHO), (SIGMA_1, SIGMA_2), 0.5, grid=11, alpha_points=128)
        self.assertAlmostEqual(float(report.geometric_sc_lower), 0.5 - LOG_2_SQRT3, delta=1e-9)
        self.assertAlmostEqual(report.sc_argmax[1], 0.5)
        self.assertGreater(float(report.geometric_sc_lower), float(report.trivial_sc_lower) + 1e-3)
        self.assertGreaterEqual(float(report.convex_hull_sc), float(report.trivial_sc_lower))
        self.assertTrue(report.ordering_ok)
        self.assertEqual(len(report.cells), 121)

    def test_random_instances_are_ordered(self):
        rng = np.random.default_rng(4)
        for _ in range(3):
            nulls = (random_density(rng, 2), random_density(rng, 2))
            alts = (random_density(rng, 2), random_density(rng, 2))
            report = geometric_bounds_two(nulls, alts, 0.4, grid=5, alpha_points=64, hull_points=5)
            self.assertTrue(report.ordering_ok)

    def test_orthogonal_alternatives(self):
        rng = np.random.default_rng(5)
        nulls = (random_density(rng, 2), random_density(rng, 2))
        alts = (np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
        report = geometric_bounds_two(nulls, alts, 0.4, grid=5, alpha_points=64, hull_points=3)
        self.assertEqual(len(report.cells), 25)
        # The interior means of the alternatives vanish.
        self.assertTrue(all(cell.direct.is_pos_inf for cell in report.cells if 0.0 < cell.t < 1.0))
        self.assertTrue(report.geometric_sc_lower.is_neg_inf)
        self.assertTrue(report.geometric_direct_upper.is_finite)
        self.assertTrue(report.ordering_ok)


class AppendixChainTests(SimpleTestCase):
    def test_single_copy(self):
        report = appendix_a_report(1, 0.5)
        self.assertTrue(report.holds)
        self.assertTrue(report.mixture_strict)
        self.assertAlmostEqual(float(report.closed_form), 0.5 - LOG_2_SQRT3, delta=1e-12)
        self.assertAlmostEqual(float(report.mixture), 0.5, delta=1e-9)
        trivial = trivial_bounds([RHO], [SIGMA_1, SIGMA_2], 0.5).sc_lower
        self.assertAlmostEqual(float(report.pairwise), float(trivial), delta=1e-9)

    def test_chain_for_small_k(self):
        for k, rates in ((1, (0.3, 0.5, 1.0)), (2, (0.5, 0.9, 1.2)), (3, (0.6, 0.9, 1.5))):
            for r in rates:
                report = appendix_a_report(k, r, t_grid=21)
                self.assertTrue(report.holds, (k, r, report.links))
                values = [float(v) for v in report.chain]
                self.assertTrue(all(a <= b + 1e-9 for a, b in zip(values, values[1:])))

    def test_even_threshold(self):
        self.assertAlmostEqual(mixture_threshold(2), 2 * math.log(4 / math.sqrt(3)) - math.log(2), delta=1e-15)
        self.assertAlmostEqual(mixture_threshold(2), 0.9808, delta=1e-4)
        self.assertIsNone(mixture_threshold(3))
        self.assertTrue(appendix_a_report(2, 0.9, t_grid=21).mixture_strict)
        above = appendix_a_report(2, 1.2, t_grid=21)
        self.assertFalse(above.mixture_strict)
        self.assertAlmostEqual(float(above.mixture), float(above.geometric), delta=1e-9)

    def test_mixture_limits(self):
        odd, even = appendix_a_report(3, 0.6, t_grid=5), appendix_a_report(2, 0.5, t_grid=5)
        self.assertAlmostEqual(float(odd.mixture_d_max), 2 * LOG_2_SQRT3, delta=1e-12)
        self.assertAlmostEqual(float(even.mixture_d_max), 2 * LOG_2_SQRT3, delta=1e-12)
        self.assertAlmostEqual(float(even.mixture_r_inf), mixture_threshold(2), delta=1e-12)

    def test_preconditions(self):
        with self.assertRaises(PreconditionError):
            appendix_a_report(2, 0.2)
        with self.assertRaises(DomainError):
            appendix_a_report(13, 5.0)
