from __future__ import annotations

import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from matcore.conf import use_numerics
from matcore.exceptions import DomainError, ResourceCapError

from .utils import (
    ClassicalInstance,
    am_feasibility_single_n,
    check_am_measure,
    gm_feasibility,
    gm_slack,
    max_cr_commuting,
    witness_margin,
)

SKEWED = ClassicalInstance(f=[1.0], g=[[1 / 100, 10.0]])
CROSSED = ClassicalInstance(f=[1.0, 1.0], g=[[1 / 100, 10.0], [10.0, 1 / 100]])
BALANCED = ClassicalInstance(f=[1.0, 1.0], g=[[1 / 10, 10.0], [10.0, 1 / 10]])


class InstanceTests(SimpleTestCase):
    def test_rejects_bad_entries(self):
        with self.assertRaises(DomainError):
            ClassicalInstance(f=[1.0, -0.5], g=[[1.0], [1.0]])
        with self.assertRaises(DomainError):
            ClassicalInstance(f=[1.0], g=[[math.inf]])
        with self.assertRaises(DomainError):
            ClassicalInstance(f=[1.0, 1.0], g=[[1.0]])


class GeometricFeasibilityTests(SimpleTestCase):
    def test_skewed_single_point(self):
        cert = gm_feasibility(SKEWED)
        self.assertTrue(cert.feasible)
        self.assertGreaterEqual(gm_slack(SKEWED, cert.measure), -1e-9)
        # Uniform weights fail here even though some ν works.
        self.assertLess(gm_slack(SKEWED, [0.5, 0.5]), 0)

    def test_crossed_instance_is_infeasible(self):
        cert = gm_feasibility(CROSSED)
        self.assertFalse(cert.feasible)
        self.assertIn(cert.violated_x, (0, 1))
        self.assertAlmostEqual(cert.dual_witness.sum(), 1.0)
        self.assertLess(witness_margin(CROSSED, cert.dual_witness), -1e-9)

    def test_balanced_instance_has_unique_measure(self):
        cert = gm_feasibility(BALANCED)
        self.assertTrue(cert.feasible)
        assert_allclose(cert.measure, [0.5, 0.5], atol=1e-7)

    def test_zero_entries_drop_columns(self):
        inst = ClassicalInstance(f=[1.0, 1.0], g=[[0.0, 1.0], [2.0, 0.5]])
        cert = gm_feasibility(inst)
        self.assertFalse(cert.feasible)
        self.assertGreater(cert.dual_witness[0], 0)
        self.assertLess(witness_margin(inst, cert.dual_witness), -1e-9)

        rescued = ClassicalInstance(f=[1.0, 1.0], g=[[0.0, 1.0], [2.0, 1.0]])
        cert = gm_feasibility(rescued)
        self.assertTrue(cert.feasible)
        assert_allclose(cert.measure, [0.0, 1.0], atol=1e-9)

    def test_all_columns_killed(self):
        inst = ClassicalInstance(f=[1.0, 1.0], g=[[0.0, 3.0], [3.0, 0.0]])
        cert = gm_feasibility(inst)
        self.assertFalse(cert.feasible)
        self.assertEqual(witness_margin(inst, cert.dual_witness), -math.inf)

    def test_empty_support_is_feasible(self):
        cert = gm_feasibility(ClassicalInstance(f=[0.0, 0.0], g=[[1.0, 2.0], [0.0, 1.0]]))
        self.assertTrue(cert.feasible)

    def test_random_infeasible_witnesses(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            g = rng.uniform(0.1, 2.0, (4, 3))
            inst = ClassicalInstance(f=1.1 * g.max(axis=1), g=g)
            cert = gm_feasibility(inst)
            self.assertFalse(cert.feasible)
            self.assertLess(witness_margin(inst, cert.dual_witness), -1e-9)

    @settings(deadline=None, max_examples=30)
    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_geometric_feasibility_implies_arithmetic(self, seed):
        rng = np.random.default_rng(seed)
        g = rng.uniform(0.1, 2.0, (3, 3))
        nu = rng.dirichlet(np.ones(3))
        f = 0.95 * np.exp(np.log(g) @ nu)
        inst = ClassicalInstance(f=f, g=g)
        cert = gm_feasibility(inst)
        self.assertTrue(cert.feasible)
        for n in (1, 2, 3):
            self.assertGreaterEqual(check_am_measure(inst, n, cert.measure), -1e-7)


class ArithmeticFeasibilityTests(SimpleTestCase):
    def test_crossed_instance_single_copy(self):
        cert = am_feasibility_single_n(CROSSED, 1)
        self.assertTrue(cert.feasible)
        assert_allclose(cert.measure, [0.5, 0.5], atol=1e-7)

    def test_crossed_instance_fails_with_copies(self):
        for n in (2, 5):
            cert = am_feasibility_single_n(CROSSED, n)
            self.assertFalse(cert.feasible)
            self.assertEqual(cert.copies, n)
            self.assertEqual(len(cert.violated_x), n)
            self.assertAlmostEqual(cert.dual_witness.sum(), 1.0)
            self.assertLess(cert.slack, 0)

    def test_pointwise_minimum_is_feasible(self):
        rng = np.random.default_rng(8)
        g = rng.uniform(0.1, 3.0, (3, 4))
        inst = ClassicalInstance(f=g.min(axis=1), g=g)
        for n in (1, 2, 3):
            self.assertTrue(am_feasibility_single_n(inst, n).feasible)
        self.assertGreaterEqual(check_am_measure(inst, 3, [0.0, 1.0, 0.0, 0.0]), -1e-12)

    def test_cap(self):
        with use_numerics(dim_cap=64):
            with self.assertRaises(ResourceCapError):
                am_feasibility_single_n(CROSSED, 7)
        with self.assertRaises(DomainError):
            am_feasibility_single_n(CROSSED, 0)


class MaxCrTests(SimpleTestCase):
    def test_samples(self):
        sigma1, sigma2 = np.diag([0.25, 0.75]), np.diag([0.75, 0.25])
        dirac, half = max_cr_commuting([sigma1, sigma2], [[1.0, 0.0], [0.5, 0.5]])
        assert_allclose(dirac, sigma1, atol=1e-12)
        assert_allclose(half, np.diag([math.sqrt(3) / 4] * 2), atol=1e-12)

    def test_identical_members(self):
        a = np.diag([0.2, 0.9])
        for value in max_cr_commuting([a, a], [[0.3, 0.7], [0.9, 0.1]]):
            assert_allclose(value, a, atol=1e-12)
