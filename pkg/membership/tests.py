from __future__ import annotations

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from classical.utils import max_cr_commuting
from matcore.conf import use_numerics
from matcore.exceptions import ResourceCapError
from matcore.linalg import loewner_margin
from matcore.sampling import random_density, random_pd, random_probability
from means.utils import ka_mean

from .feasibility import AmObjective, am_feasibility_quantum, unit_simplex_projection
from .oracles import sup_bound_oracle, weak_geometric_oracle
from .utils import ka_membership, weak_violation
from .verdicts import VerdictMethod

P1, P2 = np.diag([0.2, 0.8]), np.diag([0.7, 0.3])


def _pair(seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    return random_pd(rng, 2, floor=0.2), random_pd(rng, 2, floor=0.2)


class KaMembershipTests(SimpleTestCase):
    def test_mean_is_member_at_its_weight(self):
        a1, a2 = _pair(1)
        verdict = ka_membership(ka_mean(a1, a2, 0.3), a1, a2)
        self.assertTrue(verdict.member)
        self.assertEqual(verdict.method, VerdictMethod.KA_SCAN)
        self.assertTrue(verdict.contains(0.3))

    def test_scaled_mean_is_not_member(self):
        a1, a2 = _pair(1)
        verdict = ka_membership(1.01 * ka_mean(a1, a2, 0.3), a1, a2)
        self.assertFalse(verdict.member)
        self.assertLess(verdict.best_margin, -1e-9)
        self.assertEqual(verdict.t_intervals, ())

    def test_endpoint_member(self):
        a1, a2 = _pair(2)
        verdict = ka_membership(a1, a1, a2)
        self.assertTrue(verdict.member)
        self.assertTrue(verdict.contains(1.0))

    def test_classical_means_are_maximal(self):
        c = ka_mean(P1, P2, 0.4)
        verdict = ka_membership(c, P1, P2)
        self.assertTrue(verdict.member)
        for lo, hi in verdict.t_intervals:
            self.assertGreater(lo, 0.4 - 1e-5)
            self.assertLess(hi, 0.4 + 1e-5)
        self.assertLess(loewner_margin(c, ka_mean(P1, P2, 0.6)), 0)

    def test_non_member_carries_witness(self):
        rng = np.random.default_rng(4)
        a1, a2 = random_density(rng, 2), random_density(rng, 2)
        verdict = ka_membership(1.5 * a1, a1, a2)
        self.assertFalse(verdict.member)
        self.assertEqual(verdict.method, VerdictMethod.KA_SCAN_WITNESSED)
        self.assertEqual(verdict.witness_n, 1)
        self.assertGreater(weak_violation(1.5 * a1, a1, a2, 1, verdict.witness_X), 1e-8)


class AmFeasibilityTests(SimpleTestCase):
    def test_member_itself(self):
        rng = np.random.default_rng(5)
        a1, a2 = random_density(rng, 2), random_density(rng, 2)
        for n in (1, 2):
            result = am_feasibility_quantum(a1, [a1, a2], n)
            self.assertTrue(result.feasible)
            assert_allclose(result.mu, [1.0, 0.0], atol=1e-6)

    def test_kubo_ando_mean_is_feasible(self):
        a1, a2 = _pair(6)
        c = ka_mean(a1, a2, 0.35)
        for n in (1, 2, 3):
            result = am_feasibility_quantum(c, [a1, a2], n)
            self.assertTrue(result.feasible)
            lo, hi = result.p_interval
            self.assertLessEqual(lo, 0.35)
            self.assertGreaterEqual(hi, 0.35)

    def test_commuting_instance_matches_linear_program(self):
        a1, a2 = np.diag([1 / 100, 10.0]), np.diag([10.0, 1 / 100])
        single = am_feasibility_quantum(np.eye(2), [a1, a2], 1)
        self.assertTrue(single.feasible)
        assert_allclose(single.mu, [0.5, 0.5], atol=1e-6)
        double = am_feasibility_quantum(np.eye(2), [a1, a2], 2)
        self.assertFalse(double.feasible)
        self.assertGreater(double.witness_gaps(np.eye(2), [a1, a2]).min(), 0)

    def test_larger_families_use_ascent(self):
        rng = np.random.default_rng(7)
        family = [np.diag(rng.uniform(1.0, 2.0, 2)) for _ in range(3)]
        self.assertTrue(am_feasibility_quantum(0.5 * np.eye(2), family, 1, iterations=200).feasible)
        result = am_feasibility_quantum(3.0 * np.eye(2), family, 1, iterations=200)
        self.assertFalse(result.feasible)
        self.assertGreater(result.witness_gaps(3.0 * np.eye(2), family).min(), 0)

    def test_objective_is_concave(self):
        rng = np.random.default_rng(8)
        family = [random_pd(rng, 2) for _ in range(3)]
        h = AmObjective(random_pd(rng, 2), family, 2)
        for _trial in range(50):
            mu, nu = random_probability(rng, 3), random_probability(rng, 3)
            self.assertGreaterEqual(h((mu + nu) / 2), (h(mu) + h(nu)) / 2 - 1e-10)

    def test_simplex_projection(self):
        assert_allclose(unit_simplex_projection(np.array([0.5, 0.8])), [0.35, 0.65])
        assert_allclose(unit_simplex_projection(np.array([0.2, 0.3, 0.5])), [0.2, 0.3, 0.5])
        assert_allclose(unit_simplex_projection(np.array([-1.0, 3.0])), [0.0, 1.0])

    def test_cap(self):
        with use_numerics(dim_cap=16):
            with self.assertRaises(ResourceCapError):
                am_feasibility_quantum(np.eye(2), [np.eye(2), np.eye(2)], 5)


class OracleTests(SimpleTestCase):
    def test_weak_bound_holds_for_means(self):
        a1, a2 = _pair(9)
        for n in (1, 2):
            result = weak_geometric_oracle(ka_mean(a1, a2, 0.6), a1, a2, 0.6, n, trials=100)
            self.assertTrue(result.holds)
            self.assertEqual(result.method, VerdictMethod.ORACLE_EVIDENCE)

    def test_weak_bound_detects_bump(self):
        c = ka_mean(P1, P2, 0.5) + 1e-2 * np.diag([1.0, 0.0])
        result = weak_geometric_oracle(c, P1, P2, 0.5, 1, trials=20)
        self.assertFalse(result.holds)
        self.assertEqual(result.method, VerdictMethod.ORACLE_PROOF)

    def test_sup_bound(self):
        a1, a2 = _pair(10)
        self.assertTrue(sup_bound_oracle(a1, [a1, a2], 2, trials=50).holds)
        for n in (1, 2, 3):
            self.assertTrue(sup_bound_oracle(ka_mean(a1, a2, 0.25), [a1, a2], n, trials=50).holds)

    def test_sup_bound_trace_violation(self):
        rng = np.random.default_rng(11)
        a1, a2 = random_density(rng, 2), random_density(rng, 2)
        result = sup_bound_oracle(1.05 * a1, [a1, a2], 1, trials=10)
        self.assertFalse(result.holds)
        self.assertLessEqual(result.worst_margin, -0.025 + 1e-12)

    def test_commuting_means_pass(self):
        rng = np.random.default_rng(12)
        members = [np.diag(rng.uniform(0.1, 1.0, 2)) for _ in range(3)]
        samples = [random_probability(rng, 3) for _ in range(4)]
        for c in max_cr_commuting(members, samples):
            for n in (1, 2, 3):
                self.assertTrue(sup_bound_oracle(c, members, n, trials=30).holds)

    def test_verdicts_agree(self):
        for seed in range(5):
            rng = np.random.default_rng(100 + seed)
            a1, a2 = random_pd(rng, 2, floor=0.2), random_pd(rng, 2, floor=0.2)
            t = float(rng.uniform(0.1, 0.9))
            c = ka_mean(a1, a2, t)
            self.assertTrue(ka_membership(c, a1, a2).member)
            for n in (1, 2):
                self.assertTrue(am_feasibility_quantum(c, [a1, a2], n).feasible)
                self.assertTrue(weak_geometric_oracle(c, a1, a2, t, n, trials=30, rng=rng).holds)
                self.assertTrue(sup_bound_oracle(c, [a1, a2], n, trials=30, rng=rng).holds)

            bumped = c + 0.5 * np.eye(2)
            failed = not sup_bound_oracle(bumped, [a1, a2], 1, trials=30, rng=rng).holds
            if failed:
                self.assertFalse(ka_membership(bumped, a1, a2).member)
