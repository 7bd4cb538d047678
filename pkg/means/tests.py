from __future__ import annotations

import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from matcore.exceptions import ConvergenceError, DomainError
from matcore.extreal import ExtReal
from matcore.linalg import direct_sum, lambda_min, partial_trace
from matcore.sampling import random_commuting_family, random_density, random_pd, random_psd

from .functions import ScalarFn, log_fn, parse_scalar_fn, power, xlogx
from .utils import (
    AltMeanKind,
    KaCurve,
    SupportCondition,
    WeightedFamily,
    alt_mean,
    commuting_gm,
    ka_mean,
    log_euclid_support_limit,
    perspective,
    support_conditions,
)

PSI = np.array([1.0, 1.0]) / math.sqrt(2)
PSI_PROJ = np.outer(PSI, PSI)


class ScalarFnTests(SimpleTestCase):
    def test_presets(self):
        self.assertEqual(parse_scalar_fn("sqrt").label, "pow:0.5")
        self.assertTrue(parse_scalar_fn("log").limit_at_zero.is_neg_inf)
        self.assertTrue(parse_scalar_fn("xlogx").transpose_limit_at_zero.is_pos_inf)
        assert_allclose(parse_scalar_fn("pow:2")(np.array([3.0])), [9.0])
        with self.assertRaises(DomainError):
            parse_scalar_fn("cosh")

    def test_transpose_swaps_limits(self):
        f = power(0.3).negated()
        tilde = f.transpose()
        self.assertEqual(tilde.limit_at_zero, f.transpose_limit_at_zero)
        assert_allclose(tilde(np.array([2.0])), 2.0 * f(np.array([0.5])))

    def test_slow_limit_is_reported(self):
        with self.assertLogs("means.functions", level="WARNING"):
            power(0.1).validate()
        xlogx().validate()


class PerspectiveTests(SimpleTestCase):
    def test_scalar_cases(self):
        a, b = np.diag([1.0, 4.0, 0.5]), np.diag([2.0, 3.0, 5.0])
        assert_allclose(perspective(power(0.3), a, b), np.diag(np.diag(a) ** 0.3 * np.diag(b) ** 0.7))
        assert_allclose(perspective(power(0.5), np.diag([1.0, 4.0]), np.diag([4.0, 1.0])), np.diag([2.0, 2.0]))

    def test_linear_and_constant(self):
        a, b = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
        one = ScalarFn(np.ones_like, ExtReal(1.0), ExtReal(0.0), "one")
        assert_allclose(perspective(power(1.0), a, b), a, atol=1e-9)
        assert_allclose(perspective(one, a, b), b, atol=1e-9)

    def test_support_condition_detection(self):
        a, b = np.diag([1.0, 0.0]), np.eye(2)
        found = support_conditions(power(0.5), a, b)
        self.assertIn(SupportCondition.FINITE_LIMITS, found)
        self.assertIn(SupportCondition.LEFT_CONTAINED, found)
        self.assertNotIn(SupportCondition.EQUAL_SUPPORTS, found)
        self.assertEqual(support_conditions(log_fn(), a, b), [])

    def test_divergent_limit(self):
        with self.assertRaises(ConvergenceError) as ctx:
            perspective(log_fn(), np.diag([1.0, 0.0]), np.eye(2))
        self.assertEqual(len(ctx.exception.details["iterates"]), 2)

    def test_structural_properties(self):
        rng = np.random.default_rng(8)
        f = xlogx()
        for _ in range(10):
            a1, b1, a2, b2 = (random_pd(rng, 3) for _ in range(4))
            c = random_pd(rng, 2)
            assert_allclose(
                perspective(f, direct_sum([a1, a2]), direct_sum([b1, b2])),
                direct_sum([perspective(f, a1, b1), perspective(f, a2, b2)]),
                atol=1e-9,
            )
            assert_allclose(perspective(f, 2.5 * a1, 2.5 * b1), 2.5 * perspective(f, a1, b1), atol=1e-9)
            assert_allclose(
                perspective(f, np.kron(a1, c), np.kron(b1, c)),
                np.kron(perspective(f, a1, b1), c),
                atol=1e-8,
            )
            lam = 0.35
            mixed = perspective(f, lam * a1 + (1 - lam) * a2, lam * b1 + (1 - lam) * b2)
            bound = lam * perspective(f, a1, b1) + (1 - lam) * perspective(f, a2, b2)
            self.assertGreaterEqual(lambda_min(bound - mixed), -1e-9)


class KaMeanTests(SimpleTestCase):
    def test_endpoints(self):
        rng = np.random.default_rng(0)
        a, b = random_psd(rng, 3), random_psd(rng, 3, 1)
        assert_allclose(ka_mean(a, b, 0.0), b)
        assert_allclose(ka_mean(a, b, 1.0), a)

    def test_singular_closed_form(self):
        for a_, b_ in ((1.0, 4.0), (2.0, 0.5)):
            for t in (0.2, 0.5, 0.8):
                expected = ((1 / a_ + 1 / b_) / 2) ** (t - 1) * PSI_PROJ
                assert_allclose(ka_mean(PSI_PROJ, np.diag([a_, b_]), t), expected, atol=1e-10)

    def test_rank_one_lines(self):
        assert_allclose(ka_mean(np.diag([1.0, 0.0]), PSI_PROJ, 0.5), np.zeros((2, 2)), atol=1e-12)

    def test_commuting(self):
        assert_allclose(ka_mean(np.diag([1.0, 4.0]), np.diag([9.0, 1.0]), 0.5), np.diag([3.0, 2.0]), atol=1e-12)
        rng = np.random.default_rng(1)
        for _ in range(100):
            d = int(rng.integers(1, 7))
            a, b = rng.uniform(0.05, 3.0, d), rng.uniform(0.05, 3.0, d)
            t = float(rng.uniform())
            assert_allclose(ka_mean(np.diag(a), np.diag(b), t), np.diag(a**t * b ** (1 - t)), atol=1e-10)

    def test_matches_perspective(self):
        rng = np.random.default_rng(2)
        a, b = random_pd(rng, 3), random_pd(rng, 3)
        assert_allclose(ka_mean(a, b, 0.3), perspective(power(0.3), a, b), atol=1e-9)

    def test_support_is_meet(self):
        a = np.diag([1.0, 1.0, 0.0])
        b = np.diag([0.0, 2.0, 3.0])
        assert_allclose(ka_mean(a, b, 0.5), np.diag([0.0, math.sqrt(2), 0.0]), atol=1e-10)

    def test_batch_matches_pointwise(self):
        rng = np.random.default_rng(3)
        curve = KaCurve(random_psd(rng, 3, 2), random_pd(rng, 3))
        ts = [0.0, 0.1, 0.5, 0.93, 1.0]
        for t, mean in zip(ts, curve.batch(ts)):
            assert_allclose(mean, curve(t), atol=1e-10)

    def test_generic_complex_pairs(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a, b = random_pd(rng, 2), random_pd(rng, 2)
            mean = ka_mean(a, b, 0.5)
            # X = B # A solves X B^{-1} X = A.
            assert_allclose(mean @ np.linalg.inv(b) @ mean, a, atol=1e-9)

    def test_batch_on_full_rank_states(self):
        rng = np.random.default_rng(6)
        a, b = random_density(rng, 3), random_density(rng, 3)
        ts = np.linspace(0.0, 1.0, 7)
        det_a, det_b = np.linalg.det(a).real, np.linalg.det(b).real
        for t, mean in zip(ts, KaCurve(a, b).batch(ts)):
            self.assertAlmostEqual(np.linalg.det(mean).real / (det_a**t * det_b ** (1 - t)), 1.0, delta=1e-7)

    def test_invariants(self):
        rng = np.random.default_rng(4)
        for _ in range(40):
            a, b, x = random_pd(rng, 4), random_pd(rng, 4), random_pd(rng, 4)
            a2, b2 = random_pd(rng, 2), random_pd(rng, 2)
            t = float(rng.uniform(0.05, 0.95))
            mean = ka_mean(a, b, t)
            # arithmetic-geometric mean inequality
            self.assertGreaterEqual(lambda_min(t * a + (1 - t) * b - mean), -1e-9)
            # transformer identity
            assert_allclose(x @ mean @ x, ka_mean(x @ a @ x, x @ b @ x, t), atol=1e-7)
            # tensor multiplicativity
            assert_allclose(
                ka_mean(np.kron(a, a2), np.kron(b, b2), t),
                np.kron(mean, ka_mean(a2, b2, t)),
                atol=1e-8,
            )
            # monotonicity under the partial trace
            reduced = ka_mean(partial_trace(a, [2, 2], 2), partial_trace(b, [2, 2], 2), t)
            self.assertGreaterEqual(lambda_min(reduced - partial_trace(mean, [2, 2], 2)), -1e-9)
            # determinant identity
            det = np.linalg.det(mean).real
            expected = np.linalg.det(a).real ** t * np.linalg.det(b).real ** (1 - t)
            self.assertAlmostEqual(det / expected, 1.0, delta=1e-8)

    @settings(deadline=None, max_examples=40)
    @given(st.floats(0.01, 0.99), st.integers(0, 10_000))
    def test_am_gm_on_singular_pairs(self, t, seed):
        rng = np.random.default_rng(seed)
        a, b = random_psd(rng, 3, 2), random_psd(rng, 3, 2)
        self.assertGreaterEqual(lambda_min(t * a + (1 - t) * b - ka_mean(a, b, t)), -1e-9)


class AltMeanTests(SimpleTestCase):
    def test_commuting_all_kinds(self):
        a, b = np.diag([1.0, 2.0, 5.0]), np.diag([3.0, 0.5, 1.0])
        expected = np.diag(np.diag(a) ** 0.4 * np.diag(b) ** 0.6)
        for kind in AltMeanKind:
            assert_allclose(alt_mean(kind, a, b, 0.4, 2.0), expected, atol=1e-10)

    def test_ghat_coefficient(self):
        a_, b_, t = 1.0, 4.0, 0.5
        ka_coeff = ((1 / a_ + 1 / b_) / 2) ** (t - 1)
        self.assertAlmostEqual(ka_coeff, math.sqrt(8 / 5), places=12)
        for z in (2.0, 4.0):
            p = 1 / z
            expected = ((a_**-p + b_**-p) / 2) ** ((t - 1) / p)
            mean = alt_mean(AltMeanKind.GHAT, PSI_PROJ, np.diag([a_, b_]), t, z)
            assert_allclose(mean, expected * PSI_PROJ, atol=1e-10)
            self.assertGreater(expected - ka_coeff, 1e-4)
        limit = alt_mean(AltMeanKind.GHAT, PSI_PROJ, np.diag([a_, b_]), t, math.inf)
        assert_allclose(limit, math.sqrt(a_ * b_) ** (1 - t) * PSI_PROJ, atol=1e-10)

    def test_sandwich_means_exceed_ka(self):
        b = np.diag([1.0, 4.0])
        ka = ka_mean(PSI_PROJ, b, 0.5)
        for kind in (AltMeanKind.G, AltMeanKind.GTILDE):
            self.assertLess(lambda_min(ka - alt_mean(kind, PSI_PROJ, b, 0.5, 1.0)), -1e-6)

    def test_inverse_invariance(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            a, b = random_pd(rng, 3), random_pd(rng, 3)
            for kind in AltMeanKind:
                mean = alt_mean(kind, np.linalg.inv(a), np.linalg.inv(b), 0.3, 2.0)
                assert_allclose(mean, np.linalg.inv(alt_mean(kind, a, b, 0.3, 2.0)), atol=1e-7)

    def test_log_euclid_needs_definite(self):
        with self.assertRaises(DomainError):
            alt_mean(AltMeanKind.LOG_EUCLID, PSI_PROJ, np.eye(2), 0.5)
        with self.assertRaises(DomainError):
            alt_mean(AltMeanKind.G, np.eye(2), np.eye(2), 0.5, math.inf)

    def test_regularized_log_euclid_approaches_limit(self):
        b = np.diag([1.0, 4.0])
        limit = log_euclid_support_limit(PSI_PROJ, b, 0.5)
        gaps = [
            np.linalg.norm(alt_mean(AltMeanKind.LOG_EUCLID, PSI_PROJ + eps * np.eye(2), b, 0.5) - limit)
            for eps in (1e-2, 1e-4, 1e-8)
        ]
        self.assertLess(gaps[-1], gaps[0])

    def test_support_limit_on_definite_pairs(self):
        rng = np.random.default_rng(9)
        a, b = random_pd(rng, 3), random_pd(rng, 3)
        assert_allclose(
            log_euclid_support_limit(a, b, 0.4),
            alt_mean(AltMeanKind.LOG_EUCLID, a, b, 0.4),
            atol=1e-9,
        )


class CommutingGeometricMeanTests(SimpleTestCase):
    def test_examples(self):
        single = np.diag([0.2, 0.8])
        assert_allclose(commuting_gm(WeightedFamily((single,), np.array([1.0]))), single)
        family = WeightedFamily((np.diag([0.25, 0.75]), np.diag([0.75, 0.25])), np.array([0.5, 0.5]))
        assert_allclose(commuting_gm(family), np.diag([math.sqrt(3) / 4] * 2), atol=1e-12)
        zero = WeightedFamily((np.diag([0.0, 1.0]), np.diag([2.0, 3.0])), np.array([0.3, 0.7]))
        self.assertEqual(commuting_gm(zero)[0, 0], 0)
        unused = WeightedFamily((np.diag([0.0, 1.0]), np.diag([2.0, 3.0])), np.array([0.0, 1.0]))
        assert_allclose(commuting_gm(unused), np.diag([2.0, 3.0]))

    def test_agrees_with_ka_mean(self):
        rng = np.random.default_rng(6)
        a, b = random_commuting_family(rng, 4, 2)
        family = WeightedFamily((a, b), np.array([0.3, 0.7]))
        assert_allclose(commuting_gm(family), ka_mean(a, b, 0.3), atol=1e-9)

    def test_rejects_bad_weights(self):
        with self.assertRaises(DomainError):
            WeightedFamily((np.eye(2), np.eye(2)), np.array([0.7, 0.7]))
