from __future__ import annotations

import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from matcore.conf import use_numerics
from matcore.exceptions import DomainError, PreconditionError
from matcore.sampling import random_density, random_pd, random_psd, random_unitary

from .atoms import ClassicalPair
from .hoeffding import hoeffding, hoeffding_star
from .profiles import MatrixProfile
from .utils import (
    max_relative_entropy,
    max_relative_entropy_quantum,
    petz_renyi,
    relative_entropy,
    sandwiched_renyi,
)

RHO = np.diag([0.5, 0.5])
SIGMA = np.diag([0.25, 0.75])
LOG_2_SQRT3 = math.log(2 / math.sqrt(3))


class RenyiTests(SimpleTestCase):
    def test_equal_arguments(self):
        rng = np.random.default_rng(0)
        rho = random_density(rng, 3)
        self.assertAlmostEqual(float(petz_renyi(0.4, rho, rho)), 0.0, delta=1e-12)
        self.assertAlmostEqual(float(sandwiched_renyi(3.0, rho, rho)), 0.0, delta=1e-10)

    def test_limits_at_one(self):
        self.assertAlmostEqual(float(petz_renyi(1 - 1e-5, RHO, SIGMA)), 0.143841, delta=1e-5)
        self.assertAlmostEqual(float(sandwiched_renyi(1 + 1e-5, RHO, SIGMA)), 0.143841, delta=1e-5)

    def test_closed_form(self):
        self.assertAlmostEqual(float(sandwiched_renyi(2.0, RHO, SIGMA)), math.log(4 / 3), delta=1e-12)

    def test_support_failures(self):
        self.assertTrue(petz_renyi(0.5, np.diag([1.0, 0.0]), np.diag([0.0, 1.0])).is_infinite)
        self.assertTrue(sandwiched_renyi(2.0, RHO, np.diag([1.0, 0.0])).is_infinite)
        self.assertFalse(petz_renyi(0.5, RHO, np.diag([1.0, 0.0])).is_infinite)

    def test_parameter_ranges(self):
        with self.assertRaises(DomainError):
            petz_renyi(1.5, RHO, SIGMA)
        with self.assertRaises(DomainError):
            sandwiched_renyi(0.5, RHO, SIGMA)
        with self.assertRaises(DomainError):
            petz_renyi(0.5, np.zeros((2, 2)), SIGMA)

    def test_monotone_in_alpha(self):
        p, q = np.diag([0.5, 0.3, 0.2]), np.diag([0.2, 0.3, 0.5])
        values = [float(petz_renyi(a, p, q)) for a in np.linspace(0.05, 0.95, 19)]
        values += [float(sandwiched_renyi(a, p, q)) for a in np.linspace(1.05, 9.0, 19)]
        self.assertTrue(np.all(np.diff(values) > 0))
        d = float(relative_entropy(p, q))
        d_max = float(max_relative_entropy(p, q).value)
        for alpha in (0.25, 0.5):
            self.assertLess(float(petz_renyi(alpha, p, q)), d)
        for alpha in (2.0, 8.0):
            self.assertTrue(d < float(sandwiched_renyi(alpha, p, q)) < d_max)

    def test_anti_monotone_in_second_argument(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a, b = random_density(rng, 3), random_pd(rng, 3)
            larger = b + random_psd(rng, 3, 1)
            self.assertGreaterEqual(float(petz_renyi(0.5, a, b)) - float(petz_renyi(0.5, a, larger)), -1e-9)
            self.assertGreaterEqual(
                float(sandwiched_renyi(2.0, a, b)) - float(sandwiched_renyi(2.0, a, larger)), -1e-9
            )


class RelativeEntropyTests(SimpleTestCase):
    def test_commuting_value(self):
        self.assertAlmostEqual(float(relative_entropy(RHO, SIGMA)), LOG_2_SQRT3, delta=1e-12)
        self.assertTrue(relative_entropy(RHO, np.diag([1.0, 0.0])).is_infinite)

    def test_between_renyi_orders(self):
        rng = np.random.default_rng(2)
        a, b = random_density(rng, 3), random_density(rng, 3)
        d = float(relative_entropy(a, b))
        self.assertLessEqual(float(petz_renyi(0.9, a, b)), d + 1e-12)
        self.assertGreaterEqual(float(sandwiched_renyi(1.1, a, b)), d - 1e-12)
        self.assertAlmostEqual(float(sandwiched_renyi(1 + 1e-6, a, b)), d, delta=1e-4)


class MaxRelativeEntropyTests(SimpleTestCase):
    def test_equal_states(self):
        result = max_relative_entropy(SIGMA, SIGMA)
        self.assertAlmostEqual(float(result.value), 0.0, delta=1e-15)
        self.assertEqual(result.argmax, (0, 1))
        self.assertAlmostEqual(float(result.r_inf), 0.0, delta=1e-15)

    def test_single_copy(self):
        value, argmax, r_inf = max_relative_entropy(RHO, SIGMA)
        self.assertAlmostEqual(float(value), math.log(2), delta=1e-15)
        self.assertEqual(argmax, (0,))
        self.assertAlmostEqual(float(r_inf), math.log(4), delta=1e-15)

    def test_two_copy_mixture(self):
        s1, s2 = np.diag([0.25, 0.75]), np.diag([0.75, 0.25])
        mixture = (np.kron(s1, s1) + np.kron(s2, s2)) / 2
        result = max_relative_entropy(np.kron(RHO, RHO), mixture)
        self.assertAlmostEqual(float(result.value), 2 * LOG_2_SQRT3, delta=1e-12)
        self.assertEqual(result.argmax, (1, 2))
        expected = 2 * math.log(4 / math.sqrt(3)) - math.log(2)
        self.assertAlmostEqual(float(result.r_inf), expected, delta=1e-12)

        atoms = ClassicalPair.tensor_mixture([0.5, 0.5], [[0.25, 0.75], [0.75, 0.25]], [0.5, 0.5], 2)
        self.assertAlmostEqual(float(atoms.max_relative_entropy().r_inf), expected, delta=1e-12)

    def test_unsupported(self):
        result = max_relative_entropy(RHO, np.diag([1.0, 0.0]))
        self.assertTrue(result.value.is_infinite)
        self.assertTrue(result.r_inf.is_pos_inf)

    def test_requires_commuting(self):
        u = random_unitary(np.random.default_rng(3), 2)
        with self.assertRaises(PreconditionError):
            max_relative_entropy(SIGMA, u @ np.diag([0.1, 0.9]) @ u.conj().T)

    def test_quantum_version_matches(self):
        self.assertAlmostEqual(float(max_relative_entropy_quantum(RHO, SIGMA)), math.log(2), delta=1e-12)


class ClassicalPairTests(SimpleTestCase):
    def test_tensor_power_is_additive(self):
        p, q = [0.6, 0.4], [0.3, 0.7]
        single = ClassicalPair.from_vectors(p, q)
        triple = ClassicalPair.tensor_power(p, q, 3)
        self.assertAlmostEqual(
            float(triple.relative_entropy().value), 3 * float(single.relative_entropy().value), delta=1e-12
        )
        for alpha in (0.3, 2.5):
            self.assertAlmostEqual(triple.log_q_alpha(alpha), 3 * single.log_q_alpha(alpha), delta=1e-12)
        self.assertAlmostEqual(triple.log_trace_a(), 0.0, delta=1e-12)

    def test_matches_matrix_profile(self):
        p, q = [0.5, 0.3, 0.2], [0.2, 0.3, 0.5]
        atoms = ClassicalPair.from_vectors(p, q)
        matrices = MatrixProfile(np.diag(p), np.diag(q))
        for alpha in (0.2, 0.7):
            self.assertAlmostEqual(atoms.petz_log_q(alpha), matrices.petz_log_q(alpha), delta=1e-12)
        self.assertAlmostEqual(atoms.sandwiched_log_q(3.0), matrices.sandwiched_log_q(3.0), delta=1e-12)
        self.assertAlmostEqual(atoms.d_max(), matrices.d_max(), delta=1e-12)


class HoeffdingTests(SimpleTestCase):
    def test_identical_states(self):
        rng = np.random.default_rng(4)
        rho = random_density(rng, 3)
        star = hoeffding_star(0.4, rho, rho)
        self.assertAlmostEqual(float(star), 0.4, delta=1e-9)
        self.assertTrue(star.maximizer_is_infinite)
        self.assertAlmostEqual(float(hoeffding(0.4, rho, rho)), 0.0, delta=1e-9)

    def test_constant_divergence_state(self):
        for k in (1, 3, 6):
            atoms = ClassicalPair.tensor_power([0.5, 0.5], [math.sqrt(3) / 4] * 2, k)
            r = k * LOG_2_SQRT3 + 0.3
            result = hoeffding_star(r, atoms)
            self.assertAlmostEqual(float(result), r - k * LOG_2_SQRT3, delta=1e-12)
            self.assertTrue(result.maximizer_is_infinite)
        matrix = hoeffding_star(0.5, RHO, np.diag([math.sqrt(3) / 4] * 2))
        self.assertAlmostEqual(float(matrix), 0.5 - LOG_2_SQRT3, delta=1e-12)

    def test_strict_bracket(self):
        r = 0.5
        d, d_max = LOG_2_SQRT3, math.log(2)
        result = hoeffding_star(r, RHO, SIGMA)
        self.assertGreater(float(result) - (r - d_max), 1e-6)
        self.assertGreater((r - d) - float(result), 1e-6)
        self.assertFalse(result.at_boundary)
        self.assertTrue(1.0 < result.maximizer_alpha < math.inf)
        atoms = hoeffding_star(r, ClassicalPair.from_vectors([0.5, 0.5], [0.25, 0.75]))
        self.assertAlmostEqual(float(atoms), float(result), delta=1e-9)

    def test_direct_exponent_regimes(self):
        self.assertTrue(hoeffding(1.0, np.diag([1.0, 0.0]), np.diag([0.0, 1.0])).value.is_pos_inf)
        below = hoeffding(0.5, np.diag([1.0, 0.0]), np.diag([0.5, 0.5]))
        self.assertTrue(below.value.is_pos_inf)
        above = hoeffding(1.0, np.diag([1.0, 0.0]), np.diag([0.5, 0.5]))
        self.assertTrue(above.value.is_finite)
        inside = hoeffding(0.05, RHO, SIGMA)
        self.assertTrue(0.0 < float(inside) < math.inf)

    def test_zero_arguments_take_limits(self):
        zero = np.zeros((2, 2))
        self.assertTrue(hoeffding(0.3, zero, SIGMA).value.is_pos_inf)
        self.assertTrue(hoeffding(0.3, RHO, zero).value.is_pos_inf)
        self.assertTrue(hoeffding_star(0.3, zero, SIGMA).value.is_pos_inf)
        self.assertTrue(hoeffding_star(0.3, RHO, zero).value.is_neg_inf)

    def test_orthogonal_pure_states(self):
        rng = np.random.default_rng(8)
        u = random_unitary(rng, 2)
        psi, phi = np.outer(u[:, 0], u[:, 0].conj()), np.outer(u[:, 1], u[:, 1].conj())
        self.assertTrue(hoeffding(0.2, psi, phi).value.is_pos_inf)
        self.assertTrue(hoeffding_star(0.2, psi, phi).value.is_neg_inf)

    @settings(deadline=None, max_examples=30)
    @given(st.floats(0.01, 0.99), st.floats(-0.5, 2.0))
    def test_dominates_probed_objective(self, alpha, r):
        profile = MatrixProfile(RHO, SIGMA)
        direct = hoeffding(r, profile)
        objective = ((alpha - 1) / alpha) * r - profile.petz_log_q(alpha) / alpha
        self.assertGreaterEqual(float(direct), objective - 1e-12)
        star = hoeffding_star(r, profile)
        u = alpha
        objective_star = u * r - (1 - u) * profile.sandwiched_log_q(1 / (1 - u))
        self.assertGreaterEqual(float(star), objective_star - 1e-12)


class MatrixProfileTests(SimpleTestCase):
    def test_support_inclusion_follows_zero_tolerance(self):
        v = np.array([1.0, 1e-4]) / math.hypot(1.0, 1e-4)
        a, b = np.diag([1.0, 0.0]), np.outer(v, v)
        self.assertFalse(MatrixProfile(a, b).supported)
        with use_numerics(eig_zero_tol=1e-6):
            self.assertTrue(MatrixProfile(a, b).supported)

    def test_divergences_reject_zero_arguments(self):
        with self.assertRaises(DomainError):
            sandwiched_renyi(2.0, RHO, np.zeros((2, 2)))
        self.assertTrue(MatrixProfile(np.zeros((2, 2)), SIGMA).a_zero)
