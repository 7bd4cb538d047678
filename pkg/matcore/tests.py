from __future__ import annotations

import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from .conf import numerics, use_numerics
from .exceptions import DomainError, PreconditionError, ResourceCapError
from .extreal import ExtReal
from .linalg import (
    PsdMatrix,
    acc_part,
    direct_sum,
    eigh,
    joint_diagonalize,
    kron_power,
    lambda_min,
    mat_fn,
    partial_trace,
    projector_leq,
    psd_power,
    support_proj,
)
from .sampling import random_commuting_family, random_hermitian, random_pd, random_psd, random_unitary


class ExtRealTests(SimpleTestCase):
    def test_conventions(self):
        inf = ExtReal.inf()
        self.assertEqual(ExtReal(0) * inf, 0)
        self.assertEqual(inf * 0.0, 0)
        self.assertEqual(ExtReal.neg_inf().exp(), 0)
        self.assertTrue(inf.exp().is_pos_inf)
        self.assertTrue(ExtReal.log(0).is_neg_inf)
        self.assertEqual(ExtReal.pow(0, 0), 1)
        self.assertTrue(ExtReal.pow(0, -1).is_pos_inf)

    def test_undefined_sum(self):
        with self.assertRaises(DomainError):
            ExtReal.inf() + ExtReal.neg_inf()

    def test_ordering_and_json(self):
        self.assertLess(ExtReal(3.0), ExtReal.inf())
        self.assertGreater(ExtReal(-1.0), ExtReal.neg_inf())
        self.assertEqual(ExtReal.inf().to_json(), "+inf")
        self.assertEqual(ExtReal(1.5).to_json(), 1.5)


class SpectralTests(SimpleTestCase):
    def test_diagonal_input(self):
        decomposition = eigh(np.diag([3.0, 1.0]))
        assert_allclose(decomposition.eigenvalues, [1.0, 3.0])
        assert_allclose(np.abs(decomposition.eigenvectors), [[0, 1], [1, 0]], atol=1e-12)

    def test_rank_one_projector(self):
        decomposition = eigh(0.5 * np.ones((2, 2)))
        assert_allclose(decomposition.eigenvalues, [0.0, 1.0], atol=1e-12)
        assert_allclose(np.abs(decomposition.eigenvectors[:, 1]), [1 / math.sqrt(2)] * 2)

    def test_reconstruction_residual(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            h = random_hermitian(rng, int(rng.integers(1, 9)))
            decomposition = eigh(h)
            scale = max(1.0, np.linalg.norm(h))
            self.assertLessEqual(np.linalg.norm(decomposition.reconstruct() - h), 1e-10 * scale)
            u = decomposition.eigenvectors
            assert_allclose(u.conj().T @ u, np.eye(h.shape[0]), atol=1e-12)
            self.assertTrue(np.all(np.diff(decomposition.eigenvalues) >= 0))

    @settings(deadline=None, max_examples=50)
    @given(arrays(np.float64, (4, 4), elements=st.floats(-10, 10)))
    def test_reconstruction_property(self, raw):
        h = (raw + raw.T) / 2
        decomposition = eigh(h)
        self.assertLessEqual(
            np.linalg.norm(decomposition.reconstruct() - h),
            1e-10 * max(1.0, np.linalg.norm(h)),
        )


class FunctionalCalculusTests(SimpleTestCase):
    def test_examples(self):
        assert_allclose(mat_fn(np.diag([4.0, 9.0]), np.sqrt), np.diag([2.0, 3.0]), atol=1e-12)
        for t in (0.2, 0.5, 0.9):
            assert_allclose(mat_fn(np.diag([1.0, 0.0]), lambda x: x**t), np.diag([1.0, 0.0]), atol=1e-12)
        assert_allclose(mat_fn(np.diag([math.e, 1.0]), np.log), np.diag([1.0, 0.0]), atol=1e-12)

    def test_undefined_value(self):
        with self.assertRaises(DomainError):
            mat_fn(np.diag([1.0, 2.0]), lambda x: np.log(x - 1.5))

    def test_power_composition(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = random_pd(rng, 4)
            for s in (0.3, 0.5, 2.0):
                for t in (0.3, 0.5, 2.0):
                    composed = mat_fn(mat_fn(a, lambda x: x**s), lambda x: x**t)
                    assert_allclose(composed, mat_fn(a, lambda x: x ** (s * t)), atol=1e-9)

    def test_zero_power_is_support(self):
        a = np.diag([2.0, 0.0, 5.0])
        assert_allclose(psd_power(a, 0), np.diag([1.0, 0.0, 1.0]))
        assert_allclose(psd_power(a, -1), np.diag([0.5, 0.0, 0.2]))


class SupportTests(SimpleTestCase):
    def test_examples(self):
        assert_allclose(support_proj(np.diag([2.0, 0.0])), np.diag([1.0, 0.0]))
        psi = np.array([1.0, 1.0]) / math.sqrt(2)
        assert_allclose(support_proj(np.outer(psi, psi)), np.outer(psi, psi), atol=1e-12)
        assert_allclose(support_proj(np.diag([1.0, 3.0])), np.eye(2))

    def test_support_acts_as_identity(self):
        rng = np.random.default_rng(5)
        for rank in (1, 2, 3):
            a = random_psd(rng, 4, rank)
            assert_allclose(support_proj(a) @ a, a, atol=1e-9)


class AbsolutelyContinuousPartTests(SimpleTestCase):
    def test_examples(self):
        a = np.array([[2.0, 1.0], [1.0, 3.0]])
        assert_allclose(acc_part(a, np.eye(2)), a, atol=1e-12)
        psi = np.array([1.0, 1.0]) / math.sqrt(2)
        assert_allclose(acc_part(np.outer(psi, psi), np.diag([1.0, 0.0])), np.zeros((2, 2)), atol=1e-12)
        assert_allclose(acc_part(np.diag([1.0, 2.0]), np.diag([3.0, 0.0])), np.diag([1.0, 0.0]), atol=1e-12)

    def test_brute_force_rank_one(self):
        # max{X : X <= A, supp X <= span(e1)} is c e1e1* with c = 1/(A^{-1})_{11}.
        a = np.array([[2.0, 1.0], [1.0, 3.0]])
        c = 1 / np.linalg.inv(a)[0, 0]
        assert_allclose(acc_part(a, np.diag([1.0, 0.0])), np.diag([c, 0.0]), atol=1e-12)

    def test_dominated_and_supported(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            a = random_psd(rng, 4, int(rng.integers(1, 5)))
            b = random_psd(rng, 4, int(rng.integers(1, 4)))
            acc = acc_part(a, b)
            self.assertGreaterEqual(lambda_min(a - acc), -1e-9)
            self.assertTrue(projector_leq(support_proj(acc), support_proj(b), tol=1e-8))

    def test_full_support_keeps_generic_complex_input(self):
        rng = np.random.default_rng(1)
        a, b = random_pd(rng, 2), random_pd(rng, 2)
        assert_allclose(acc_part(b, a), b, atol=1e-12)
        assert_allclose(acc_part(a, b), a, atol=1e-12)

    def test_small_operand_is_not_rounded_away(self):
        a = 1e-12 * np.array([[2.0, 1.0], [1.0, 3.0]])
        c = 1e-12 / np.linalg.inv(a / 1e-12)[0, 0]
        assert_allclose(acc_part(a, np.diag([1.0, 0.0])) / 1e-12, np.diag([c / 1e-12, 0.0]), atol=1e-9)


class TensorTests(SimpleTestCase):
    def test_kron_power(self):
        power = kron_power(np.diag([1.0, 2.0]), 3)
        self.assertEqual(power.shape, (8, 8))
        self.assertAlmostEqual(float(np.real(power).max()), 8.0)

    def test_cap(self):
        with use_numerics(dim_cap=8):
            self.assertEqual(numerics().dim_cap, 8)
            with self.assertRaises(ResourceCapError):
                kron_power(np.eye(2), 4)
        self.assertEqual(numerics().dim_cap, 4096)

    def test_direct_sum_and_partial_trace(self):
        assert_allclose(direct_sum([np.diag([1.0]), np.diag([2.0])]), np.diag([1.0, 2.0]))
        rng = np.random.default_rng(1)
        a, b = random_psd(rng, 2), random_psd(rng, 3)
        joint = np.kron(a, b)
        assert_allclose(partial_trace(joint, [2, 3], 2), a * np.trace(b), atol=1e-12)
        assert_allclose(partial_trace(joint, [2, 3], 1), b * np.trace(a), atol=1e-12)
        assert_allclose(partial_trace(joint, [2, 3], [1, 2]), [[np.trace(joint)]], atol=1e-12)


class PsdMatrixTests(SimpleTestCase):
    def test_symmetrizes(self):
        m = PsdMatrix(np.array([[1.0, 0.2 + 1e-14], [0.2, 1.0]]))
        assert_allclose(m.data, m.data.conj().T, atol=0)
        self.assertEqual(m.dim, 2)

    def test_rejects_indefinite(self):
        with self.assertRaises(DomainError):
            PsdMatrix(np.diag([1.0, -0.5]))

    def test_from_entries(self):
        m = PsdMatrix.from_entries(2, [2, 0, 0, 1], [0, 0.5, -0.5, 0])
        assert_allclose(m.data, [[2, 0.5j], [-0.5j, 1]])


class JointDiagonalizationTests(SimpleTestCase):
    def test_recovers_members(self):
        rng = np.random.default_rng(2)
        family = random_commuting_family(rng, 4, 3)
        joint = joint_diagonalize(family)
        for i, member in enumerate(family):
            assert_allclose(joint.member(i), member, atol=1e-9)

    def test_rejects_non_commuting(self):
        rng = np.random.default_rng(4)
        u = random_unitary(rng, 3)
        with self.assertRaises(PreconditionError):
            joint_diagonalize([np.diag([1.0, 2.0, 3.0]), u @ np.diag([1.0, 2.0, 3.0]) @ u.conj().T])
