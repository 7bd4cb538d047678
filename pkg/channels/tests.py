from __future__ import annotations

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from matcore.conf import use_numerics
from matcore.exceptions import DomainError, ResourceCapError
from matcore.sampling import random_density, random_pd, random_unitary
from means.functions import power
from means.utils import ka_mean

from .maps import (
    KrausSet,
    apply,
    choi_from_kraus,
    choi_in_basis,
    completely_depolarizing,
    compose,
    depolarizing,
    from_choi_in_basis,
    identity_channel,
    kraus_from_choi,
    random_channel,
    replacer,
    tensor,
    unitary_channel,
)
from .utils import channel_ka_mean, cp_leq, discrimination_equivalence_check, superop_perspective


def _kraus_apply(ops, rho):
    return sum(k @ rho @ k.conj().T for k in ops)


class ChoiTests(SimpleTestCase):
    def test_identity_channel(self):
        psi = np.eye(2).reshape(-1)
        assert_allclose(identity_channel(2).choi, np.outer(psi, psi))
        self.assertTrue(identity_channel(2).trace_preserving)

    def test_completely_depolarizing(self):
        cp = completely_depolarizing(2, 3)
        assert_allclose(cp.choi, np.eye(6) / 3)
        self.assertTrue(cp.trace_preserving)
        assert_allclose(cp(np.diag([0.3, 0.7])), np.eye(3) / 3, atol=1e-14)

    def test_replacer(self):
        a = np.diag([0.2, 0.5, 0.3])
        cp = replacer(a, 2)
        assert_allclose(cp.choi, np.kron(np.eye(2), a))
        assert_allclose(cp(np.array([[0.4, 0.1], [0.1, 0.6]])), a, atol=1e-14)

    def test_apply_matches_kraus(self):
        rng = np.random.default_rng(0)
        ops = [rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2)) for _ in range(3)]
        cp = choi_from_kraus(ops)
        rho = random_density(rng, 2)
        assert_allclose(apply(cp, rho), _kraus_apply(ops, rho), atol=1e-12)
        assert_allclose(apply(choi_from_kraus(kraus_from_choi(cp)), rho), _kraus_apply(ops, rho), atol=1e-12)

    def test_random_channel_is_trace_preserving(self):
        rng = np.random.default_rng(1)
        cp = random_channel(rng, 2, 3, 2)
        self.assertTrue(cp.trace_preserving)
        self.assertTrue(kraus_from_choi(cp).is_complete(1e-9))

    def test_compose_and_tensor_match_kraus(self):
        rng = np.random.default_rng(2)
        e, f = random_channel(rng, 2, 3), random_channel(rng, 3, 2)
        ek, fk = kraus_from_choi(e).operators, kraus_from_choi(f).operators
        rho = random_density(rng, 2)
        assert_allclose(compose(f, e)(rho), _kraus_apply([b @ a for b in fk for a in ek], rho), atol=1e-12)

        g = random_channel(rng, 2, 2)
        gk = kraus_from_choi(g).operators
        joint = random_density(rng, 4)
        expected = _kraus_apply([np.kron(a, c) for a in ek for c in gk], joint)
        assert_allclose(tensor(e, g)(joint), expected, atol=1e-12)

    def test_dimension_errors(self):
        with self.assertRaises(DomainError):
            compose(identity_channel(2), identity_channel(3))
        with self.assertRaises(DomainError):
            apply(identity_channel(2), np.eye(3))
        with self.assertRaises(DomainError):
            KrausSet((np.eye(2), np.eye(3)))
        with self.assertRaises(DomainError):
            depolarizing(2, 1.5)


class CpOrderTests(SimpleTestCase):
    def test_scaled_and_equal(self):
        m = random_channel(np.random.default_rng(3), 2, 2)
        self.assertTrue(cp_leq(m.scaled(0.5), m)[0])
        holds, margin = cp_leq(m, m)
        self.assertTrue(holds)
        self.assertAlmostEqual(margin, 0.0, delta=1e-12)

    def test_depolarizing_channels_are_incomparable(self):
        p, q = depolarizing(2, 0.2), depolarizing(2, 0.5)
        holds, margin = cp_leq(p, q)
        self.assertFalse(holds)
        self.assertAlmostEqual(margin, 0.3 * (0.5 - 2.0), delta=1e-12)
        holds, margin = cp_leq(q, p)
        self.assertFalse(holds)
        self.assertAlmostEqual(margin, -0.3 / 2, delta=1e-12)


class ChannelMeanTests(SimpleTestCase):
    def test_equal_arguments(self):
        n = depolarizing(2, 0.3)
        assert_allclose(channel_ka_mean(n, n, 0.6).choi, n.choi, atol=1e-12)

    def test_replacers(self):
        rng = np.random.default_rng(4)
        a, b = random_pd(rng, 2), random_pd(rng, 2)
        mean = channel_ka_mean(replacer(a, 3), replacer(b, 3), 0.3)
        assert_allclose(mean.choi, replacer(ka_mean(a, b, 0.3), 3).choi, atol=1e-10)

    def test_distinct_unitaries_have_zero_mean(self):
        rng = np.random.default_rng(5)
        u, v = random_unitary(rng, 2), random_unitary(rng, 2)
        mean = channel_ka_mean(unitary_channel(u), unitary_channel(v), 0.5)
        assert_allclose(mean.choi, np.zeros((4, 4)), atol=1e-10)

    def test_perspective_of_power_is_mean(self):
        rng = np.random.default_rng(6)
        n, m = random_channel(rng, 2, 2), random_channel(rng, 2, 2)
        assert_allclose(superop_perspective(power(0.4), n, m).choi, channel_ka_mean(n, m, 0.4).choi, atol=1e-9)

    def test_linear_perspective_returns_first_argument(self):
        n = identity_channel(2)
        m = depolarizing(2, 0.5)
        assert_allclose(superop_perspective(power(1.0), n, m).choi, n.choi, atol=1e-8)

    def test_basis_independence(self):
        rng = np.random.default_rng(7)
        n, m = random_channel(rng, 2, 2), random_channel(rng, 2, 2)
        u = random_unitary(rng, 2)
        rotated = ka_mean(choi_in_basis(n, u), choi_in_basis(m, u), 0.35)
        back = from_choi_in_basis(2, 2, rotated, u)
        direct = channel_ka_mean(n, m, 0.35)
        for _trial in range(20):
            rho = random_density(rng, 2)
            self.assertLessEqual(np.abs(back(rho) - direct(rho)).max(), 1e-8)

    def test_processing_monotonicity(self):
        rng = np.random.default_rng(8)
        for _trial in range(5):
            n, m = random_channel(rng, 2, 2), random_channel(rng, 2, 2)
            f, g = random_channel(rng, 2, 3), random_channel(rng, 3, 2)
            mean = channel_ka_mean(n, m, 0.4)
            post = channel_ka_mean(compose(f, n), compose(f, m), 0.4)
            self.assertTrue(cp_leq(compose(f, mean), post)[1] >= -1e-8)
            pre = channel_ka_mean(compose(n, g), compose(m, g), 0.4)
            self.assertTrue(cp_leq(compose(mean, g), pre)[1] >= -1e-8)

    def test_tensor_homogeneity(self):
        rng = np.random.default_rng(9)
        n, m = random_channel(rng, 2, 2), random_channel(rng, 2, 2)
        e = depolarizing(2, 0.4)
        left = channel_ka_mean(tensor(n, e), tensor(m, e), 0.7)
        right = tensor(channel_ka_mean(n, m, 0.7), e)
        assert_allclose(left.choi, right.choi, atol=1e-8)


class DiscriminationTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(10)
        self.n1, self.n2 = random_channel(rng, 2, 2), random_channel(rng, 2, 2)

    def test_mean_channel_passes(self):
        e = channel_ka_mean(self.n1, self.n2, 0.4)
        for n in (1, 2):
            report = discrimination_equivalence_check(e, self.n1, self.n2, n, trials=20)
            self.assertTrue(report.mean_member)
            self.assertTrue(any(lo - 1e-6 <= 0.4 <= hi + 1e-6 for lo, hi in report.t_intervals))
            self.assertTrue(report.strategies_pass)
            self.assertTrue(report.consistent)

    def test_scaled_channel_is_refuted(self):
        report = discrimination_equivalence_check(self.n1.scaled(1.02), self.n1, self.n2, 1, trials=5)
        self.assertFalse(report.strategies_pass)
        self.assertLessEqual(report.worst_margin, -0.02 + 1e-12)
        self.assertFalse(report.mean_member)
        self.assertTrue(report.consistent)

    def test_member_itself(self):
        report = discrimination_equivalence_check(self.n1, self.n1, self.n2, 1, trials=10)
        self.assertTrue(report.mean_member)
        self.assertTrue(report.am_feasible)
        assert_allclose(report.am_mu, [1.0, 0.0], atol=1e-6)

    def test_cap(self):
        with use_numerics(dim_cap=64):
            with self.assertRaises(ResourceCapError):
                discrimination_equivalence_check(self.n1, self.n1, self.n2, 4, trials=1)
