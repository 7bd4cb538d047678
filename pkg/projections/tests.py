from __future__ import annotations

import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from matcore.exceptions import DegeneracyError, DomainError, PreconditionError
from matcore.linalg import kron_power, loewner_margin, support_proj
from matcore.sampling import complex_gaussian, random_density, random_projection, random_unitary

from .composite import composite_test, composite_test_alternative, domination_threshold
from .jordan import Projection, _check_pairing, jordan_decompose, overlap
from .utils import (
    EpsMode,
    eps_dominated,
    eps_domination_conditions,
    eps_orthogonal,
    eps_orthogonality_conditions,
    eps_rt,
    eps_subtract,
    join,
    meet,
    restrict,
    sum_domination_margin,
)

E1 = np.diag([1.0, 0.0])


def _line(theta: float) -> np.ndarray:
    v = np.array([math.cos(theta), math.sin(theta)])
    return np.outer(v, v)


TILTED = _line(math.pi / 3)


def _random_pair(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, int]:
    dim = int(rng.integers(2, 9))
    s = random_projection(rng, dim, int(rng.integers(0, dim + 1)))
    q = random_projection(rng, dim, int(rng.integers(0, dim + 1)))
    return s, q, dim


def _low_rank_state(rng: np.random.Generator, dim: int, rank: int) -> np.ndarray:
    basis = random_unitary(rng, dim)[:, :rank]
    weights = rng.dirichlet(np.ones(rank))
    return (basis * weights) @ basis.conj().T


def _embed(block: np.ndarray, offset: int, dim: int) -> np.ndarray:
    out = np.zeros((dim, dim), dtype=complex)
    size = block.shape[0]
    out[offset:offset + size, offset:offset + size] = block
    return out


class ProjectionTests(SimpleTestCase):
    def test_rejects_non_idempotent(self):
        with self.assertRaises(DomainError):
            Projection(np.diag([0.5, 1.0]))

    def test_rejects_non_hermitian(self):
        with self.assertRaises(DomainError):
            Projection(np.array([[1.0, 1.0], [0.0, 0.0]]))

    def test_onto_span(self):
        p = Projection.onto(np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))
        assert_allclose(p.matrix, np.diag([1.0, 1.0, 0.0]), atol=1e-12)
        self.assertEqual(p.rank, 2)
        assert_allclose(p.complement().matrix, np.diag([0.0, 0.0, 1.0]), atol=1e-12)


class JordanTests(SimpleTestCase):
    def test_equal_projections_have_no_blocks(self):
        s = random_projection(np.random.default_rng(0), 4, 2)
        dec = jordan_decompose(s, s)
        self.assertEqual(dec.blocks, ())
        assert_allclose(dec.s_prime, dec.q_prime)
        self.assertLessEqual(dec.residual(s, s), 1e-8)

    def test_single_block(self):
        dec = jordan_decompose(E1, TILTED)
        self.assertEqual(len(dec.blocks), 1)
        self.assertAlmostEqual(dec.blocks[0].theta, math.pi / 3, delta=1e-12)
        self.assertEqual(dec.commuting_basis.shape[1], 0)
        self.assertLessEqual(dec.residual(E1, TILTED), 1e-10)

    def test_reconstruction_on_random_pairs(self):
        rng = np.random.default_rng(11)
        for _trial in range(100):
            s, q, dim = _random_pair(rng)
            dec = jordan_decompose(s, q)
            self.assertLessEqual(dec.residual(s, q), 1e-8)
            self.assertEqual(2 * len(dec.blocks) + dec.commuting_basis.shape[1], dim)
            angles = dec.angles
            self.assertTrue(np.all(np.diff(angles) >= 0))
            self.assertTrue(np.all((angles > 0) & (angles < math.pi / 2)))

    def test_block_vectors_are_orthonormal(self):
        rng = np.random.default_rng(3)
        s, q = random_projection(rng, 6, 2), random_projection(rng, 6, 3)
        dec = jordan_decompose(s, q)
        vectors = np.column_stack(
            [v for b in dec.blocks for v in (b.e, b.e_perp)] + [dec.commuting_basis]
        )
        assert_allclose(vectors.conj().T @ vectors, np.eye(6), atol=1e-10)

    def test_overlap_examples(self):
        self.assertAlmostEqual(overlap(E1, np.diag([0.0, 1.0])), 0.0)
        self.assertAlmostEqual(overlap(E1, TILTED), 0.5, delta=1e-12)
        self.assertAlmostEqual(overlap(E1, E1), 1.0, delta=1e-12)

    def test_overlap_matches_decomposition(self):
        rng = np.random.default_rng(5)
        for _trial in range(30):
            s, q, _dim = _random_pair(rng)
            self.assertAlmostEqual(overlap(s, q), jordan_decompose(s, q).overlap, delta=1e-9)

    def test_pairing_failure(self):
        with self.assertRaises(DegeneracyError):
            _check_pairing(np.array([0.5, 1.4]), 1e-7)
        with self.assertRaises(DegeneracyError):
            _check_pairing(np.array([0.5, 0.7, 1.5]), 1e-7)

    def test_dimension_mismatch(self):
        with self.assertRaises(DomainError):
            jordan_decompose(E1, np.eye(3))


class RelationTests(SimpleTestCase):
    def test_tilted_line(self):
        self.assertTrue(eps_orthogonal(TILTED, E1, 0.5))
        self.assertFalse(eps_orthogonal(TILTED, E1, 0.49))
        self.assertFalse(eps_dominated(TILTED, E1, 0.86))
        self.assertTrue(eps_dominated(TILTED, E1, 0.87))

    def test_exact_relations_at_zero(self):
        self.assertTrue(eps_dominated(np.diag([1.0, 0.0, 0.0]), np.diag([1.0, 1.0, 0.0]), 0.0))
        self.assertTrue(eps_orthogonal(np.diag([1.0, 0.0, 0.0]), np.diag([0.0, 1.0, 1.0]), 0.0))
        self.assertFalse(eps_orthogonal(np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 1.0, 1.0]), 0.0))

    def test_eps_out_of_range(self):
        with self.assertRaises(DomainError):
            eps_orthogonal(E1, E1, 1.0)

    def test_domination_is_orthogonality_to_complement(self):
        rng = np.random.default_rng(7)
        for _trial in range(40):
            s, q, dim = _random_pair(rng)
            eps = float(rng.uniform(0.0, 0.99))
            self.assertEqual(eps_dominated(q, s, eps), eps_orthogonal(q, np.eye(dim) - s, eps))

    def test_equivalent_forms_agree(self):
        rng = np.random.default_rng(13)
        for _trial in range(40):
            dim = int(rng.integers(3, 7))
            s = random_projection(rng, dim, int(rng.integers(1, dim)))
            q = random_projection(rng, dim, int(rng.integers(1, dim)))
            edge = overlap(s, q)
            for eps in (0.1, 0.5, 0.9, max(edge - 1e-3, 0.0), min(edge + 1e-3, 0.999)):
                report = eps_orthogonality_conditions(q, s, eps)
                self.assertEqual(len(report.conditions), 7)
                self.assertTrue(report.agree, report.conditions)
                self.assertTrue(eps_domination_conditions(q, s, eps).agree)

    def test_condition_report_on_tilted_line(self):
        self.assertTrue(eps_orthogonality_conditions(TILTED, E1, 0.5).holds)
        self.assertFalse(eps_orthogonality_conditions(TILTED, E1, 0.4).holds)
        self.assertTrue(eps_domination_conditions(TILTED, E1, 0.9).holds)


class SubtractionTests(SimpleTestCase):
    Q = np.diag([1.0, 1.0, 0.0])
    S = np.diag([1.0, 0.0, 1.0])

    def test_commuting_pair(self):
        for eps in (0.0, 0.5, 0.9):
            assert_allclose(eps_subtract(self.Q, self.S, eps).matrix, np.diag([0.0, 1.0, 0.0]), atol=1e-12)
            assert_allclose(restrict(self.Q, self.S, eps).matrix, np.diag([1.0, 0.0, 0.0]), atol=1e-12)

    def test_tilted_block(self):
        assert_allclose(eps_subtract(TILTED, E1, 0.6).matrix, TILTED, atol=1e-12)
        assert_allclose(restrict(TILTED, E1, 0.6).matrix, np.zeros((2, 2)), atol=1e-12)
        assert_allclose(eps_subtract(TILTED, E1, 0.4).matrix, np.zeros((2, 2)), atol=1e-12)
        assert_allclose(restrict(TILTED, E1, 0.9).matrix, TILTED, atol=1e-12)

    def test_defining_properties(self):
        rng = np.random.default_rng(17)
        for _trial in range(40):
            s, q, _dim = _random_pair(rng)
            eps = float(rng.uniform(0.05, 0.95))
            subtracted = eps_subtract(q, s, eps)
            restricted = restrict(q, s, eps)
            self.assertGreaterEqual(loewner_margin(subtracted.matrix, q), -1e-9)
            self.assertGreaterEqual(loewner_margin(restricted.matrix, q), -1e-9)
            self.assertTrue(eps_orthogonal(subtracted, s, eps))
            self.assertTrue(eps_dominated(restricted, s, eps))

    @settings(deadline=None, max_examples=50)
    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_restriction_error_bounds(self, seed):
        rng = np.random.default_rng(seed)
        dim = int(rng.integers(2, 7))
        rho = _low_rank_state(rng, dim, int(rng.integers(1, dim + 1)))
        s = support_proj(rho)
        q = random_projection(rng, dim, int(rng.integers(0, dim + 1)))
        eps = float(rng.uniform(0.05, 0.95))
        identity = np.eye(dim)
        miss = np.trace(rho @ (identity - q)).real
        relaxed = np.trace(rho @ (identity - restrict(q, s, eps).matrix)).real
        self.assertLessEqual(miss, relaxed + 1e-9)
        self.assertLessEqual(relaxed, miss / eps**2 + 1e-9)


class EpsRtTests(SimpleTestCase):
    def test_closed_form(self):
        self.assertAlmostEqual(eps_rt(2, 2.0), math.sqrt(1 / 3), delta=1e-15)
        self.assertAlmostEqual(eps_rt(3, 2.0), math.sqrt(1 / 6), delta=1e-15)

    def test_recursive(self):
        for t in (1.5, 2.0, 5.0):
            self.assertAlmostEqual(eps_rt(2, t, EpsMode.RECURSIVE), 1 - 1 / t, delta=1e-15)
        self.assertAlmostEqual(eps_rt(3, 2.0, "recursive"), 0.25 / math.sqrt(3), delta=1e-15)
        for r in range(2, 7):
            self.assertGreater(eps_rt(r, 3.0, EpsMode.RECURSIVE), 0.0)
            self.assertLess(eps_rt(r, 3.0, EpsMode.RECURSIVE), 1.0)

    def test_domain(self):
        for r, t in ((1, 2.0), (2.5, 2.0), (2, 1.0), (2, math.inf)):
            with self.assertRaises(DomainError):
                eps_rt(r, t)

    def test_closed_form_on_random_orthogonal_families(self):
        rng = np.random.default_rng(19)
        checked = 0
        for _trial in range(60):
            r = int(rng.integers(2, 5))
            t = float(rng.uniform(1.2, 4.0))
            eps = eps_rt(r, t)
            dim = 2 * r + 2
            frame = random_unitary(rng, dim)
            family = []
            for j in range(r):
                basis = frame[:, 2 * j:2 * j + 2] + eps / (8 * math.sqrt(dim)) * complex_gaussian(rng, dim, 2)
                family.append(Projection.onto(basis).matrix)
            if not all(eps_orthogonal(a, b, eps) for i, a in enumerate(family) for b in family[i + 1:]):
                continue
            checked += 1
            self.assertGreaterEqual(sum_domination_margin(family, t), -1e-8)
        self.assertGreater(checked, 50)

    def test_recursive_is_tight_for_two_lines(self):
        for t in (1.5, 2.0, 3.0):
            c = eps_rt(2, t, EpsMode.RECURSIVE)
            lines = [E1, _line(math.acos(c))]
            self.assertTrue(eps_orthogonal(lines[1], lines[0], c))
            self.assertAlmostEqual(sum_domination_margin(lines, t), 0.0, delta=1e-12)

    def test_closed_form_too_large_for_two_lines_at_small_t(self):
        c = eps_rt(2, 2.0)
        self.assertLess(sum_domination_margin([E1, _line(math.acos(c))], 2.0), -0.15)


class LatticeTests(SimpleTestCase):
    def test_single_member(self):
        p = random_projection(np.random.default_rng(0), 4, 2)
        assert_allclose(join([p]).matrix, p, atol=1e-10)
        assert_allclose(meet([p]).matrix, p, atol=1e-10)

    def test_absorption(self):
        rng = np.random.default_rng(1)
        p, q = random_projection(rng, 4, 2), random_projection(rng, 4, 3)
        assert_allclose(join([p, meet([p, q])]).matrix, p, atol=1e-8)
        assert_allclose(meet([p, join([p, q])]).matrix, p, atol=1e-8)

    def test_commuting(self):
        p, q = np.diag([1.0, 1.0, 0.0, 0.0]), np.diag([0.0, 1.0, 1.0, 0.0])
        assert_allclose(join([p, q]).matrix, np.diag([1.0, 1.0, 1.0, 0.0]), atol=1e-12)
        assert_allclose(meet([p, q]).matrix, np.diag([0.0, 1.0, 0.0, 0.0]), atol=1e-12)

    def test_distinct_lines(self):
        self.assertEqual(meet([E1, TILTED]).rank, 0)
        self.assertEqual(join([E1, TILTED]).rank, 2)

    def test_empty_family(self):
        with self.assertRaises(DomainError):
            join([])


class CompositeTestTests(SimpleTestCase):
    SUPPORTS = (np.diag([1.0, 1.0, 0.0, 0.0]), np.diag([0.0, 0.0, 1.0, 1.0]))

    def _states(self, rng):
        return [_embed(random_density(rng, 2), 0, 4), _embed(random_density(rng, 2), 2, 4)]

    def test_single_test(self):
        rng = np.random.default_rng(2)
        s, t = random_projection(rng, 4, 2), random_projection(rng, 4, 2)
        result = composite_test([t], [s], 0.5)
        assert_allclose(result.test.matrix, restrict(t, s, 0.5).matrix, atol=1e-10)
        cert = result.certificates[0]
        self.assertAlmostEqual(cert.composite_miss, cert.restricted_miss, delta=1e-10)
        self.assertTrue(cert.holds)
        self.assertTrue(cert.two_sided)
        self.assertIsNone(result.dominated)

    def test_orthogonal_supports(self):
        rng = np.random.default_rng(4)
        for _trial in range(10):
            tests = [random_projection(rng, 4, 2), random_projection(rng, 4, 2)]
            result = composite_test(tests, self.SUPPORTS, 0.2, states=self._states(rng), t=2.0)
            self.assertTrue(result.holds)
            self.assertTrue(result.dominated)
            self.assertTrue(all(c.two_sided for c in result.certificates))

    def test_larger_eps_never_hurts(self):
        rng = np.random.default_rng(6)
        tests = [random_projection(rng, 4, 2), random_projection(rng, 4, 3)]
        states = self._states(rng)
        results = [composite_test(tests, self.SUPPORTS, eps, states=states) for eps in (0.3, 0.6, 0.9)]
        for j in range(2):
            misses = [r.certificates[j].composite_miss for r in results]
            bounds = [r.certificates[j].bound for r in results]
            self.assertTrue(all(a >= b - 1e-10 for a, b in zip(misses, misses[1:])))
            self.assertTrue(all(a >= b for a, b in zip(bounds, bounds[1:])))

    def test_intersecting_supports(self):
        s = self.SUPPORTS[0]
        with self.assertRaises(PreconditionError):
            composite_test([s, s], [s, s], 0.2)

    def test_state_support_mismatch(self):
        states = [np.eye(4) / 4, np.diag([0.0, 0.0, 0.5, 0.5])]
        with self.assertRaises(PreconditionError):
            composite_test(list(self.SUPPORTS), self.SUPPORTS, 0.2, states=states)

    def test_alternative_form(self):
        rng = np.random.default_rng(8)
        tests = [random_projection(rng, 4, 2), random_projection(rng, 4, 2)]
        states = self._states(rng)
        result = composite_test_alternative(tests, self.SUPPORTS, 0.2, states=states, t=2.0)
        identity = np.eye(4)
        relaxed = [restrict(identity - t, s, 0.2).matrix for t, s in zip(tests, self.SUPPORTS)]
        assert_allclose(result.test.matrix, identity - join(relaxed).matrix, atol=1e-10)
        for cert, sigma, t in zip(result.certificates, states, tests):
            self.assertAlmostEqual(cert.miss, np.trace(sigma @ t).real, delta=1e-12)
            self.assertAlmostEqual(cert.composite_miss, np.trace(sigma @ result.test.matrix).real, delta=1e-10)
        self.assertTrue(result.holds)


class ThresholdTests(SimpleTestCase):
    ZERO = np.diag([1.0, 0.0])
    PLUS = np.full((2, 2), 0.5)

    def test_threshold_value(self):
        self.assertEqual(domination_threshold([self.ZERO, self.PLUS], 0.1, 2.0), 4)
        self.assertEqual(domination_threshold([self.ZERO, self.PLUS], 0.1, 2.0, EpsMode.CLOSED_FORM), 3)
        self.assertEqual(domination_threshold([self.ZERO, np.diag([0.0, 1.0])], 0.1, 2.0), 1)

    def test_eps_too_large(self):
        with self.assertRaises(DomainError):
            domination_threshold([self.ZERO, self.PLUS], 0.3, 2.0)

    def test_tensor_powers_dominated_from_threshold(self):
        supports = [self.ZERO, self.PLUS]
        first = domination_threshold(supports, 0.1, 2.0)
        single = composite_test(supports, supports, 0.1, t=2.0)
        self.assertFalse(single.dominated)
        for n in range(first, first + 3):
            powers = [kron_power(s, n).real for s in supports]
            result = composite_test(powers, powers, 0.1, t=2.0)
            self.assertTrue(result.dominated, n)
            self.assertTrue(result.holds)
