"""
Acceptance batteries run by ``reproduce_all``.

Each suite draws from its own child of ``SeedSequence(seed)``, so results do
not depend on which suites run or on how many worker threads run them.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from channels.maps import choi_in_basis, compose, depolarizing, from_choi_in_basis, random_channel, replacer, tensor
from channels.utils import channel_ka_mean, cp_leq, discrimination_equivalence_check
from classical.utils import ClassicalInstance, gm_feasibility, witness_margin
from exponents.chain import LOG_2_SQRT3, appendix_a_report, mixture_threshold
from exponents.utils import geometric_bounds_two
from matcore.linalg import commutator_norm, lambda_min, partial_trace, support_proj
from matcore.parallel import thread_map
from matcore.sampling import (
    complex_gaussian,
    random_density,
    random_pd,
    random_projection,
    random_psd,
    random_unitary,
)
from means.utils import AltMeanKind, alt_mean, ka_mean
from membership.feasibility import am_feasibility_quantum
from membership.oracles import sup_bound_oracle, weak_geometric_oracle
from membership.utils import ka_membership
from membership.verdicts import VerdictMethod
from projections.jordan import Projection, jordan_decompose, overlap
from projections.utils import (
    EpsMode,
    eps_domination_conditions,
    eps_orthogonality_conditions,
    eps_rt,
    restrict,
    sum_domination_margin,
)

logger = logging.getLogger(__name__)

PSI = np.array([1.0, 1.0]) / math.sqrt(2)
PSI_PROJ = np.outer(PSI, PSI)
RIVAL_MARGIN = 1e-4


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    metrics: dict[str, float] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, message: str) -> None:
        self.checked += 1
        if not ok:
            self.failures.append(message)

    def worst(self, key: str, value: float, lower: bool = False) -> None:
        """Keep the largest (or smallest) value seen under ``key``."""
        current = self.metrics.get(key)
        if current is None or (value < current if lower else value > current):
            self.metrics[key] = float(value)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "failures": list(self.failures),
            "metrics": dict(sorted(self.metrics.items())),
        }


def _count(quick: bool, full: int, reduced: int) -> int:
    return reduced if quick else full


def ka_closed_forms(rng: np.random.Generator, quick: bool) -> SuiteResult:
    suite = SuiteResult("ka_closed_forms")
    for trial in range(_count(quick, 500, 25)):
        dim = int(rng.integers(1, 7))
        u = random_unitary(rng, dim)
        x, y = rng.uniform(0.05, 3.0, dim), rng.uniform(0.05, 3.0, dim)
        t = float(rng.uniform())
        a, b = (u * x) @ u.conj().T, (u * y) @ u.conj().T
        expected = (u * (x**t * y ** (1 - t))) @ u.conj().T
        error = float(np.abs(ka_mean(a, b, t) - expected).max())
        suite.worst("max_error", error)
        suite.check(error <= 1e-10, f"instance {trial}: entrywise error {error:.3e}")
    return suite


def ka_invariants(rng: np.random.Generator, quick: bool) -> SuiteResult:
    suite = SuiteResult("ka_invariants")
    for trial in range(_count(quick, 200, 10)):
        a, b, x = random_pd(rng, 4), random_pd(rng, 4), random_pd(rng, 4)
        a2, b2 = random_pd(rng, 2), random_pd(rng, 2)
        t = float(rng.uniform(0.05, 0.95))
        mean = ka_mean(a, b, t)

        transformer = float(np.abs(x @ mean @ x - ka_mean(x @ a @ x, x @ b @ x, t)).max())
        suite.worst("transformer_error", transformer)
        suite.check(transformer <= 1e-7, f"instance {trial}: transformer identity off by {transformer:.3e}")

        product = ka_mean(np.kron(a, a2), np.kron(b, b2), t) - np.kron(mean, ka_mean(a2, b2, t))
        tensor_error = float(np.abs(product).max())
        suite.worst("tensor_error", tensor_error)
        suite.check(tensor_error <= 1e-8, f"instance {trial}: tensor multiplicativity off by {tensor_error:.3e}")

        am_gm = lambda_min(t * a + (1 - t) * b - mean)
        suite.worst("am_gm_margin", am_gm, lower=True)
        suite.check(am_gm >= -1e-9, f"instance {trial}: AM-GM margin {am_gm:.3e}")

        reduced = ka_mean(partial_trace(a, [2, 2], 2), partial_trace(b, [2, 2], 2), t)
        monotone = lambda_min(reduced - partial_trace(mean, [2, 2], 2))
        suite.worst("partial_trace_margin", monotone, lower=True)
        suite.check(monotone >= -1e-9, f"instance {trial}: partial trace margin {monotone:.3e}")

        det = np.linalg.det(mean).real
        expected = np.linalg.det(a).real ** t * np.linalg.det(b).real ** (1 - t)
        det_error = abs(det / expected - 1.0)
        suite.worst("determinant_error", det_error)
        suite.check(det_error <= 1e-8, f"instance {trial}: determinant ratio off by {det_error:.3e}")
    return suite


def rival_means(rng: np.random.Generator, quick: bool) -> SuiteResult:
    suite = SuiteResult("rival_means")
    b = np.diag([1.0, 4.0])
    ka_coeff = float((PSI @ ka_mean(PSI_PROJ, b, 0.5) @ PSI).real)
    suite.metrics["ka_coefficient"] = ka_coeff
    suite.check(abs(ka_coeff - math.sqrt(8 / 5)) <= 1e-10, f"KA coefficient {ka_coeff!r}")
    for z in (2.0, 4.0, math.inf):
        mean = alt_mean(AltMeanKind.GHAT, PSI_PROJ, b, 0.5, z)
        coeff = float((PSI @ mean @ PSI).real)
        label = "inf" if math.isinf(z) else f"{z:g}"
        suite.metrics[f"ghat_margin_z{label}"] = coeff - ka_coeff
        suite.check(coeff - ka_coeff > RIVAL_MARGIN, f"Ghat at z={label} exceeds KA by only {coeff - ka_coeff:.3e}")
    for kind in (AltMeanKind.G, AltMeanKind.GTILDE):
        gap = lambda_min(ka_mean(PSI_PROJ, b, 0.5) - alt_mean(kind, PSI_PROJ, b, 0.5))
        suite.metrics[f"{kind.value}_gap"] = gap
        suite.check(gap < -1e-6, f"{kind.value} does not exceed the KA mean ({gap:.3e})")
    return suite


def appendix_a_chain(rng: np.random.Generator, quick: bool) -> SuiteResult:
    suite = SuiteResult("appendix_a_chain")
    for k, r in ((1, 0.5), (2, 0.9)):
        report = appendix_a_report(k, r)
        for link in report.links:
            suite.check(link.holds, f"k={k} r={r}: {link.left} {link.relation} {link.right} margin {link.margin:.3e}")
            if link.asserted_strict:
                suite.worst("strict_margin", link.margin, lower=True)
        closed = abs(float(report.relative_entropy_gap) - (r - k * LOG_2_SQRT3))
        suite.worst("closed_form_error", closed)
        suite.check(closed <= 1e-12, f"k={k} r={r}: relative-entropy gap off the closed form by {closed:.3e}")
        if k == 2:
            r_inf = abs(float(report.mixture_r_inf) - mixture_threshold(2))
            suite.metrics["r_inf_error"] = r_inf
            suite.check(r_inf <= 1e-12, f"r_inf off by {r_inf:.3e}")
    return suite


def classical_lp_trio(rng: np.random.Generator, quick: bool) -> SuiteResult:
    suite = SuiteResult("classical_lp_trio")
    skewed = gm_feasibility(ClassicalInstance(f=[1.0], g=[[1 / 100, 10.0]]))
    suite.check(skewed.feasible, "single-point instance should be feasible")

    crossed_instance = ClassicalInstance(f=[1.0, 1.0], g=[[1 / 100, 10.0], [10.0, 1 / 100]])
    crossed = gm_feasibility(crossed_instance)
    suite.check(not crossed.feasible, "crossed instance should be infeasible")
    if crossed.dual_witness is not None:
        margin = witness_margin(crossed_instance, crossed.dual_witness)
        suite.metrics["dual_witness_margin"] = margin
        suite.check(margin < -1e-9, f"dual witness margin {margin:.3e} does not certify infeasibility")
    else:
        suite.check(False, "crossed instance carries no dual witness")

    balanced = gm_feasibility(ClassicalInstance(f=[1.0, 1.0], g=[[1 / 10, 10.0], [10.0, 1 / 10]]))
    suite.check(balanced.feasible, "balanced instance should be feasible")
    if balanced.measure is not None:
        error = float(np.abs(np.asarray(balanced.measure) - 0.5).max())
        suite.metrics["balanced_measure_error"] = error
        suite.check(error <= 1e-7, f"balanced measure off (1/2, 1/2) by {error:.3e}")
    return suite


def _membership_triple(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    dim = int(rng.integers(2, 4))
    a1, a2 = random_pd(rng, dim, floor=0.2), random_pd(rng, dim, floor=0.2)
    t = float(rng.uniform(0.1, 0.9))
    c = ka_mean(a1, a2, t)
    if rng.uniform() < 0.5:
        c = float(rng.uniform(0.5, 1.0)) * c
    else:
        c = c + float(rng.uniform(0.01, 0.5)) * random_psd(rng, dim, 1)
    return c, a1, a2, t


def membership_battery(rng: np.random.Generator, quick: bool) -> SuiteResult:
    suite = SuiteResult("membership_battery")
    trials = _count(quick, 1000, 30)
    members = 0
    for trial in range(_count(quick, 200, 6)):
        c, a1, a2, _t = _membership_triple(rng)
        verdict = ka_membership(c, a1, a2)
        members += verdict.member
        for n in (1, 2, 3):
            am = am_feasibility_quantum(c, [a1, a2], n)
            sup = sup_bound_oracle(c, [a1, a2], n, trials, rng)
            if verdict.member:
                weak = weak_geometric_oracle(c, a1, a2, verdict.best_t, n, trials, rng)
                suite.check(am.feasible, f"instance {trial}: member without an {n}-copy arithmetic measure")
                suite.check(weak.holds, f"instance {trial}: member fails the {n}-copy weak bound")
                suite.check(sup.holds, f"instance {trial}: member fails the {n}-copy sup bound")
                suite.worst("member_sup_margin", sup.worst_margin, lower=True)
            if am.feasible:
                suite.check(sup.holds, f"instance {trial}: arithmetic measure at n={n} refuted by a sampled test")
        if verdict.method == VerdictMethod.KA_SCAN_WITNESSED:
            am = am_feasibility_quantum(c, [a1, a2], verdict.witness_n)
            suite.check(not am.feasible, f"instance {trial}: witness copy number {verdict.witness_n} is feasible")
    suite.metrics["members"] = float(members)
    return suite


def channel_layer(rng: np.random.Generator, quick: bool) -> SuiteResult:
    suite = SuiteResult("channel_layer")
    for trial in range(_count(quick, 100, 5)):
        n, m = random_channel(rng, 2, 2), random_channel(rng, 2, 2)
        t = float(rng.uniform(0.1, 0.9))
        mean = channel_ka_mean(n, m, t)

        u = random_unitary(rng, 2)
        back = from_choi_in_basis(2, 2, ka_mean(choi_in_basis(n, u), choi_in_basis(m, u), t), u)
        basis_error = float(np.abs(back.choi - mean.choi).max())
        suite.worst("basis_residual", basis_error)
        suite.check(basis_error <= 1e-8, f"instance {trial}: basis dependence {basis_error:.3e}")

        a, b = random_pd(rng, 2), random_pd(rng, 2)
        replaced = channel_ka_mean(replacer(a, 2), replacer(b, 2), t).choi - replacer(ka_mean(a, b, t), 2).choi
        replacer_error = float(np.abs(replaced).max())
        suite.worst("replacer_error", replacer_error)
        suite.check(replacer_error <= 1e-10, f"instance {trial}: replacer reduction off by {replacer_error:.3e}")

        f, g = random_channel(rng, 2, 2), random_channel(rng, 2, 2)
        post = cp_leq(compose(f, mean), channel_ka_mean(compose(f, n), compose(f, m), t))[1]
        pre = cp_leq(compose(mean, g), channel_ka_mean(compose(n, g), compose(m, g), t))[1]
        suite.worst("processing_margin", min(post, pre), lower=True)
        suite.check(post >= -1e-8, f"instance {trial}: post-processing margin {post:.3e}")
        suite.check(pre >= -1e-8, f"instance {trial}: pre-processing margin {pre:.3e}")

        e = depolarizing(2, float(rng.uniform()))
        homogeneity = tensor(mean, e).choi - channel_ka_mean(tensor(n, e), tensor(m, e), t).choi
        homogeneity_error = float(np.abs(homogeneity).max())
        suite.worst("tensor_error", homogeneity_error)
        suite.check(homogeneity_error <= 1e-8, f"instance {trial}: tensor homogeneity off by {homogeneity_error:.3e}")

    for trial in range(_count(quick, 3, 1)):
        n1, n2 = random_channel(rng, 2, 2), random_channel(rng, 2, 2)
        e = channel_ka_mean(n1, n2, float(rng.uniform(0.2, 0.8)))
        for copies in (1, 2):
            report = discrimination_equivalence_check(e, n1, n2, copies, trials=_count(quick, 50, 10), rng=rng)
            suite.check(
                report.mean_member and report.strategies_pass and report.consistent,
                f"discrimination {trial} at n={copies}: member={report.mean_member} "
                f"strategies={report.strategies_pass}",
            )
    return suite


def _orthogonal_family(rng: np.random.Generator, r: int) -> list[np.ndarray]:
    """r projections on disjoint coordinate blocks, tilted towards each other."""
    ranks = [int(rng.integers(1, 3)) for _ in range(r)]
    dim = sum(ranks) + int(rng.integers(0, 3))
    spread = float(rng.uniform(0.05, 0.6))
    family, start = [], 0
    for rank in ranks:
        block = np.zeros((dim, rank), dtype=complex)
        block[start : start + rank] = np.eye(rank)
        start += rank
        family.append(Projection.onto(block + spread * complex_gaussian(rng, dim, rank)).matrix)
    return family


def projection_calculus(rng: np.random.Generator, quick: bool) -> SuiteResult:
    suite = SuiteResult("projection_calculus")
    for trial in range(_count(quick, 500, 20)):
        dim = int(rng.integers(2, 9))
        s = random_projection(rng, dim, int(rng.integers(0, dim + 1)))
        q = random_projection(rng, dim, int(rng.integers(0, dim + 1)))
        residual = jordan_decompose(s, q).residual(s, q)
        suite.worst("jordan_residual", residual)
        suite.check(residual <= 1e-8, f"pair {trial}: reconstruction residual {residual:.3e}")

        eps = float(rng.uniform(0.05, 0.95))
        for report in (eps_orthogonality_conditions(q, s, eps), eps_domination_conditions(q, s, eps)):
            suite.check(report.agree, f"pair {trial}: {report.relation} forms disagree at eps={eps:.4f}")

    for trial in range(_count(quick, 200, 10)):
        dim = int(rng.integers(2, 7))
        rho = random_density(rng, dim, int(rng.integers(1, dim + 1)))
        support = support_proj(rho)
        test = random_projection(rng, dim, int(rng.integers(0, dim + 1)))
        eps = float(rng.uniform(0.1, 0.95))
        restricted = restrict(test, support, eps).matrix
        miss = float(np.trace(rho @ (np.eye(dim) - test)).real)
        restricted_miss = float(np.trace(rho @ (np.eye(dim) - restricted)).real)
        suite.check(
            miss <= restricted_miss + 1e-9 and restricted_miss <= miss / eps**2 + 1e-9,
            f"restriction {trial}: miss {miss:.3e} restricted {restricted_miss:.3e} eps {eps:.3f}",
        )

    closed_form_counterexamples = 0
    for trial in range(_count(quick, 100, 6)):
        r = int(rng.integers(2, 5))
        family = _orthogonal_family(rng, r)
        level = max(overlap(p, q) for j, p in enumerate(family) for q in family[j + 1 :])
        for t in (1.5, 2.0, 3.0, 5.0):
            margin = sum_domination_margin(family, t)
            if level <= eps_rt(r, t, EpsMode.RECURSIVE):
                suite.worst("join_domination_margin", margin, lower=True)
                suite.check(margin >= -1e-9, f"family {trial} (r={r}, t={t}): join domination margin {margin:.3e}")
            if level <= eps_rt(r, t, EpsMode.CLOSED_FORM) and margin < -1e-9:
                closed_form_counterexamples += 1
    suite.metrics["closed_form_counterexamples"] = float(closed_form_counterexamples)
    if closed_form_counterexamples:
        logger.info(f"closed-form eps(r, t) admitted {closed_form_counterexamples} non-dominated families")
    return suite


def geometric_vs_trivial(rng: np.random.Generator, quick: bool) -> SuiteResult:
    suite = SuiteResult("geometric_vs_trivial")
    for trial in range(_count(quick, 50, 3)):
        nulls = (random_density(rng, 2), random_density(rng, 2))
        alts = (random_density(rng, 2), random_density(rng, 2))
        if commutator_norm(*alts) <= 1e-6:
            continue
        r = float(rng.uniform(0.1, 1.0))
        report = geometric_bounds_two(
            nulls, alts, r, grid=_count(quick, 21, 5), alpha_points=_count(quick, 128, 64), hull_points=5
        )
        improvement = float(report.geometric_sc_lower - report.trivial_sc_lower)
        logger.info(f"geometric sc bound improves the pairwise one by {improvement:.3e} at r={r:.3f}")
        suite.worst("sc_improvement_min", improvement, lower=True)
        suite.worst("sc_improvement_max", improvement)
        suite.check(report.ordering_ok, f"instance {trial}: geometric bounds weaker than pairwise at r={r:.4f}")
    return suite


Suite = Callable[[np.random.Generator, bool], SuiteResult]

SUITES: dict[str, Suite] = {
    "ka_closed_forms": ka_closed_forms,
    "ka_invariants": ka_invariants,
    "rival_means": rival_means,
    "appendix_a_chain": appendix_a_chain,
    "classical_lp_trio": classical_lp_trio,
    "membership_battery": membership_battery,
    "channel_layer": channel_layer,
    "projection_calculus": projection_calculus,
    "geometric_vs_trivial": geometric_vs_trivial,
}


def run_suites(seed: int, quick: bool = False, names: Sequence[str] | None = None) -> list[SuiteResult]:
    # Children are spawned for every suite so a subset reuses the same streams.
    children = dict(zip(SUITES, np.random.SeedSequence(seed).spawn(len(SUITES))))
    selected = [name for name in SUITES if names is None or name in names]

    def run_one(name: str) -> SuiteResult:
        started = time.perf_counter()
        result = SUITES[name](np.random.default_rng(children[name]), quick)
        result.seconds = time.perf_counter() - started
        logger.info(f"suite {name}: {result.checked} checks, {len(result.failures)} failures in {result.seconds:.1f}s")
        return result

    return thread_map(run_one, selected)
