"""
One handler per command. A handler receives validated input, computes, and
lists the invariants the computation certified as violated.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from rest_framework import serializers

from channels.utils import discrimination_equivalence_check
from divergences.hoeffding import hoeffding, hoeffding_star
from divergences.utils import max_relative_entropy_quantum, petz_renyi, relative_entropy, sandwiched_renyi
from exponents.chain import appendix_a_report
from exponents.utils import geometric_bounds_two, trivial_bounds
from matcore.conf import numerics
from matcore.linalg import hermitian, lambda_min
from means.utils import alt_mean, ka_mean, perspective
from membership.feasibility import am_feasibility_quantum
from membership.oracles import sup_bound_oracle, weak_geometric_oracle
from membership.utils import ka_membership
from projections.jordan import jordan_decompose
from projections.utils import eps_domination_conditions, eps_orthogonality_conditions, eps_subtract, restrict

from . import serializers as cli_serializers
from .models import Command
from .suites import run_suites

logger = logging.getLogger(__name__)

AM_GM_TOL = 1e-9
ORDER_TOL = 1e-8
RECONSTRUCTION_TOL = 1e-8


@dataclass
class CommandResult:
    result: dict[str, Any]
    violations: list[str] = field(default_factory=list)


def _matrix(value: np.ndarray) -> dict:
    return cli_serializers.MatrixField().to_representation(value)


def _ext(value) -> float | str | None:
    return cli_serializers.ExtRealField().to_representation(value)


def _copies(dim: int, limit: int) -> range:
    """Copy numbers 1..limit whose tensor power stays under the dimension cap."""
    cap = numerics().dim_cap
    top = 0
    while top < limit and dim ** (top + 1) <= cap:
        top += 1
    return range(1, top + 1)


def run_means(data: dict, seed: int) -> CommandResult:
    a, b, t = data["a"], data["b"], data["t"]
    fn = data.get("f")
    if fn is not None:
        kind, mean = f"perspective:{fn.label}", perspective(fn, a, b)
    elif data["kind"] == "ka":
        kind, mean = "ka", ka_mean(a, b, t)
    else:
        kind, mean = data["kind"], alt_mean(data["kind"], a, b, t, data["z"])
    mean = hermitian(mean)
    result = {
        "kind": kind,
        "t": t,
        "z": _ext(data["z"]),
        "mean": _matrix(mean),
        "eigenvalues": np.linalg.eigvalsh(mean).tolist(),
        "trace": float(np.trace(mean).real),
    }
    violations = []
    if kind == "ka":
        margin = lambda_min(t * a + (1 - t) * b - mean)
        result["am_gm_margin"] = margin
        if margin < -AM_GM_TOL:
            violations.append(f"arithmetic-geometric mean inequality fails by {-margin:.3e}")
    return CommandResult(result, violations)


def _divergence_row(alpha: float, rho: np.ndarray, sigma: np.ndarray) -> dict:
    if alpha < 1.0:
        kind, value = "petz", petz_renyi(alpha, rho, sigma)
    elif alpha == 1.0:
        kind, value = "relative-entropy", relative_entropy(rho, sigma)
    else:
        kind, value = "sandwiched", sandwiched_renyi(alpha, rho, sigma)
    return {"alpha": alpha, "kind": kind, "value": float(value)}


def run_divergence(data: dict, seed: int) -> CommandResult:
    rho, sigma, points = data["rho"], data["sigma"], data["points"]
    rows = [_divergence_row(alpha, rho, sigma) for alpha in sorted(set(data["alphas"]))]
    d_max = float(max_relative_entropy_quantum(rho, sigma))
    serializer = cli_serializers.HoeffdingResultSerializer
    result = {
        "renyi": [{**row, "value": _ext(row["value"])} for row in rows],
        "d_max": _ext(d_max),
        "hoeffding": [
            {
                "r": r,
                "direct": serializer(hoeffding(r, rho, sigma, points)).data,
                "strong_converse": serializer(hoeffding_star(r, rho, sigma, points)).data,
            }
            for r in data["rates"]
        ],
    }
    violations = []
    # Monotonicity in the order only holds for normalized first arguments.
    if abs(float(np.trace(rho).real) - 1.0) <= 1e-9:
        chain = [(row["alpha"], row["value"]) for row in rows] + [(math.inf, d_max)]
        for (lo_alpha, lo), (hi_alpha, hi) in zip(chain, chain[1:]):
            if lo > hi + ORDER_TOL:
                violations.append(f"divergence decreases between alpha={lo_alpha} and alpha={hi_alpha}")
    return CommandResult(result, violations)


def run_bounds(data: dict, seed: int) -> CommandResult:
    nulls, alts, r = data["nulls"], data["alts"], data["r"]
    trivial = trivial_bounds(nulls, alts, r, data["alpha_points"])
    result = {
        "trivial": {"direct_upper": _ext(trivial.direct_upper), "sc_lower": _ext(trivial.sc_lower)},
        "geometric": None,
    }
    violations = []
    if len(nulls) == 2 and len(alts) == 2:
        report = geometric_bounds_two(
            nulls, alts, r, grid=data["grid"], alpha_points=data["alpha_points"], hull_points=data["hull_points"]
        )
        result["geometric"] = cli_serializers.ExponentReportSerializer(report).data
        if not report.ordering_ok:
            violations.append("geometric bounds are weaker than the pairwise bounds")
    else:
        logger.info(f"bounds: geometric report needs two nulls and two alternatives, got {len(nulls)}/{len(alts)}")
    return CommandResult(result, violations)


def run_membership(data: dict, seed: int) -> CommandResult:
    rng = np.random.default_rng(seed)
    c, family, trials = data["c"], data["family"], data["trials"]
    copies = _copies(c.shape[0], data["copies"])
    violations = []
    result: dict[str, Any] = {"verdict": None, "weak_oracle": []}

    verdict = None
    if len(family) == 2:
        a1, a2 = family
        verdict = ka_membership(c, a1, a2, points=data["points"], max_n=data["copies"])
        result["verdict"] = cli_serializers.MembershipVerdictSerializer(verdict).data
        if verdict.member:
            for n in copies:
                oracle = weak_geometric_oracle(c, a1, a2, verdict.best_t, n, trials, rng)
                result["weak_oracle"].append({"n": n, **cli_serializers.OracleResultSerializer(oracle).data})
                if not oracle.holds:
                    violations.append(f"member at t={verdict.best_t:.6f} but the {n}-copy weak bound fails")

    feasibility = [am_feasibility_quantum(c, family, n) for n in copies]
    oracles = [sup_bound_oracle(c, family, n, trials, rng) for n in copies]
    result["am_feasibility"] = cli_serializers.AmFeasibilitySerializer(feasibility, many=True).data
    result["sup_oracle"] = [
        {"n": n, **cli_serializers.OracleResultSerializer(o).data} for n, o in zip(copies, oracles)
    ]
    for n, am, oracle in zip(copies, feasibility, oracles):
        if am.feasible and not oracle.holds:
            violations.append(f"{n}-copy arithmetic bound is feasible but a sampled test beats it")
        if verdict is not None and verdict.member and not am.feasible:
            violations.append(f"geometric member without a {n}-copy arithmetic measure")
    return CommandResult(result, violations)


def run_channels(data: dict, seed: int) -> CommandResult:
    rng = np.random.default_rng(seed)
    e, n1, n2 = data["e"], data["n1"], data["n2"]
    reports = [discrimination_equivalence_check(e, n1, n2, n, data["trials"], rng) for n in data["copies"]]
    result = {
        "trace_preserving": {"e": e.trace_preserving, "n1": n1.trace_preserving, "n2": n2.trace_preserving},
        "reports": cli_serializers.DiscriminationReportSerializer(reports, many=True).data,
    }
    violations = [
        f"{r.n}-copy strategies contradict the channel mean verdict" for r in reports if not r.consistent
    ]
    return CommandResult(result, violations)


def run_jordan(data: dict, seed: int) -> CommandResult:
    s, q = data["s"], data["q"]
    decomposition = jordan_decompose(s, q)
    residual = decomposition.residual(s, q)
    result = {
        "decomposition": cli_serializers.JordanDecompositionSerializer(decomposition).data,
        "residual": residual,
    }
    violations = []
    if residual > RECONSTRUCTION_TOL:
        violations.append(f"normal form reconstructs the pair only to {residual:.3e}")
    eps = data.get("eps")
    if eps is not None:
        reports = [eps_domination_conditions(q, s, eps), eps_orthogonality_conditions(q, s, eps)]
        result["relations"] = cli_serializers.ConditionReportSerializer(reports, many=True).data
        result["subtract_rank"] = eps_subtract(q, s, eps).rank
        result["restrict_rank"] = restrict(q, s, eps).rank
        violations += [f"equivalent forms of {r.relation} disagree" for r in reports if not r.agree]
    return CommandResult(result, violations)


def run_appendix_a(data: dict, seed: int) -> CommandResult:
    report = appendix_a_report(data["k"], data["r"], t_grid=data["t_grid"], points=data["points"])
    violations = [
        f"{link.left} {link.relation} {link.right} fails (margin {link.margin:.3e})"
        for link in report.links
        if not link.holds
    ]
    return CommandResult(cli_serializers.AppendixAReportSerializer(report).data, violations)


def run_reproduce_all(data: dict, seed: int) -> CommandResult:
    results = run_suites(seed, quick=data["quick"], names=data.get("suites"))
    violations = [f"{r.name}: {failure}" for r in results for failure in r.failures]
    return CommandResult({"suites": [r.as_dict() for r in results]}, violations)


Handler = Callable[[dict, int], CommandResult]

HANDLERS: dict[Command, tuple[type[serializers.Serializer], Handler]] = {
    Command.MEANS: (cli_serializers.MeansInputSerializer, run_means),
    Command.DIVERGENCE: (cli_serializers.DivergenceInputSerializer, run_divergence),
    Command.BOUNDS: (cli_serializers.BoundsInputSerializer, run_bounds),
    Command.MEMBERSHIP: (cli_serializers.MembershipInputSerializer, run_membership),
    Command.CHANNELS: (cli_serializers.ChannelsInputSerializer, run_channels),
    Command.JORDAN: (cli_serializers.JordanInputSerializer, run_jordan),
    Command.APPENDIX_A: (cli_serializers.AppendixAInputSerializer, run_appendix_a),
    Command.REPRODUCE_ALL: (cli_serializers.ReproduceAllInputSerializer, run_reproduce_all),
}
