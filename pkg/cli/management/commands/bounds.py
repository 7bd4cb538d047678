from __future__ import annotations

from cli.models import Command as Cmd

from ._base import ReportCommand


class Command(ReportCommand):
    help = "Pairwise and geometric-mean error-exponent bounds for composite hypotheses."
    command = Cmd.BOUNDS
    path_options = {"null": "nulls", "alt": "alts"}
    value_options = {"r": "r", "grid": "grid", "alpha_points": "alpha_points", "hull_points": "hull_points"}

    def add_inputs(self, parser):
        parser.add_argument("--null", nargs="+", required=True, metavar="FILE", help="Null density operators.")
        parser.add_argument("--alt", nargs="+", required=True, metavar="FILE", help="Alternative density operators.")
        parser.add_argument("--r", type=float, required=True, help="Rate.")
        parser.add_argument("--grid", type=int, help="Points per axis of the (s, t) mean grid.")
        parser.add_argument("--alpha-points", type=int)
        parser.add_argument("--hull-points", type=int, help="Random mixtures for the convex-hull bound.")
