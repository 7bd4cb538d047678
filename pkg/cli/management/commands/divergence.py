from __future__ import annotations

from cli.models import Command as Cmd

from ._base import ReportCommand


class Command(ReportCommand):
    help = "Rényi divergences, D_max and Hoeffding quantities of a pair."
    command = Cmd.DIVERGENCE
    path_options = {"rho": "rho", "sigma": "sigma"}
    value_options = {"alpha": "alphas", "rate": "rates", "points": "points"}

    def add_inputs(self, parser):
        parser.add_argument("--rho", required=True, metavar="FILE")
        parser.add_argument("--sigma", required=True, metavar="FILE")
        parser.add_argument("--alpha", nargs="+", type=float, help="Orders; Petz below 1, sandwiched above.")
        parser.add_argument("--rate", nargs="*", type=float, help="Rates r for H_r and H*_r.")
        parser.add_argument("--points", type=int, help="Grid size of the Legendre suprema.")
