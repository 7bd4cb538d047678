from __future__ import annotations

from cli.models import Command as Cmd

from ._base import ReportCommand


class Command(ReportCommand):
    help = "Strong-converse bound chain for the two-outcome commuting example."
    command = Cmd.APPENDIX_A
    value_options = {"k": "k", "r": "r", "t_grid": "t_grid", "points": "points"}

    def add_inputs(self, parser):
        parser.add_argument("--k", type=int, required=True, help="Copies of the null state.")
        parser.add_argument("--r", type=float, required=True, help="Rate, above k log(2/sqrt 3).")
        parser.add_argument("--t-grid", type=int)
        parser.add_argument("--points", type=int)
