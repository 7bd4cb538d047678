from __future__ import annotations

from cli.models import Command as Cmd

from ._base import ReportCommand


class Command(ReportCommand):
    help = "Jordan normal form of two projections and their approximate relations."
    command = Cmd.JORDAN
    path_options = {"S": "s", "Q": "q"}
    value_options = {"eps": "eps"}

    def add_inputs(self, parser):
        parser.add_argument("--S", required=True, metavar="FILE")
        parser.add_argument("--Q", required=True, metavar="FILE")
        parser.add_argument("--eps", type=float, help="Evaluate eps-orthogonality and eps-domination.")
