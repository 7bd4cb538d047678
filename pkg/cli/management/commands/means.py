from __future__ import annotations

from cli.models import Command as Cmd

from ._base import ReportCommand


class Command(ReportCommand):
    help = "Kubo-Ando, rival or perspective mean of two PSD matrices."
    command = Cmd.MEANS
    path_options = {"A": "a", "B": "b"}
    value_options = {"t": "t", "kind": "kind", "z": "z", "f": "f"}

    def add_inputs(self, parser):
        parser.add_argument("--A", required=True, metavar="FILE", help="Matrix JSON for the weight-t argument.")
        parser.add_argument("--B", required=True, metavar="FILE")
        parser.add_argument("--t", type=float)
        parser.add_argument("--kind", help="ka (default), G, Gtilde, Ghat or LogEuclid.")
        parser.add_argument("--z", help="Power parameter of the rival means; '+inf' allowed for Ghat.")
        parser.add_argument("--f", help="Perspective of a preset function: pow:t, log, xlogx or sqrt.")
