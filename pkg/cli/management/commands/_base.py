from __future__ import annotations

from typing import Any

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from cli.models import Command
from cli.runner import EXIT_INVALID, EXIT_VIOLATION, run
from cli.serializers import RunConfigSerializer, error_pointers
from matcore.exceptions import NumericsError


class ReportCommand(BaseCommand):
    """Shared flags and exit-code handling; subclasses declare their inputs.

    ``path_options`` maps option names to input fields read from JSON files,
    ``value_options`` maps option names to scalar input fields.
    """

    command: Command
    path_options: dict[str, str] = {}
    value_options: dict[str, str] = {}

    def add_arguments(self, parser):
        parser.add_argument("--seed", type=int, default=0, help="Seed for every randomized oracle.")
        parser.add_argument(
            "--tol",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="Override a tolerance, e.g. --tol psd_tol=1e-9. Repeatable.",
        )
        parser.add_argument("--cap", type=int, help="Dimension cap for tensor powers.")
        parser.add_argument("--format", choices=("json", "csv"), default="json")
        parser.add_argument("--out", metavar="DIR", help="Report directory (default: OPMEAN_REPORT_DIR).")
        parser.add_argument("--record", action="store_true", help="Also store the report in the database.")
        self.add_inputs(parser)

    def add_inputs(self, parser) -> None:
        pass

    @staticmethod
    def _parse_tol(entries: list[str]) -> dict[str, str]:
        parsed = {}
        for entry in entries:
            key, sep, value = entry.partition("=")
            if not sep or not key.strip():
                raise CommandError(f"tol: expected KEY=VALUE, got {entry!r}", returncode=EXIT_INVALID)
            parsed[key.strip().lower()] = value.strip()
        return parsed

    def _collect(self, options: dict[str, Any], mapping: dict[str, str]) -> dict[str, Any]:
        return {field: options[name] for name, field in mapping.items() if options.get(name) is not None}

    def handle(self, *args, **options):
        raw = {
            "command": self.command,
            "seed": options["seed"],
            "tol": self._parse_tol(options["tol"]),
            "cap": options["cap"],
            "format": options["format"],
            "out": options["out"],
            "record": options["record"],
            "inputs": self._collect(options, self.value_options),
            "paths": self._collect(options, self.path_options),
        }
        try:
            config_serializer = RunConfigSerializer(data=raw)
            config_serializer.is_valid(raise_exception=True)
            outcome = run(config_serializer.save())
        except serializers.ValidationError as exc:
            raise CommandError("\n".join(error_pointers(exc.detail)), returncode=EXIT_INVALID)
        except NumericsError as exc:
            details = ", ".join(f"{key}={value}" for key, value in sorted(exc.details.items()))
            message = f"{type(exc).__name__}: {exc}" + (f" ({details})" if details else "")
            raise CommandError(message, returncode=EXIT_INVALID)

        self.stdout.write(f"report: {outcome.report_path}")
        self.stdout.write(f"provenance: {outcome.provenance_path}")
        if outcome.violations:
            for violation in outcome.violations:
                self.stderr.write(f"violation: {violation}")
            raise CommandError(
                f"{len(outcome.violations)} property violation(s) certified.", returncode=EXIT_VIOLATION
            )
        self.stdout.write(self.style.SUCCESS(f"{self.command.value}: all checks passed"))
