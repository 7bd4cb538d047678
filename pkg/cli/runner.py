"""
Report plumbing shared by every management command.

Reports are deterministic: identical configuration and seed give identical
bytes. Anything that varies between runs (wall time, timestamps, input
paths) goes to the ``provenance.json`` sidecar and the optional run record.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterator

import numpy as np
import scipy
from django.conf import settings
from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

from matcore.conf import use_numerics

from .handlers import HANDLERS
from .models import Command, RunReport
from .serializers import ExtRealField

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VIOLATION = 2
CSV_COLUMNS = ("path", "value")


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int = 0
    tol: dict[str, float] = field(default_factory=dict)
    cap: int | None = None
    format: str = "json"
    out: str | None = None
    record: bool = False
    inputs: dict[str, Any] = field(default_factory=dict)
    paths: dict[str, Any] = field(default_factory=dict)


@dataclass
class RunOutcome:
    report: dict[str, Any]
    report_path: Path
    provenance_path: Path
    wall_time: float
    record: RunReport | None = None

    @property
    def violations(self) -> list[str]:
        return self.report["violations"]

    @property
    def exit_code(self) -> int:
        return EXIT_VIOLATION if self.violations else EXIT_OK


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _read_json(path: str, pointer: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise serializers.ValidationError({pointer: [f"cannot read {path}: {exc.strerror}"]})
    except json.JSONDecodeError as exc:
        raise serializers.ValidationError({pointer: [f"{path} is not JSON (line {exc.lineno}: {exc.msg})"]})


def load_inputs(config: RunConfig) -> tuple[dict[str, Any], dict[str, dict[str, str]]]:
    """Merge file inputs into the scalar ones; returns data and per-file digests."""
    data = dict(config.inputs)
    digests: dict[str, dict[str, str]] = {}
    for key, value in config.paths.items():
        if isinstance(value, (list, tuple)):
            pointers = [(f"{key}[{i}]", path) for i, path in enumerate(value)]
            data[key] = [_read_json(path, pointer) for pointer, path in pointers]
        else:
            pointers = [(key, value)]
            data[key] = _read_json(value, key)
        for pointer, path in pointers:
            digests[pointer] = {"path": str(path), "sha256": _sha256_file(Path(path))}
    return data, digests


def _parameters(validated: dict[str, Any]) -> dict[str, Any]:
    """The scalar part of the validated input: grids, weights, copy numbers."""
    scalar = (bool, int, float, str)
    params = {}
    for key, value in validated.items():
        if isinstance(value, list) and all(isinstance(v, scalar) for v in value):
            params[key] = [ExtRealField().to_representation(v) if isinstance(v, float) else v for v in value]
        elif isinstance(value, float):
            params[key] = ExtRealField().to_representation(value)
        elif isinstance(value, scalar):
            params[key] = value
    return dict(sorted(params.items()))


def render_json(report: dict[str, Any]) -> bytes:
    return JSONRenderer().render(report, renderer_context={"indent": 2}) + b"\n"


def _leaves(value: Any, path: str) -> Iterator[tuple[str, str]]:
    if isinstance(value, dict):
        for key, item in value.items():
            yield from _leaves(item, f"{path}.{key}" if path else str(key))
    elif isinstance(value, (list, tuple)):
        for index, item in enumerate(value):
            yield from _leaves(item, f"{path}[{index}]")
    elif value is None:
        yield path, ""
    elif isinstance(value, bool):
        yield path, "true" if value else "false"
    elif isinstance(value, float):
        yield path, repr(value)
    else:
        yield path, str(value)


def render_csv(report: dict[str, Any]) -> bytes:
    """Two fixed columns, one row per leaf of the report."""
    buffer = io.StringIO()
    buffer.write(
        f"# schema={report['schema_version']} command={report['command']} seed={report['seed']}\n"
    )
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    body = {key: value for key, value in report.items() if key not in ("schema_version", "command", "seed")}
    writer.writerows(_leaves(body, ""))
    return buffer.getvalue().encode("utf-8")


def _write(config: RunConfig, report: dict[str, Any], provenance: dict[str, Any]) -> tuple[Path, Path]:
    out_dir = Path(config.out) if config.out else Path(settings.REPORT_DIR)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / f"{report['command']}.{config.format}"
    report_path.write_bytes(render_csv(report) if config.format == "csv" else render_json(report))
    provenance_path = out_dir / "provenance.json"
    provenance["report_sha256"] = _sha256_file(report_path)
    provenance_path.write_bytes(render_json(provenance))
    return report_path, provenance_path


def run(config: RunConfig) -> RunOutcome:
    """Validate, compute, and write the report and its provenance sidecar.

    Raises ``serializers.ValidationError`` for malformed input and lets
    ``NumericsError`` from the computation propagate.
    """
    command = Command(config.command)
    input_serializer, handler = HANDLERS[command]
    started_at = datetime.now(timezone.utc)
    with use_numerics(dim_cap=config.cap, **config.tol) as active:
        data, digests = load_inputs(config)
        serializer = input_serializer(data=data)
        serializer.is_valid(raise_exception=True)
        logger.info(f"{command.value}: running with seed {config.seed}")
        clock = time.perf_counter()
        result = handler(serializer.validated_data, config.seed)
        wall_time = time.perf_counter() - clock

    report = {
        "schema_version": settings.REPORT_SCHEMA_VERSION,
        "command": command.value,
        "seed": config.seed,
        "status": RunReport.Status.VIOLATION if result.violations else RunReport.Status.OK,
        "numerics": asdict(active),
        "parameters": _parameters(serializer.validated_data),
        "result": result.result,
        "violations": result.violations,
    }
    # Normalize to plain JSON types once, so files and records agree.
    report = json.loads(render_json(report))
    provenance = {
        "schema_version": settings.REPORT_SCHEMA_VERSION,
        "command": command.value,
        "seed": config.seed,
        "started_at": started_at.isoformat(),
        "wall_time": wall_time,
        "inputs": digests,
        "versions": {"numpy": np.__version__, "scipy": scipy.__version__},
    }
    report_path, provenance_path = _write(config, report, provenance)

    record = None
    if config.record:
        record = RunReport.objects.create(
            command=command,
            seed=config.seed,
            status=report["status"],
            schema_version=report["schema_version"],
            payload=report,
            wall_time=wall_time,
        )
    logger.info(f"{command.value}: {len(result.violations)} violations, report at {report_path}")
    return RunOutcome(report, report_path, provenance_path, wall_time, record)
