from __future__ import annotations

import io
import json
import math
import tempfile
from pathlib import Path
from unittest import mock

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from numpy.testing import assert_allclose
from rest_framework import serializers

from channels.maps import identity_channel
from matcore.extreal import ExtReal
from means.utils import ka_mean

from .handlers import HANDLERS, CommandResult
from .models import Command, RunReport
from .runner import RunConfig, render_csv, render_json, run
from .serializers import (
    CpMapSerializer,
    ExtRealField,
    MatrixField,
    MeansInputSerializer,
    MembershipInputSerializer,
    RunConfigSerializer,
    error_pointers,
)
from .suites import run_suites


def _write(directory: Path, name: str, payload) -> str:
    path = directory / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


class MatrixFieldTests(SimpleTestCase):
    def test_complex_entries(self):
        value = MatrixField().run_validation({"re": [[1.0, 0.0], [0.0, 1.0]], "im": [[0.0, 0.5], [-0.5, 0.0]]})
        self.assertTrue(np.iscomplexobj(value))
        self.assertAlmostEqual(value[0, 1], 0.5j)
        self.assertEqual(MatrixField().to_representation(value)["im"][0][1], 0.5)

    def test_real_entries_render_without_imaginary_part(self):
        value = MatrixField().run_validation([[2.0, 0.0], [0.0, 1.0]])
        self.assertEqual(MatrixField().to_representation(value), {"re": [[2.0, 0.0], [0.0, 1.0]]})

    def test_rejections(self):
        for bad in ([[1.0, 0.0], [0.0, -1.0]], [[1.0, 2.0], [3.0]], [[1.0, 0.0]], "eye", {"re": [[1.0]], "x": 1}):
            with self.assertRaises(serializers.ValidationError, msg=bad):
                MatrixField().run_validation(bad)
        with self.assertRaises(serializers.ValidationError):
            MatrixField(kind=MatrixField.PROJECTION).run_validation([[0.5, 0.0], [0.0, 1.0]])
        rectangular = MatrixField(kind=MatrixField.PLAIN, square=False).run_validation([[1.0, 0.0, 0.0]])
        self.assertEqual(rectangular.shape, (1, 3))


class ExtRealFieldTests(SimpleTestCase):
    def test_rendering(self):
        field = ExtRealField()
        self.assertEqual(field.to_representation(ExtReal.inf()), "+inf")
        self.assertEqual(field.to_representation(-math.inf), "-inf")
        self.assertIsNone(field.to_representation(math.nan))
        self.assertEqual(field.to_representation(1.5), 1.5)

    def test_parsing(self):
        field = ExtRealField()
        self.assertEqual(field.run_validation("+inf"), math.inf)
        self.assertEqual(field.run_validation("2"), 2.0)
        for bad in ("abc", "nan", True):
            with self.assertRaises(serializers.ValidationError):
                field.run_validation(bad)


class InputSerializerTests(SimpleTestCase):
    def test_dimension_pointer(self):
        serializer = MembershipInputSerializer(data={"c": [[1.0, 0.0], [0.0, 1.0]], "family": [[[1.0, 0.0], [0.0, 1.0]], [[1.0]]]})
        self.assertFalse(serializer.is_valid())
        self.assertTrue(error_pointers(serializer.errors)[0].startswith("family[1]: "))

    def test_field_pointer(self):
        serializer = MembershipInputSerializer(data={"c": [[1.0, 0.0], [0.0, -1.0]], "family": [[[1.0]]]})
        self.assertFalse(serializer.is_valid())
        self.assertTrue(any(line.startswith("c: ") for line in error_pointers(serializer.errors)))

    def test_means_defaults_and_rules(self):
        serializer = MeansInputSerializer(data={"a": [[1.0]], "b": [[4.0]]})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data["t"], 0.5)
        self.assertEqual(serializer.validated_data["kind"], "ka")
        infinite = MeansInputSerializer(data={"a": [[1.0]], "b": [[4.0]], "kind": "G", "z": "+inf"})
        self.assertFalse(infinite.is_valid())
        self.assertIn("z", infinite.errors)
        bad_fn = MeansInputSerializer(data={"a": [[1.0]], "b": [[4.0]], "f": "cosh"})
        self.assertFalse(bad_fn.is_valid())
        self.assertIn("f", bad_fn.errors)

    def test_cp_map_from_kraus(self):
        serializer = CpMapSerializer(data={"dim_in": 2, "dim_out": 2, "kraus": [[[1.0, 0.0], [0.0, 1.0]]]})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        assert_allclose(serializer.validated_data.choi, identity_channel(2).choi)

    def test_cp_map_needs_one_representation(self):
        both = CpMapSerializer(data={"dim_in": 1, "dim_out": 1, "kraus": [[[1.0]]], "choi": [[1.0]]})
        self.assertFalse(both.is_valid())
        wrong = CpMapSerializer(data={"dim_in": 2, "dim_out": 2, "kraus": [[[1.0, 0.0, 0.0]]]})
        self.assertFalse(wrong.is_valid())
        self.assertIn("kraus[0]", wrong.errors)

    def test_run_config(self):
        serializer = RunConfigSerializer(data={"command": "appendix-a", "tol": {"psd_tol": "1e-8"}, "seed": 7})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        config = serializer.save()
        self.assertIsInstance(config, RunConfig)
        self.assertEqual(config.tol, {"psd_tol": 1e-8})
        unknown = RunConfigSerializer(data={"command": "means", "tol": {"bogus": "1"}})
        self.assertFalse(unknown.is_valid())
        self.assertIn("tol", unknown.errors)
        self.assertFalse(RunConfigSerializer(data={"command": "means", "seed": -1}).is_valid())


class RenderTests(SimpleTestCase):
    def test_csv_layout(self):
        report = {
            "schema_version": 1,
            "command": "means",
            "seed": 3,
            "status": "OK",
            "result": {"mean": {"re": [[1.0, 0.25]]}, "flag": True, "missing": None},
        }
        lines = render_csv(report).decode("utf-8").splitlines()
        self.assertEqual(lines[0], "# schema=1 command=means seed=3")
        self.assertEqual(lines[1], "path,value")
        self.assertIn("result.mean.re[0][1],0.25", lines)
        self.assertIn("result.flag,true", lines)
        self.assertIn("result.missing,", lines)

    def test_floats_round_trip_exactly(self):
        values = [0.1 + 0.2, 1 / 3, math.pi * 1e-300, 2.0**-1074, -1.7976931348623157e308]
        report = {"schema_version": 1, "command": "means", "seed": 0, "result": {"values": values}}
        self.assertEqual(json.loads(render_json(report))["result"]["values"], values)
        rows = render_csv(report).decode("utf-8").splitlines()[2:]
        self.assertEqual([float(row.split(",")[1]) for row in rows], values)


class SuiteTests(SimpleTestCase):
    CHEAP = ["ka_closed_forms", "rival_means", "classical_lp_trio", "appendix_a_chain"]

    def test_cheap_suites_pass(self):
        for result in run_suites(7, quick=True, names=self.CHEAP):
            self.assertTrue(result.passed, (result.name, result.failures))
            self.assertGreater(result.checked, 0)

    def test_streams_do_not_depend_on_selection(self):
        alone = run_suites(11, quick=True, names=["ka_closed_forms"])[0]
        together = {r.name: r for r in run_suites(11, quick=True, names=["rival_means", "ka_closed_forms"])}
        self.assertEqual(alone.as_dict(), together["ka_closed_forms"].as_dict())

    def test_rival_margins(self):
        result = run_suites(0, quick=True, names=["rival_means"])[0]
        self.assertGreater(result.metrics["ghat_margin_zinf"], 1e-4)
        self.assertAlmostEqual(result.metrics["ka_coefficient"], math.sqrt(8 / 5), places=10)


class CommandTests(TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.tmp = Path(self._tmp.name)
        self.a = _write(self.tmp, "a.json", [[1.0, 0.0], [0.0, 4.0]])
        self.b = _write(self.tmp, "b.json", [[9.0, 0.0], [0.0, 1.0]])

    def _call(self, *args):
        call_command(*args, "--out", str(self.tmp / "out"), stdout=io.StringIO(), stderr=io.StringIO())

    def _report(self, name: str) -> dict:
        return json.loads((self.tmp / "out" / name).read_text(encoding="utf-8"))

    def test_means_report(self):
        self._call("means", "--A", self.a, "--B", self.b, "--t", "0.5")
        report = self._report("means.json")
        self.assertEqual(report["status"], "OK")
        self.assertEqual(report["schema_version"], 1)
        assert_allclose(report["result"]["mean"]["re"], [[3.0, 0.0], [0.0, 2.0]], atol=1e-12)
        self.assertEqual(report["parameters"]["t"], 0.5)
        self.assertNotIn("wall_time", report)
        provenance = self._report("provenance.json")
        self.assertGreaterEqual(provenance["wall_time"], 0.0)
        self.assertEqual(set(provenance["inputs"]), {"a", "b"})

    def test_reports_are_byte_identical(self):
        out = self.tmp / "out" / "means.json"
        self._call("means", "--A", self.a, "--B", self.b, "--kind", "Ghat", "--z", "+inf", "--t", "0.3")
        first = out.read_bytes()
        self._call("means", "--A", self.a, "--B", self.b, "--kind", "Ghat", "--z", "+inf", "--t", "0.3")
        self.assertEqual(out.read_bytes(), first)
        self.assertEqual(self._report("means.json")["parameters"]["z"], "+inf")

    def test_csv_format(self):
        self._call("appendix_a", "--k", "1", "--r", "0.5", "--t-grid", "11", "--format", "csv")
        lines = (self.tmp / "out" / "appendix-a.csv").read_text(encoding="utf-8").splitlines()
        self.assertEqual(lines[0], "# schema=1 command=appendix-a seed=0")
        self.assertIn("result.holds,true", lines)

    def test_record(self):
        self._call("appendix_a", "--k", "2", "--r", "0.9", "--t-grid", "21", "--record")
        record = RunReport.objects.for_command("appendix-a").get()
        self.assertEqual(record.status, RunReport.Status.OK)
        self.assertTrue(record.payload["result"]["mixture_strict"])
        self.assertFalse(RunReport.objects.violations().exists())
        self.assertIn("appendix-a", str(record))

    def test_malformed_input_exits_one(self):
        small = _write(self.tmp, "small.json", [[1.0]])
        with self.assertRaises(CommandError) as caught:
            self._call("membership", "--C", self.a, "--A", self.a, small, "--trials", "5")
        self.assertEqual(caught.exception.returncode, 1)
        self.assertIn("family[1]", str(caught.exception))

        with self.assertRaises(CommandError) as caught:
            self._call("membership", "--C", str(self.tmp / "missing.json"), "--A", self.a, self.b)
        self.assertEqual(caught.exception.returncode, 1)
        self.assertIn("c: cannot read", str(caught.exception))

        with self.assertRaises(CommandError) as caught:
            self._call("means", "--A", self.a, "--B", self.b, "--tol", "bogus=1")
        self.assertEqual(caught.exception.returncode, 1)
        self.assertIn("tol", str(caught.exception))

    def test_numerics_error_exits_one(self):
        with self.assertRaises(CommandError) as caught:
            self._call("appendix_a", "--k", "2", "--r", "0.2")
        self.assertEqual(caught.exception.returncode, 1)
        self.assertIn("PreconditionError", str(caught.exception))

    def test_violation_exits_two_and_is_recorded(self):
        forced = (HANDLERS[Command.MEANS][0], lambda data, seed: CommandResult({"mean": None}, ["forced failure"]))
        with mock.patch.dict(HANDLERS, {Command.MEANS: forced}):
            with self.assertRaises(CommandError) as caught:
                self._call("means", "--A", self.a, "--B", self.b, "--record")
        self.assertEqual(caught.exception.returncode, 2)
        record = RunReport.objects.violations().get()
        self.assertEqual(record.violation_count, 1)
        self.assertEqual(self._report("means.json")["violations"], ["forced failure"])

    def test_cap_limits_copy_numbers(self):
        c = _write(self.tmp, "c.json", ka_mean(np.diag([1.0, 4.0]), np.diag([9.0, 1.0]), 0.3).real.tolist())
        self._call("membership", "--C", c, "--A", self.a, self.b, "--trials", "5", "--cap", "4", "--seed", "3")
        report = self._report("membership.json")
        self.assertEqual(report["numerics"]["dim_cap"], 4)
        self.assertEqual(report["seed"], 3)
        self.assertTrue(report["result"]["verdict"]["member"])
        self.assertEqual([row["n"] for row in report["result"]["am_feasibility"]], [1, 2])
        self.assertEqual(report["status"], "OK")


class RunTests(SimpleTestCase):
    def test_run_returns_outcome(self):
        with tempfile.TemporaryDirectory() as tmp:
            outcome = run(RunConfig(command="appendix-a", inputs={"k": 1, "r": 0.5, "t_grid": 11}, out=tmp))
            self.assertEqual(outcome.exit_code, 0)
            self.assertTrue(outcome.report_path.exists())
            self.assertIsNone(outcome.record)
            self.assertTrue(outcome.report["result"]["holds"])
            self.assertIsNone(outcome.report["result"]["threshold"])
